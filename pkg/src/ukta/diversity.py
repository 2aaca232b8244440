"""Lexical diversity measures over token sequences.

Tokens are type identifiers (interned lemma strings); every measure here is
invariant under bijective relabeling of the types.  Callers choose what a
token is (all lemmas, or the lemma subsequence of one POS class) and these
functions only see the resulting sequence.

Measures:

* NDW, TTR = t/w, RTTR = t/sqrt(w), CTTR = t/sqrt(2w), for t unique types
  among w tokens.
* MSTTR: mean TTR over non-overlapping length-n segments (trailing partial
  segment dropped so every averaged segment has equal length).
* MATTR: mean TTR over the N-n+1 overlapping windows of length n; for
  N < n the whole text is the single window, i.e. plain TTR.
* MTLD: mean factor length, where a factor ends when the running TTR of
  the current segment drops to the threshold.  The default variant adds the
  standard partial-factor remainder (1 - TTR_rem) / (1 - threshold) and
  averages a forward and a backward scan; the "literal" variant counts
  complete factors only.
* HD-D: mean over types of the probability that the type appears in a
  size-S hypergeometric sample, scaled by 1/S.
* vocd-D: the D minimizing sum over n in [n_min, n_max] of
  (mean_TTR_n - D/(D+n))^2, where mean_TTR_n is the empirical mean TTR of
  `trials` random subsamples of size n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UndefinedFeature


@dataclass(frozen=True)
class DiversityParams:
    """Tuning constants for the windowed and sampled measures."""

    msttr_window: int = 25
    mattr_window: int = 25
    mtld_threshold: float = 0.72
    hdd_sample: int = 42
    vocd_min_n: int = 35
    vocd_max_n: int = 50
    vocd_trials: int = 100
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.msttr_window < 1 or self.mattr_window < 1:
            raise ValueError("window sizes must be >= 1")
        if not 0.0 < self.mtld_threshold < 1.0:
            raise ValueError("mtld_threshold must lie in (0, 1)")
        if self.hdd_sample < 1:
            raise ValueError("hdd_sample must be >= 1")
        if self.vocd_trials < 1:
            raise ValueError("vocd_trials must be >= 1")
        if not 1 <= self.vocd_min_n <= self.vocd_max_n:
            raise ValueError("vocd subsample range is invalid")


DEFAULT_PARAMS = DiversityParams()


def _require_tokens(tokens: Sequence[str], metric: str) -> int:
    n = len(tokens)
    if n == 0:
        raise UndefinedFeature(metric, "empty token sequence")
    return n


def ndw(tokens: Sequence[str]) -> int:
    """Number of different words (distinct types)."""
    _require_tokens(tokens, "NDW")
    return len(set(tokens))


def ttr(tokens: Sequence[str]) -> float:
    n = _require_tokens(tokens, "TTR")
    return len(set(tokens)) / n


def rttr(tokens: Sequence[str]) -> float:
    n = _require_tokens(tokens, "RTTR")
    return len(set(tokens)) / math.sqrt(n)


def cttr(tokens: Sequence[str]) -> float:
    n = _require_tokens(tokens, "CTTR")
    return len(set(tokens)) / math.sqrt(2 * n)


def msttr(tokens: Sequence[str], window: int = DEFAULT_PARAMS.msttr_window) -> float:
    n = len(tokens)
    if n < window:
        raise UndefinedFeature("MSTTR", f"{n} tokens < window {window}")
    k = n // window
    total = 0.0
    for i in range(k):
        seg = tokens[i * window : (i + 1) * window]
        total += len(set(seg)) / window
    return total / k


def mattr(tokens: Sequence[str], window: int = DEFAULT_PARAMS.mattr_window) -> float:
    n = _require_tokens(tokens, "MATTR")
    if n < window:
        return ttr(tokens)
    counts: dict[str, int] = {}
    for tok in tokens[:window]:
        counts[tok] = counts.get(tok, 0) + 1
    type_total = len(counts)
    for i in range(1, n - window + 1):
        out = tokens[i - 1]
        counts[out] -= 1
        if counts[out] == 0:
            del counts[out]
        new = tokens[i + window - 1]
        counts[new] = counts.get(new, 0) + 1
        type_total += len(counts)
    return type_total / ((n - window + 1) * window)


def _mtld_scan(tokens: Sequence[str], threshold: float, partial: bool) -> float:
    """Factor count of one directional scan (fractional when partial=True)."""
    factors = 0.0
    seen: set[str] = set()
    count = 0
    running = 1.0
    for tok in tokens:
        count += 1
        seen.add(tok)
        running = len(seen) / count
        if running <= threshold:
            factors += 1.0
            seen.clear()
            count = 0
            running = 1.0
    if partial and count > 0:
        factors += (1.0 - running) / (1.0 - threshold)
    return factors


def mtld(
    tokens: Sequence[str],
    threshold: float = DEFAULT_PARAMS.mtld_threshold,
    variant: str = "bidirectional",
) -> float:
    """Mean length of token runs whose running TTR stays above the threshold.

    variant="bidirectional" (default): partial-factor remainder plus
    forward/backward averaging.  variant="literal": complete forward
    factors only, undefined when no factor completes.
    """
    n = _require_tokens(tokens, "MTLD")
    if variant == "literal":
        factors = _mtld_scan(tokens, threshold, partial=False)
        if factors == 0.0:
            raise UndefinedFeature("MTLD", "running TTR never reached the threshold")
        return n / factors
    if variant != "bidirectional":
        raise ValueError(f"unknown MTLD variant {variant!r}")
    fwd = _mtld_scan(tokens, threshold, partial=True)
    bwd = _mtld_scan(list(reversed(tokens)), threshold, partial=True)
    if fwd == 0.0 or bwd == 0.0:
        raise UndefinedFeature("MTLD", "no factor (full or partial) accrued")
    return 0.5 * (n / fwd + n / bwd)


def _log_choose(a: int, b: int) -> float:
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def hdd(tokens: Sequence[str], sample_size: int = DEFAULT_PARAMS.hdd_sample) -> float:
    """Expected per-type inclusion probability for a size-S random sample.

    Computed in log space: P(type in sample) = 1 - C(N-f, S)/C(N, S),
    with C(a, b) = 0 whenever a < b.
    """
    n = len(tokens)
    if n < sample_size:
        raise UndefinedFeature("HDD", f"{n} tokens < sample size {sample_size}")
    freqs: dict[str, int] = {}
    for tok in tokens:
        freqs[tok] = freqs.get(tok, 0) + 1
    log_total = _log_choose(n, sample_size)
    acc = 0.0
    for f in freqs.values():
        if n - f < sample_size:
            acc += 1.0
        else:
            acc += 1.0 - math.exp(_log_choose(n - f, sample_size) - log_total)
    return acc / sample_size


def _subsample_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    # counter-based generator keyed per (seed, n, trial): reproducible and
    # order-independent, so per-size trials may run in parallel
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64((n << 32) | trial)])
    return np.random.Generator(np.random.Philox(key=key))


def _mean_subsample_ttr(tokens: Sequence[str], n: int, trials: int, seed: int) -> float:
    total = len(tokens)
    arr = np.array(tokens, dtype=object)
    acc = 0.0
    for trial in range(trials):
        rng = _subsample_rng(seed, n, trial)
        idx = rng.permutation(total)[:n]
        acc += len(set(arr[idx])) / n
    return acc / trials


def fit_vocd_curve(mean_ttrs: dict[int, float]) -> float:
    """D minimizing the squared gap to D/(D+n), by coarse grid then refinement."""
    ns = np.array(sorted(mean_ttrs), dtype=np.float64)
    ys = np.array([mean_ttrs[int(n)] for n in ns], dtype=np.float64)

    grid = np.arange(0.01, 200.0 + 1e-9, 0.01)
    sse = ((ys[None, :] - grid[:, None] / (grid[:, None] + ns[None, :])) ** 2).sum(axis=1)
    best = grid[int(np.argmin(sse))]

    def objective(d: float) -> float:
        return float(((ys - d / (d + ns)) ** 2).sum())

    lo, hi = max(best - 0.01, 1e-9), best + 0.01
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = objective(c), objective(d)
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = objective(d)
    return (a + b) / 2.0


def vocd(tokens: Sequence[str], params: DiversityParams = DEFAULT_PARAMS) -> float:
    """Best-fit D of the TTR-vs-sample-size curve, deterministic per seed."""
    n_total = len(tokens)
    if n_total < params.vocd_max_n:
        raise UndefinedFeature(
            "VOCDD", f"{n_total} tokens < max subsample size {params.vocd_max_n}"
        )
    mean_ttrs = {
        n: _mean_subsample_ttr(tokens, n, params.vocd_trials, params.rng_seed)
        for n in range(params.vocd_min_n, params.vocd_max_n + 1)
    }
    return fit_vocd_curve(mean_ttrs)
