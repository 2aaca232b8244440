import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from ukta.diversity import (
    DiversityParams,
    cttr,
    fit_vocd_curve,
    hdd,
    mattr,
    msttr,
    mtld,
    ndw,
    rttr,
    ttr,
    vocd,
)
from ukta.errors import UndefinedFeature

from .strategies import token_lists


# --- independent oracles -----------------------------------------------------


def msttr_oracle(tokens, window):
    segs = [tokens[i : i + window] for i in range(0, len(tokens), window)]
    segs = [s for s in segs if len(s) == window]
    return sum(len(set(s)) / window for s in segs) / len(segs)


def mattr_oracle(tokens, window):
    if len(tokens) < window:
        return len(set(tokens)) / len(tokens)
    windows = [tokens[i : i + window] for i in range(len(tokens) - window + 1)]
    return sum(len(set(w)) / window for w in windows) / len(windows)


def hdd_oracle(tokens, sample_size):
    # exhaustive enumeration of all C(N, S) samples
    n = len(tokens)
    samples = list(itertools.combinations(range(n), sample_size))
    acc = 0.0
    for typ in set(tokens):
        occ = {i for i, t in enumerate(tokens) if t == typ}
        hit = sum(1 for s in samples if occ.intersection(s))
        acc += hit / len(samples)
    return acc / sample_size


def vocd_grid_oracle(mean_ttrs):
    best_d, best_sse = None, math.inf
    d = 0.01
    while d <= 200.0 + 1e-9:
        sse = sum((y - d / (d + n)) ** 2 for n, y in mean_ttrs.items())
        if sse < best_sse:
            best_d, best_sse = d, sse
        d = round(d + 0.01, 2)
    return best_d


# --- TTR family ---------------------------------------------------------------


class TestTtrFamily:
    def test_golden_values_correct_analysis(self, fixture_correct):
        tokens = [m.lemma for m in fixture_correct.morphemes()]
        assert ndw(tokens) == 10
        assert ttr(tokens) == pytest.approx(10 / 11, abs=1e-12)
        assert rttr(tokens) == pytest.approx(10 / math.sqrt(11), abs=1e-12)
        assert cttr(tokens) == pytest.approx(10 / math.sqrt(22), abs=1e-12)

    def test_golden_values_mistagged_analysis(self, fixture_mistagged):
        tokens = [m.lemma for m in fixture_mistagged.morphemes()]
        assert ndw(tokens) == 9
        assert ttr(tokens) == pytest.approx(9 / 11, abs=1e-12)
        assert cttr(tokens) == pytest.approx(9 / math.sqrt(22), abs=1e-12)

    def test_all_identical(self):
        tokens = ["a"] * 5
        assert ndw(tokens) == 1
        assert ttr(tokens) == pytest.approx(0.2)
        assert rttr(tokens) == pytest.approx(1 / math.sqrt(5))

    def test_empty_is_undefined(self):
        for fn in (ndw, ttr, rttr, cttr):
            with pytest.raises(UndefinedFeature):
                fn([])

    @settings(max_examples=100)
    @given(token_lists())
    def test_algebraic_identities(self, tokens):
        n = len(tokens)
        assert abs(rttr(tokens) - ttr(tokens) * math.sqrt(n)) < 1e-12
        assert abs(cttr(tokens) - rttr(tokens) / math.sqrt(2)) < 1e-12
        assert 0 < ttr(tokens) <= 1


# --- windowed measures ----------------------------------------------------------


class TestMsttr:
    def test_hand_enumerable(self):
        assert msttr(["a", "a", "b", "b"], 2) == pytest.approx(0.5)

    def test_all_unique(self):
        assert msttr(list("abcdefgh"), 4) == pytest.approx(1.0)

    def test_short_text_undefined(self):
        with pytest.raises(UndefinedFeature):
            msttr(["a", "b"], 3)

    @settings(max_examples=150)
    @given(token_lists(min_size=2, max_size=30), st.integers(1, 10))
    def test_matches_segment_scan(self, tokens, window):
        if len(tokens) < window:
            return
        assert msttr(tokens, window) == pytest.approx(msttr_oracle(tokens, window), abs=1e-12)


class TestMattr:
    def test_single_window_degeneracy(self):
        tokens = ["a", "b", "a"]
        assert mattr(tokens, 10) == pytest.approx(ttr(tokens))

    def test_window_enumeration(self):
        assert mattr(["a", "b", "a", "b"], 2) == pytest.approx(1.0)

    def test_window_one(self):
        assert mattr(["a", "a", "b"], 1) == pytest.approx(1.0)

    @settings(max_examples=150)
    @given(token_lists(max_size=30), st.integers(1, 12))
    def test_matches_window_scan(self, tokens, window):
        assert mattr(tokens, window) == pytest.approx(mattr_oracle(tokens, window), abs=1e-12)


class TestMtld:
    def test_repeated_pair_factors(self):
        # running TTR drops to 0.5 <= 0.72 at every second token
        assert mtld(["a", "a", "a", "a"], 0.72) == pytest.approx(2.0)

    def test_all_unique_undefined(self):
        with pytest.raises(UndefinedFeature):
            mtld(list("abcdef"), 0.72)

    def test_fixture_partial_factor(self, fixture_correct):
        tokens = [m.lemma for m in fixture_correct.morphemes()]
        # scripted scan: the running TTR never reaches 0.72 in 11 tokens,
        # so each direction contributes only the partial factor
        partial = (1 - 10 / 11) / (1 - 0.72)
        assert mtld(tokens, 0.72) == pytest.approx(11 / partial)

    def test_literal_variant(self):
        tokens = ["a", "a", "a", "a", "b"]
        # forward factors complete at positions 2 and 4; remainder ignored
        assert mtld(tokens, 0.72, variant="literal") == pytest.approx(5 / 2)
        with pytest.raises(UndefinedFeature):
            mtld(list("abc"), 0.72, variant="literal")

    def test_monotone_repetition(self):
        base = [f"w{i}" for i in range(10)]
        doubled = base + base
        fresh = [f"u{i}" for i in range(19)] + ["u0"]
        assert mtld(doubled, 0.72) <= mtld(fresh, 0.72)


# --- sampled measures -----------------------------------------------------------


class TestHdd:
    def test_all_identical(self):
        # single type always present in any sample: HDD = 1/S
        assert hdd(["a"] * 10, 4) == pytest.approx(1 / 4)

    def test_exhaustive_small_case(self):
        tokens = ["a", "a", "b", "c"]
        assert hdd(tokens, 2) == pytest.approx(hdd_oracle(tokens, 2), abs=1e-12)

    def test_short_text_undefined(self):
        with pytest.raises(UndefinedFeature):
            hdd(["a", "b"], 3)

    @settings(max_examples=80, deadline=None)
    @given(token_lists(min_size=2, max_size=12, alphabet_size=4), st.integers(1, 6))
    def test_matches_exhaustive_enumeration(self, tokens, sample_size):
        if len(tokens) < sample_size:
            return
        assert hdd(tokens, sample_size) == pytest.approx(
            hdd_oracle(tokens, sample_size), abs=1e-9
        )

    @settings(max_examples=60)
    @given(token_lists(min_size=4, max_size=30), st.integers(1, 4))
    def test_bounds(self, tokens, sample_size):
        value = hdd(tokens, sample_size)
        assert 0 < value <= len(set(tokens)) / sample_size + 1e-12


class TestVocd:
    def test_all_identical_matches_grid_oracle(self):
        tokens = ["a"] * 60
        params = DiversityParams(rng_seed=7)
        # single type: every subsample TTR is exactly 1/n
        mean_ttrs = {n: 1 / n for n in range(35, 51)}
        expected = vocd_grid_oracle(mean_ttrs)
        assert abs(vocd(tokens, params) - expected) <= 0.01

    def test_seed_determinism(self):
        rng = np.random.default_rng(3)
        tokens = [f"t{i}" for i in rng.integers(0, 30, size=80)]
        params = DiversityParams(rng_seed=123)
        assert vocd(tokens, params) == vocd(tokens, params)

    def test_more_diverse_scores_higher(self):
        low = [f"t{i % 5}" for i in range(80)]
        high = [f"t{i % 40}" for i in range(80)]
        params = DiversityParams(rng_seed=0)
        assert vocd(high, params) > vocd(low, params)

    def test_short_text_undefined(self):
        with pytest.raises(UndefinedFeature):
            vocd(["a"] * 40, DiversityParams())

    def test_curve_fit_matches_grid(self):
        mean_ttrs = {n: 0.9 * 50 / (50 + n) + 0.05 for n in range(35, 51)}
        fitted = fit_vocd_curve(mean_ttrs)
        assert abs(fitted - vocd_grid_oracle(mean_ttrs)) <= 0.01


# --- shared properties -----------------------------------------------------------


class TestRelabelingInvariance:
    @settings(max_examples=60, deadline=None)
    @given(token_lists(min_size=4, max_size=30))
    def test_bijective_renaming(self, tokens):
        mapping = {t: f"renamed-{i}" for i, t in enumerate(dict.fromkeys(tokens))}
        renamed = [mapping[t] for t in tokens]
        assert ttr(tokens) == pytest.approx(ttr(renamed))
        assert mattr(tokens, 3) == pytest.approx(mattr(renamed, 3))
        if len(tokens) >= 3:
            assert msttr(tokens, 3) == pytest.approx(msttr(renamed, 3))
        assert hdd(tokens, 3) == pytest.approx(hdd(renamed, 3))
        try:
            m1 = mtld(tokens, 0.72)
        except UndefinedFeature:
            with pytest.raises(UndefinedFeature):
                mtld(renamed, 0.72)
        else:
            assert m1 == pytest.approx(mtld(renamed, 0.72))
