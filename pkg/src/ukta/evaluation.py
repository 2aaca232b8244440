"""Metrics, dataset splitting, synthetic corpora and the ablation harness.

Quadratic weighted kappa follows the standard Cohen construction: observed
counts O, expected counts E as the outer product of the two raters'
marginals divided by n, and weights w_ij = (i - j)^2 / (K - 1)^2.  The
normalization of w cancels in the ratio, so the unnormalized form gives
identical values.

The synthetic generator is a desk-scale stand-in for a real labeled
corpus: essays are assembled from per-POS lemma pools at planted levels of
diversity, length, cohesion and structure, and every rubric label is a
banded function of features *measured on the generated essay*, so the
feature-to-score link is learnable by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .cohesion import adjacent_overlap
from .diversity import rttr
from .errors import LengthMismatch, UndefinedFeature
from .features import count_class, length_stats
from .tagclasses import class_lemmas
from .textmodel import (
    Essay,
    Morpheme,
    Paragraph,
    RUBRIC_NAMES,
    RubricScores,
    Sentence,
    Wordpiece,
)

# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def accuracy(pred: Sequence[int], gold: Sequence[int]) -> float:
    if len(pred) != len(gold):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(gold)} labels")
    if not pred:
        raise LengthMismatch("empty rating lists")
    return sum(1 for p, g in zip(pred, gold) if p == g) / len(pred)


@dataclass(frozen=True)
class ContingencyTable:
    observed: np.ndarray  # K x K counts, [pred, gold]
    expected: np.ndarray  # outer(pred marginal, gold marginal) / n
    weights: np.ndarray  # (i - j)^2 / (K - 1)^2
    degenerate: bool  # both raters constant and identical

    @classmethod
    def from_ratings(
        cls, pred: Sequence[int], gold: Sequence[int], num_classes: int, min_rating: int = 0
    ) -> "ContingencyTable":
        if len(pred) != len(gold):
            raise LengthMismatch(f"{len(pred)} predictions vs {len(gold)} labels")
        if not pred:
            raise LengthMismatch("empty rating lists")
        k = num_classes
        observed = np.zeros((k, k))
        for p, g in zip(pred, gold):
            pi, gi = p - min_rating, g - min_rating
            if not (0 <= pi < k and 0 <= gi < k):
                raise ValueError(f"rating pair ({p}, {g}) outside class range")
            observed[pi, gi] += 1
        total = observed.sum()
        expected = np.outer(observed.sum(axis=1), observed.sum(axis=0)) / total
        if k > 1:
            grid = np.arange(k)
            weights = (grid[:, None] - grid[None, :]) ** 2 / (k - 1) ** 2
        else:
            weights = np.zeros((1, 1))
        degenerate = float((weights * expected).sum()) == 0.0
        return cls(observed=observed, expected=expected, weights=weights, degenerate=degenerate)

    def qwk(self) -> float:
        num = float((self.weights * self.observed).sum())
        if num == 0.0:
            return 1.0
        return 1.0 - num / float((self.weights * self.expected).sum())


def qwk(
    pred: Sequence[int], gold: Sequence[int], num_classes: int | None = None, min_rating: int = 0
) -> float:
    """Quadratic weighted kappa; 1.0 on perfect agreement, range (-inf, 1].

    When num_classes is omitted the class range is inferred from the data.
    Degenerate marginals (both raters constant and equal) define QWK = 1.0.
    """
    if num_classes is None:
        lo = min(min(pred), min(gold))
        num_classes = max(max(pred), max(gold)) - lo + 1
        min_rating = lo
    return ContingencyTable.from_ratings(pred, gold, num_classes, min_rating).qwk()


@dataclass(frozen=True)
class RubricEvalReport:
    rows: tuple[dict, ...]  # one {"rubric", "accuracy", "qwk"} per rubric
    macro_accuracy: float
    macro_qwk: float

    def to_dict(self) -> dict:
        return {
            "rubrics": list(self.rows),
            "average": {"accuracy": self.macro_accuracy, "qwk": self.macro_qwk},
        }

    def to_text(self) -> str:
        width = max(len(r["rubric"]) for r in self.rows)
        lines = [f"{'Rubric':<{width}}  Accuracy     QWK"]
        for row in self.rows:
            lines.append(
                f"{row['rubric']:<{width}}  {row['accuracy']:8.3f}  {row['qwk']:8.3f}"
            )
        lines.append(
            f"{'Average':<{width}}  {self.macro_accuracy:8.3f}  {self.macro_qwk:8.3f}"
        )
        return "\n".join(lines) + "\n"


def evaluate_rubrics(
    predicted: Sequence[RubricScores], gold: Sequence[RubricScores]
) -> RubricEvalReport:
    """Per-rubric accuracy and QWK over paired score sets, plus macro averages."""
    if len(predicted) != len(gold):
        raise LengthMismatch(f"{len(predicted)} predictions vs {len(gold)} labels")
    rows = []
    for r, name in enumerate(RUBRIC_NAMES):
        p = [scores.scores[r] for scores in predicted]
        g = [scores.scores[r] for scores in gold]
        rows.append(
            {"rubric": name, "accuracy": accuracy(p, g), "qwk": qwk(p, g, num_classes=4)}
        )
    return RubricEvalReport(
        rows=tuple(rows),
        macro_accuracy=float(np.mean([r["accuracy"] for r in rows])),
        macro_qwk=float(np.mean([r["qwk"] for r in rows])),
    )


# ---------------------------------------------------------------------------
# Synthetic corpus
# ---------------------------------------------------------------------------

_SYLLABLE_BASE = 0xAC00
_PRONOUNS = ("나", "너", "우리", "그")
_SUBJECT_JOSA = ("는", "가", "도")
_OBJECT_JOSA = ("를", "을")
_FINAL_ENDINGS = ("다", "요", "네", "지")
_CONNECTIVES = ("그리고", "그래서", "하지만")


def _make_pool(rng: np.random.Generator, size: int, syllables: int = 2) -> list[str]:
    pool = set()
    while len(pool) < size:
        chars = rng.integers(0, 11172, size=syllables)
        pool.add("".join(chr(_SYLLABLE_BASE + int(c)) for c in chars))
    return sorted(pool)


@dataclass(frozen=True)
class SynthConfig:
    n_essays: int = 100
    topics: tuple[str, ...] = ("t0", "t1", "t2", "t3", "t4")
    noun_pool: int = 60
    verb_pool: int = 24
    adverb_pool: int = 12
    # nouns/verbs drawn from the first k pool entries, per diversity level
    noun_levels: tuple[int, ...] = (4, 14, 45)
    verb_levels: tuple[int, ...] = (3, 8, 20)
    sentence_levels: tuple[tuple[int, int], ...] = ((3, 4), (6, 8), (10, 12))
    reuse_probs: tuple[float, ...] = (0.05, 0.45, 0.85)


@dataclass(frozen=True)
class SyntheticCorpus:
    essays: tuple[Essay, ...]
    thresholds: Mapping[str, tuple[float, float]]
    config: SynthConfig
    seed: int


def _band(value: float, cuts: tuple[float, float]) -> int:
    if value <= cuts[0]:
        return 1
    if value <= cuts[1]:
        return 2
    return 3


def _measure_drivers(essay: Essay) -> dict[str, float]:
    stats = length_stats(essay)
    content = class_lemmas(essay, "CL")
    function = class_lemmas(essay, "FL")
    nouns = [m.lemma for m in essay.morphemes() if m.tag == "NNG"]
    per_sent = [sum(1 for _ in s.morphemes()) for s in essay.sentences()]
    try:
        overlap = adjacent_overlap(essay, "sentence", "CL", "count").normed
    except UndefinedFeature:
        overlap = 0.0
    top_noun_share = 0.0
    if nouns:
        counts: dict[str, int] = {}
        for lemma in nouns:
            counts[lemma] = counts.get(lemma, 0) + 1
        top_noun_share = max(counts.values()) / len(content)
    hapax = 0.0
    if content:
        counts = {}
        for lemma in content:
            counts[lemma] = counts.get(lemma, 0) + 1
        hapax = sum(1 for c in counts.values() if c == 1) / len(counts)
    return {
        "Grammar": rttr(function) if function else 0.0,
        "Vocabulary": rttr([m.lemma for m in essay.morphemes()]),
        "Sentence Expression": stats.morphemes_per_sentence_mean,
        "Inter-paragraph Structure": float(stats.total_paragraphs),
        "In-paragraph Structure": overlap,
        "Structure Consistency": -float(np.std(per_sent)),
        "Length": float(stats.total_sentences),
        "Topic Clarity": top_noun_share,
        "Originality": hapax,
        "Narrative": count_class(essay, "V") / max(len(content), 1),
    }


def _build_essay(essay_id: str, rng: np.random.Generator, cfg: SynthConfig, pools) -> Essay:
    nouns, verbs, adverbs = pools
    div = int(rng.integers(0, 3))
    length = int(rng.integers(0, 3))
    coh = int(rng.integers(0, 3))
    expr = int(rng.integers(0, 3))
    n_par = int(rng.integers(1, 4))

    lo, hi = cfg.sentence_levels[length]
    n_sent = int(rng.integers(lo, hi + 1))
    noun_k = cfg.noun_levels[div]
    verb_k = cfg.verb_levels[div]
    reuse_p = cfg.reuse_probs[coh]

    sentences = []
    prev_object: str | None = None
    for s in range(n_sent):
        wordpieces = []
        if rng.random() < 0.25:
            conj = _CONNECTIVES[int(rng.integers(0, len(_CONNECTIVES)))]
            wordpieces.append(Wordpiece(raw=conj, morphemes=(Morpheme(conj, conj, "MAJ"),)))
        subj = _PRONOUNS[int(rng.integers(0, len(_PRONOUNS)))]
        josa = _SUBJECT_JOSA[int(rng.integers(0, len(_SUBJECT_JOSA)))]
        wordpieces.append(
            Wordpiece(
                raw=subj + josa,
                morphemes=(Morpheme(subj, subj, "NP"), Morpheme(josa, josa, "JX")),
            )
        )
        for _ in range(expr + int(rng.random() < 0.5)):
            adv = adverbs[int(rng.integers(0, len(adverbs)))]
            wordpieces.append(Wordpiece(raw=adv, morphemes=(Morpheme(adv, adv, "MAG"),)))
        if prev_object is not None and rng.random() < reuse_p:
            obj = prev_object
        else:
            obj = nouns[int(rng.integers(0, noun_k))]
        prev_object = obj
        ojosa = _OBJECT_JOSA[int(rng.integers(0, len(_OBJECT_JOSA)))]
        wordpieces.append(
            Wordpiece(
                raw=obj + ojosa,
                morphemes=(Morpheme(obj, obj, "NNG"), Morpheme(ojosa, ojosa, "JKO")),
            )
        )
        verb = verbs[int(rng.integers(0, verb_k))]
        ending = _FINAL_ENDINGS[int(rng.integers(0, len(_FINAL_ENDINGS)))]
        morphs = [Morpheme(verb, verb, "VV")]
        if rng.random() < 0.5:
            morphs.append(Morpheme("았", "았", "EP"))
        morphs.append(Morpheme(ending, ending, "EF"))
        wordpieces.append(Wordpiece(raw=verb + ending, morphemes=tuple(morphs)))
        sentences.append(Sentence(index=s, wordpieces=tuple(wordpieces)))

    n_par = min(n_par, n_sent)
    bounds = sorted(rng.choice(np.arange(1, n_sent), size=n_par - 1, replace=False).tolist())
    paragraphs = []
    start = 0
    for p, end in enumerate(bounds + [n_sent]):
        paragraphs.append(Paragraph(index=p, sentences=tuple(sentences[start:end])))
        start = end

    topic = cfg.topics[int(rng.integers(0, len(cfg.topics)))]
    meta = {
        "topic": topic,
        "planted": {"diversity": div, "length": length, "cohesion": coh, "expression": expr},
    }
    return Essay(id=essay_id, paragraphs=tuple(paragraphs), meta=meta)


def generate_synthetic(config: SynthConfig, seed: int) -> SyntheticCorpus:
    """Deterministic labeled corpus whose labels are banded measured features."""
    pool_rng = np.random.default_rng([seed, 0xA])
    pools = (
        _make_pool(pool_rng, config.noun_pool),
        _make_pool(pool_rng, config.verb_pool),
        _make_pool(pool_rng, config.adverb_pool),
    )
    essays = [
        _build_essay(f"synth-{seed}-{i:04d}", np.random.default_rng([seed, 1, i]), config, pools)
        for i in range(config.n_essays)
    ]
    drivers = [_measure_drivers(e) for e in essays]
    thresholds = {
        name: tuple(np.quantile([d[name] for d in drivers], [1 / 3, 2 / 3]).tolist())
        for name in RUBRIC_NAMES
    }
    labeled = tuple(
        Essay(
            id=e.id,
            paragraphs=e.paragraphs,
            meta=e.meta,
            labels=RubricScores(
                tuple(_band(d[name], thresholds[name]) for name in RUBRIC_NAMES)
            ),
        )
        for e, d in zip(essays, drivers)
    )
    return SyntheticCorpus(essays=labeled, thresholds=thresholds, config=config, seed=seed)


def relabel(essay: Essay, thresholds: Mapping[str, tuple[float, float]]) -> RubricScores:
    """Recompute the label an essay should carry (regeneration oracle hook)."""
    drivers = _measure_drivers(essay)
    return RubricScores(tuple(_band(drivers[name], thresholds[name]) for name in RUBRIC_NAMES))


def stratified_split(
    essays: Sequence[Essay],
    fractions: tuple[float, float, float],
    seed: int,
    by: str = "topic",
) -> tuple[list[Essay], list[Essay], list[Essay]]:
    """Deterministic train/validation/test split, stratified by a meta key."""
    groups: dict[str, list[Essay]] = {}
    for e in essays:
        key = str((e.meta or {}).get(by, ""))
        groups.setdefault(key, []).append(e)
    rng = np.random.default_rng(seed)
    out: tuple[list[Essay], list[Essay], list[Essay]] = ([], [], [])
    for key in sorted(groups):
        group = groups[key]
        order = rng.permutation(len(group))
        n = len(group)
        n_train = int(round(fractions[0] * n))
        n_val = int(round(fractions[1] * n))
        for rank, idx in enumerate(order):
            bucket = 0 if rank < n_train else 1 if rank < n_train + n_val else 2
            out[bucket].append(group[idx])
    return out


# ---------------------------------------------------------------------------
# Ablation harness: full (feature + sentence) model vs sentence-only baseline
# ---------------------------------------------------------------------------


def _predict_items(model, items) -> list[RubricScores]:
    from .scorer.model import round_half_up

    out = []
    for item in items:
        feats = None if item.feats is None else item.feats[None, :]
        raw = model.forward(feats, item.embeddings, train_mode=False)
        out.append(RubricScores(tuple(int(x) for x in round_half_up(raw))))
    return out


def run_feature_ablation(
    n_essays: int = 600,
    seeds: Sequence[int] = (0, 1, 2),
    hyper=None,
    registry=None,
    provider=None,
    hidden: int = 32,
    essay_dim: int = 64,
) -> list[dict]:
    """Train the full and baseline models on synthetic corpora, per seed.

    Returns one row per seed with both models' macro accuracy and QWK on a
    held-out test split.
    """
    from .embeddings import HashEmbedder
    from .features import default_registry
    from .scorer.data import prepare_dataset, to_items
    from .scorer.model import Hyper, ModelConfig, Scaler
    from .scorer.train import train

    registry = registry or default_registry()
    provider = provider or HashEmbedder()
    hyper = hyper or Hyper(dropout=0.5, lr=0.001, epochs=60, patience=10, batch_size=32)

    results = []
    for seed in seeds:
        corpus = generate_synthetic(SynthConfig(n_essays=n_essays), seed=1000 + seed)
        train_essays, val_essays, test_essays = stratified_split(
            corpus.essays, (0.7, 0.15, 0.15), seed=seed
        )
        train_ds = prepare_dataset(train_essays, registry, provider)
        val_ds = prepare_dataset(val_essays, registry, provider)
        test_ds = prepare_dataset(test_essays, registry, provider)
        scaler = Scaler.fit(train_ds.feats, train_ds.available)

        gold = [e.labels for e in test_essays]
        row: dict = {"seed": seed}
        for kind, use_features in (("full", True), ("baseline", False)):
            config = ModelConfig(
                n_features=len(registry),
                embed_dim=provider.dim,
                hidden=hidden,
                essay_dim=essay_dim,
                use_features=use_features,
            )
            result = train(
                to_items(train_ds, scaler, use_features),
                to_items(val_ds, scaler, use_features),
                config,
                hyper,
                seed=seed,
            )
            predicted = _predict_items(result.model, to_items(test_ds, scaler, use_features))
            report = evaluate_rubrics(predicted, gold)
            row[kind] = {
                "accuracy": report.macro_accuracy,
                "qwk": report.macro_qwk,
                "epochs_run": len(result.log),
            }
        results.append(row)
    return results
