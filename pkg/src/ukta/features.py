"""Feature registry and per-essay feature computation.

The registry is data-driven: a list of ``{name, family, metric, pos_filter,
params}`` entries (JSON-serializable) fixes which features exist and in
what order.  The order is frozen at configuration time and is identical in
analysis, training and scoring; a SHA-256 fingerprint of the canonical
config pins a trained model to the registry it was trained with.

Families:

* ``basic`` — counts, densities and length statistics per tag class.
* ``diversity`` — the measures from :mod:`ukta.diversity` applied to the
  lemma subsequence of a tag class.
* ``cohesion`` — adjacent lemma overlap and embedding-based similarity.

Features whose preconditions fail on a given essay (for example HD-D on a
text shorter than the sample size) are not errors: the vector masks them
as unavailable and downstream scaling imputes the training mean.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from . import cohesion as cohesion_ops
from . import diversity as diversity_ops
from .embeddings import EmbeddingProvider, HashEmbedder
from .errors import NoCandidates, RegistryMismatch, UndefinedFeature
from .tagclasses import TAG_CLASSES, class_lemmas, resolve_class
from .textmodel import Essay

FAMILIES = ("basic", "diversity", "cohesion")

_BASIC_STAT_METRICS = {
    "total_morphemes",
    "total_wordpieces",
    "total_sentences",
    "total_paragraphs",
    "morphemes_per_sentence_mean",
    "morphemes_per_sentence_max",
    "wordpieces_per_sentence_mean",
    "wordpieces_per_sentence_max",
    "sentences_per_paragraph_mean",
}

_DIVERSITY_METRICS = {
    "ndw",
    "ttr",
    "rttr",
    "cttr",
    "msttr",
    "mattr",
    "mtld",
    "hdd",
    "vocd",
}

_COHESION_METRICS = {"overlap", "avg_sen_similarity", "adj_sen_similarity"}


@dataclass(frozen=True)
class LengthStats:
    total_morphemes: int
    total_wordpieces: int
    total_sentences: int
    total_paragraphs: int
    morphemes_per_sentence_mean: float
    morphemes_per_sentence_max: int
    wordpieces_per_sentence_mean: float
    wordpieces_per_sentence_max: int
    sentences_per_paragraph_mean: float


def length_stats(essay: Essay) -> LengthStats:
    per_sent_m = [sum(1 for _ in s.morphemes()) for s in essay.sentences()]
    per_sent_w = [len(s.wordpieces) for s in essay.sentences()]
    per_para_s = [len(p.sentences) for p in essay.paragraphs]
    return LengthStats(
        total_morphemes=sum(per_sent_m),
        total_wordpieces=sum(per_sent_w),
        total_sentences=len(per_sent_m),
        total_paragraphs=len(per_para_s),
        morphemes_per_sentence_mean=sum(per_sent_m) / len(per_sent_m),
        morphemes_per_sentence_max=max(per_sent_m),
        wordpieces_per_sentence_mean=sum(per_sent_w) / len(per_sent_w),
        wordpieces_per_sentence_max=max(per_sent_w),
        sentences_per_paragraph_mean=sum(per_para_s) / len(per_para_s),
    )


def count_class(essay: Essay, cls: str) -> int:
    """Number of morphemes whose tag belongs to the class."""
    tags = resolve_class(cls)
    return sum(1 for m in essay.morphemes() if m.tag in tags)


def density(essay: Essay, cls: str, basis: str = "all") -> float:
    """count(cls) divided by the basis count (all, function or content lemmas)."""
    if basis == "all":
        denom = sum(1 for _ in essay.morphemes())
    elif basis == "function":
        denom = count_class(essay, "FL")
    elif basis == "content":
        denom = count_class(essay, "CL")
    else:
        raise ValueError(f"unknown density basis {basis!r}")
    if denom == 0:
        raise UndefinedFeature(f"{cls}_Den", f"basis {basis!r} count is zero")
    return count_class(essay, cls) / denom


def occurrence_index(essay: Essay, lemma: str) -> list[int]:
    """Sorted indices of the sentences in which the lemma occurs."""
    hits = []
    for sent in essay.sentences():
        if any(m.lemma == lemma for m in sent.morphemes()):
            hits.append(sent.index)
    return hits


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    family: str
    metric: str
    pos_filter: str | None = None
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"{self.name}: unknown family {self.family!r}")
        known = (
            _BASIC_STAT_METRICS | {"count", "density"}
            if self.family == "basic"
            else _DIVERSITY_METRICS
            if self.family == "diversity"
            else _COHESION_METRICS
        )
        if self.metric not in known:
            raise ValueError(f"{self.name}: unknown {self.family} metric {self.metric!r}")
        if self.pos_filter is not None:
            resolve_class(self.pos_filter)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "family": self.family,
            "metric": self.metric,
            "pos_filter": self.pos_filter,
            "params": dict(self.params),
        }


class FeatureRegistry:
    """Ordered, named feature set with a stable fingerprint."""

    def __init__(self, specs: Iterable[FeatureSpec]):
        self.specs: tuple[FeatureSpec, ...] = tuple(specs)
        names = [s.name for s in self.specs]
        dupes = {n for n in names if names.count(n) > 1}
        if dupes:
            raise ValueError(f"duplicate feature names: {sorted(dupes)}")
        self.names: tuple[str, ...] = tuple(names)
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self) -> int:
        return len(self.specs)

    def __iter__(self):
        return iter(self.specs)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise RegistryMismatch(f"feature {name!r} is not registered") from None

    def to_config(self) -> list[dict[str, Any]]:
        return [s.to_dict() for s in self.specs]

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_config(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_config(cls, entries: Iterable[Mapping[str, Any]]) -> "FeatureRegistry":
        specs = [
            FeatureSpec(
                name=e["name"],
                family=e["family"],
                metric=e["metric"],
                pos_filter=e.get("pos_filter"),
                params=dict(e.get("params") or {}),
            )
            for e in entries
        ]
        return cls(specs)

    @classmethod
    def from_file(cls, path: str | Path) -> "FeatureRegistry":
        registry, _ = load_registry_file(path)
        return registry


@dataclass(frozen=True)
class FeatureVector:
    """Registry-aligned values; unavailable entries hold NaN and available=False."""

    values: np.ndarray
    available: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.available.shape:
            raise ValueError("values and availability mask differ in length")

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def to_pairs(self) -> list[tuple[float, bool]]:
        return [(float(v), bool(a)) for v, a in zip(self.values, self.available)]


# ---------------------------------------------------------------------------
# Default registry
# ---------------------------------------------------------------------------

_COUNT_DENSITY_CLASSES = [
    "CL", "FL", "NN", "NNL", "V", "VC", "MM", "MA", "M", "J", "JK",
    "E", "ET", "X", "XS", "S",
] + sorted(TAG_CLASSES["ALL"])

_DIVERSITY_CLASSES = [
    "ALL", "CL", "FL", "NNG", "NNP", "NNB", "NP", "NR", "NN", "NNL",
    "VV", "VA", "VX", "V", "MM", "MA", "MAG", "MAJ", "IC", "J", "JK",
    "E", "ET", "X",
]

_METRIC_LABELS = {
    "ndw": "NDW",
    "ttr": "TTR",
    "rttr": "RTTR",
    "cttr": "CTTR",
    "msttr": "MSTTR",
    "mattr": "MATTR",
    "mtld": "MTLD",
    "hdd": "HDD",
    "vocd": "VOCDD",
}

_OVERLAP_CLASS_CODES = {"ALL": "AL", "CL": "CL", "FL": "FL"}
_OVERLAP_SCOPE_CODES = {"sentence": "ASO", "paragraph": "APO"}


def default_registry_config(
    diversity_params: diversity_ops.DiversityParams | None = None,
) -> list[dict[str, Any]]:
    """The default feature set: the full class/metric cross product."""
    dp = diversity_params or diversity_ops.DEFAULT_PARAMS
    entries: list[dict[str, Any]] = []

    def add(name, family, metric, pos_filter=None, **params):
        entries.append(
            {
                "name": name,
                "family": family,
                "metric": metric,
                "pos_filter": pos_filter,
                "params": params,
            }
        )

    add("TotalMorphemes", "basic", "total_morphemes")
    add("TotalWordpieces", "basic", "total_wordpieces")
    add("TotalSentences", "basic", "total_sentences")
    add("TotalParagraphs", "basic", "total_paragraphs")
    add("MorphemesPerSentence_Mean", "basic", "morphemes_per_sentence_mean")
    add("MorphemesPerSentence_Max", "basic", "morphemes_per_sentence_max")
    add("WordpiecesPerSentence_Mean", "basic", "wordpieces_per_sentence_mean")
    add("WordpiecesPerSentence_Max", "basic", "wordpieces_per_sentence_max")
    add("SentencesPerParagraph_Mean", "basic", "sentences_per_paragraph_mean")

    for cls in _COUNT_DENSITY_CLASSES:
        add(f"{cls}_Cnt", "basic", "count", cls)
        add(f"{cls}_Den", "basic", "density", cls, basis="all")
    # densities over restricted bases, named by their conventional codes
    add("EFL_Den", "basic", "density", "E", basis="function")
    add("XFL_Den", "basic", "density", "XFL", basis="function")
    add("JFL_Den", "basic", "density", "J", basis="function")
    add("NNCL_Den", "basic", "density", "NNL", basis="content")
    add("VCL_Den", "basic", "density", "V", basis="content")

    for cls in _DIVERSITY_CLASSES:
        for metric, label in _METRIC_LABELS.items():
            name = label if cls == "ALL" else f"{cls}_{label}"
            params: dict[str, Any] = {}
            if metric == "msttr":
                params["window"] = dp.msttr_window
            elif metric == "mattr":
                params["window"] = dp.mattr_window
            elif metric == "mtld":
                params["threshold"] = dp.mtld_threshold
            elif metric == "hdd":
                params["sample"] = dp.hdd_sample
            elif metric == "vocd":
                params = {
                    "min_n": dp.vocd_min_n,
                    "max_n": dp.vocd_max_n,
                    "trials": dp.vocd_trials,
                    "seed": dp.rng_seed,
                }
            add(name, "diversity", metric, cls, **params)

    for scope, scode in _OVERLAP_SCOPE_CODES.items():
        for cls, ccode in _OVERLAP_CLASS_CODES.items():
            for mode, mcode in (("count", ""), ("binary", "B")):
                for normed, ncode in ((False, ""), (True, "N")):
                    add(
                        f"{scode}_{ccode}{mcode}{ncode}",
                        "cohesion",
                        "overlap",
                        cls,
                        scope=scope,
                        mode=mode,
                        normed=normed,
                    )
    add("AvgSenSimilarity", "cohesion", "avg_sen_similarity")
    add("AdjSenSimilarity", "cohesion", "adj_sen_similarity")
    return entries


def default_registry(
    diversity_params: diversity_ops.DiversityParams | None = None,
) -> FeatureRegistry:
    return FeatureRegistry.from_config(default_registry_config(diversity_params))


def load_registry_file(path: str | Path) -> tuple[FeatureRegistry, dict | None]:
    """Read a registry config file.

    Accepts either a bare list of feature specs or an object of the form
    {"provider": {...}, "features": [...]}; the provider spec (if any) is
    returned for the caller to instantiate.  The fingerprint covers the
    feature entries only, so swapping providers never orphans a checkpoint
    trained on the same features.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        return FeatureRegistry.from_config(doc["features"]), doc.get("provider")
    return FeatureRegistry.from_config(doc), None


# ---------------------------------------------------------------------------
# Computation
# ---------------------------------------------------------------------------

Result = tuple[float, bool]
_UNAVAILABLE: Result = (float("nan"), False)


def compute_basic(essay: Essay, registry: FeatureRegistry) -> dict[str, Result]:
    stats = length_stats(essay)
    out: dict[str, Result] = {}
    for spec in registry:
        if spec.family != "basic":
            continue
        if spec.metric in _BASIC_STAT_METRICS:
            out[spec.name] = (float(getattr(stats, spec.metric)), True)
        elif spec.metric == "count":
            out[spec.name] = (float(count_class(essay, spec.pos_filter or "ALL")), True)
        elif spec.metric == "density":
            basis = spec.params.get("basis", "all")
            try:
                out[spec.name] = (density(essay, spec.pos_filter or "ALL", basis), True)
            except UndefinedFeature:
                out[spec.name] = _UNAVAILABLE
    return out


def compute_diversity(essay: Essay, registry: FeatureRegistry) -> dict[str, Result]:
    token_cache: dict[str, list[str]] = {}
    out: dict[str, Result] = {}
    for spec in registry:
        if spec.family != "diversity":
            continue
        cls = spec.pos_filter or "ALL"
        if cls not in token_cache:
            token_cache[cls] = class_lemmas(essay, cls)
        tokens = token_cache[cls]
        p = spec.params
        try:
            if spec.metric == "ndw":
                value = float(diversity_ops.ndw(tokens))
            elif spec.metric == "ttr":
                value = diversity_ops.ttr(tokens)
            elif spec.metric == "rttr":
                value = diversity_ops.rttr(tokens)
            elif spec.metric == "cttr":
                value = diversity_ops.cttr(tokens)
            elif spec.metric == "msttr":
                value = diversity_ops.msttr(tokens, int(p.get("window", 25)))
            elif spec.metric == "mattr":
                value = diversity_ops.mattr(tokens, int(p.get("window", 25)))
            elif spec.metric == "mtld":
                value = diversity_ops.mtld(tokens, float(p.get("threshold", 0.72)))
            elif spec.metric == "hdd":
                value = diversity_ops.hdd(tokens, int(p.get("sample", 42)))
            else:  # vocd
                dp = diversity_ops.DiversityParams(
                    vocd_min_n=int(p.get("min_n", 35)),
                    vocd_max_n=int(p.get("max_n", 50)),
                    vocd_trials=int(p.get("trials", 100)),
                    rng_seed=int(p.get("seed", 0)),
                )
                value = diversity_ops.vocd(tokens, dp)
            out[spec.name] = (value, True)
        except UndefinedFeature:
            out[spec.name] = _UNAVAILABLE
    return out


def compute_cohesion(
    essay: Essay, registry: FeatureRegistry, provider: EmbeddingProvider | None = None
) -> dict[str, Result]:
    provider = provider or HashEmbedder()
    overlap_cache: dict[tuple[str, str, str], cohesion_ops.OverlapScore] = {}
    topic_cache: list[cohesion_ops.TopicReport | None] = []
    out: dict[str, Result] = {}
    for spec in registry:
        if spec.family != "cohesion":
            continue
        try:
            if spec.metric == "overlap":
                scope = spec.params.get("scope", "sentence")
                mode = spec.params.get("mode", "count")
                key = (scope, spec.pos_filter or "ALL", mode)
                if key not in overlap_cache:
                    overlap_cache[key] = cohesion_ops.adjacent_overlap(
                        essay, scope, spec.pos_filter or "ALL", mode
                    )
                score = overlap_cache[key]
                value = score.normed if spec.params.get("normed") else score.raw
            elif spec.metric == "avg_sen_similarity":
                if not topic_cache:
                    topic_cache.append(cohesion_ops.topic_consistency(essay, provider))
                report = topic_cache[0]
                value = report.avg_sen_similarity
            else:  # adj_sen_similarity
                value = cohesion_ops.adjacent_similarity(essay, provider)
            out[spec.name] = (value, True)
        except (UndefinedFeature, NoCandidates):
            out[spec.name] = _UNAVAILABLE
    return out


def assemble(
    registry: FeatureRegistry, family_results: Mapping[str, Mapping[str, Result]]
) -> FeatureVector:
    """Align per-family results to the registry order.

    Raises RegistryMismatch when a registered feature was not computed by
    its family.
    """
    values = np.empty(len(registry), dtype=np.float64)
    available = np.empty(len(registry), dtype=bool)
    for i, spec in enumerate(registry.specs):
        family = family_results.get(spec.family)
        if family is None or spec.name not in family:
            raise RegistryMismatch(
                f"family {spec.family!r} did not produce feature {spec.name!r}"
            )
        value, ok = family[spec.name]
        values[i] = value if ok else np.nan
        available[i] = ok
    return FeatureVector(values=values, available=available)


def compute_features(
    essay: Essay,
    registry: FeatureRegistry,
    provider: EmbeddingProvider | None = None,
) -> FeatureVector:
    """Full feature vector of one essay, aligned to the registry."""
    return assemble(
        registry,
        {
            "basic": compute_basic(essay, registry),
            "diversity": compute_diversity(essay, registry),
            "cohesion": compute_cohesion(essay, registry, provider),
        },
    )
