"""Analysis bundle assembly: one self-describing result object per input.

The bundle is the single exchange format between the library, the CLI, the
HTTP service and the browser client.  Identical inputs produce identical
bundles (and identical exported bytes); the bundle id is a content hash, so
it is stable across processes and machine restarts.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from . import __version__
from .cohesion import adjacent_similarity, topic_consistency
from .embeddings import EmbeddingProvider, HashEmbedder
from .errors import NoCandidates, UndefinedFeature
from .features import FeatureRegistry, compute_features, length_stats, occurrence_index
from .scorer import RubricReport
from .textmodel import Essay, essay_to_dict

TOOL_NAME = "ukta"


@dataclass(frozen=True)
class ModelBundle:
    """A loaded checkpoint plus everything needed to score with it."""

    model: object
    scaler: object
    fingerprint: str
    meta: dict


def _cohesion_section(essay: Essay, provider: EmbeddingProvider) -> dict | None:
    try:
        report = topic_consistency(essay, provider)
        adj = adjacent_similarity(essay, provider)
    except (UndefinedFeature, NoCandidates):
        return None
    return {
        "keywords": [[phrase, score] for phrase, score in report.keywords],
        "topic_sentence": report.topic_sentence,
        "avg_sen_similarity": report.avg_sen_similarity,
        "adj_sen_similarity": adj,
    }


def build_bundle(
    essay: Essay,
    registry: FeatureRegistry,
    provider: EmbeddingProvider | None = None,
    rubric: RubricReport | None = None,
) -> dict:
    """Analyze one essay into a bundle dict (stable field order)."""
    provider = provider or HashEmbedder()
    fv = compute_features(essay, registry, provider)
    stats = length_stats(essay)

    lemmas = sorted({m.lemma for m in essay.morphemes()})
    occurrences = {lemma: occurrence_index(essay, lemma) for lemma in lemmas}

    bundle = {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "bundle_id": None,
        "registry": {"fingerprint": registry.fingerprint(), "size": len(registry)},
        "essay": essay_to_dict(essay),
        "stats": {
            "paragraphs": stats.total_paragraphs,
            "sentences": stats.total_sentences,
            "wordpieces": stats.total_wordpieces,
            "morphemes": stats.total_morphemes,
        },
        "occurrences": occurrences,
        "features": [
            {
                "name": spec.name,
                "family": spec.family,
                "value": float(fv.values[i]) if fv.available[i] else None,
                "available": bool(fv.available[i]),
            }
            for i, spec in enumerate(registry.specs)
        ],
        "cohesion": _cohesion_section(essay, provider),
        "rubric": rubric.to_dict() if rubric is not None else None,
    }
    bundle["bundle_id"] = content_hash(bundle)
    return bundle


def content_hash(bundle: dict) -> str:
    """Hash of the bundle content, excluding the id field itself."""
    probe = {k: v for k, v in bundle.items() if k != "bundle_id"}
    canonical = json.dumps(probe, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def feature_value(bundle: dict, name: str):
    for row in bundle["features"]:
        if row["name"] == name:
            return row["value"]
    raise KeyError(name)
