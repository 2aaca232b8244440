"""Prediction and per-sample explanation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..embeddings import EmbeddingProvider, embed_sentences
from ..errors import RegistryMismatch
from ..features import FeatureRegistry, FeatureVector, compute_features
from ..textmodel import Essay, RUBRIC_NAMES, RubricScores
from .model import Scaler, ScoringModel, round_half_up

TOP_K = 10


@dataclass(frozen=True)
class TopFeature:
    name: str
    weight: float
    value: float  # raw (pre-scaling) feature value; NaN when unavailable


@dataclass(frozen=True)
class RubricReport:
    predicted: RubricScores
    raw: tuple[float, ...]
    top_features: tuple[TopFeature, ...]

    def to_dict(self) -> dict:
        return {
            "scores": self.predicted.as_dict(),
            "raw": {name: raw for name, raw in zip(RUBRIC_NAMES, self.raw)},
            "top_features": [
                {
                    "name": t.name,
                    "weight": t.weight,
                    # unavailable raw values are NaN internally; exported as null
                    "value": None if np.isnan(t.value) else t.value,
                }
                for t in self.top_features
            ],
        }


def top_features(
    weights: np.ndarray, registry: FeatureRegistry, fv: FeatureVector, k: int = TOP_K
) -> tuple[TopFeature, ...]:
    """The k largest attention weights; ties break toward lower registry index."""
    order = sorted(range(len(weights)), key=lambda i: (-weights[i], i))[:k]
    return tuple(
        TopFeature(
            name=registry.names[i],
            weight=float(weights[i]),
            value=float(fv.values[i]),
        )
        for i in order
    )


def predict(
    essay: Essay,
    model: ScoringModel,
    scaler: Scaler,
    registry: FeatureRegistry,
    provider: EmbeddingProvider,
    expected_fingerprint: str | None = None,
) -> RubricReport:
    """Score an essay and name the features that carried the most weight."""
    if expected_fingerprint is not None and registry.fingerprint() != expected_fingerprint:
        raise RegistryMismatch(
            "registry fingerprint differs from the one the model was trained with"
        )
    if model.config.use_features and model.config.n_features != len(registry):
        raise RegistryMismatch(
            f"model expects {model.config.n_features} features, registry has {len(registry)}"
        )
    fv = compute_features(essay, registry, provider)
    embeddings = embed_sentences(essay, provider)

    feats_scaled = None
    explanations: tuple[TopFeature, ...] = ()
    if model.config.use_features:
        feats_scaled = scaler.transform(fv.values[None, :], fv.available[None, :])
        weights, _ = model.attention(feats_scaled)
        explanations = top_features(weights[0], registry, fv)

    raw = model.forward(feats_scaled, embeddings, train_mode=False)
    rounded = round_half_up(raw)
    return RubricReport(
        predicted=RubricScores(tuple(int(x) for x in rounded)),
        raw=tuple(float(x) for x in raw),
        top_features=explanations,
    )
