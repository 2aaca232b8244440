"""Turning essays into model-ready training items."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..embeddings import EmbeddingProvider, embed_sentences
from ..errors import NoLabels
from ..features import FeatureRegistry, compute_features
from .model import Scaler
from .train import TrainItem


@dataclass
class PreparedDataset:
    """Raw (unscaled) features plus embeddings and labels for a list of essays."""

    feats: np.ndarray  # (n, F) raw values, NaN where unavailable
    available: np.ndarray  # (n, F)
    embeddings: list[np.ndarray]  # per essay, (n_sentences, dim)
    labels: np.ndarray | None  # (n, 10) or None when any essay is unlabeled


def prepare_dataset(
    essays, registry: FeatureRegistry, provider: EmbeddingProvider
) -> PreparedDataset:
    feats = np.empty((len(essays), len(registry)))
    available = np.empty((len(essays), len(registry)), dtype=bool)
    embeddings = []
    labels = []
    labeled = True
    for i, essay in enumerate(essays):
        fv = compute_features(essay, registry, provider)
        feats[i] = fv.values
        available[i] = fv.available
        embeddings.append(embed_sentences(essay, provider))
        if essay.labels is None:
            labeled = False
        else:
            labels.append(np.array(essay.labels.scores, dtype=np.float64))
    return PreparedDataset(
        feats=feats,
        available=available,
        embeddings=embeddings,
        labels=np.stack(labels) if labeled and labels else None,
    )


def to_items(ds: PreparedDataset, scaler: Scaler, use_features: bool = True) -> list[TrainItem]:
    if ds.labels is None:
        raise NoLabels("dataset contains unlabeled essays")
    scaled = scaler.transform(ds.feats, ds.available)
    return [
        TrainItem(
            feats=scaled[i] if use_features else None,
            embeddings=ds.embeddings[i],
            labels=ds.labels[i],
        )
        for i in range(len(ds.embeddings))
    ]
