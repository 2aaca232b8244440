"""Training loop: Adam, length-bucketed batches, early stopping, checkpoints.

Essays with the same sentence count batch together without padding, so the
recurrent encoder never sees a masked step.  Runs are deterministic per
seed: one RNG drives parameter init, epoch shuffling and dropout masks in a
fixed draw order, and checkpoints serialize to canonical JSON, so two runs
with the same seed produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import DivergedLoss, NoLabels
from .model import Hyper, ModelConfig, Scaler, ScoringModel, init_params

CHECKPOINT_VERSION = 1

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainItem:
    """One essay prepared for the model: scaled features, embeddings, labels."""

    feats: np.ndarray | None
    embeddings: np.ndarray  # (n_sentences, embed_dim)
    labels: np.ndarray  # (10,) integers 0..3


@dataclass
class TrainResult:
    model: ScoringModel
    log: list[dict]
    best_epoch: int
    best_val_mse: float


class Adam:
    def __init__(self, params, lr: float):
        self.params = params
        self.lr = lr
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}

    def step(self) -> None:
        self.t += 1
        for k, p in self.params.items():
            if p.grad is None:
                continue
            g = p.grad
            self.m[k] = ADAM_BETA1 * self.m[k] + (1 - ADAM_BETA1) * g
            self.v[k] = ADAM_BETA2 * self.v[k] + (1 - ADAM_BETA2) * g * g
            m_hat = self.m[k] / (1 - ADAM_BETA1**self.t)
            v_hat = self.v[k] / (1 - ADAM_BETA2**self.t)
            p.data -= self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)


def _bucket(indices: Iterable[int], items: Sequence[TrainItem], batch_size: int):
    """Group by sentence count, then chunk; bucket order is deterministic."""
    by_len: dict[int, list[int]] = {}
    for i in indices:
        by_len.setdefault(items[i].embeddings.shape[0], []).append(i)
    for n in sorted(by_len):
        bucket = by_len[n]
        for start in range(0, len(bucket), batch_size):
            yield bucket[start : start + batch_size]


def _stack_batch(items: Sequence[TrainItem], idx: Sequence[int], use_features: bool):
    feats = np.stack([items[i].feats for i in idx]) if use_features else None
    emb = np.stack([items[i].embeddings for i in idx])
    labels = np.stack([items[i].labels for i in idx]).astype(np.float64)
    return feats, emb, labels


def dataset_mse(model: ScoringModel, items: Sequence[TrainItem]) -> float:
    """Eval-mode MSE (labels / 3 scale) over a dataset."""
    total, count = 0.0, 0
    for idx in _bucket(range(len(items)), items, batch_size=256):
        feats, emb, labels = _stack_batch(items, idx, model.config.use_features)
        loss = model.loss_graph(feats, emb, labels, train_mode=False)
        total += float(loss.data) * len(idx)
        count += len(idx)
    return total / count


def train(
    train_items: Sequence[TrainItem],
    val_items: Sequence[TrainItem],
    config: ModelConfig,
    hyper: Hyper,
    seed: int,
) -> TrainResult:
    """Fit a model; returns the best-validation parameters and the loss log."""
    if not train_items or any(item.labels is None for item in train_items):
        raise NoLabels("training requires labeled essays")
    rng = np.random.default_rng(seed)
    model = ScoringModel(config, init_params(config, rng))
    optimizer = Adam(model.params, hyper.lr)

    best_val = np.inf
    best_epoch = -1
    best_data = model.clone_data()
    log: list[dict] = []
    since_best = 0

    for epoch in range(hyper.epochs):
        order = rng.permutation(len(train_items))
        epoch_loss, seen = 0.0, 0
        for idx in _bucket(order.tolist(), train_items, hyper.batch_size):
            feats, emb, labels = _stack_batch(train_items, idx, config.use_features)
            model.zero_grads()
            loss = model.loss_graph(
                feats, emb, labels, train_mode=True, dropout=hyper.dropout, rng=rng
            )
            if not np.isfinite(loss.data):
                raise DivergedLoss(f"non-finite training loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss.data) * len(idx)
            seen += len(idx)

        train_mse = dataset_mse(model, train_items)
        if not val_items or val_items is train_items:
            val_mse = train_mse
        else:
            val_mse = dataset_mse(model, val_items)
        log.append(
            {
                "epoch": epoch,
                "train_loss": epoch_loss / seen,
                "train_mse": train_mse,
                "val_mse": val_mse,
            }
        )
        if val_mse < best_val:
            best_val = val_mse
            best_epoch = epoch
            best_data = model.clone_data()
            since_best = 0
        else:
            since_best += 1
            if since_best > hyper.patience:
                break
        if hyper.target_train_mse is not None and train_mse < hyper.target_train_mse:
            break

    model.load_data(best_data)
    return TrainResult(model=model, log=log, best_epoch=best_epoch, best_val_mse=best_val)


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


def checkpoint_to_dict(
    model: ScoringModel,
    scaler: Scaler | None,
    registry_fingerprint: str,
    feature_names: Sequence[str],
    feature_families: Sequence[str],
    hyper: Hyper,
    seed: int,
) -> dict:
    cfg = model.config
    return {
        "format_version": CHECKPOINT_VERSION,
        "kind": "full" if cfg.use_features else "baseline",
        "registry_fingerprint": registry_fingerprint,
        "feature_names": list(feature_names),
        "feature_families": list(feature_families),
        "config": {
            "n_features": cfg.n_features,
            "embed_dim": cfg.embed_dim,
            "hidden": cfg.hidden,
            "essay_dim": cfg.essay_dim,
            "use_features": cfg.use_features,
            "attention_mode": cfg.attention_mode,
        },
        "hyper": {
            "dropout": hyper.dropout,
            "lr": hyper.lr,
            "epochs": hyper.epochs,
            "patience": hyper.patience,
            "batch_size": hyper.batch_size,
        },
        "seed": seed,
        "scaler": None
        if scaler is None
        else {
            "mu": scaler.mu.tolist(),
            "sigma": scaler.sigma.tolist(),
            "zero_sigma": scaler.zero_sigma.astype(int).tolist(),
        },
        "params": {k: p.data.tolist() for k, p in sorted(model.params.items())},
    }


def checkpoint_from_dict(doc: dict) -> tuple[ScoringModel, Scaler | None, dict]:
    from .autodiff import Tensor

    cfg = ModelConfig(**doc["config"])
    params = {k: Tensor(np.array(v, dtype=np.float64)) for k, v in doc["params"].items()}
    model = ScoringModel(cfg, params)
    scaler = None
    if doc.get("scaler") is not None:
        s = doc["scaler"]
        scaler = Scaler(
            mu=np.array(s["mu"], dtype=np.float64),
            sigma=np.array(s["sigma"], dtype=np.float64),
            zero_sigma=np.array(s["zero_sigma"], dtype=bool),
        )
    return model, scaler, doc


def save_checkpoint(path, checkpoint: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(checkpoint, fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path) -> tuple[ScoringModel, Scaler | None, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return checkpoint_from_dict(json.load(fh))
