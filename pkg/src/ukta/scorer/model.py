"""Attention-gated writing evaluation model.

Two branches merge into one sigmoid output head:

* Sentence branch: per-sentence embedding vectors run through a
  bidirectional gated recurrent encoder; the essay representation is the
  concatenation of the final forward and final backward hidden states.
* Feature branch (full model only): the standardized feature vector f is
  mapped to attention weights A = softmax(W f + b), gated as A * f, and
  [A * f ; f] passes through a dense layer to the essay-level vector.

The head emits ten scores in (0, 3) as 3 * sigmoid(logits).  The baseline
variant drops the feature branch entirely (encoder + linear head), sharing
every other code path.  All arithmetic is float64 on the autodiff tape so
gradients are exact enough for central finite-difference verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import EmptyEssay, InsufficientData, ShapeMismatch
from . import autodiff as ad
from .autodiff import Tensor

N_OUTPUTS = 10
SCORE_SPAN = 3.0  # labels live in 0..3; sigmoid output is scaled by this


@dataclass(frozen=True)
class ModelConfig:
    n_features: int
    embed_dim: int = 64
    hidden: int = 32
    essay_dim: int = 64
    use_features: bool = True
    # "input": attention logits conditioned on the scaled features;
    # "bias": globally learned logits shared across samples
    attention_mode: str = "input"

    def head_width(self) -> int:
        width = 2 * self.hidden
        if self.use_features:
            width += self.essay_dim
        return width


@dataclass
class Hyper:
    dropout: float = 0.5
    lr: float = 0.001
    epochs: int = 100
    patience: int = 10
    batch_size: int = 32
    # optional convergence stop for overfitting harnesses; epochs stays the cap
    target_train_mse: float | None = None


@dataclass(frozen=True)
class Scaler:
    """Per-feature standardization fitted on the training split only."""

    mu: np.ndarray
    sigma: np.ndarray
    zero_sigma: np.ndarray

    @classmethod
    def fit(cls, values: np.ndarray, available: np.ndarray) -> "Scaler":
        if values.ndim != 2 or values.shape[0] < 2:
            raise InsufficientData("scaler needs at least 2 training vectors")
        mu = np.zeros(values.shape[1])
        sigma = np.zeros(values.shape[1])
        for j in range(values.shape[1]):
            col = values[available[:, j], j]
            if col.size:
                mu[j] = col.mean()
                sigma[j] = col.std()
        zero = sigma == 0.0
        return cls(mu=mu, sigma=sigma, zero_sigma=zero)

    def transform(self, values: np.ndarray, available: np.ndarray) -> np.ndarray:
        """(f - mu) / sigma; zero-variance and unavailable entries map to 0."""
        values = np.atleast_2d(values)
        available = np.atleast_2d(available)
        safe_sigma = np.where(self.zero_sigma, 1.0, self.sigma)
        scaled = (np.where(available, values, self.mu) - self.mu) / safe_sigma
        scaled = np.where(self.zero_sigma, 0.0, scaled)
        return np.where(available, scaled, 0.0)


_GRU_PARTS = ("Wz", "Wr", "Wh", "Uz", "Ur", "Uh", "bz", "br", "bh")


def init_params(config: ModelConfig, rng: np.random.Generator) -> dict[str, Tensor]:
    """Parameter tensors in a fixed creation order (keeps seeding stable)."""

    def normal(rows, cols, fan_in):
        return Tensor(rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(rows, cols)))

    params: dict[str, Tensor] = {}
    f, e, h, d = config.n_features, config.embed_dim, config.hidden, config.essay_dim
    if config.use_features:
        params["attention.W"] = normal(f, f, f)
        params["attention.b"] = Tensor(np.zeros(f))
        params["essay_dense.W"] = normal(d, 2 * f, 2 * f)
        params["essay_dense.b"] = Tensor(np.zeros(d))
    for direction in ("fwd", "bwd"):
        for part in _GRU_PARTS:
            key = f"gru_{direction}.{part}"
            if part.startswith("W"):
                params[key] = normal(h, e, e)
            elif part.startswith("U"):
                params[key] = normal(h, h, h)
            else:
                params[key] = Tensor(np.zeros(h))
    params["head.W"] = normal(N_OUTPUTS, config.head_width(), config.head_width())
    params["head.b"] = Tensor(np.zeros(N_OUTPUTS))
    return params


def _gru_direction(
    params: Mapping[str, Tensor], prefix: str, steps: Sequence[np.ndarray]
) -> Tensor:
    """Run one direction over the (batch, embed) step inputs; final hidden state."""
    p = {part: params[f"{prefix}.{part}"] for part in _GRU_PARTS}
    batch = steps[0].shape[0]
    h = Tensor(np.zeros((batch, p["bz"].data.shape[0])))
    for x_np in steps:
        x = Tensor(x_np)
        z = ad.sigmoid(ad.add(ad.linear(x, p["Wz"], p["bz"]), ad.linear(h, p["Uz"])))
        r = ad.sigmoid(ad.add(ad.linear(x, p["Wr"], p["br"]), ad.linear(h, p["Ur"])))
        c = ad.tanh(ad.add(ad.linear(x, p["Wh"], p["bh"]), ad.mul(r, ad.linear(h, p["Uh"]))))
        h = ad.add(ad.mul(z, h), ad.mul(ad.sub(1.0, z), c))
    return h


class ScoringModel:
    """Parameter container plus the forward graph."""

    def __init__(self, config: ModelConfig, params: dict[str, Tensor]):
        self.config = config
        self.params = params

    @classmethod
    def initialize(cls, config: ModelConfig, seed: int) -> "ScoringModel":
        return cls(config, init_params(config, np.random.default_rng(seed)))

    def zero_grads(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def clone_data(self) -> dict[str, np.ndarray]:
        return {k: p.data.copy() for k, p in self.params.items()}

    def load_data(self, data: Mapping[str, np.ndarray]) -> None:
        for k, p in self.params.items():
            p.data = np.array(data[k], dtype=np.float64)

    # -- forward ------------------------------------------------------------

    def _check_features(self, feats: np.ndarray) -> np.ndarray:
        feats = np.atleast_2d(np.asarray(feats, dtype=np.float64))
        if feats.shape[1] != self.config.n_features:
            raise ShapeMismatch(
                f"expected {self.config.n_features} features, got {feats.shape[1]}"
            )
        return feats

    def attention(self, feats_scaled: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Attention weights A and the gated vector A * f' (eval mode)."""
        a, gated = self._attention_graph(Tensor(self._check_features(feats_scaled)))
        return a.data, gated.data

    def _attention_graph(self, f: Tensor) -> tuple[Tensor, Tensor]:
        if self.config.attention_mode == "bias":
            batch = f.data.shape[0]
            logits = ad.add(Tensor(np.zeros((batch, f.data.shape[1]))), self.params["attention.b"])
        else:
            logits = ad.linear(f, self.params["attention.W"], self.params["attention.b"])
        weights = ad.softmax(logits)
        return weights, ad.mul(weights, f)

    def encode(self, embeddings: np.ndarray) -> np.ndarray:
        """Bidirectional encoding of one essay's sentence embeddings (eval mode)."""
        return self._encode_graph(np.asarray(embeddings, dtype=np.float64)[None, :, :]).data[0]

    def _encode_graph(self, emb: np.ndarray) -> Tensor:
        # emb: (batch, n_sentences, embed_dim), equal lengths within a batch
        if emb.ndim != 3 or emb.shape[1] == 0:
            raise EmptyEssay("encoder needs at least one sentence")
        if emb.shape[2] != self.config.embed_dim:
            raise ShapeMismatch(
                f"expected embedding dim {self.config.embed_dim}, got {emb.shape[2]}"
            )
        steps = [emb[:, t, :] for t in range(emb.shape[1])]
        h_fwd = _gru_direction(self.params, "gru_fwd", steps)
        h_bwd = _gru_direction(self.params, "gru_bwd", steps[::-1])
        return ad.concat([h_fwd, h_bwd], axis=1)

    def forward_graph(
        self,
        feats_scaled: np.ndarray | None,
        embeddings: np.ndarray,
        train_mode: bool = False,
        dropout: float = 0.5,
        rng: np.random.Generator | None = None,
    ) -> tuple[Tensor, Tensor | None]:
        """Sigmoid outputs in (0, 1) (times SCORE_SPAN gives scores) and A."""
        rep = self._encode_graph(np.asarray(embeddings, dtype=np.float64))
        attn: Tensor | None = None
        if self.config.use_features:
            if feats_scaled is None:
                raise ShapeMismatch("full model requires a feature vector")
            f = Tensor(self._check_features(feats_scaled))
            attn, gated = self._attention_graph(f)
            essay_vec = ad.tanh(
                ad.linear(
                    ad.concat([gated, f], axis=1),
                    self.params["essay_dense.W"],
                    self.params["essay_dense.b"],
                )
            )
            rep = ad.concat([rep, essay_vec], axis=1)
        if train_mode and dropout > 0.0:
            if rng is None:
                raise ValueError("train_mode dropout needs an RNG")
            keep = 1.0 - dropout
            mask = (rng.random(rep.data.shape) < keep).astype(np.float64) / keep
            rep = ad.mul(rep, Tensor(mask))
        out01 = ad.sigmoid(ad.linear(rep, self.params["head.W"], self.params["head.b"]))
        return out01, attn

    def forward(
        self,
        feats_scaled: np.ndarray | None,
        embeddings: np.ndarray,
        train_mode: bool = False,
        dropout: float = 0.5,
        rng: np.random.Generator | None = None,
    ) -> np.ndarray:
        """Raw scores in (0, 3).  Deterministic whenever train_mode is off."""
        emb = np.asarray(embeddings, dtype=np.float64)
        if emb.ndim == 2:
            emb = emb[None, :, :]
        feats = None if feats_scaled is None else np.atleast_2d(feats_scaled)
        out01, _ = self.forward_graph(feats, emb, train_mode, dropout, rng)
        raw = SCORE_SPAN * out01.data
        return raw[0] if np.asarray(embeddings).ndim == 2 else raw

    def loss_graph(
        self,
        feats_scaled: np.ndarray | None,
        embeddings: np.ndarray,
        labels: np.ndarray,
        train_mode: bool = False,
        dropout: float = 0.5,
        rng: np.random.Generator | None = None,
    ) -> Tensor:
        """Mean squared error between sigmoid outputs and labels / 3."""
        out01, _ = self.forward_graph(feats_scaled, embeddings, train_mode, dropout, rng)
        target = np.asarray(labels, dtype=np.float64) / SCORE_SPAN
        if target.shape != out01.data.shape:
            raise ShapeMismatch(f"labels {target.shape} vs outputs {out01.data.shape}")
        diff = ad.sub(out01, Tensor(target))
        return ad.mean(ad.mul(diff, diff))


def round_half_up(raw: np.ndarray) -> np.ndarray:
    """Round raw scores to integers: .5 rounds up, clamped to 0..3."""
    return np.clip(np.floor(np.asarray(raw) + 0.5), 0, 3).astype(int)
