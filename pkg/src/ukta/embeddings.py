"""Pluggable sentence/phrase embedding providers.

The built-in provider is a deterministic hashed bag of morphemes: each
(lemma, major-class) pair expands to a fixed pseudo-random vector through a
keyed hash, and a sentence embeds as the L2-normalized sum of its morpheme
vectors.  It has no trained weights and exists so that every cohesion
feature is reproducible byte-for-byte on any machine.  Production-quality
vectors plug in through the remote provider, which speaks a small JSON
protocol (POST {"sentences": [...]} -> {"vectors": [[...]]}).
"""

from __future__ import annotations

import hashlib
import json
import urllib.error
import urllib.request
from typing import Protocol, Sequence

import numpy as np

from .errors import ProviderUnavailable
from .textmodel import Essay, Sentence, pos_category

_HASH_KEY = b"ukta-embed-v1"
_FLOATS_PER_BLOCK = 8  # blake2b digest is 64 bytes = 8 float64 lanes


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    value = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, value))


class EmbeddingProvider(Protocol):
    dim: int

    def embed_sentence(self, sentence: Sentence) -> np.ndarray: ...

    def embed_tokens(self, tokens: Sequence[tuple[str, str]]) -> np.ndarray: ...


class HashEmbedder:
    """Deterministic, stateless bag-of-morphemes embedder."""

    kind = "builtin-hash"

    def __init__(self, dim: int = 64):
        if dim < 8:
            raise ValueError("embedding dim must be >= 8")
        self.dim = dim
        self._cache: dict[tuple[str, str], np.ndarray] = {}

    def _token_vector(self, lemma: str, category: str) -> np.ndarray:
        key = (lemma, category)
        vec = self._cache.get(key)
        if vec is not None:
            return vec
        blocks = []
        n_blocks = -(-self.dim // _FLOATS_PER_BLOCK)
        for i in range(n_blocks):
            payload = f"{lemma}\x1f{category}\x1f{i}".encode("utf-8")
            digest = hashlib.blake2b(payload, key=_HASH_KEY, digest_size=64).digest()
            blocks.append(np.frombuffer(digest, dtype="<u8"))
        raw = np.concatenate(blocks)[: self.dim]
        # map uint64 lanes onto [-1, 1)
        vec = raw.astype(np.float64) / 2.0**63 - 1.0
        self._cache[key] = vec
        return vec

    def embed_tokens(self, tokens: Sequence[tuple[str, str]]) -> np.ndarray:
        if not tokens:
            raise ProviderUnavailable("cannot embed an empty token bag")
        acc = np.zeros(self.dim)
        for lemma, category in tokens:
            acc += self._token_vector(lemma, category)
        norm = float(np.linalg.norm(acc))
        if norm < 1e-12:
            # adversarial cancellation; fall back to a fixed direction
            acc = np.zeros(self.dim)
            acc[0] = 1.0
            return acc
        return acc / norm

    def embed_sentence(self, sentence: Sentence) -> np.ndarray:
        tokens = [(m.lemma, pos_category(m.tag).value) for m in sentence.morphemes()]
        return self.embed_tokens(tokens)


class RemoteEmbedder:
    """Client for an external embedding service."""

    kind = "remote"

    def __init__(self, endpoint: str, timeout_ms: int = 10_000):
        self.endpoint = endpoint
        self.timeout_ms = timeout_ms
        self.dim = 0  # discovered from the first response

    def _post(self, sentences: list[str]) -> list[list[float]]:
        body = json.dumps({"sentences": sentences}).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout_ms / 1000.0) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise ProviderUnavailable(f"embedding service failed: {exc}") from exc
        vectors = payload.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(sentences):
            raise ProviderUnavailable("embedding service returned a malformed payload")
        widths = {len(v) for v in vectors}
        if len(widths) != 1:
            raise ProviderUnavailable("embedding service returned ragged vectors")
        (width,) = widths
        if width < 8:
            raise ProviderUnavailable(f"embedding dim {width} < 8")
        if self.dim == 0:
            self.dim = width
        elif width != self.dim:
            raise ProviderUnavailable(f"embedding dim changed from {self.dim} to {width}")
        return vectors

    def embed_tokens(self, tokens: Sequence[tuple[str, str]]) -> np.ndarray:
        if not tokens:
            raise ProviderUnavailable("cannot embed an empty token bag")
        text = " ".join(lemma for lemma, _ in tokens)
        return np.asarray(self._post([text])[0], dtype=np.float64)

    def embed_sentence(self, sentence: Sentence) -> np.ndarray:
        return np.asarray(self._post([sentence.text])[0], dtype=np.float64)


def make_provider(spec: dict | None) -> EmbeddingProvider:
    """Build a provider from a config spec.

    {"kind": "builtin-hash", "dim": 64} or
    {"kind": "remote", "endpoint": ..., "timeout_ms": ...}; a remote spec
    without an endpoint falls back to the UKTA_EMBED_ENDPOINT env var.
    """
    import os

    if not spec:
        return HashEmbedder()
    kind = spec.get("kind", "builtin-hash")
    if kind == "builtin-hash":
        return HashEmbedder(dim=int(spec.get("dim", 64)))
    if kind == "remote":
        endpoint = spec.get("endpoint") or os.environ.get("UKTA_EMBED_ENDPOINT")
        if not endpoint:
            raise ProviderUnavailable(
                "remote provider configured without an endpoint "
                "(set UKTA_EMBED_ENDPOINT or 'endpoint' in the provider config)"
            )
        return RemoteEmbedder(endpoint, timeout_ms=int(spec.get("timeout_ms", 10_000)))
    raise ValueError(f"unknown embedding provider kind {kind!r}")


def embed_sentences(essay: Essay, provider: EmbeddingProvider) -> np.ndarray:
    """Sentence embeddings of an essay, one row per sentence."""
    rows = [provider.embed_sentence(s) for s in essay.sentences()]
    return np.stack(rows)


def embed_text(essay: Essay, provider: EmbeddingProvider) -> np.ndarray:
    """Essay-level embedding: re-normalized mean of the sentence embeddings."""
    mean = embed_sentences(essay, provider).mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < 1e-12:
        out = np.zeros(mean.shape[0])
        out[0] = 1.0
        return out
    return mean / norm
