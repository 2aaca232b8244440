"""Cohesion features: lexical overlap, keyword extraction, topic consistency.

Overlap works on lemma *sets* per unit (multiplicity ignored): count mode
sums the number of shared lemma types over adjacent unit pairs, binary mode
counts pairs with any shared lemma, and the normed variants divide by the
number of adjacent pairs.  Units are either sentences or paragraphs.

Topic consistency embeds candidate keywords (content-lemma unigrams and
bigrams) and ranks them against a document vector built from the content
lemmas; the sentence closest to the keyword centroid is the topic sentence,
and the mean similarity between it and the remaining sentences is the
topic-anchored sentence similarity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingProvider, cosine, embed_sentences
from .errors import NoCandidates, UndefinedFeature
from .tagclasses import CONTENT_TAGS, resolve_class, unit_lemma_set
from .textmodel import Essay, pos_category


@dataclass(frozen=True)
class OverlapScore:
    raw: float
    normed: float
    pairs: int


@dataclass(frozen=True)
class TopicReport:
    keywords: tuple[tuple[str, float], ...]
    topic_sentence: int
    avg_sen_similarity: float


def _units(essay: Essay, scope: str):
    if scope == "sentence":
        return list(essay.sentences())
    if scope == "paragraph":
        return list(essay.paragraphs)
    raise ValueError(f"unknown overlap scope {scope!r}")


def _unit_morphemes(unit):
    if hasattr(unit, "morphemes"):
        return [unit]
    return list(unit.sentences)


def adjacent_overlap(essay: Essay, scope: str, cls: str, mode: str) -> OverlapScore:
    """Lemma overlap between consecutive units of the given scope.

    cls is a tag-class name ("ALL", "CL", "FL", ...); mode is "count" or
    "binary".  Undefined when the scope has fewer than two units.
    """
    if mode not in ("count", "binary"):
        raise ValueError(f"unknown overlap mode {mode!r}")
    tags = resolve_class(cls)
    units = _units(essay, scope)
    if len(units) < 2:
        raise UndefinedFeature(f"overlap[{scope}]", "fewer than 2 units")
    sets = [unit_lemma_set(_unit_morphemes(u), tags) for u in units]
    raw = 0.0
    for a, b in zip(sets, sets[1:]):
        shared = len(a & b)
        raw += (1.0 if shared else 0.0) if mode == "binary" else float(shared)
    pairs = len(units) - 1
    return OverlapScore(raw=raw, normed=raw / pairs, pairs=pairs)


def _content_token_runs(essay: Essay) -> list[list[tuple[str, str]]]:
    """Per-sentence runs of (lemma, major-class) content tokens."""
    runs = []
    for sent in essay.sentences():
        run = [
            (m.lemma, pos_category(m.tag).value)
            for m in sent.morphemes()
            if m.tag in CONTENT_TAGS
        ]
        runs.append(run)
    return runs


def _candidate_map(essay: Essay):
    """All content tokens plus the unigram/bigram candidate phrases."""
    runs = _content_token_runs(essay)
    doc_tokens = [tok for run in runs for tok in run]
    candidates: dict[str, list[tuple[str, str]]] = {}
    for run in runs:
        for tok in run:
            candidates.setdefault(tok[0], [tok])
        for a, b in zip(run, run[1:]):
            candidates.setdefault(f"{a[0]} {b[0]}", [a, b])
    return doc_tokens, candidates


def extract_keywords(
    essay: Essay, provider: EmbeddingProvider, k: int = 5
) -> tuple[tuple[str, float], ...]:
    """Top-k content n-grams (n <= 2) ranked by similarity to the document.

    Deterministic: ties are broken by candidate text.  Raises NoCandidates
    when the essay has no content lemma.
    """
    doc_tokens, candidates = _candidate_map(essay)
    if not doc_tokens:
        raise NoCandidates("essay has no content lemma")
    doc_vec = provider.embed_tokens(doc_tokens)
    scored = [
        (phrase, cosine(provider.embed_tokens(tokens), doc_vec))
        for phrase, tokens in candidates.items()
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return tuple(scored[:k])


def topic_consistency(
    essay: Essay, provider: EmbeddingProvider, top_k: int = 5
) -> TopicReport:
    """Topic sentence plus topic-anchored mean sentence similarity."""
    if essay.n_sentences < 2:
        raise UndefinedFeature("AvgSenSimilarity", "needs at least 2 sentences")
    keywords = extract_keywords(essay, provider, k=top_k)

    _, candidates = _candidate_map(essay)
    centroid = np.mean(
        [provider.embed_tokens(candidates[phrase]) for phrase, _ in keywords], axis=0
    )

    sent_vecs = embed_sentences(essay, provider)
    sims = [cosine(vec, centroid) for vec in sent_vecs]
    topic_idx = int(np.argmax(sims))  # argmax returns the earliest maximum

    topic_vec = sent_vecs[topic_idx]
    others = [cosine(topic_vec, sent_vecs[j]) for j in range(len(sent_vecs)) if j != topic_idx]
    return TopicReport(
        keywords=keywords,
        topic_sentence=topic_idx,
        avg_sen_similarity=float(np.mean(others)),
    )


def adjacent_similarity(essay: Essay, provider: EmbeddingProvider) -> float:
    """Mean cosine similarity of consecutive sentence pairs."""
    if essay.n_sentences < 2:
        raise UndefinedFeature("AdjSenSimilarity", "needs at least 2 sentences")
    vecs = embed_sentences(essay, provider)
    return float(np.mean([cosine(a, b) for a, b in zip(vecs, vecs[1:])]))
