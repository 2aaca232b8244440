"""Client for an external morpheme-analysis service.

The service owns Korean morphological disambiguation; this client only
speaks the wire protocol and validates what comes back.  There is
deliberately no bundled fallback tagger: a weak statistical tagger would
silently distort every downstream feature, which is exactly the failure
mode this toolkit is built to avoid.  Offline work uses pre-tagged input
(see :func:`ukta.textmodel.parse_pretagged`) instead.

Wire format: POST {"text": ...} ->
{"sentences": [{"wordpieces": [{"raw": ..., "morphemes":
[{"surface": ..., "lemma": ..., "tag": ...}]}]}]}
"""

from __future__ import annotations

import json
import os
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass

from .errors import InvalidResponse, Timeout, UnknownTag, Unreachable
from .textmodel import Essay, Morpheme, POS_TAGS, Paragraph, Sentence, Wordpiece

ENV_ENDPOINT = "UKTA_TAGGER_ENDPOINT"
ENV_API_KEY = "UKTA_TAGGER_KEY"


@dataclass(frozen=True)
class TaggerConfig:
    endpoint: str
    api_key: str | None = None
    timeout_ms: int = 10_000
    retries: int = 2

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")

    @classmethod
    def from_env(cls, default_endpoint: str | None = None) -> "TaggerConfig | None":
        endpoint = os.environ.get(ENV_ENDPOINT, default_endpoint)
        if not endpoint:
            return None
        return cls(endpoint=endpoint, api_key=os.environ.get(ENV_API_KEY))


def _request_once(raw: str, config: TaggerConfig) -> dict:
    body = json.dumps({"text": raw}, ensure_ascii=False).encode("utf-8")
    headers = {"Content-Type": "application/json"}
    if config.api_key:
        headers["Authorization"] = f"Bearer {config.api_key}"
    req = urllib.request.Request(config.endpoint, data=body, headers=headers)
    try:
        with urllib.request.urlopen(req, timeout=config.timeout_ms / 1000.0) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except socket.timeout as exc:
        raise Timeout(config.endpoint, config.timeout_ms) from exc
    except urllib.error.HTTPError as exc:
        raise InvalidResponse(f"HTTP {exc.code} from tagger") from exc
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, socket.timeout):
            raise Timeout(config.endpoint, config.timeout_ms) from exc
        raise Unreachable(config.endpoint, str(exc.reason)) from exc
    except (OSError, ValueError) as exc:
        raise InvalidResponse(str(exc)) from exc


def _parse_payload(payload: dict, raw: str, essay_id: str) -> Essay:
    try:
        sentences_doc = payload["sentences"]
    except (TypeError, KeyError):
        raise InvalidResponse("payload lacks a 'sentences' list") from None
    if not isinstance(sentences_doc, list) or not sentences_doc:
        raise InvalidResponse("payload holds no sentences")

    sentences = []
    flat_raws: list[str] = []
    for s_i, sent_doc in enumerate(sentences_doc):
        wordpieces = []
        for wp_doc in sent_doc.get("wordpieces", []):
            morphemes = []
            for m_doc in wp_doc.get("morphemes", []):
                tag = m_doc.get("tag")
                if tag not in POS_TAGS:
                    # never fabricate a tag: refuse the whole response
                    raise InvalidResponse(f"unknown POS tag {tag!r} in response")
                surface = m_doc.get("surface") or m_doc.get("lemma")
                lemma = m_doc.get("lemma") or surface
                if not surface or not lemma:
                    raise InvalidResponse("morpheme with empty surface/lemma")
                morphemes.append(Morpheme(surface=surface, lemma=lemma, tag=tag))
            if not morphemes:
                raise InvalidResponse("wordpiece with no morphemes")
            raw_wp = wp_doc.get("raw", "")
            if not raw_wp:
                raise InvalidResponse("wordpiece with no raw text")
            flat_raws.append(raw_wp)
            wordpieces.append(Wordpiece(raw=raw_wp, morphemes=tuple(morphemes)))
        if not wordpieces:
            raise InvalidResponse(f"sentence {s_i} has no wordpieces")
        sentences.append(Sentence(index=s_i, wordpieces=tuple(wordpieces)))

    if flat_raws != raw.split():
        raise InvalidResponse("wordpieces do not partition the input by whitespace")
    return Essay(
        id=essay_id,
        paragraphs=(Paragraph(index=0, sentences=tuple(sentences)),),
    )


def tag_text(raw: str, config: TaggerConfig, essay_id: str = "essay") -> Essay:
    """Tag raw text through the remote service.

    Retries transport failures up to config.retries times; response
    validation failures are not retried (identical payloads would fail
    identically).  Raises Unreachable, Timeout, InvalidResponse.
    """
    if not raw or not raw.strip():
        raise ValueError("raw text must be non-empty")
    last_error: Exception | None = None
    for _ in range(config.retries + 1):
        try:
            payload = _request_once(raw, config)
            break
        except (Unreachable, Timeout) as exc:
            last_error = exc
    else:
        assert last_error is not None
        raise last_error
    try:
        return _parse_payload(payload, raw, essay_id)
    except UnknownTag as exc:  # defensive: validation happens inline above
        raise InvalidResponse(str(exc)) from exc
