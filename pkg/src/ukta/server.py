"""HTTP service exposing analysis, scoring, the registry and exports.

Endpoints:

* ``GET  /api/health``            -> {"status": "ok", "version": ...}
* ``GET  /api/registry``          -> registry config + fingerprint
* ``POST /api/analyze``           -> AnalysisBundle (no model needed)
* ``POST /api/score``             -> AnalysisBundle incl. rubric (409 without a model)
* ``GET  /api/export/{fmt}?id=``  -> bytes identical to the CLI exports

Request body for analyze/score: {"text": ...} to call the remote tagger,
or {"pretagged": ..., "format": "tsv"|"json"} for offline input.  Error
responses carry {"code", "message", "location"?}.

State is limited to an in-memory bundle cache keyed by content hash:
identical inputs yield identical ids and bodies across restarts.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import __version__
from .embeddings import EmbeddingProvider, HashEmbedder, RemoteEmbedder
from .errors import (
    EmptySentence,
    MalformedRecord,
    ProviderUnavailable,
    RegistryMismatch,
    TaggerError,
    UnknownTag,
)
from .exporters import CONTENT_TYPES, export
from .features import FeatureRegistry, default_registry
from .pipeline import ModelBundle, build_bundle
from .scorer import predict
from .tagger import TaggerConfig, tag_text
from .textmodel import parse_pretagged

ENV_EMBED_ENDPOINT = "UKTA_EMBED_ENDPOINT"
ENV_PORT = "UKTA_PORT"


def _error(status: int, code: str, message: str, location=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if location is not None:
        body["location"] = str(location)
    return JSONResponse(body, status_code=status)


def provider_from_env() -> EmbeddingProvider:
    endpoint = os.environ.get(ENV_EMBED_ENDPOINT)
    return RemoteEmbedder(endpoint) if endpoint else HashEmbedder()


def create_app(
    registry: FeatureRegistry | None = None,
    provider: EmbeddingProvider | None = None,
    model_bundle: ModelBundle | None = None,
    tagger_config: TaggerConfig | None = None,
) -> FastAPI:
    registry = registry or default_registry()
    provider = provider or provider_from_env()
    if tagger_config is None:
        tagger_config = TaggerConfig.from_env()

    app = FastAPI(title="ukta", version=__version__)
    cache: dict[str, dict] = {}

    async def _essay_from_request(request: Request):
        try:
            body = await request.json()
        except Exception:
            return None, _error(400, "malformed", "request body is not valid JSON")
        if not isinstance(body, dict):
            return None, _error(400, "malformed", "request body must be a JSON object")
        text = body.get("text")
        pretagged = body.get("pretagged")
        if (text is None) == (pretagged is None):
            return None, _error(
                400, "malformed", "provide exactly one of 'text' or 'pretagged'"
            )
        if text is not None:
            if not isinstance(text, str) or not text.strip():
                return None, _error(400, "malformed", "'text' must be a non-empty string")
            if tagger_config is None:
                return None, _error(
                    502, "tagger_unavailable", "no tagger endpoint is configured"
                )
            try:
                return tag_text(text, tagger_config), None
            except TaggerError as exc:
                return None, _error(502, "tagger_failed", str(exc))
        fmt = body.get("format", "tsv")
        if fmt not in ("tsv", "json"):
            return None, _error(400, "malformed", f"unknown pretagged format {fmt!r}")
        try:
            return parse_pretagged(str(pretagged), fmt), None
        except UnknownTag as exc:
            return None, _error(422, "unknown_tag", str(exc), exc.location)
        except (MalformedRecord, EmptySentence) as exc:
            return None, _error(400, "parse_failed", str(exc), getattr(exc, "location", None))

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/api/registry")
    def registry_view():
        return {
            "fingerprint": registry.fingerprint(),
            "size": len(registry),
            "entries": registry.to_config(),
        }

    @app.post("/api/analyze")
    async def analyze(request: Request):
        essay, err = await _essay_from_request(request)
        if err is not None:
            return err
        try:
            bundle = build_bundle(essay, registry, provider)
        except ProviderUnavailable as exc:
            return _error(502, "embedding_failed", str(exc))
        cache[bundle["bundle_id"]] = bundle
        return JSONResponse(bundle)

    @app.post("/api/score")
    async def score(request: Request):
        if model_bundle is None:
            return _error(409, "no_model", "no model checkpoint is loaded")
        essay, err = await _essay_from_request(request)
        if err is not None:
            return err
        try:
            rubric = predict(
                essay,
                model_bundle.model,
                model_bundle.scaler,
                registry,
                provider,
                expected_fingerprint=model_bundle.fingerprint,
            )
            bundle = build_bundle(essay, registry, provider, rubric=rubric)
        except RegistryMismatch as exc:
            return _error(409, "registry_mismatch", str(exc))
        except ProviderUnavailable as exc:
            return _error(502, "embedding_failed", str(exc))
        cache[bundle["bundle_id"]] = bundle
        return JSONResponse(bundle)

    @app.get("/api/export/{fmt}")
    def export_view(fmt: str, id: str = ""):
        if fmt not in CONTENT_TYPES:
            return _error(400, "malformed", f"unknown export format {fmt!r}")
        bundle = cache.get(id)
        if bundle is None:
            return _error(404, "not_found", f"no bundle with id {id!r}")
        return Response(content=export(bundle, fmt), media_type=CONTENT_TYPES[fmt])

    return app
