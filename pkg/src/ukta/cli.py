"""Command-line interface.

Subcommands: analyze, score, train, eval, synth, registry, serve.
Exit codes: 0 ok, 2 usage, 3 tagger failure, 4 parse failure,
5 registry/model mismatch, 6 data or training failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .embeddings import HashEmbedder, make_provider
from .errors import (
    DivergedLoss,
    EmptySentence,
    InsufficientData,
    MalformedRecord,
    NoLabels,
    ProviderUnavailable,
    RegistryMismatch,
    TaggerError,
    UktaError,
    UnknownTag,
)
from .evaluation import SynthConfig, evaluate_rubrics, generate_synthetic, stratified_split
from .exporters import export
from .features import default_registry, default_registry_config, load_registry_file
from .pipeline import ModelBundle, build_bundle
from .scorer import (
    Hyper,
    ModelConfig,
    Scaler,
    checkpoint_to_dict,
    load_checkpoint,
    predict,
    save_checkpoint,
    train,
)
from .scorer.data import prepare_dataset, to_items
from .server import ENV_PORT, create_app, provider_from_env
from .tagger import TaggerConfig, tag_text
from .textmodel import Essay, RubricScores, essay_from_dict, essay_to_dict, parse_pretagged
from .scorer.model import round_half_up

EXIT_USAGE = 2
EXIT_TAGGER = 3
EXIT_PARSE = 4
EXIT_MISMATCH = 5
EXIT_DATA = 6


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_registry(path: str | None):
    """Registry plus the provider its config selects (built-in by default)."""
    if path is None:
        return default_registry(), HashEmbedder()
    registry, provider_spec = load_registry_file(path)
    return registry, make_provider(provider_spec)


def _read_corpus(path: Path) -> list[Essay]:
    essays = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                essays.append(essay_from_dict(json.loads(line)))
    if not essays:
        raise MalformedRecord(str(path), "corpus file holds no essays")
    return essays


def _write_corpus(path: Path, essays) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for essay in essays:
            fh.write(json.dumps(essay_to_dict(essay), ensure_ascii=False) + "\n")


def _input_essay(args) -> Essay:
    if getattr(args, "bundle", None):
        with open(args.bundle, "r", encoding="utf-8") as fh:
            return essay_from_dict(json.load(fh)["essay"])
    # the default id matches the HTTP service so exports stay byte-identical
    essay_id = args.id or "essay"
    if args.pretagged:
        path = Path(args.pretagged)
        fmt = args.format or ("json" if path.suffix == ".json" else "tsv")
        return parse_pretagged(path.read_bytes(), fmt, essay_id=essay_id)
    text = args.text if args.text else Path(args.file).read_text(encoding="utf-8")
    config = TaggerConfig.from_env()
    if config is None:
        raise TaggerError("no tagger endpoint configured (set UKTA_TAGGER_ENDPOINT)")
    return tag_text(text, config, essay_id=essay_id)


def _write_outputs(bundle: dict, out_dir: Path, figures: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for fmt, name in (("json", "bundle.json"), ("csv", "features.csv"), ("txt", "summary.txt")):
        (out_dir / name).write_bytes(export(bundle, fmt))
    if figures:
        from . import figures as fig

        essay = essay_from_dict(bundle["essay"])
        fig.render_category_distribution(essay, out_dir / "categories.png")
        if bundle.get("rubric") and bundle["rubric"]["top_features"]:
            fig.render_attribution(bundle, out_dir / "attribution.png")


def _load_model_bundle(path: str) -> ModelBundle:
    model, scaler, doc = load_checkpoint(path)
    return ModelBundle(
        model=model,
        scaler=scaler,
        fingerprint=doc["registry_fingerprint"],
        meta=doc,
    )


def cmd_analyze(args) -> int:
    registry, provider = _load_registry(args.registry)
    essay = _input_essay(args)
    bundle = build_bundle(essay, registry, provider)
    _write_outputs(bundle, Path(args.out), not args.no_figures)
    print(f"analyzed {essay.id}: bundle {bundle['bundle_id'][:12]} -> {args.out}")
    return 0


def cmd_score(args) -> int:
    registry, provider = _load_registry(args.registry)
    essay = _input_essay(args)
    mb = _load_model_bundle(args.model)
    rubric = predict(essay, mb.model, mb.scaler, registry, provider, mb.fingerprint)
    bundle = build_bundle(essay, registry, provider, rubric=rubric)
    _write_outputs(bundle, Path(args.out), not args.no_figures)
    print(f"scored {essay.id}: bundle {bundle['bundle_id'][:12]} -> {args.out}")
    return 0


def cmd_train(args) -> int:
    registry, provider = _load_registry(args.registry)
    essays = _read_corpus(Path(args.corpus))
    train_essays, val_essays, _ = stratified_split(
        essays, (1.0 - args.val_frac, args.val_frac, 0.0), seed=args.seed
    )
    train_ds = prepare_dataset(train_essays, registry, provider)
    val_ds = prepare_dataset(val_essays or train_essays, registry, provider)
    scaler = Scaler.fit(train_ds.feats, train_ds.available)
    config = ModelConfig(
        n_features=len(registry),
        embed_dim=provider.dim,
        hidden=args.hidden,
        essay_dim=args.essay_dim,
        use_features=not args.baseline,
    )
    hyper = Hyper(
        dropout=args.dropout,
        lr=args.lr,
        epochs=args.epochs,
        patience=args.patience,
        batch_size=args.batch_size,
    )
    result = train(
        to_items(train_ds, scaler, config.use_features),
        to_items(val_ds, scaler, config.use_features),
        config,
        hyper,
        seed=args.seed,
    )
    ckpt = checkpoint_to_dict(
        result.model,
        scaler,
        registry.fingerprint(),
        registry.names,
        [s.family for s in registry.specs],
        hyper,
        args.seed,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out, ckpt)
    log_path = out.with_suffix(out.suffix + ".log.json")
    log_path.write_text(json.dumps(result.log, indent=2) + "\n", encoding="utf-8")
    if not args.no_figures:
        from . import figures as fig

        fig.render_training_curves(result.log, out.with_suffix(out.suffix + ".png"))
    print(
        f"trained {'baseline' if args.baseline else 'full'} model: "
        f"best val MSE {result.best_val_mse:.6f} at epoch {result.best_epoch} -> {out}"
    )
    return 0


def cmd_eval(args) -> int:
    registry, provider = _load_registry(args.registry)
    essays = _read_corpus(Path(args.corpus))
    if any(e.labels is None for e in essays):
        raise NoLabels("evaluation corpus must be fully labeled")
    mb = _load_model_bundle(args.model)
    if mb.fingerprint != registry.fingerprint():
        raise RegistryMismatch("checkpoint was trained with a different registry")
    ds = prepare_dataset(essays, registry, provider)
    items = to_items(ds, mb.scaler, mb.model.config.use_features)
    predicted = []
    for item in items:
        feats = None if item.feats is None else item.feats[None, :]
        raw = mb.model.forward(feats, item.embeddings, train_mode=False)
        predicted.append(RubricScores(tuple(int(x) for x in round_half_up(raw))))
    report = evaluate_rubrics(predicted, [e.labels for e in essays])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    (out_dir / "report.txt").write_text(report.to_text(), encoding="utf-8")
    if not args.no_figures:
        from . import figures as fig

        fig.render_rubric_metrics(report.to_dict(), out_dir / "metrics.png")
    print(report.to_text(), end="")
    return 0


def cmd_synth(args) -> int:
    corpus = generate_synthetic(SynthConfig(n_essays=args.n), seed=args.seed)
    _write_corpus(Path(args.out), corpus.essays)
    print(f"wrote {len(corpus.essays)} labeled essays -> {args.out}")
    return 0


def cmd_registry(args) -> int:
    config = default_registry_config()
    text = json.dumps(config, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(config)} feature specs -> {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    registry, provider = _load_registry(args.registry)
    if args.registry is None:
        provider = provider_from_env()
    model_bundle = _load_model_bundle(args.model) if args.model else None
    app = create_app(registry=registry, provider=provider, model_bundle=model_bundle)
    port = args.port or int(os.environ.get(ENV_PORT, "8000"))
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


def _add_input_options(parser, with_bundle=False):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", help="raw text (requires a tagger endpoint)")
    group.add_argument("--file", help="path to a raw text file (requires a tagger endpoint)")
    group.add_argument("--pretagged", help="path to a pre-tagged TSV/JSON document")
    if with_bundle:
        group.add_argument("--bundle", help="path to a previously exported bundle.json")
    parser.add_argument("--format", choices=("tsv", "json"),
                        help="pretagged format (default: by file extension)")
    parser.add_argument("--id", help="essay id recorded in the outputs (default: essay)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ukta", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ukta {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="compute the feature bundle for one document")
    _add_input_options(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--registry", help="registry config JSON (default: built-in)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("score", help="analyze and predict rubric scores")
    _add_input_options(p, with_bundle=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", required=True, help="model checkpoint JSON")
    p.add_argument("--registry", help="registry config JSON (default: built-in)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train", help="train a scoring model on a labeled corpus")
    p.add_argument("--corpus", required=True, help="JSONL corpus (one essay per line)")
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--registry", help="registry config JSON (default: built-in)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--essay-dim", type=int, default=64)
    p.add_argument("--val-frac", type=float, default=0.15)
    p.add_argument("--baseline", action="store_true", help="sentence-only baseline model")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a labeled corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--registry", help="registry config JSON (default: built-in)")
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("registry", help="print or write the default feature registry")
    p.add_argument("--out")
    p.set_defaults(func=cmd_registry)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0, help=f"default: ${ENV_PORT} or 8000")
    p.add_argument("--model", help="model checkpoint JSON")
    p.add_argument("--registry", help="registry config JSON (default: built-in)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TaggerError as exc:
        return _fail(EXIT_TAGGER, str(exc))
    except (UnknownTag, EmptySentence, MalformedRecord) as exc:
        return _fail(EXIT_PARSE, str(exc))
    except RegistryMismatch as exc:
        return _fail(EXIT_MISMATCH, str(exc))
    except (NoLabels, InsufficientData, DivergedLoss, ProviderUnavailable) as exc:
        return _fail(EXIT_DATA, str(exc))
    except FileNotFoundError as exc:
        return _fail(EXIT_DATA, str(exc))
    except UktaError as exc:
        return _fail(1, str(exc))


if __name__ == "__main__":
    sys.exit(main())
