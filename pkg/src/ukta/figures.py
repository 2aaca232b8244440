"""Report figures rendered next to the delimited outputs.

Every CLI report path can drop a PNG beside its JSON/CSV/TXT files:
category distribution for plain analysis, the color-coded top-feature
attribution chart for scoring, per-rubric metric bars for evaluation, and
loss curves for training.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .textmodel import Essay, pos_category

FAMILY_COLORS = {
    "basic": "#c0392b",
    "diversity": "#2e6bb0",
    "cohesion": "#8e44ad",
}


def render_category_distribution(essay: Essay, path) -> None:
    counts: dict[str, int] = {}
    for m in essay.morphemes():
        key = pos_category(m.tag).value
        counts[key] = counts.get(key, 0) + 1
    labels = sorted(counts, key=counts.get, reverse=True)
    values = [counts[k] for k in labels]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(labels, values, color="#2e6bb0")
    ax.set_ylabel("morphemes")
    ax.set_title(f"morpheme classes: {essay.id}")
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_attribution(bundle: dict, path) -> None:
    """Horizontal bars of the top contributing features, colored by family."""
    rubric = bundle.get("rubric")
    if not rubric or not rubric["top_features"]:
        raise ValueError("bundle has no attribution to draw")
    families = {row["name"]: row["family"] for row in bundle["features"]}
    tops = rubric["top_features"]
    names = [t["name"] for t in tops][::-1]
    weights = [t["weight"] for t in tops][::-1]
    colors = [FAMILY_COLORS.get(families.get(n, "basic"), "#666666") for n in names]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.barh(names, weights, color=colors)
    ax.set_xlabel("attention weight")
    ax.set_title("top contributing features")
    handles = [plt.Rectangle((0, 0), 1, 1, color=c) for c in FAMILY_COLORS.values()]
    ax.legend(handles, FAMILY_COLORS.keys(), loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_rubric_metrics(report: dict, path) -> None:
    """Accuracy/QWK bars per rubric from an evaluation report dict."""
    rows = report["rubrics"]
    names = [r["rubric"] for r in rows]
    x = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.bar(x - 0.2, [r["accuracy"] for r in rows], width=0.4, label="accuracy",
           color="#2e6bb0")
    ax.bar(x + 0.2, [r["qwk"] for r in rows], width=0.4, label="QWK", color="#8e44ad")
    ax.axhline(report["average"]["accuracy"], color="#2e6bb0", ls="--", lw=0.8)
    ax.axhline(report["average"]["qwk"], color="#8e44ad", ls="--", lw=0.8)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(bottom=min(0.0, min(r["qwk"] for r in rows)))
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_training_curves(log: list[dict], path) -> None:
    epochs = [row["epoch"] for row in log]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(epochs, [row["train_mse"] for row in log], label="train MSE")
    ax.plot(epochs, [row["val_mse"] for row in log], label="validation MSE")
    ax.set_xlabel("epoch")
    ax.set_ylabel("MSE (labels / 3 scale)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
