"""Bundle exporters: JSON, CSV and TXT bytes.

One code path serves both the CLI and the HTTP service, so the two
surfaces are byte-identical by construction.  All outputs are UTF-8 with
LF line endings; CSV uses RFC-4180 quoting.
"""

from __future__ import annotations

import csv
import io
import json

from .textmodel import RUBRIC_NAMES, essay_from_dict

CONTENT_TYPES = {
    "json": "application/json",
    "csv": "text/csv",
    "txt": "text/plain",
}


def export_json(bundle: dict) -> bytes:
    return (json.dumps(bundle, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def _format_value(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def export_csv(bundle: dict) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(["name", "family", "value", "available"])
    for row in bundle["features"]:
        writer.writerow(
            [
                row["name"],
                row["family"],
                _format_value(row["value"]),
                "true" if row["available"] else "false",
            ]
        )
    return buf.getvalue().encode("utf-8")


def export_txt(bundle: dict) -> bytes:
    essay = essay_from_dict(bundle["essay"])
    lines: list[str] = []
    tool = bundle["tool"]
    lines.append(f"{tool['name']} analysis (version {tool['version']})")
    lines.append(f"essay: {essay.id}")
    stats = bundle["stats"]
    lines.append(
        "paragraphs: {paragraphs}  sentences: {sentences}  "
        "wordpieces: {wordpieces}  morphemes: {morphemes}".format(**stats)
    )
    lines.append("")

    lines.append("[morpheme analysis]")
    for sent in essay.sentences():
        lines.append(f"sentence {sent.index}:")
        for wp in sent.wordpieces:
            parts = " + ".join(f"{m.lemma}/{m.tag}" for m in wp.morphemes)
            lines.append(f"  {wp.raw} = {parts}")
    lines.append("")

    lines.append("[sentence occurrences per lemma]")
    for lemma, indices in bundle["occurrences"].items():
        lines.append(f"  {lemma}: {', '.join(str(i) for i in indices)}")
    lines.append("")

    available = sum(1 for row in bundle["features"] if row["available"])
    lines.append(f"[features] ({available}/{len(bundle['features'])} available)")
    for row in bundle["features"]:
        value = _format_value(row["value"]) if row["available"] else "n/a"
        lines.append(f"  {row['name']} ({row['family']}): {value}")
    lines.append("")

    if bundle.get("cohesion"):
        coh = bundle["cohesion"]
        lines.append("[cohesion]")
        keywords = ", ".join(f"{phrase} ({score:.3f})" for phrase, score in coh["keywords"])
        lines.append(f"  keywords: {keywords}")
        lines.append(f"  topic sentence: {coh['topic_sentence']}")
        lines.append(f"  avg sentence similarity: {coh['avg_sen_similarity']:.6f}")
        lines.append(f"  adjacent sentence similarity: {coh['adj_sen_similarity']:.6f}")
        lines.append("")

    if bundle.get("rubric"):
        rubric = bundle["rubric"]
        lines.append("[rubric scores]")
        for name in RUBRIC_NAMES:
            lines.append(
                f"  {name}: {rubric['scores'][name]} (raw {rubric['raw'][name]:.4f})"
            )
        lines.append("")
        lines.append("[top contributing features]")
        for t in rubric["top_features"]:
            value = "n/a" if t["value"] is None else f"{t['value']:.4f}"
            lines.append(f"  {t['name']}: weight {t['weight']:.6f}, value {value}")
        lines.append("")

    return ("\n".join(lines) + "\n").encode("utf-8")


EXPORTERS = {"json": export_json, "csv": export_csv, "txt": export_txt}


def export(bundle: dict, fmt: str) -> bytes:
    try:
        return EXPORTERS[fmt](bundle)
    except KeyError:
        raise ValueError(f"unknown export format {fmt!r}") from None
