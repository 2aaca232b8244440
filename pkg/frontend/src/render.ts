/** DOM rendering. Every displayed value comes verbatim from the bundle. */

import type { AnalysisBundle, Family, FeatureRow } from "./types.js";
import type { FamilyFilter } from "./state.js";

export const FAMILY_COLORS: Record<Family, string> = {
  basic: "#c0392b",
  diversity: "#2e6bb0",
  cohesion: "#8e44ad",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Numbers are rendered with String() so the text matches the JSON value. */
export function show(value: number | null): string {
  return value === null ? "n/a" : String(value);
}

export function renderMorphemes(container: HTMLElement, bundle: AnalysisBundle): void {
  container.replaceChildren();

  const table = el("table", "morpheme-table");
  const head = el("tr");
  for (const title of ["sentence", "wordpiece", "morphemes"]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);
  for (const paragraph of bundle.essay.paragraphs) {
    for (const sentence of paragraph.sentences) {
      for (const wp of sentence.wordpieces) {
        const row = el("tr", "morpheme-row");
        row.appendChild(el("td", undefined, String(sentence.index)));
        row.appendChild(el("td", undefined, wp.raw));
        row.appendChild(
          el("td", undefined, wp.morphemes.map((m) => `${m.lemma}/${m.tag}`).join(" + ")),
        );
        table.appendChild(row);
      }
    }
  }
  container.appendChild(table);

  const list = el("ul", "occurrence-list");
  for (const [lemma, indices] of Object.entries(bundle.occurrences)) {
    list.appendChild(el("li", undefined, `${lemma}: ${indices.join(", ")}`));
  }
  container.appendChild(list);
}

export function renderFeatures(
  container: HTMLElement,
  bundle: AnalysisBundle,
  filter: FamilyFilter,
): void {
  container.replaceChildren();
  const rows = bundle.features.filter(
    (row: FeatureRow) => filter === "all" || row.family === filter,
  );
  const table = el("table", "feature-table");
  const head = el("tr");
  for (const title of ["name", "family", "value"]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);
  for (const row of rows) {
    const tr = el("tr", `feature-row family-${row.family}`);
    tr.appendChild(el("td", undefined, row.name));
    tr.appendChild(el("td", undefined, row.family));
    tr.appendChild(el("td", undefined, row.available ? show(row.value) : "n/a"));
    table.appendChild(tr);
  }
  container.appendChild(table);
}

export function renderRubric(container: HTMLElement, bundle: AnalysisBundle): void {
  container.replaceChildren();
  if (!bundle.rubric) {
    container.appendChild(
      el("p", "rubric-empty", "No model is loaded on the server; scores are unavailable."),
    );
    return;
  }
  const scores = el("table", "rubric-table");
  const head = el("tr");
  for (const title of ["rubric", "score", "raw"]) {
    head.appendChild(el("th", undefined, title));
  }
  scores.appendChild(head);
  for (const [name, score] of Object.entries(bundle.rubric.scores)) {
    const tr = el("tr", "rubric-row");
    tr.appendChild(el("td", undefined, name));
    tr.appendChild(el("td", undefined, String(score)));
    tr.appendChild(el("td", undefined, String(bundle.rubric.raw[name])));
    scores.appendChild(tr);
  }
  container.appendChild(scores);

  const panel = el("div", "attribution-panel");
  panel.appendChild(el("h3", undefined, "Top contributing features"));
  renderTopFeatures(panel, bundle);
  container.appendChild(panel);
}

/**
 * Attribution rows in exactly the server-provided order, one per top
 * feature, color-coded by the feature's family.
 */
export function renderTopFeatures(container: HTMLElement, bundle: AnalysisBundle): void {
  const families = new Map(bundle.features.map((row) => [row.name, row.family]));
  const list = el("ol", "attribution-list");
  for (const top of bundle.rubric?.top_features ?? []) {
    const family = families.get(top.name) ?? "basic";
    const item = el("li", `attribution-row family-${family}`);
    item.dataset.family = family;
    item.style.borderLeftColor = FAMILY_COLORS[family];
    item.appendChild(el("span", "attribution-name", top.name));
    item.appendChild(el("span", "attribution-value", show(top.value)));
    const bar = el("span", "attribution-bar");
    bar.style.width = `${Math.round(top.weight * 1000) / 10}%`;
    bar.title = String(top.weight);
    item.appendChild(bar);
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderError(container: HTMLElement, message: string | null): void {
  container.replaceChildren();
  if (message === null) return;
  const banner = el("div", "error-banner");
  banner.setAttribute("role", "alert");
  banner.appendChild(el("span", undefined, message));
  const dismiss = el("button", "error-dismiss", "dismiss");
  dismiss.addEventListener("click", () => container.replaceChildren());
  banner.appendChild(dismiss);
  container.appendChild(banner);
}
