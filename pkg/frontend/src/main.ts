/** Page wiring for the draft -> analyze -> revise loop. */

import { ApiError, createSubmitter, fetchExport } from "./api.js";
import { canDownload, canSubmit, initialState, type Tab, type ViewState } from "./state.js";
import { renderError, renderFeatures, renderMorphemes, renderRubric } from "./render.js";
import type { ExportFormat } from "./types.js";

const EXPORT_MIME: Record<ExportFormat, string> = {
  json: "application/json",
  csv: "text/csv",
  txt: "text/plain",
};

export function saveBytes(bytes: Uint8Array, filename: string, mime: string): void {
  const url = URL.createObjectURL(new Blob([bytes.slice().buffer], { type: mime }));
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export function setupApp(root: HTMLElement): { state: ViewState; refresh: () => void } {
  const state = initialState();
  const submit = createSubmitter();

  const draft = root.querySelector<HTMLTextAreaElement>("#draft")!;
  const submitButton = root.querySelector<HTMLButtonElement>("#submit")!;
  const errorHost = root.querySelector<HTMLElement>("#error")!;
  const tabs = root.querySelectorAll<HTMLButtonElement>("[data-tab]");
  const panes: Record<Tab, HTMLElement> = {
    morphemes: root.querySelector<HTMLElement>("#pane-morphemes")!,
    features: root.querySelector<HTMLElement>("#pane-features")!,
    rubric: root.querySelector<HTMLElement>("#pane-rubric")!,
  };
  const familySelect = root.querySelector<HTMLSelectElement>("#family-filter")!;
  const downloads = root.querySelectorAll<HTMLButtonElement>("[data-download]");

  function refresh(): void {
    submitButton.disabled = !canSubmit(state);
    downloads.forEach((b) => (b.disabled = !canDownload(state)));
    tabs.forEach((b) => b.classList.toggle("active", b.dataset.tab === state.activeTab));
    for (const [name, pane] of Object.entries(panes)) {
      pane.hidden = name !== state.activeTab;
    }
    renderError(errorHost, state.error);
    if (state.bundle) {
      renderMorphemes(panes.morphemes, state.bundle);
      renderFeatures(panes.features, state.bundle, state.familyFilter);
      renderRubric(panes.rubric, state.bundle);
    }
  }

  draft.addEventListener("input", () => {
    state.draft = draft.value;
    refresh();
  });

  submitButton.addEventListener("click", async () => {
    if (!canSubmit(state)) return;
    state.busy = true;
    state.error = null;
    refresh();
    try {
      state.bundle = await submit(state.draft);
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      state.error =
        error instanceof ApiError ? error.body : String((error as Error).message ?? error);
    } finally {
      state.busy = false;
      refresh();
    }
  });

  tabs.forEach((button) =>
    button.addEventListener("click", () => {
      state.activeTab = button.dataset.tab as Tab;
      refresh();
    }),
  );

  familySelect.addEventListener("change", () => {
    state.familyFilter = familySelect.value as ViewState["familyFilter"];
    refresh();
  });

  downloads.forEach((button) =>
    button.addEventListener("click", async () => {
      if (!state.bundle) return;
      const format = button.dataset.download as ExportFormat;
      try {
        const bytes = await fetchExport(format, state.bundle.bundle_id);
        saveBytes(bytes, `analysis.${format}`, EXPORT_MIME[format]);
      } catch (error) {
        state.error = error instanceof ApiError ? error.body : String(error);
        refresh();
      }
    }),
  );

  refresh();
  return { state, refresh };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  setupApp(document.getElementById("app")!);
}
