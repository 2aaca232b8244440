/** View state: the UI is a pure view over the last server bundle. */

import type { AnalysisBundle, Family } from "./types.js";

export type Tab = "morphemes" | "features" | "rubric";
export type FamilyFilter = Family | "all";

export interface ViewState {
  draft: string;
  activeTab: Tab;
  bundle: AnalysisBundle | null;
  familyFilter: FamilyFilter;
  error: string | null;
  busy: boolean;
}

export function initialState(): ViewState {
  return {
    draft: "",
    activeTab: "morphemes",
    bundle: null,
    familyFilter: "all",
    error: null,
    busy: false,
  };
}

export function canSubmit(state: ViewState): boolean {
  return state.draft.trim().length > 0 && !state.busy;
}

export function canDownload(state: ViewState): boolean {
  return state.bundle !== null;
}
