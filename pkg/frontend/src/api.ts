/** HTTP client for the analysis service. */

import type { AnalysisBundle, ExportFormat } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: string,
  ) {
    super(`HTTP ${status}: ${body}`);
    this.name = "ApiError";
  }
}

export interface ApiOptions {
  baseUrl?: string;
  fetchImpl?: typeof fetch;
  signal?: AbortSignal;
}

function impl(options: ApiOptions): typeof fetch {
  return options.fetchImpl ?? fetch;
}

async function post(
  path: string,
  payload: unknown,
  options: ApiOptions,
): Promise<Response> {
  const doFetch = impl(options);
  return doFetch(`${options.baseUrl ?? ""}${path}`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
    signal: options.signal,
  });
}

/**
 * Score a draft; when the service has no model loaded (409) fall back to
 * plain analysis so the morpheme and feature tabs still render.
 */
export async function submitDraft(
  text: string,
  options: ApiOptions = {},
): Promise<AnalysisBundle> {
  let response = await post("/api/score", { text }, options);
  if (response.status === 409) {
    response = await post("/api/analyze", { text }, options);
  }
  if (!response.ok) {
    throw new ApiError(response.status, await response.text());
  }
  return (await response.json()) as AnalysisBundle;
}

/** Raw export bytes for a bundle id; identical to what the CLI writes. */
export async function fetchExport(
  format: ExportFormat,
  bundleId: string,
  options: ApiOptions = {},
): Promise<Uint8Array> {
  const doFetch = impl(options);
  const response = await doFetch(
    `${options.baseUrl ?? ""}/api/export/${format}?id=${encodeURIComponent(bundleId)}`,
    { signal: options.signal },
  );
  if (!response.ok) {
    throw new ApiError(response.status, await response.text());
  }
  return new Uint8Array(await response.arrayBuffer());
}

/**
 * Serializes draft submissions: a new submit aborts the one in flight, so
 * at most one request is ever outstanding.
 */
export function createSubmitter(options: ApiOptions = {}) {
  let controller: AbortController | null = null;
  return async function submit(text: string): Promise<AnalysisBundle> {
    controller?.abort();
    controller = new AbortController();
    return submitDraft(text, { ...options, signal: controller.signal });
  };
}
