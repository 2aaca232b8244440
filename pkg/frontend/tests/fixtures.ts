/** Mock server payloads: shaped exactly like the analysis service's wire format. */

import type { AnalysisBundle } from "../src/types.js";

export const RUBRIC_NAMES = [
  "Grammar",
  "Vocabulary",
  "Sentence Expression",
  "Inter-paragraph Structure",
  "In-paragraph Structure",
  "Structure Consistency",
  "Length",
  "Topic Clarity",
  "Originality",
  "Narrative",
] as const;

export function mockBundle(): AnalysisBundle {
  const scores: Record<string, number> = {};
  const raw: Record<string, number> = {};
  RUBRIC_NAMES.forEach((name, i) => {
    scores[name] = (i % 3) + 1;
    raw[name] = (i % 3) + 1 + 0.25;
  });
  return {
    tool: { name: "ukta", version: "0.1.0" },
    bundle_id: "abc123def456",
    registry: { fingerprint: "f".repeat(64), size: 12 },
    essay: {
      id: "essay",
      meta: null,
      labels: null,
      paragraphs: [
        {
          index: 0,
          sentences: [
            {
              index: 0,
              wordpieces: [
                {
                  raw: "나는",
                  morphemes: [
                    { surface: "나", lemma: "나", tag: "NP" },
                    { surface: "는", lemma: "는", tag: "JX" },
                  ],
                },
                {
                  raw: "하늘을",
                  morphemes: [
                    { surface: "하늘", lemma: "하늘", tag: "NNG" },
                    { surface: "을", lemma: "을", tag: "JKO" },
                  ],
                },
              ],
            },
            {
              index: 1,
              wordpieces: [
                {
                  raw: "봤다",
                  morphemes: [
                    { surface: "보", lemma: "보", tag: "VV" },
                    { surface: "다", lemma: "다", tag: "EF" },
                  ],
                },
              ],
            },
          ],
        },
      ],
    },
    stats: { paragraphs: 1, sentences: 2, wordpieces: 3, morphemes: 6 },
    occurrences: { 나: [0], 하늘: [0], 보: [1] },
    features: [
      { name: "TotalMorphemes", family: "basic", value: 6.0, available: true },
      { name: "NNL_Den", family: "basic", value: 0.3333333333333333, available: true },
      { name: "EFL_Den", family: "basic", value: 0.5, available: true },
      { name: "CL_Den", family: "basic", value: 0.5, available: true },
      { name: "TTR", family: "diversity", value: 1.0, available: true },
      { name: "RTTR", family: "diversity", value: 2.449489742783178, available: true },
      { name: "VV_RTTR", family: "diversity", value: 1.0, available: true },
      { name: "NNB_MSTTR", family: "diversity", value: null, available: false },
      { name: "HDD", family: "diversity", value: null, available: false },
      { name: "ASO_ALN", family: "cohesion", value: 0.0, available: true },
      { name: "ASO_CLN", family: "cohesion", value: 0.0, available: true },
      { name: "AvgSenSimilarity", family: "cohesion", value: 0.26, available: true },
    ],
    cohesion: {
      keywords: [
        ["하늘", 0.91],
        ["보", 0.42],
      ],
      topic_sentence: 0,
      avg_sen_similarity: 0.26,
      adj_sen_similarity: 0.26,
    },
    rubric: {
      scores,
      raw,
      // server order is authoritative: deliberately NOT sorted by weight
      top_features: [
        { name: "VV_RTTR", weight: 0.21, value: 1.0 },
        { name: "NNL_Den", weight: 0.29, value: 0.3333333333333333 },
        { name: "ASO_ALN", weight: 0.11, value: 0.0 },
        { name: "EFL_Den", weight: 0.09, value: 0.5 },
        { name: "AvgSenSimilarity", weight: 0.08, value: 0.26 },
        { name: "TTR", weight: 0.07, value: 1.0 },
        { name: "CL_Den", weight: 0.06, value: 0.5 },
        { name: "ASO_CLN", weight: 0.04, value: 0.0 },
        { name: "RTTR", weight: 0.03, value: 2.449489742783178 },
        { name: "NNB_MSTTR", weight: 0.02, value: null },
      ],
    },
  };
}

export function mockAnalyzeBundle(): AnalysisBundle {
  return { ...mockBundle(), rubric: null, bundle_id: "analyze-only-1" };
}

export interface MockServerOptions {
  /** 409 on /api/score, as when no checkpoint is loaded. */
  modelLoaded?: boolean;
  exports?: Partial<Record<string, Uint8Array>>;
  /** Delay (ms) before /api/score resolves; lets tests race submissions. */
  scoreDelayMs?: number;
}

export interface MockServer {
  fetchImpl: typeof fetch;
  calls: { url: string; method: string }[];
}

/** fetch-compatible stand-in for the analysis service. */
export function mockServer(options: MockServerOptions = {}): MockServer {
  const calls: { url: string; method: string }[] = [];
  const exports = options.exports ?? {
    csv: new TextEncoder().encode("name,family,value,available\nTTR,diversity,1.0,true\n"),
    json: new TextEncoder().encode('{"tool": {"name": "ukta"}}\n'),
    txt: new TextEncoder().encode("ukta analysis\n"),
  };

  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    calls.push({ url, method });
    const signal = init?.signal;

    function respond(): Response {
      if (signal?.aborted) {
        throw new DOMException("The operation was aborted.", "AbortError");
      }
      if (url.endsWith("/api/score") && method === "POST") {
        if (options.modelLoaded === false) {
          return new Response(
            JSON.stringify({ code: "no_model", message: "no model checkpoint is loaded" }),
            { status: 409 },
          );
        }
        return new Response(JSON.stringify(mockBundle()), { status: 200 });
      }
      if (url.endsWith("/api/analyze") && method === "POST") {
        return new Response(JSON.stringify(mockAnalyzeBundle()), { status: 200 });
      }
      const match = url.match(/\/api\/export\/(\w+)\?id=(.+)$/);
      if (match) {
        const body = exports[match[1]];
        if (!body) {
          return new Response(JSON.stringify({ code: "not_found", message: "no bundle" }), {
            status: 404,
          });
        }
        return new Response(body.slice().buffer, { status: 200 });
      }
      return new Response(JSON.stringify({ code: "not_found", message: url }), { status: 404 });
    }

    if (options.scoreDelayMs && url.endsWith("/api/score")) {
      await new Promise((resolve) => setTimeout(resolve, options.scoreDelayMs));
    }
    return respond();
  }) as typeof fetch;

  return { fetchImpl, calls };
}
