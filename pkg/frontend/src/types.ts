/** Wire types mirroring the analysis service's bundle schema. */

export type Family = "basic" | "diversity" | "cohesion";

export interface MorphemeView {
  surface: string;
  lemma: string;
  tag: string;
}

export interface WordpieceView {
  raw: string;
  morphemes: MorphemeView[];
}

export interface SentenceView {
  index: number;
  wordpieces: WordpieceView[];
}

export interface ParagraphView {
  index: number;
  sentences: SentenceView[];
}

export interface EssayView {
  id: string;
  meta: Record<string, unknown> | null;
  labels: Record<string, number> | null;
  paragraphs: ParagraphView[];
}

export interface FeatureRow {
  name: string;
  family: Family;
  value: number | null;
  available: boolean;
}

export interface TopFeature {
  name: string;
  weight: number;
  value: number | null;
}

export interface RubricSection {
  scores: Record<string, number>;
  raw: Record<string, number>;
  top_features: TopFeature[];
}

export interface CohesionSection {
  keywords: [string, number][];
  topic_sentence: number;
  avg_sen_similarity: number;
  adj_sen_similarity: number;
}

export interface AnalysisBundle {
  tool: { name: string; version: string };
  bundle_id: string;
  registry: { fingerprint: string; size: number };
  essay: EssayView;
  stats: {
    paragraphs: number;
    sentences: number;
    wordpieces: number;
    morphemes: number;
  };
  occurrences: Record<string, number[]>;
  features: FeatureRow[];
  cohesion: CohesionSection | null;
  rubric: RubricSection | null;
}

export type ExportFormat = "json" | "csv" | "txt";
