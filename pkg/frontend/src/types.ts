/** Wire types mirroring the server's JSON bodies. */

export type RepoStatus = "pending" | "indexing" | "ready" | "failed";

export interface RegisterResponse {
  id: string;
}

export interface StatusResponse {
  id: string;
  status: RepoStatus;
  reason?: string;
  functions?: number;
  classes?: number;
}

export interface SearchResultDto {
  rank: number;
  snippet_id: string;
  kind: "function" | "class";
  qualified_name: string;
  relative_path: string;
  span: [number, number];
  raw_text: string;
  best_similarity: number;
  streams: string[];
}

export interface SearchResponse {
  results: SearchResultDto[];
}

export interface SearchOptionsDto {
  rerank?: boolean;
  stream1?: "augmented" | "raw";
  mode?: "live" | "passthrough";
  top?: number | null;
}

/** One rendered result panel; mirrors SearchResultDto one-to-one. */
export interface ResultPanelModel {
  rank: number;
  qualifiedName: string;
  relativePath: string;
  span: [number, number];
  code: string;
  similarity: number;
  streamBadges: string[];
}
