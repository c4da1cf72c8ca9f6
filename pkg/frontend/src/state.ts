/** View state and request sequencing.
 *
 * Each panel keeps one in-flight request; superseded responses are
 * discarded by sequence number, so a slow older query can never overwrite
 * a newer result.
 */

import { ApiClient, QueryError, QueryResponse } from "./api.js";

export interface ViewState {
  queryText: string;
  resultCount: number;
  tau: number;
  lastResponse: QueryResponse | null;
  lastError: { message: string; droppedTokens: string[] } | null;
  selectedTopic: number | null;
}

export function initialState(): ViewState {
  return {
    queryText: "",
    resultCount: 5,
    tau: 0.5,
    lastResponse: null,
    lastError: null,
    selectedTopic: null,
  };
}

export type QueryOutcome =
  | { kind: "ok"; response: QueryResponse }
  | { kind: "rejected"; message: string; droppedTokens: string[] }
  | { kind: "stale" };

export class QuerySession {
  private seq = 0;
  private controller: AbortController | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly state: ViewState = initialState(),
  ) {}

  /** Issue a query; resolves "stale" if a newer query was issued meanwhile. */
  async submit(text: string, n: number): Promise<QueryOutcome> {
    this.seq += 1;
    const mySeq = this.seq;
    this.controller?.abort();
    this.controller = new AbortController();
    this.state.queryText = text;
    this.state.resultCount = n;
    let response: QueryResponse;
    try {
      response = await this.api.query(text, n, this.controller.signal);
    } catch (err) {
      if (mySeq !== this.seq) {
        return { kind: "stale" };
      }
      if (err instanceof QueryError) {
        this.state.lastError = { message: err.message, droppedTokens: err.droppedTokens };
        this.state.lastResponse = null;
        return { kind: "rejected", message: err.message, droppedTokens: err.droppedTokens };
      }
      throw err;
    }
    if (mySeq !== this.seq) {
      return { kind: "stale" };
    }
    this.state.lastResponse = response;
    this.state.lastError = null;
    this.state.selectedTopic = null;
    return { kind: "ok", response };
  }
}
