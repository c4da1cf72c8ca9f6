/** Typed client for the chromatika HTTP API. The UI never computes model
 * numbers itself: everything shown comes out of these responses. */

export type RGB = [number, number, number];

export interface PaletteHit {
  rank: number;
  pool_index: number;
  source_id: string | null;
  colors: RGB[];
  score: number;
}

export interface QueryResponse {
  text: string;
  weights: number[];
  dropped_tokens: string[];
  palettes: PaletteHit[];
}

export interface QueryRejection {
  error: string;
  dropped_tokens?: string[];
}

export interface WordWeight {
  token: string;
  weight: number;
}

export interface BinWeight {
  bin: number;
  rgb: RGB;
  weight: number;
}

export interface TopicSummary {
  k: number;
  topic_weight: number;
  word_topic_weight: number;
  color_topic_weight: number;
  top_words: WordWeight[];
  top_color_bins: BinWeight[];
}

export interface TopicsResponse {
  n_topics: number;
  topic_weights: number[];
  word_topic_weights: number[];
  color_topic_weights: number[];
  topics: TopicSummary[];
}

export interface TopicPalettesResponse {
  k: number;
  palettes: PaletteHit[];
}

export class QueryError extends Error {
  droppedTokens: string[];

  constructor(message: string, droppedTokens: string[]) {
    super(message);
    this.droppedTokens = droppedTokens;
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (resp.status === 422) {
      const body = (await resp.json()) as QueryRejection;
      throw new QueryError(body.error, body.dropped_tokens ?? []);
    }
    if (!resp.ok) {
      throw new Error(`${path}: HTTP ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.json("/health");
  }

  topics(): Promise<TopicsResponse> {
    return this.json("/topics");
  }

  topicPalettes(k: number, n: number): Promise<TopicPalettesResponse> {
    return this.json(`/topics/${k}/palettes?n=${n}`);
  }

  query(text: string, n: number, signal?: AbortSignal): Promise<QueryResponse> {
    return this.json("/query", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text, n }),
      signal,
    });
  }

  /** Image-in image-out endpoints; returns the PNG bytes. */
  async processImage(
    endpoint: "select-pixels" | "recolor",
    image: Blob,
    text: string,
    tau?: number,
    signal?: AbortSignal,
  ): Promise<Uint8Array> {
    const form = new FormData();
    form.append("image", image, "upload.png");
    form.append("text", text);
    if (endpoint === "select-pixels" && tau !== undefined) {
      form.append("tau", String(tau));
    }
    const resp = await this.fetchFn(`${this.baseUrl}/${endpoint}`, {
      method: "POST",
      body: form,
      signal,
    });
    if (resp.status === 422) {
      const body = (await resp.json()) as QueryRejection;
      throw new QueryError(body.error, body.dropped_tokens ?? []);
    }
    if (!resp.ok) {
      throw new Error(`/${endpoint}: HTTP ${resp.status}`);
    }
    return new Uint8Array(await resp.arrayBuffer());
  }
}
