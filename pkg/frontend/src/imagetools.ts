/** Image tools panel: upload an image, pick select-pixels or recolor, and
 * compare original vs processed side by side. The tau slider re-invokes the
 * service on release; superseded responses are discarded. */

import { ApiClient, QueryError } from "./api.js";

export type ImageMode = "select-pixels" | "recolor";

export function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) {
    return false;
  }
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) {
      return false;
    }
  }
  return true;
}

export interface ImagePanelOptions {
  api: ApiClient;
  getQueryText: () => string;
  createObjectUrl?: (blob: Blob) => string;
}

export class ImageToolsPanel {
  readonly root: HTMLElement;
  readonly fileInput: HTMLInputElement;
  readonly modeSelect: HTMLSelectElement;
  readonly tauSlider: HTMLInputElement;
  readonly tauValue: HTMLSpanElement;
  readonly original: HTMLImageElement;
  readonly processed: HTMLImageElement;
  readonly status: HTMLElement;

  originalBytes: Uint8Array | null = null;
  processedBytes: Uint8Array | null = null;

  private seq = 0;
  private readonly toUrl: (blob: Blob) => string;

  constructor(private readonly options: ImagePanelOptions) {
    this.toUrl = options.createObjectUrl ?? ((blob) => URL.createObjectURL(blob));
    this.root = document.createElement("section");
    this.root.className = "image-tools";

    const controls = document.createElement("div");
    controls.className = "image-controls";

    this.fileInput = document.createElement("input");
    this.fileInput.type = "file";
    this.fileInput.accept = "image/png,image/jpeg";
    this.fileInput.addEventListener("change", () => void this.onFileChosen());
    controls.appendChild(this.fileInput);

    this.modeSelect = document.createElement("select");
    for (const mode of ["select-pixels", "recolor"] as const) {
      const option = document.createElement("option");
      option.value = mode;
      option.textContent = mode;
      this.modeSelect.appendChild(option);
    }
    this.modeSelect.addEventListener("change", () => void this.refresh());
    controls.appendChild(this.modeSelect);

    const tauLabel = document.createElement("label");
    tauLabel.textContent = "τ";
    this.tauSlider = document.createElement("input");
    this.tauSlider.type = "range";
    this.tauSlider.min = "0";
    this.tauSlider.max = "1";
    this.tauSlider.step = "0.05";
    this.tauSlider.value = "0.5";
    // re-invoke on release, not on every drag tick
    this.tauSlider.addEventListener("change", () => void this.refresh());
    this.tauSlider.addEventListener("input", () => {
      this.tauValue.textContent = this.tauSlider.value;
    });
    tauLabel.appendChild(this.tauSlider);
    this.tauValue = document.createElement("span");
    this.tauValue.className = "tau-value";
    this.tauValue.textContent = this.tauSlider.value;
    tauLabel.appendChild(this.tauValue);
    controls.appendChild(tauLabel);

    this.root.appendChild(controls);

    this.status = document.createElement("p");
    this.status.className = "image-status";
    this.root.appendChild(this.status);

    const pair = document.createElement("div");
    pair.className = "image-pair";
    this.original = document.createElement("img");
    this.original.className = "image-original";
    this.original.alt = "original";
    this.processed = document.createElement("img");
    this.processed.className = "image-processed";
    this.processed.alt = "processed";
    pair.appendChild(this.original);
    pair.appendChild(this.processed);
    this.root.appendChild(pair);
  }

  get mode(): ImageMode {
    return this.modeSelect.value as ImageMode;
  }

  get tau(): number {
    return Number(this.tauSlider.value);
  }

  private async onFileChosen(): Promise<void> {
    const file = this.fileInput.files?.[0];
    if (!file) {
      return;
    }
    if (!file.type.startsWith("image/")) {
      this.status.textContent = "That file is not an image.";
      this.status.classList.add("error");
      this.originalBytes = null;
      return;
    }
    this.status.classList.remove("error");
    this.originalBytes = new Uint8Array(await file.arrayBuffer());
    this.original.src = this.toUrl(file);
    await this.refresh();
  }

  /** Call the service with the current image, mode, query, and tau. */
  async refresh(): Promise<"ok" | "stale" | "error" | "idle"> {
    if (!this.originalBytes) {
      return "idle";
    }
    const text = this.options.getQueryText();
    if (!text.trim()) {
      this.status.textContent = "Type a query first.";
      return "idle";
    }
    this.seq += 1;
    const mySeq = this.seq;
    this.status.textContent = "processing…";
    let bytes: Uint8Array;
    try {
      bytes = await this.options.api.processImage(
        this.mode,
        new Blob([this.originalBytes.buffer as ArrayBuffer], { type: "image/png" }),
        text,
        this.mode === "select-pixels" ? this.tau : undefined,
      );
    } catch (err) {
      if (mySeq !== this.seq) {
        return "stale";
      }
      this.status.classList.add("error");
      this.status.textContent =
        err instanceof QueryError
          ? `Query has no usable words (dropped: ${err.droppedTokens.join(", ")})`
          : String(err);
      return "error";
    }
    if (mySeq !== this.seq) {
      return "stale";
    }
    this.processedBytes = bytes;
    this.processed.src = this.toUrl(new Blob([bytes.buffer as ArrayBuffer], { type: "image/png" }));
    this.status.classList.remove("error");
    this.status.textContent =
      this.originalBytes && bytesEqual(bytes, this.originalBytes)
        ? "processed image is identical to the original"
        : `processed ${bytes.length} bytes`;
    return "ok";
  }
}
