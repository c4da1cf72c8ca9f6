/** DOM rendering for query results.
 *
 * Every number shown here is taken verbatim from a service response;
 * swatches use exactly the sRGB triples the service returned. Word lists
 * render in grayscale only (no color bias next to the palettes).
 */

import { PaletteHit, QueryResponse, RGB, TopicSummary } from "./api.js";

export function rgbCss(color: RGB): string {
  return `rgb(${color[0]}, ${color[1]}, ${color[2]})`;
}

export function renderSwatchRow(hit: PaletteHit): HTMLElement {
  const row = document.createElement("div");
  row.className = "palette-row";
  row.dataset.rank = String(hit.rank);
  row.dataset.poolIndex = String(hit.pool_index);

  const rank = document.createElement("span");
  rank.className = "palette-rank";
  rank.textContent = `#${hit.rank}`;
  row.appendChild(rank);

  const swatches = document.createElement("span");
  swatches.className = "palette-swatches";
  for (const color of hit.colors) {
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = rgbCss(color);
    swatch.title = rgbCss(color);
    swatches.appendChild(swatch);
  }
  row.appendChild(swatches);

  const score = document.createElement("span");
  score.className = "palette-score";
  score.dataset.score = String(hit.score);
  score.textContent = `d=${hit.score}`;
  row.appendChild(score);

  if (hit.source_id) {
    const source = document.createElement("span");
    source.className = "palette-source";
    source.textContent = hit.source_id;
    row.appendChild(source);
  }
  return row;
}

export function renderWeightBars(
  weights: number[],
  onSelect?: (k: number) => void,
  selected?: number | null,
): HTMLElement {
  const chart = document.createElement("div");
  chart.className = "weight-bars";
  weights.forEach((weight, k) => {
    const slot = document.createElement("button");
    slot.type = "button";
    slot.className = "weight-slot" + (k === selected ? " selected" : "");
    slot.dataset.topic = String(k);
    slot.title = `topic ${k}: ${weight}`;
    const bar = document.createElement("span");
    bar.className = "weight-bar";
    bar.dataset.weight = String(weight);
    bar.style.height = `${weight * 100}%`;
    slot.appendChild(bar);
    const label = document.createElement("span");
    label.className = "weight-label";
    label.textContent = `k${k}`;
    slot.appendChild(label);
    if (onSelect) {
      slot.addEventListener("click", () => onSelect(k));
    }
    chart.appendChild(slot);
  });
  return chart;
}

/** Weighted word list: font size scales with weight, text stays gray. */
export function renderWordList(topic: TopicSummary): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "word-list";
  panel.dataset.topic = String(topic.k);
  const maxWeight = topic.top_words.reduce((m, w) => Math.max(m, w.weight), 0) || 1;
  for (const entry of topic.top_words) {
    const word = document.createElement("span");
    word.className = "word-entry";
    word.textContent = entry.token;
    word.dataset.weight = String(entry.weight);
    word.style.fontSize = `${(0.75 + 1.25 * (entry.weight / maxWeight)).toFixed(3)}em`;
    word.style.color = "#333333";
    panel.appendChild(word);
  }
  return panel;
}

export function renderDroppedTokens(message: string, tokens: string[]): HTMLElement {
  const box = document.createElement("div");
  box.className = "query-error";
  const text = document.createElement("span");
  text.textContent =
    tokens.length > 0 ? "No usable words in the query. Dropped: " : message;
  box.appendChild(text);
  for (const token of tokens) {
    const chip = document.createElement("code");
    chip.className = "dropped-token";
    chip.textContent = token;
    box.appendChild(chip);
  }
  return box;
}

export interface QueryViewHooks {
  onSelectTopic?: (k: number) => void;
  selectedTopic?: number | null;
}

export function renderQueryResults(
  response: QueryResponse,
  hooks: QueryViewHooks = {},
): HTMLElement {
  const view = document.createElement("div");
  view.className = "query-results";

  const bars = document.createElement("section");
  bars.className = "topic-section";
  const barsTitle = document.createElement("h2");
  barsTitle.textContent = "Topic weights";
  bars.appendChild(barsTitle);
  bars.appendChild(
    renderWeightBars(response.weights, hooks.onSelectTopic, hooks.selectedTopic),
  );
  view.appendChild(bars);

  const palettes = document.createElement("section");
  palettes.className = "palette-section";
  const title = document.createElement("h2");
  title.textContent = `Palettes for "${response.text}"`;
  palettes.appendChild(title);
  for (const hit of response.palettes) {
    palettes.appendChild(renderSwatchRow(hit));
  }
  view.appendChild(palettes);

  if (response.dropped_tokens.length > 0) {
    const note = document.createElement("p");
    note.className = "dropped-note";
    note.textContent = `Ignored words: ${response.dropped_tokens.join(", ")}`;
    view.appendChild(note);
  }
  return view;
}
