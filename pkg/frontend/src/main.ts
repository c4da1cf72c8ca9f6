/** Explorer entry point: wires the query panel, topic inspector, and image
 * tools against the service API. The API base defaults to the page origin
 * and can be overridden with ?api=http://host:port. */

import { ApiClient, TopicsResponse } from "./api.js";
import { ImageToolsPanel } from "./imagetools.js";
import { renderDroppedTokens, renderQueryResults, renderWordList } from "./render.js";
import { QuerySession } from "./state.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return (param ?? window.location.origin).replace(/\/$/, "");
}

export function mountExplorer(root: HTMLElement, api: ApiClient): void {
  const session = new QuerySession(api);
  let topics: TopicsResponse | null = null;

  const form = document.createElement("form");
  form.className = "query-form";
  const input = document.createElement("input");
  input.type = "search";
  input.placeholder = "techy fashion…";
  input.className = "query-input";
  const count = document.createElement("input");
  count.type = "number";
  count.min = "1";
  count.value = "5";
  count.className = "query-count";
  const go = document.createElement("button");
  go.type = "submit";
  go.textContent = "Explore";
  form.append(input, count, go);
  root.appendChild(form);

  const results = document.createElement("div");
  results.className = "results-host";
  root.appendChild(results);

  const topicHost = document.createElement("div");
  topicHost.className = "topic-host";
  root.appendChild(topicHost);

  const imagePanel = new ImageToolsPanel({
    api,
    getQueryText: () => session.state.queryText,
  });
  root.appendChild(imagePanel.root);

  async function showTopic(k: number): Promise<void> {
    session.state.selectedTopic = k;
    rerender();
    topicHost.replaceChildren();
    if (!topics) {
      topics = await api.topics();
    }
    const summary = topics.topics[k];
    if (summary) {
      topicHost.appendChild(renderWordList(summary));
    }
    const palettes = await api.topicPalettes(k, session.state.resultCount);
    topicHost.appendChild(
      renderQueryResults(
        {
          text: `topic ${k}`,
          weights: [],
          dropped_tokens: [],
          palettes: palettes.palettes,
        },
        {},
      ),
    );
  }

  function rerender(): void {
    results.replaceChildren();
    const state = session.state;
    if (state.lastError) {
      results.appendChild(
        renderDroppedTokens(state.lastError.message, state.lastError.droppedTokens),
      );
      return;
    }
    if (state.lastResponse) {
      results.appendChild(
        renderQueryResults(state.lastResponse, {
          onSelectTopic: (k) => void showTopic(k),
          selectedTopic: state.selectedTopic,
        }),
      );
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value;
    const n = Math.max(1, Number(count.value) || 5);
    void session.submit(text, n).then((outcome) => {
      if (outcome.kind !== "stale") {
        topicHost.replaceChildren();
        rerender();
      }
    });
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const api = new ApiClient(apiBase());
  mountExplorer(document.getElementById("app")!, api);
}
