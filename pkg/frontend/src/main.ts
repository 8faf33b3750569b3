// Entry point: single-page client speaking only the documented JSON API.

import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";
import { renderDashboard, renderSuggestionForm } from "./dom.js";
import { SuggestionForm } from "./suggest.js";

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? "";
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  const api = new ApiClient(apiBase());
  const stored = window.localStorage.getItem("kgrec-token");
  const token = stored ?? window.prompt("Contributor id (bearer token):") ?? "";
  if (!token) {
    root.textContent = "A contributor token is required.";
    return;
  }
  window.localStorage.setItem("kgrec-token", token);
  api.setToken(token);

  const dashboard = new Dashboard(api);
  try {
    await dashboard.load(token);
  } catch {
    window.localStorage.removeItem("kgrec-token");
    root.textContent = `Could not load contributor ${token}: ${dashboard.loadError ?? "unknown error"}. Reload to retry.`;
    return;
  }
  renderDashboard(root, dashboard);

  if (dashboard.canSuggest) {
    for (const kind of ["topic", "relationship", "relation-type"] as const) {
      const form = new SuggestionForm(api, kind);
      const slot = document.createElement("div");
      const rerender = () => {
        slot.replaceChildren(renderSuggestionForm(form, rerender));
      };
      rerender();
      root.appendChild(slot);
    }
  }
}

void boot();
