// DOM rendering: plain elements wired to the view models. Rendering is
// re-entrant; each call replaces the container's contents from current
// view-model state.

import type { Dashboard } from "./dashboard.js";
import type { ReviewCard } from "./review.js";
import type { SuggestionForm } from "./suggest.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderCard(card: ReviewCard, rerender: () => void): HTMLElement {
  const root = el("article", `review-card status-${card.status}`);
  root.dataset["relationship"] = card.view.id;

  root.appendChild(el("h3", "triple", card.triple));
  const verb = el("details", "verb");
  const summary = el("summary", undefined, `verb: ${card.view.verb_name}`);
  verb.appendChild(summary);
  verb.appendChild(el("p", "verb-definition", card.view.verb_definition));
  const readButton = el(
    "button",
    "mark-read",
    card.verbRead ? "definition read" : "mark definition as read",
  );
  readButton.disabled = card.verbRead;
  readButton.addEventListener("click", () => {
    void card.markVerbRead().then(rerender);
  });
  verb.appendChild(readButton);
  root.appendChild(verb);

  root.appendChild(el("p", "tally", card.tallySummary));

  const controls = el("div", "vote-controls");
  const voteSpecs: Array<[string, boolean | null]> = [
    ["vote-true", true],
    ["vote-false", false],
    ["vote-null", null],
  ];
  for (const [cls, value] of voteSpecs) {
    const label = value === true ? "correct" : value === false ? "incorrect" : "don't know";
    const button = el("button", cls, label);
    button.disabled = !card.canVote;
    button.addEventListener("click", () => {
      void card.vote(value).then(rerender);
    });
    controls.appendChild(button);
  }
  const skipButton = el("button", "skip", card.status === "skipped" ? "unskip" : "skip");
  skipButton.addEventListener("click", () => {
    card.status === "skipped" ? card.unskip() : card.skip();
    rerender();
  });
  controls.appendChild(skipButton);
  root.appendChild(controls);

  root.appendChild(el("p", "state", `state: ${card.view.state}`));
  if (card.message) {
    root.appendChild(el("p", "message", card.message));
  }
  return root;
}

export function renderSuggestionForm(form: SuggestionForm, rerender: () => void): HTMLElement {
  const root = el("section", `suggestion-form kind-${form.kind}`);
  root.appendChild(el("h3", undefined, `Suggest a ${form.kind.replace("-", " ")}`));

  const fieldNames =
    form.kind === "topic"
      ? ["full_name", "display_name", "aliases", "description"]
      : form.kind === "relation-type"
        ? ["verb", "definition"]
        : ["subject", "verb", "object"];
  for (const name of fieldNames) {
    const input = el("input", `field-${name}`);
    input.name = name;
    input.placeholder = name.replace("_", " ");
    input.value = form.fields[name] ?? "";
    input.addEventListener("input", () => {
      form.setField(name, input.value);
    });
    root.appendChild(input);
  }

  if (form.warnings.length > 0) {
    const panel = el("div", "redundancy-panel");
    panel.appendChild(el("p", "warning-title", "Possible duplicates:"));
    for (const hit of form.warnings) {
      panel.appendChild(
        el("p", "warning-row", `${hit.full_name} (similarity ${(hit.similarity * 100).toFixed(0)}%)`),
      );
    }
    const ack = el("button", "acknowledge", "these are different, continue");
    ack.addEventListener("click", () => {
      form.acknowledgeWarnings();
      rerender();
    });
    panel.appendChild(ack);
    root.appendChild(panel);
  }

  const submit = el("button", "submit", "submit suggestion");
  submit.disabled = form.blocked;
  submit.addEventListener("click", () => {
    void form.submit().then(rerender);
  });
  root.appendChild(submit);

  if (form.error) {
    root.appendChild(el("p", "error", form.error));
  }
  if (form.receipt) {
    root.appendChild(
      el("p", "receipt", `submitted ${form.receipt.kind} ${form.receipt.id} (${form.receipt.state})`),
    );
  }
  return root;
}

export function renderDashboard(container: HTMLElement, dashboard: Dashboard): void {
  const rerender = () => renderDashboard(container, dashboard);
  container.replaceChildren();

  const header = el("header", "dashboard-header");
  const who = dashboard.contributor;
  header.appendChild(el("h2", undefined, who ? `Signed in: ${who.id}` : "Not signed in"));
  if (who) {
    header.appendChild(el("p", "summary", dashboard.contributionSummary));
    header.appendChild(
      el(
        "p",
        "status-line",
        `${who.reliable ? "reliable" : "reliability revoked"}${who.creator ? " · creator" : ""}`,
      ),
    );
  }
  if (dashboard.readOnly) {
    header.appendChild(
      el("p", "banner revoked-banner", "Reliability revoked: the queue is read-only."),
    );
  }
  container.appendChild(header);

  const filter = el("input", "interest-filter");
  filter.placeholder = "filter by topic of interest";
  filter.value = dashboard.interestFilter;
  filter.addEventListener("input", () => {
    dashboard.interestFilter = filter.value;
    rerender();
  });
  container.appendChild(filter);

  const queue = el("section", "queue");
  if (dashboard.emptyState) {
    queue.appendChild(el("p", "empty-state", "Nothing to review right now."));
  } else {
    for (const card of dashboard.visibleQueue) {
      const rendered = renderCard(card, rerender);
      if (dashboard.readOnly) {
        for (const button of rendered.querySelectorAll("button")) {
          button.disabled = true;
        }
      }
      queue.appendChild(rendered);
    }
  }
  container.appendChild(queue);

  const suggestions = el("section", "suggestions");
  if (dashboard.canSuggest) {
    suggestions.appendChild(el("p", "suggest-open", "You can suggest new entities below."));
  } else {
    suggestions.appendChild(el("p", "suggest-locked", dashboard.suggestLockedReason ?? ""));
  }
  container.appendChild(suggestions);
}
