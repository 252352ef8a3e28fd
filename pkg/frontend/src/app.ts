/** DOM glue: login, task card, decision buttons, keyboard flow, dashboard. */

import { ApiClient } from "./api.js";
import { highlightCypher, escapeHtml } from "./highlight.js";
import { actionForKey } from "./keyboard.js";
import { ReviewSession, type SessionState } from "./state.js";
import type { Stats } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let session: ReviewSession | null = null;
let client: ApiClient | null = null;
let diagnosticsOpen = false;

function init(): void {
  const loginForm = $<HTMLFormElement>("login-form");
  const tokenInput = $<HTMLInputElement>("token-input");
  const reviewerInput = $<HTMLInputElement>("reviewer-input");
  tokenInput.value = localStorage.getItem("review-token") ?? "";
  reviewerInput.value = localStorage.getItem("review-reviewer") ?? "";

  loginForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const token = tokenInput.value.trim();
    const reviewer = reviewerInput.value.trim();
    if (!token || !reviewer) return;
    localStorage.setItem("review-token", token);
    localStorage.setItem("review-reviewer", reviewer);
    start(token, reviewer);
  });

  $<HTMLButtonElement>("btn-accept").addEventListener("click", () => session?.decide("accept"));
  $<HTMLButtonElement>("btn-reject").addEventListener("click", () => session?.decide("reject"));
  $<HTMLButtonElement>("btn-skip").addEventListener("click", () => session?.skip());
  $<HTMLButtonElement>("btn-diagnostics").addEventListener("click", toggleDiagnostics);

  document.addEventListener("keydown", (event) => {
    const action = actionForKey(event.key, event.target as HTMLElement);
    if (!action || session === null) return;
    event.preventDefault();
    if (action === "accept") void session.decide("accept");
    else if (action === "reject") void session.decide("reject");
    else if (action === "skip") void session.skip();
    else toggleDiagnostics();
  });
}

function start(token: string, reviewer: string): void {
  client = new ApiClient("", token);
  session = new ReviewSession(client, reviewer);
  session.subscribe(render);
  $("login-view").hidden = true;
  $("review-view").hidden = false;
  void session.loadNext();
  void refreshStats();
}

function render(state: SessionState): void {
  $("notice").textContent = state.notice;
  $("decided-count").textContent = String(state.decidedCount);
  const card = $("task-card");
  const empty = $("empty-state");
  const authError = $("auth-error");
  card.hidden = state.phase !== "task";
  empty.hidden = state.phase !== "empty";
  authError.hidden = state.phase !== "auth-error";
  if (state.phase === "auth-error") {
    authError.textContent = `Authentication failed: ${state.notice}`;
    return;
  }
  const task = state.task;
  if (state.phase !== "task" || task === null) return;

  $("question").textContent = task.question;
  $("cypher").innerHTML = highlightCypher(task.cypher);
  $("schema").textContent = task.schema_snippet;
  const preview = $("result-preview");
  preview.innerHTML = task.result_preview.length
    ? task.result_preview.map((row) => `<li>${escapeHtml(row)}</li>`).join("")
    : "<li class='muted'>no preview</li>";

  const diagButton = $<HTMLButtonElement>("btn-diagnostics");
  const diagPanel = $("diagnostics");
  if (!task.show_diagnostics || !task.diagnostics) {
    diagButton.hidden = true;
    diagPanel.hidden = true;
  } else {
    diagButton.hidden = false;
    diagPanel.hidden = !diagnosticsOpen;
    const verdicts = task.diagnostics.verdicts ?? {};
    const details = task.diagnostics.diagnostics ?? {};
    diagPanel.innerHTML = Object.entries(verdicts)
      .map(([name, verdict]) => {
        const note = details[name] ? ` — ${escapeHtml(details[name])}` : "";
        return `<li><b>${escapeHtml(name)}</b>: ${escapeHtml(verdict)}${note}</li>`;
      })
      .join("");
  }

  const inFlight = state.inFlight;
  $<HTMLButtonElement>("btn-accept").disabled = inFlight;
  $<HTMLButtonElement>("btn-reject").disabled = inFlight;
  $<HTMLButtonElement>("btn-skip").disabled = inFlight;
}

function toggleDiagnostics(): void {
  diagnosticsOpen = !diagnosticsOpen;
  if (session) render(session.snapshot());
}

async function refreshStats(): Promise<void> {
  if (!client) return;
  try {
    const stats: Stats = await client.stats();
    const outcomes = Object.entries(stats.outcomes)
      .map(([name, count]) => `${name}: ${count}`)
      .join("  ·  ");
    const reviewers = Object.entries(stats.reviewers)
      .map(([name, s]) => `${name} ${s.decided}/${s.decided + s.pending}`)
      .join("  ·  ");
    $("stats-outcomes").textContent = outcomes || "no pairs yet";
    $("stats-reviewers").textContent = reviewers;
  } catch {
    $("stats-outcomes").textContent = "stats unavailable";
  }
  setTimeout(() => void refreshStats(), 15000);
}

document.addEventListener("DOMContentLoaded", init);
