// HTML renderers: pure functions from UI state to markup strings.
// Everything that came over the wire is escaped before insertion.

import type { UiState } from "./state.js";
import type { ResultPayload } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderApp(state: UiState): string {
  switch (state.phase) {
    case "start":
      return renderStart(state);
    case "question":
    case "submitting":
      return renderQuestion(state);
    case "done":
      return renderResult(state);
    case "error":
      return renderError(state);
  }
}

function renderStart(state: UiState): string {
  const options = state.competences
    .map(
      (c) =>
        `<option value="${escapeHtml(c.id)}" ${c.id === state.competenceRef ? "selected" : ""}>` +
        `${escapeHtml(c.title)} (${c.requiredQuestions} questions)</option>`,
    )
    .join("");
  const canStart =
    state.competences.length > 0 &&
    state.learnerRef.trim() !== "" &&
    state.competenceRef !== "" &&
    !state.busy;
  return `
  <section class="card start">
    <h1>Placement test</h1>
    <p>Answer a short series of questions to locate your starting level.</p>
    <label>Learner id
      <input id="learner" type="text" value="${escapeHtml(state.learnerRef)}"
             placeholder="learner-001" ${state.busy ? "disabled" : ""} />
    </label>
    <label>Competence
      <select id="competence" ${state.busy ? "disabled" : ""}>
        <option value="">choose…</option>${options}
      </select>
    </label>
    <button data-action="start" ${canStart ? "" : "disabled"}>
      ${state.busy ? "Starting…" : "Start the test"}
    </button>
    ${state.competences.length === 0 ? '<p class="hint">No competences available.</p>' : ""}
  </section>`;
}

function renderQuestion(state: UiState): string {
  const question = state.question;
  if (!question) return '<section class="card">Loading…</section>';
  const submitting = state.phase === "submitting";
  const choices = question.choices
    .map((choice) => {
      const selected = choice.choiceId === state.selectedChoice;
      return `
      <li>
        <button class="choice ${selected ? "selected" : ""}"
                data-choice="${escapeHtml(choice.choiceId)}"
                ${submitting ? "disabled" : ""}
                aria-pressed="${selected}">
          ${escapeHtml(choice.text)}
        </button>
      </li>`;
    })
    .join("");
  return `
  <section class="card question">
    <header>
      <span class="progress">${state.answered} of ${state.totalQuestions} answered</span>
      <span class="position">question ${question.index} / ${question.total}</span>
    </header>
    <h2>${escapeHtml(question.body)}</h2>
    <ul class="choices">${choices}</ul>
    <button data-action="submit"
            ${!submitting && state.selectedChoice ? "" : "disabled"}>
      ${submitting ? "Submitting…" : "Submit answer"}
    </button>
  </section>`;
}

function scaleBar(result: ResultPayload): string {
  const clamp = (x: number) => Math.min(3, Math.max(-3, x));
  const percent = (x: number) => ((clamp(x) + 3) / 6) * 100;
  const se = result.standardError ?? 0;
  const lo = percent(result.theta - se);
  const hi = percent(result.theta + se);
  const at = percent(result.theta);
  return `
    <div class="scale" role="img"
         aria-label="ability ${result.theta.toFixed(3)} on a -3 to 3 scale">
      <div class="interval" style="left:${lo.toFixed(2)}%;width:${(hi - lo).toFixed(2)}%"></div>
      <div class="marker" style="left:${at.toFixed(2)}%"></div>
      <span class="tick lo">-3</span><span class="tick mid">0</span><span class="tick hi">+3</span>
    </div>`;
}

function renderResult(state: UiState): string {
  const result = state.result;
  if (!result) return '<section class="card">Loading…</section>';
  const pinned = result.status === "non_finite_mle";
  const rows = result.perElement
    .map(
      (row) => `
      <tr>
        <td>${escapeHtml(row.elementId)}</td>
        <td>${row.correct} / ${row.answered}</td>
        <td>${Math.round(row.fractionCorrect * 100)}%</td>
      </tr>`,
    )
    .join("");
  const se =
    result.standardError === null ? "n/a" : `&plusmn; ${result.standardError.toFixed(3)}`;
  return `
  <section class="card result">
    <h1>Your placement</h1>
    ${
      pinned
        ? '<p class="banner">Every answer pointed the same way, so the score sits at the end of the scale; treat it as "at or beyond the bound".</p>'
        : ""
    }
    <p class="score">
      <strong class="theta">${result.theta.toFixed(3)}</strong>
      <span class="se">${se} <em>measurement error</em></span>
    </p>
    ${scaleBar(result)}
    <table class="elements">
      <thead><tr><th>area</th><th>answered right</th><th>share</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <button data-action="again">Take another test</button>
  </section>`;
}

function renderError(state: UiState): string {
  return `
  <section class="card error">
    <h1>Something went wrong</h1>
    <p class="banner">${escapeHtml(state.errorMessage ?? "unknown error")}</p>
    <button data-action="retry">Retry</button>
  </section>`;
}
