/** Student questionnaire wizard: view-state machine and renderers.
 *
 * The client never tracks its own position in the questionnaire. Every
 * state transition comes from a server payload, and every rejection is
 * resolved by adopting the server's retry view — so a stale form (browser
 * back button, cached page) always lands back on the true current question.
 */

import { isApiError } from "./api.js";
import type { ApiErrorBody, QuestionPayload, SessionPayload } from "./types.js";
import { ANSWER_OPTIONS } from "./types.js";
import { escapeAttr, escapeHtml } from "./html.js";

export type ClientViewState =
  | { kind: "intro" }
  | { kind: "question"; view: QuestionPayload }
  | { kind: "completed"; teacher: string; questionnaireNo: number | null; mode: string; resetAllowed: boolean }
  | { kind: "closed"; message: string }
  | { kind: "error"; message: string };

export interface UiOptions {
  /** show the "(cotare directă/inversă)" tag under the item text */
  showDirectionTag: boolean;
}

export const DEFAULT_UI_OPTIONS: UiOptions = { showDirectionTag: true };

export function stateFromSession(status: number, payload: SessionPayload | ApiErrorBody): ClientViewState {
  if (isApiError(payload)) {
    return { kind: "error", message: payload.error.message };
  }
  switch (payload.state) {
    case "question":
      return { kind: "question", view: payload };
    case "completed":
      return {
        kind: "completed",
        teacher: payload.teacher,
        questionnaireNo: payload.questionnaire_no,
        mode: payload.mode,
        resetAllowed: payload.reset_allowed,
      };
    case "closed":
      return { kind: "closed", message: payload.message };
    default:
      return { kind: "error", message: `unexpected response (${status})` };
  }
}

/** Fold a submit response into the next view state. Rejections that carry
 * the server's retry view self-heal to it; anything else falls back to an
 * explicit reload (`null`), meaning: fetch the session again. */
export function stateFromSubmit(
  status: number,
  payload: SessionPayload | ApiErrorBody,
): ClientViewState | null {
  if (!isApiError(payload)) {
    return stateFromSession(status, payload);
  }
  if (payload.retry) {
    return { kind: "question", view: payload.retry };
  }
  if (payload.error.code === "CAMPAIGN_CLOSED") {
    return { kind: "closed", message: payload.error.message };
  }
  if (payload.error.code === "ALREADY_COMPLETED") {
    return null; // the completion notice lives on GET /api/session
  }
  return { kind: "error", message: payload.error.message };
}

// -- renderers (HTML strings, no DOM dependency) ------------------------------

export function renderIntro(): string {
  const labels = ANSWER_OPTIONS.map((o) => `<li>${escapeHtml(o.label)}</li>`).join("\n      ");
  return `<section class="intro">
  <h1>CHESTIONAR PENTRU EVALUAREA COMPETENȚEI PROFESIONALE A CADRELOR DIDACTICE</h1>
  <p>Acest chestionar conține enunțuri care descriu comportamente ale cadrelor
  didactice. Citiți cu atenție fiecare enunț, apreciați în ce măsură i se
  potrivește cadrului didactic evaluat și alegeți una din variantele de răspuns:</p>
  <ul class="labels">
      ${labels}
  </ul>
  <p>Pe formularul afișat, selectați butonul radio din dreptul răspunsului ales.
  Răspundeți la toate enunțurile!</p>
  <p class="objectivity">Încercați să fiți obiectiv! Alegeți răspunsul potrivit la
  fiecare enunț fără să vă lăsați influențat de imaginea generală pe care o aveți
  despre cadrul didactic evaluat.</p>
  <button type="button" data-action="start">Începeți</button>
</section>`;
}

export function renderQuestion(view: QuestionPayload, options: UiOptions = DEFAULT_UI_OPTIONS): string {
  const q = view.question;
  const radios = ANSWER_OPTIONS.map(
    (option) => `<label class="option">
      <input type="radio" name="answer" value="${option.value}">
      <span>${escapeHtml(option.label)}</span>
    </label>`,
  ).join("\n    ");
  const tag =
    options.showDirectionTag
      ? `<p class="direction-tag">(${q.direction === "direct" ? "cotare directă" : "cotare inversă"})</p>`
      : "";
  const media = q.media_url
    ? `<figure class="media-slot"><video src="${escapeAttr(q.media_url)}" controls></video></figure>`
    : "";
  const message = view.status_message
    ? `<p class="status-message" role="alert">${escapeHtml(view.status_message)}</p>`
    : "";
  const reset = view.reset_allowed
    ? `<button type="button" data-action="reset" class="reset">Reset</button>`
    : "";
  return `<section class="question" data-question-index="${q.index}">
  <p class="mode-badge mode-${view.mode}">${view.mode === "demo" ? "DEMO" : "Evaluare oficială"}</p>
  <h2>Cadru didactic evaluat:<br>${escapeHtml(view.teacher)}</h2>
  ${message}
  ${media}
  <p class="item-text">${q.index}. ${escapeHtml(q.text)}</p>
  ${tag}
  <form data-action="answer">
    ${radios}
    <button type="submit">Continuați</button>
  </form>
  <p class="progress">${view.progress.answered} / ${view.progress.total}</p>
  ${reset}
</section>`;
}

export function renderCompleted(state: Extract<ClientViewState, { kind: "completed" }>): string {
  const number =
    state.questionnaireNo !== null ? `<p>Chestionar nr.: ${state.questionnaireNo}</p>` : "";
  const reset = state.resetAllowed
    ? `<button type="button" data-action="reset" class="reset">Reset</button>`
    : "";
  return `<section class="completed">
  <h2>Vă mulțumim!</h2>
  <p>Ați răspuns la toate enunțurile pentru ${escapeHtml(state.teacher)}.
  Evaluarea unui cadru didactic se completează o singură dată.</p>
  ${number}
  ${reset}
</section>`;
}

export function renderClosed(message: string): string {
  return `<section class="closed">
  <h2>Evaluarea nu este activă</h2>
  <p>${escapeHtml(message)}</p>
</section>`;
}

export function renderError(message: string): string {
  return `<section class="error">
  <h2>A apărut o problemă</h2>
  <p>${escapeHtml(message)}</p>
  <button type="button" data-action="start">Reîncercați</button>
</section>`;
}

export function renderState(state: ClientViewState, options: UiOptions = DEFAULT_UI_OPTIONS): string {
  switch (state.kind) {
    case "intro":
      return renderIntro();
    case "question":
      return renderQuestion(state.view, options);
    case "completed":
      return renderCompleted(state);
    case "closed":
      return renderClosed(state.message);
    case "error":
      return renderError(state.message);
  }
}
