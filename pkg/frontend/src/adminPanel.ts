/** Admin console renderers: the three sections (status, parameters,
 * teaching staff) plus the login form. */

import { escapeAttr, escapeHtml } from "./html.js";
import type { ConfigPayload, StatusPayload, TeacherPayload } from "./types.js";

export function renderLogin(error?: string): string {
  const message = error ? `<p class="status-message" role="alert">${escapeHtml(error)}</p>` : "";
  return `<section class="admin-login">
  <h2>Administrare</h2>
  ${message}
  <form data-action="login">
    <label>Utilizator <input name="username" autocomplete="username"></label>
    <label>Parolă <input name="password" type="password" autocomplete="current-password"></label>
    <button type="submit">Autentificare</button>
  </form>
</section>`;
}

export function renderStatusSection(status: StatusPayload): string {
  const respondents = status.respondents
    .map(
      (r) =>
        `<tr><td>${escapeHtml(r.client_ip)}</td><td>${escapeHtml(r.mode)}</td>` +
        `<td>${r.answered} / ${r.total}</td><td>${escapeHtml(r.state)}</td></tr>`,
    )
    .join("\n");
  const health = status.store_health;
  return `<section class="admin-status">
  <h3>Stare</h3>
  <p>Aplicația este <strong>${status.active ? "activată" : "dezactivată"}</strong>.
  ${status.current_teacher ? `Cadru didactic evaluat: ${escapeHtml(status.current_teacher)}.` : "Niciun cadru didactic selectat."}</p>
  <p>Sesiuni: ${status.counts.official} oficiale, ${status.counts.demo} demo —
  ${status.counts.completed} finalizate, ${status.counts.in_progress} în lucru.</p>
  <table class="respondents">
    <thead><tr><th>Adresă IP</th><th>Mod</th><th>Progres</th><th>Stare</th></tr></thead>
    <tbody>
${respondents}
    </tbody>
  </table>
  <p class="store-health">Bază de date: schema v${escapeHtml(health.schema_version)},
  ${health.sessions} sesiuni, ${health.answers} răspunsuri,
  integritate ${health.integrity_ok ? "OK" : "cu PROBLEME"}.</p>
</section>`;
}

export function renderParametersSection(config: ConfigPayload, teachers: TeacherPayload[], error?: string): string {
  const options = teachers
    .map(
      (t) =>
        `<option value="${escapeAttr(t.id)}"${t.id === config.current_teacher ? " selected" : ""}>${escapeHtml(t.display_name)}</option>`,
    )
    .join("\n      ");
  const message = error ? `<p class="status-message" role="alert">${escapeHtml(error)}</p>` : "";
  return `<section class="admin-parameters">
  <h3>Modificare parametri</h3>
  ${message}
  <form data-action="save-config">
    <label><input type="checkbox" name="active"${config.active ? " checked" : ""}> Aplicație activată</label>
    <label>Cadru didactic evaluat
      <select name="current_teacher">
      <option value="">— neselectat —</option>
      ${options}
      </select>
    </label>
    <label>Lista adreselor IP agreate (una pe linie)
      <textarea name="allowlist" rows="6">${escapeHtml(config.allowlist.join("\n"))}</textarea>
    </label>
    <label>Timp maxim de completare (secunde, gol = nelimitat)
      <input name="deadline_seconds" type="number" min="1" value="${config.deadline_seconds ?? ""}">
    </label>
    <button type="submit">Salvați</button>
  </form>
</section>`;
}

export function renderStaffSection(teachers: TeacherPayload[], error?: string): string {
  const rows = teachers
    .map(
      (t) =>
        `<tr><td>${escapeHtml(t.id)}</td><td>${escapeHtml(t.display_name)}</td>` +
        `<td><button type="button" data-action="remove-teacher" data-id="${escapeAttr(t.id)}">Eliminați</button></td></tr>`,
    )
    .join("\n");
  const message = error ? `<p class="status-message" role="alert">${escapeHtml(error)}</p>` : "";
  return `<section class="admin-staff">
  <h3>Cadre didactice</h3>
  ${message}
  <table class="staff">
    <thead><tr><th>Id</th><th>Nume afișat</th><th></th></tr></thead>
    <tbody>
${rows}
    </tbody>
  </table>
  <form data-action="add-teacher">
    <label>Id <input name="id" required></label>
    <label>Nume afișat <input name="display_name" required></label>
    <button type="submit">Adăugați / actualizați</button>
  </form>
</section>`;
}

/** Parse the allowlist textarea: one address per line, blanks dropped. */
export function parseAllowlist(text: string): string[] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
}

/** Parse the deadline input: empty clears the budget. */
export function parseDeadline(text: string): number | null {
  const trimmed = text.trim();
  if (!trimmed) return null;
  const value = Number(trimmed);
  return Number.isFinite(value) && value > 0 ? Math.floor(value) : null;
}
