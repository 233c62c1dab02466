/** Results viewer: the master table with the demo filter, and the printable
 * single-questionnaire document (two scoring groups, item text on hover). */

import { escapeHtml } from "./html.js";
import type { ReportItemPayload, ResultDetailPayload, ResultRowPayload } from "./types.js";

export function renderResultsTable(rows: ResultRowPayload[], total: number): string {
  if (rows.length === 0) {
    return `<p class="empty-state">Nu există chestionare completate pentru filtrul ales.</p>`;
  }
  const header =
    `<tr><th>Print</th><th>Demo</th><th>Data/ora</th><th>Cadru didactic evaluat</th>` +
    Array.from({ length: total }, (_, i) => `<th>e${i + 1}</th>`).join("") +
    `</tr>`;
  const body = rows
    .map(
      (row) =>
        `<tr><td><a href="#" data-action="detail" data-no="${row.questionnaire_no}">&gt;&gt;</a></td>` +
        `<td>${row.demo ? "DEMO" : ""}</td>` +
        `<td>${escapeHtml(row.completed_at)}</td>` +
        `<td>${escapeHtml(row.teacher)}</td>` +
        row.raw_answers.map((v) => `<td>${v}</td>`).join("") +
        `</tr>`,
    )
    .join("\n");
  return `<table class="results">
<thead>${header}</thead>
<tbody>
${body}
</tbody>
</table>`;
}

export function renderFilterBar(includeDemo: boolean): string {
  return `<label class="filter">Afișați rezultatele pentru:
  <select data-action="filter">
    <option value="fara-demo"${includeDemo ? "" : " selected"}>fără demo</option>
    <option value="cu-demo"${includeDemo ? " selected" : ""}>cu demo</option>
  </select>
</label>`;
}

function groupTable(caption: string, items: ReportItemPayload[]): string {
  const body = items
    .map(
      (item) =>
        `<tr><td title="${escapeHtml(item.text)}">${item.index}</td>` +
        `<td>${escapeHtml(item.display)}</td></tr>`,
    )
    .join("\n");
  return `<table class="report-group">
<caption>${escapeHtml(caption)}</caption>
<thead><tr><th>Nr. enunț</th><th>Răspunsul oferit</th></tr></thead>
<tbody>
${body}
</tbody>
</table>`;
}

/** A complete, chrome-free document for printing one questionnaire. */
export function buildPrintDocument(detail: ResultDetailPayload): string {
  const demo = detail.demo ? " (DEMO)" : "";
  return `<!DOCTYPE html>
<html lang="ro">
<head>
<meta charset="utf-8">
<title>Chestionar nr. ${detail.questionnaire_no}</title>
<style>
body { font-family: Georgia, serif; margin: 2rem auto; max-width: 52rem; color: #111; }
.groups { display: flex; gap: 2rem; align-items: flex-start; flex-wrap: wrap; }
table { border-collapse: collapse; margin-top: 0.75rem; }
caption { font-weight: bold; text-align: left; padding-bottom: 0.4rem; white-space: nowrap; }
th, td { border: 1px solid #777; padding: 0.25rem 0.6rem; text-align: left; }
.hint { font-size: 0.85rem; color: #444; }
@media print { .hint { display: none; } }
</style>
</head>
<body>
<h1>Chestionar nr.: ${detail.questionnaire_no}${demo}</h1>
<p>Cadru didactic evaluat: ${escapeHtml(detail.teacher)}</p>
<p>Data evaluării: ${escapeHtml(detail.completed_at)}</p>
<div class="groups">
${groupTable("Întrebări cu cotare directă", detail.direct_items)}
${groupTable("Întrebări cu cotare inversă", detail.inverse_items)}
</div>
<p class="hint">Poziționați cursorul deasupra numărului unui enunț pentru reamintirea textului.</p>
</body>
</html>`;
}
