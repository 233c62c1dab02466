/** DOM bootstrap: wires the renderers to the live API. All questionnaire
 * state comes from the server; this file only shuttles form values out and
 * payloads back in. */

import { ApiClient, errorMessage, isApiError } from "./api.js";
import {
  renderFilterBar,
  renderResultsTable,
  buildPrintDocument,
} from "./results.js";
import {
  renderLogin,
  renderParametersSection,
  renderStaffSection,
  renderStatusSection,
  parseAllowlist,
  parseDeadline,
} from "./adminPanel.js";
import {
  ClientViewState,
  renderState,
  stateFromSession,
  stateFromSubmit,
} from "./student.js";
import type { ConfigPayload, SessionPayload, TeacherPayload } from "./types.js";

const api = new ApiClient();

const studentRoot = document.getElementById("student")!;
const adminRoot = document.getElementById("admin")!;

let viewState: ClientViewState = { kind: "intro" };
let includeDemo = false;

function setStudentState(state: ClientViewState): void {
  viewState = state;
  studentRoot.innerHTML = renderState(viewState);
}

async function refreshSession(): Promise<void> {
  const { status, body } = await api.openSession();
  setStudentState(stateFromSession(status, body as SessionPayload));
}

async function submitCurrentForm(form: HTMLFormElement): Promise<void> {
  if (viewState.kind !== "question") return;
  const picked = form.querySelector<HTMLInputElement>("input[name=answer]:checked");
  const value = picked ? Number(picked.value) : null;
  const index = viewState.view.question.index;
  const { status, body } = await api.submitAnswer(index, value);
  const next = stateFromSubmit(status, body as SessionPayload);
  if (next === null) {
    await refreshSession();
  } else {
    setStudentState(next);
  }
}

studentRoot.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  if (action === "start") void refreshSession();
  if (action === "reset") {
    void api.resetDemo().then(refreshSession);
  }
});

studentRoot.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  if (form.dataset.action === "answer") {
    event.preventDefault();
    void submitCurrentForm(form);
  }
});

setStudentState({ kind: "intro" });

// -- admin console -------------------------------------------------------------

let adminError: string | undefined;
let paramsError: string | undefined;
let staffError: string | undefined;

async function renderAdmin(): Promise<void> {
  if (!api.authenticated) {
    adminRoot.innerHTML = renderLogin(adminError);
    return;
  }
  const [status, config, teachers, results] = await Promise.all([
    api.status(),
    api.getConfig(),
    api.listTeachers(),
    api.results(includeDemo),
  ]);
  if (status.status === 401) {
    api.logout();
    adminRoot.innerHTML = renderLogin("Sesiunea de administrare a expirat.");
    return;
  }
  if (isApiError(status.body) || isApiError(config.body) || isApiError(teachers.body) || isApiError(results.body)) {
    adminRoot.innerHTML = renderLogin("Răspuns neașteptat de la server.");
    return;
  }
  adminRoot.innerHTML = [
    renderStatusSection(status.body),
    renderParametersSection(config.body as ConfigPayload, teachers.body.teachers, paramsError),
    renderStaffSection(teachers.body.teachers, staffError),
    `<section class="admin-results"><h3>Rezultate</h3>${renderFilterBar(includeDemo)}${renderResultsTable(
      results.body.results,
      results.body.results[0]?.raw_answers.length ?? 0,
    )}</section>`,
  ].join("\n");
}

adminRoot.addEventListener("submit", (event) => {
  const form = event.target as HTMLFormElement;
  event.preventDefault();
  const data = new FormData(form);
  if (form.dataset.action === "login") {
    void api
      .login(String(data.get("username") ?? ""), String(data.get("password") ?? ""))
      .then(({ status, body }) => {
        adminError = status === 200 ? undefined : errorMessage(body);
        return renderAdmin();
      });
  }
  if (form.dataset.action === "save-config") {
    const update: Partial<ConfigPayload> = {
      active: data.get("active") === "on",
      current_teacher: String(data.get("current_teacher") ?? "") || null,
      allowlist: parseAllowlist(String(data.get("allowlist") ?? "")),
      deadline_seconds: parseDeadline(String(data.get("deadline_seconds") ?? "")),
    };
    void api.updateConfig(update).then(({ status, body }) => {
      paramsError = status === 200 ? undefined : errorMessage(body);
      return renderAdmin();
    });
  }
  if (form.dataset.action === "add-teacher") {
    const teacher: TeacherPayload = {
      id: String(data.get("id") ?? ""),
      display_name: String(data.get("display_name") ?? ""),
    };
    void api.upsertTeacher(teacher).then(({ status, body }) => {
      staffError = status === 200 ? undefined : errorMessage(body);
      return renderAdmin();
    });
  }
});

adminRoot.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.dataset.action === "remove-teacher" && target.dataset.id) {
    void api.removeTeacher(target.dataset.id).then(({ status, body }) => {
      staffError = status === 200 ? undefined : errorMessage(body);
      return renderAdmin();
    });
  }
  if (target.dataset.action === "detail" && target.dataset.no) {
    event.preventDefault();
    void api.resultDetail(Number(target.dataset.no)).then(({ body }) => {
      if (!isApiError(body)) {
        const page = window.open("", "_blank");
        if (page) {
          page.document.write(buildPrintDocument(body));
          page.document.close();
        }
      }
    });
  }
});

adminRoot.addEventListener("change", (event) => {
  const target = event.target as HTMLSelectElement;
  if (target.dataset.action === "filter") {
    includeDemo = target.value === "cu-demo";
    void renderAdmin();
  }
});

document.getElementById("admin-toggle")?.addEventListener("click", () => {
  adminRoot.classList.toggle("hidden");
  if (!adminRoot.classList.contains("hidden")) void renderAdmin();
});

void renderAdmin();
