/** Wire types mirroring the server's JSON contract. */

export interface QuestionPayload {
  state: "question";
  mode: "official" | "demo";
  reset_allowed: boolean;
  teacher: string;
  question: {
    index: number;
    text: string;
    direction: "direct" | "inverse";
    /** optional media slot (e.g. a spoken-question clip); unused by default */
    media_url?: string;
  };
  progress: { answered: number; total: number };
  status_message: string | null;
}

export interface CompletedPayload {
  state: "completed";
  mode: "official" | "demo";
  reset_allowed: boolean;
  teacher: string;
  questionnaire_no: number | null;
  completed_at: string | null;
}

export interface ClosedPayload {
  state: "closed";
  mode: "closed";
  message: string;
}

export type SessionPayload = QuestionPayload | CompletedPayload | ClosedPayload;

export interface ApiErrorBody {
  error: { code: string; message: string };
  mode?: string | null;
  retry?: QuestionPayload | null;
}

export interface ConfigPayload {
  active: boolean;
  current_teacher: string | null;
  allowlist: string[];
  deadline_seconds: number | null;
}

export interface TeacherPayload {
  id: string;
  display_name: string;
}

export interface StatusPayload {
  active: boolean;
  current_teacher: string | null;
  counts: { official: number; demo: number; completed: number; in_progress: number };
  respondents: Array<{
    client_ip: string;
    teacher_id: string;
    mode: string;
    answered: number;
    total: number;
    state: string;
    started_at: string;
    completed_at: string | null;
    questionnaire_no: number | null;
  }>;
  store_health: {
    schema_version: string;
    sessions: number;
    answers: number;
    integrity_ok: boolean;
    violations: string[];
  };
}

export interface ResultRowPayload {
  questionnaire_no: number;
  demo: boolean;
  completed_at: string;
  teacher_id: string;
  teacher: string;
  raw_answers: number[];
  scored_answers: number[];
}

export interface ResultListPayload {
  total: number;
  results: ResultRowPayload[];
}

export interface ReportItemPayload {
  index: number;
  text: string;
  raw: number;
  label: string;
  display: string;
}

export interface ResultDetailPayload {
  questionnaire_no: number;
  teacher: string;
  completed_at: string;
  demo: boolean;
  direct_items: ReportItemPayload[];
  inverse_items: ReportItemPayload[];
}

/** The five canonical answer options, lowest to highest. */
export const ANSWER_OPTIONS: ReadonlyArray<{ value: number; label: string }> = [
  { value: 1, label: "foarte puțin sau deloc" },
  { value: 2, label: "puțin" },
  { value: 3, label: "nici prea mult, nici prea puțin" },
  { value: 4, label: "mult" },
  { value: 5, label: "foarte mult" },
];
