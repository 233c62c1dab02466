"""The wire interface: student flow, admin plane and results plane as JSON
over HTTP, plus the static plane for the built frontend.

No server decision depends on cookies or client-held progress: every
student-plane request is classified by source address and checked against
the persisted state, so replaying a captured request can never advance a
session past the server's own bookkeeping.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import admin as admin_mod
from . import scoring
from .access import CLOSED_MESSAGE
from .engine import (
    Accepted,
    ClosedNotice,
    Completed,
    CompletedNotice,
    QuestionView,
    Rejected,
    SessionEngine,
)
from .model import (
    BankHolder,
    CampaignConfig,
    DomainError,
    SessionMode,
    Teacher,
    canonical_address,
    to_iso,
    utc_now,
)
from .store import EvaluationStore

#: HTTP status per machine code: 409 for state-machine violations, 403 for
#: authorization violations, 422 for value/selection violations.
STATUS_BY_CODE = {
    "OUT_OF_SEQUENCE": 409,
    "ALREADY_COMPLETED": 409,
    "DEADLINE_EXCEEDED": 409,
    "TEACHER_IN_USE": 409,
    "INCOMPLETE": 409,
    "CAMPAIGN_CLOSED": 403,
    "RESET_FORBIDDEN": 403,
    "UNAUTHORIZED": 401,
    "MISSING_SELECTION": 422,
    "VALUE_OUT_OF_RANGE": 422,
    "BANK_GAP": 422,
    "BANK_DUPLICATE": 422,
    "BANK_EMPTY_TEXT": 422,
    "INVALID_ADDRESS": 400,
    "NO_TEACHER_SELECTED": 503,
    "TEACHER_NOT_FOUND": 404,
    "NOT_FOUND": 404,
    "STORAGE_FAILURE": 500,
}

#: On the admin plane a bad parameter is the caller's fault, not a server
#: or transport condition.
_ADMIN_STATUS_OVERRIDES = {
    "NO_TEACHER_SELECTED": 422,
    "INVALID_ADDRESS": 422,
}


class AnswerSubmission(BaseModel):
    question_index: int
    value: Optional[int] = None


class LoginRequest(BaseModel):
    username: str
    password: str


class ConfigUpdate(BaseModel):
    active: Optional[bool] = None
    current_teacher: Optional[str] = None
    allowlist: Optional[list[str]] = None
    deadline_seconds: Optional[int] = None


class TeacherPayload(BaseModel):
    id: str
    display_name: str


def _error_body(code: str, message: str, **extra) -> dict:
    body = {"error": {"code": code, "message": message}}
    body.update(extra)
    return body


def _question_payload(view: QuestionView) -> dict:
    return {
        "state": "question",
        "mode": view.mode.value,
        "reset_allowed": view.reset_allowed,
        "teacher": view.teacher_display_name,
        "question": {
            "index": view.question.index,
            "text": view.question.text,
            "direction": view.question.direction.value,
        },
        "progress": {"answered": view.answered, "total": view.total},
        "status_message": view.status_message,
    }


def _completed_payload(notice: CompletedNotice) -> dict:
    return {
        "state": "completed",
        "mode": notice.mode.value,
        "reset_allowed": notice.mode is SessionMode.DEMO,
        "teacher": notice.teacher_display_name,
        "questionnaire_no": notice.questionnaire_no,
        "completed_at": to_iso(notice.completed_at) if notice.completed_at else None,
    }


def _closed_payload(notice: ClosedNotice) -> dict:
    return {"state": "closed", "mode": SessionMode.CLOSED.value, "message": notice.message}


def create_app(
    *,
    store: EvaluationStore,
    bank_holder: BankHolder,
    admin_username: str,
    admin_password_hash: str,
    trust_proxy_header: bool = False,
    static_dir: Optional[str] = None,
    token_ttl_seconds: int = admin_mod.TOKEN_TTL_SECONDS,
) -> FastAPI:
    app = FastAPI(title="teacheval", docs_url=None, redoc_url=None)
    engine = SessionEngine(store, bank_holder)
    admin = admin_mod.AdminService(
        store, admin_username, admin_password_hash, token_ttl_seconds
    )
    app.state.store = store
    app.state.bank_holder = bank_holder
    app.state.engine = engine
    app.state.admin = admin

    def load_config() -> CampaignConfig:
        return store.load_config(admin_username, admin_password_hash)

    def client_address(request: Request) -> str:
        if trust_proxy_header:
            forwarded = request.headers.get("x-forwarded-for")
            if forwarded:
                return forwarded.split(",")[0].strip()
        return request.client.host if request.client else ""

    def admin_token(request: Request) -> str:
        header = request.headers.get("authorization", "")
        scheme, _, token = header.partition(" ")
        if scheme.lower() != "bearer" or not token.strip():
            token = ""
        return admin.require(token.strip(), utc_now())

    # -- error mapping ---------------------------------------------------------

    @app.exception_handler(DomainError)
    async def domain_error_handler(request: Request, exc: DomainError):
        status = STATUS_BY_CODE.get(exc.code, 500)
        if request.url.path.startswith("/api/admin"):
            status = _ADMIN_STATUS_OVERRIDES.get(exc.code, status)
        return JSONResponse(status_code=status, content=_error_body(exc.code, str(exc)))

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content=_error_body("INVALID_REQUEST", str(exc.errors()[:3])),
        )

    # -- student plane -----------------------------------------------------------

    @app.get("/api/session")
    def get_session(request: Request):
        result = engine.open_or_resume(client_address(request), load_config(), utc_now())
        if isinstance(result, QuestionView):
            return _question_payload(result)
        if isinstance(result, CompletedNotice):
            return _completed_payload(result)
        return _closed_payload(result)

    @app.post("/api/session/answer")
    def post_answer(request: Request, submission: AnswerSubmission):
        config = load_config()
        if not config.current_teacher:
            # An unset teacher implies an inactive campaign (activation
            # requires one); reject like any other closed-state submission.
            canonical_address(client_address(request))
            return JSONResponse(
                status_code=STATUS_BY_CODE["CAMPAIGN_CLOSED"],
                content=_error_body(
                    "CAMPAIGN_CLOSED",
                    CLOSED_MESSAGE,
                    mode=SessionMode.CLOSED.value,
                    retry=None,
                ),
            )
        outcome = engine.submit_answer(
            client_address(request),
            config.current_teacher,
            submission.question_index,
            submission.value,
            config,
            utc_now(),
        )
        if isinstance(outcome, Accepted):
            return _question_payload(outcome.next_view)
        if isinstance(outcome, Completed):
            return _completed_payload(outcome.notice)
        assert isinstance(outcome, Rejected)
        body = _error_body(
            outcome.reason.value,
            outcome.message,
            mode=outcome.mode.value if outcome.mode else None,
            retry=_question_payload(outcome.retry) if outcome.retry else None,
        )
        return JSONResponse(status_code=STATUS_BY_CODE[outcome.reason.value], content=body)

    @app.post("/api/session/reset")
    def post_reset(request: Request):
        deleted = engine.reset_demo(client_address(request), load_config())
        return {"state": "reset", "mode": SessionMode.DEMO.value, "deleted_answers": deleted}

    # -- admin plane ----------------------------------------------------------------

    @app.post("/api/admin/login")
    def admin_login(credentials: LoginRequest):
        token = admin.authenticate(credentials.username, credentials.password, utc_now())
        return {"token": token, "expires_in": token_ttl_seconds}

    @app.get("/api/admin/status")
    def admin_status(request: Request, username: str = Depends(admin_token)):
        report = admin.view_status(_bearer(request), utc_now(), bank_holder.get().total)
        return _status_payload(report)

    @app.put("/api/admin/config")
    def admin_config(
        request: Request, update: ConfigUpdate, username: str = Depends(admin_token)
    ):
        provided = update.model_fields_set
        kwargs = {}
        for name in ("active", "current_teacher", "allowlist", "deadline_seconds"):
            if name in provided:
                kwargs[name] = getattr(update, name)
        token = _bearer(request)
        updated = admin.set_parameters(token, utc_now(), **kwargs)
        return _config_payload(updated)

    @app.get("/api/admin/config")
    def admin_get_config(username: str = Depends(admin_token)):
        return _config_payload(load_config())

    @app.get("/api/admin/teachers")
    def admin_list_teachers(username: str = Depends(admin_token)):
        return {
            "teachers": [
                {"id": t.id, "display_name": t.display_name}
                for t in store.list_teachers(include_hidden=False)
            ]
        }

    @app.post("/api/admin/teachers")
    def admin_upsert_teacher(payload: TeacherPayload, username: str = Depends(admin_token)):
        teacher = Teacher(id=payload.id, display_name=payload.display_name)
        store.upsert_teacher(teacher)
        return {"id": teacher.id, "display_name": teacher.display_name}

    @app.delete("/api/admin/teachers/{teacher_id}")
    def admin_remove_teacher(
        teacher_id: str, request: Request, username: str = Depends(admin_token)
    ):
        admin.remove_teacher(_bearer(request), utc_now(), teacher_id)
        return {"removed": teacher_id}

    @app.post("/api/admin/bank/reload")
    def admin_reload_bank(username: str = Depends(admin_token)):
        bank = bank_holder.reload()
        return {"reloaded": True, "total": bank.total}

    # -- results plane -----------------------------------------------------------------

    @app.get("/api/results")
    def results_list(
        teacher: Optional[str] = None,
        include_demo: bool = False,
        username: str = Depends(admin_token),
    ):
        rows = scoring.list_results(
            store, bank_holder.get(), teacher_id=teacher, include_demo=include_demo
        )
        return {
            "total": len(rows),
            "results": [
                {
                    "questionnaire_no": row.questionnaire_no,
                    "demo": row.demo,
                    "completed_at": to_iso(row.completed_at),
                    "teacher_id": row.teacher_id,
                    "teacher": row.teacher_display_name,
                    "raw_answers": list(row.raw_answers),
                    "scored_answers": list(row.scored_answers),
                }
                for row in rows
            ],
        }

    @app.get("/api/results/{questionnaire_no}")
    def results_detail(questionnaire_no: int, username: str = Depends(admin_token)):
        report = scoring.printable_report(store, bank_holder.get(), questionnaire_no)
        def items(group):
            return [
                {
                    "index": item.index,
                    "text": item.text,
                    "raw": item.raw,
                    "label": item.label,
                    "display": item.answer_display,
                }
                for item in group
            ]
        return {
            "questionnaire_no": report.questionnaire_no,
            "teacher": report.teacher_display_name,
            "completed_at": to_iso(report.completed_at),
            "demo": report.demo,
            "direct_items": items(report.direct_items),
            "inverse_items": items(report.inverse_items),
        }

    @app.get("/api/results/{questionnaire_no}/print", response_class=HTMLResponse)
    def results_print(questionnaire_no: int, username: str = Depends(admin_token)):
        report = scoring.printable_report(store, bank_holder.get(), questionnaire_no)
        return HTMLResponse(scoring.render_print_html(report))

    # -- static plane --------------------------------------------------------------------

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="frontend")

    return app


def _bearer(request: Request) -> str:
    header = request.headers.get("authorization", "")
    _, _, token = header.partition(" ")
    return token.strip()


def _config_payload(config: CampaignConfig) -> dict:
    return {
        "active": config.active,
        "current_teacher": config.current_teacher,
        "allowlist": sorted(config.allowlist),
        "deadline_seconds": config.deadline_seconds,
    }


def _status_payload(report: admin_mod.StatusReport) -> dict:
    return {
        "active": report.active,
        "current_teacher": report.current_teacher,
        "counts": {
            "official": report.counts.official,
            "demo": report.counts.demo,
            "completed": report.counts.completed,
            "in_progress": report.counts.in_progress,
        },
        "respondents": [
            {
                "client_ip": r.client_ip,
                "teacher_id": r.teacher_id,
                "mode": r.mode,
                "answered": r.answered,
                "total": r.total,
                "state": r.state,
                "started_at": to_iso(r.started_at),
                "completed_at": to_iso(r.completed_at) if r.completed_at else None,
                "questionnaire_no": r.questionnaire_no,
            }
            for r in report.respondents
        ],
        "store_health": {
            "schema_version": report.store_health.schema_version,
            "sessions": report.store_health.sessions,
            "answers": report.store_health.answers,
            "integrity_ok": report.store_health.integrity_ok,
            "violations": list(report.store_health.violations),
        },
    }
