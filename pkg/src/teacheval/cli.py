"""Command line entry points: run the server, export results as a delimited
table, run the store integrity scan, and hash an admin password.
"""
from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import click

from . import scoring
from .admin import hash_password
from .model import BankHolder, load_question_bank, utc_now
from .store import EvaluationStore

DEFAULT_STORE = "teacheval.db"


def _default_bank_path() -> Path:
    return Path(resources.files("teacheval").joinpath("data/sample_bank.json"))


def _open_bank(questions_file) -> BankHolder:
    path = Path(questions_file) if questions_file else _default_bank_path()
    return BankHolder(load_question_bank(path), source_path=path)


@click.group()
def main():
    """Teaching-evaluation campaign server and maintenance tools."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, help="Bind address.")
@click.option("--port", default=8080, show_default=True, type=int)
@click.option(
    "--store-path",
    default=DEFAULT_STORE,
    show_default=True,
    envvar="TEACHEVAL_STORE_PATH",
    help="SQLite store file (created if missing).",
)
@click.option(
    "--questions-file",
    default=None,
    envvar="TEACHEVAL_QUESTIONS_FILE",
    help="Question bank JSON file; defaults to the shipped 58-item sample bank.",
)
@click.option("--admin-user", envvar="TEACHEVAL_ADMIN_USER", required=True)
@click.option(
    "--admin-pass-hash",
    envvar="TEACHEVAL_ADMIN_PASS_HASH",
    default=None,
    help="Salted digest produced by `teacheval hash-password`.",
)
@click.option(
    "--admin-pass",
    envvar="TEACHEVAL_ADMIN_PASS",
    default=None,
    help="Plaintext alternative to --admin-pass-hash (hashed at startup).",
)
@click.option(
    "--trust-proxy-header/--no-trust-proxy-header",
    default=False,
    show_default=True,
    help="Take the client address from X-Forwarded-For (first entry). "
    "Enable only behind a trusted reverse proxy.",
)
@click.option(
    "--deadline-seconds",
    type=int,
    default=None,
    help="Session completion budget applied to the campaign config at startup.",
)
@click.option(
    "--static-dir",
    default=None,
    envvar="TEACHEVAL_STATIC_DIR",
    help="Directory with the built frontend, served at /. "
    "Defaults to ./frontend/dist when that exists.",
)
def serve(
    host,
    port,
    store_path,
    questions_file,
    admin_user,
    admin_pass_hash,
    admin_pass,
    trust_proxy_header,
    deadline_seconds,
    static_dir,
):
    """Run the evaluation server."""
    import uvicorn

    from .api import create_app

    if not admin_pass_hash:
        if not admin_pass:
            raise click.UsageError("provide --admin-pass-hash or --admin-pass (or env equivalents)")
        admin_pass_hash = hash_password(admin_pass)

    store = EvaluationStore(store_path)
    bank_holder = _open_bank(questions_file)
    if deadline_seconds is not None:
        config = store.load_config(admin_user, admin_pass_hash)
        if config.deadline_seconds != deadline_seconds:
            from dataclasses import replace

            store.save_config(
                replace(config, deadline_seconds=deadline_seconds),
                changed_by="startup",
                changes={
                    "deadline_seconds": {
                        "old": config.deadline_seconds,
                        "new": deadline_seconds,
                    }
                },
                now=utc_now(),
            )
    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"

    app = create_app(
        store=store,
        bank_holder=bank_holder,
        admin_username=admin_user,
        admin_password_hash=admin_pass_hash,
        trust_proxy_header=trust_proxy_header,
        static_dir=static_dir,
    )
    click.echo(f"serving {bank_holder.get().total}-item questionnaire on {host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--store-path", default=DEFAULT_STORE, show_default=True)
@click.option("--questions-file", default=None)
@click.option("--teacher", default=None, help="Restrict to one teacher id.")
@click.option("--include-demo", is_flag=True, default=False, help="Include demo rows.")
@click.option(
    "--scored",
    is_flag=True,
    default=False,
    help="Write direction-adjusted values instead of raw answers.",
)
@click.option("--delimiter", default=",", show_default=True)
@click.option(
    "-o",
    "--output",
    type=click.File("w", encoding="utf-8"),
    default="-",
    help="Output file (default: stdout).",
)
def export(store_path, questions_file, teacher, include_demo, scored, delimiter, output):
    """Export completed questionnaires as a delimited text table."""
    store = EvaluationStore(store_path)
    bank = _open_bank(questions_file).get()
    rows = scoring.list_results(store, bank, teacher_id=teacher, include_demo=include_demo)
    count = scoring.write_results_delimited(
        rows, bank, output, delimiter=delimiter, scored=scored
    )
    click.echo(f"wrote {count} questionnaire(s)", err=True)


@main.command()
@click.option("--store-path", default=DEFAULT_STORE, show_default=True)
def scan(store_path):
    """Run the store integrity scan; exits non-zero on violations."""
    store = EvaluationStore(store_path)
    violations = store.integrity_scan()
    if violations:
        for line in violations:
            click.echo(f"VIOLATION: {line}")
        sys.exit(1)
    click.echo("integrity ok")


@main.command("hash-password")
@click.option(
    "--password",
    prompt=True,
    hide_input=True,
    confirmation_prompt=True,
    help="Password to hash (prompted when omitted).",
)
def hash_password_cmd(password):
    """Print a salted digest for --admin-pass-hash."""
    click.echo(hash_password(password))


if __name__ == "__main__":
    main()
