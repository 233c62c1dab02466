"""Request classification: every student-plane request lands in exactly one
of three states — official, demo, or closed — based on the activation flag
and the IP allowlist. Pure functions over an immutable config snapshot.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import (
    CampaignConfig,
    ResetForbidden,
    SessionMode,
    canonical_address,
)

CLOSED_MESSAGE = "Evaluarea nu este activă momentan. / The evaluation campaign is not active."


@dataclass(frozen=True)
class AccessDecision:
    mode: SessionMode
    reset_allowed: bool


def classify_access(client_ip: str, config: CampaignConfig) -> AccessDecision:
    """Classify a client address against the campaign snapshot.

    Address validation comes first: an unparsable address is rejected even
    when the campaign is inactive. With a valid address, an inactive
    campaign is closed for everyone; an active one is official for
    allowlisted addresses and demo (resettable) for all others.
    """
    ip = canonical_address(client_ip)
    if not config.active:
        return AccessDecision(mode=SessionMode.CLOSED, reset_allowed=False)
    if ip in config.allowlist:
        return AccessDecision(mode=SessionMode.OFFICIAL, reset_allowed=False)
    return AccessDecision(mode=SessionMode.DEMO, reset_allowed=True)


def authorize_reset(decision: AccessDecision) -> None:
    """Permit reset only for demo sessions; anything else would destroy
    answers that count."""
    if decision.mode is not SessionMode.DEMO:
        raise ResetForbidden(
            "reset is only available in demo mode; official answers are kept"
            if decision.mode is SessionMode.OFFICIAL
            else "reset is not available while the campaign is closed"
        )
