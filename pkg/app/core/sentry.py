"""
Sentry Error Tracking
=====================

Optional error tracking for solver runs, sweeps and the HTTP surface.
Everything here is a no-op until a DSN is configured. Errors caused by
caller input (bad parameters, bad config) are never sent.
"""

import logging
from typing import Any, Dict, Optional

import sentry_sdk
from sentry_sdk.integrations.logging import LoggingIntegration

from app.core.config import get_settings
from app.core.exceptions import USAGE_ERRORS

logger = logging.getLogger(__name__)


def before_send(event: Dict[str, Any], hint: Dict[str, Any]) -> Optional[Dict[str, Any]]:
    """Drop usage errors, the numerical analogue of a 4xx."""
    exc_info = hint.get("exc_info")
    if exc_info and isinstance(exc_info[1], USAGE_ERRORS):
        return None
    return event


def set_solver_context(method: str, m: int, n: int, **params: Any) -> None:
    sentry_sdk.set_tag("method", method)
    sentry_sdk.set_context("solve", {"m": m, "n": n, **params})


def set_sweep_context(experiment: str, base_seed: int, jobs: int) -> None:
    """Enough to replay a failing sweep."""
    sentry_sdk.set_tag("experiment", experiment)
    sentry_sdk.set_context("sweep", {"base_seed": base_seed, "jobs": jobs})


def capture_exception(exception: Exception, extra: Optional[Dict[str, Any]] = None) -> None:
    with sentry_sdk.push_scope() as scope:
        for key, value in (extra or {}).items():
            scope.set_extra(key, value)
        sentry_sdk.capture_exception(exception)


def capture_message(message: str, level: str = "info", extra: Optional[Dict[str, Any]] = None) -> None:
    """E.g. a solve or sweep that stopped without converging."""
    with sentry_sdk.push_scope() as scope:
        for key, value in (extra or {}).items():
            scope.set_extra(key, value)
        scope.level = level
        sentry_sdk.capture_message(message)


def init_sentry() -> bool:
    """Initialize the SDK from settings. Returns False when no DSN is configured."""
    settings = get_settings()
    if not settings.sentry_dsn:
        logger.debug("Sentry DSN not configured - error tracking disabled")
        return False

    sentry_sdk.init(
        dsn=settings.sentry_dsn,
        environment=settings.environment,
        integrations=[LoggingIntegration(level=logging.INFO, event_level=logging.ERROR)],
        traces_sample_rate=0.0,
        before_send=before_send,
        release=settings.app_version,
        send_default_pii=False,
    )
    sentry_sdk.set_tag("app", "robust-l1-lab")

    logger.info(f"Sentry initialized for environment: {settings.environment}")
    return True
