"""Verification suite: surface/field catalog, named checks, runner, CLI."""

from .config import SuiteConfig, load_config
from .checks import Check, CheckContext, CheckResult, build_checks
from .runner import SuiteReport, run_suite

__all__ = [
    "SuiteConfig", "load_config",
    "Check", "CheckContext", "CheckResult", "build_checks",
    "SuiteReport", "run_suite",
]
