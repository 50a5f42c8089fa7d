"""Suite execution and machine-readable reporting.

``run_suite`` executes every registered check over a worker pool and
assembles a :class:`SuiteReport`.  Checks are pure and own their PRNG
streams (seeded by config seed + check id), so execution order and worker
count cannot change any reported number; assembling the report is the only
serialized step.  The JSON body is canonical — sorted keys, sorted check
ids, no timestamps — and therefore byte-identical across runs with the
same config.

Deliberate-defect ("sabotage") switches from the config are enabled around
the whole run.  They exist so a claimed-green suite can prove its checks
have teeth: each switch must turn at least one check red.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import NamedTuple, Optional, Sequence
from concurrent.futures import ThreadPoolExecutor

from .. import __version__, sabotage
from .checks import Check, CheckContext, CheckResult, build_checks
from .config import SuiteConfig

__all__ = ["SuiteReport", "run_suite", "report_from_json"]


class SuiteReport(NamedTuple):
    """All check results plus the environment that produced them."""

    results: list[CheckResult]
    environment: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_json(self) -> str:
        body = {
            "meta": {"seed": self.environment["seed"], "version": __version__},
            "checks": sorted((r.to_schema() for r in self.results),
                             key=lambda c: c["id"]),
        }
        return json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "anchor", "max_residual", "tol", "pass", "slope"])
        for r in sorted(self.results, key=lambda r: r.id):
            w.writerow([r.id, r.anchor, repr(float(r.max_residual)),
                        repr(float(r.tol)), str(r.passed).lower(),
                        "" if r.slope is None else repr(float(r.slope))])
        return buf.getvalue()

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())


def _run_one(check: Check, ctx: CheckContext) -> CheckResult:
    try:
        return check.run(ctx)
    except Exception as exc:  # a crashed check is a failed check
        return CheckResult(check.id, check.anchor, -1.0, 0.0, False,
                           note=f"error: {type(exc).__name__}: {exc}")


def run_suite(config: SuiteConfig | None = None, *,
              only: Optional[Sequence[str]] = None,
              jobs: Optional[int] = None) -> SuiteReport:
    """Execute the (optionally filtered) check list and collect a report.

    ``only`` keeps checks whose id starts with any given prefix.  ``jobs``
    caps the worker pool; the default saturates small machines without
    oversubscribing.  Results come back in registry order regardless of
    completion order.
    """
    cfg = config or SuiteConfig()
    checks = build_checks(cfg)
    if only:
        checks = [c for c in checks
                  if any(c.id.startswith(p) for p in only)]
    ctx = CheckContext(cfg)
    workers = jobs or min(8, os.cpu_count() or 1)
    with sabotage.enable(*cfg.sabotage):
        if workers <= 1 or len(checks) <= 1:
            results = [_run_one(c, ctx) for c in checks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(lambda c: _run_one(c, ctx), checks))
    env = {
        "seed": cfg.seed,
        "surfaces": list(cfg.surfaces),
        "fd_steps": {k: (list(v) if isinstance(v, (tuple, list)) else v)
                     for k, v in cfg.fd_steps.items()},
        "quadrature": dict(cfg.quadrature),
        "sabotage": list(cfg.sabotage),
        "workers": workers,
    }
    return SuiteReport(list(results), env)


def report_from_json(text: str) -> SuiteReport:
    """Rebuild a report (for re-emission) from its canonical JSON body."""
    body = json.loads(text)
    results = [
        CheckResult(c["id"], c["anchor"], float(c["max_residual"]),
                    float(c["tol"]), bool(c["pass"]),
                    slope=float(c["slope"]) if "slope" in c else None)
        for c in body["checks"]
    ]
    env = {"seed": body["meta"]["seed"]}
    return SuiteReport(results, env)
