"""Command-line front end.

    evosurf verify    [--config FILE] [--only PREFIX ...] [--jobs N]
    evosurf residual  --system ID --state NAME [--points N] [--time T]
    evosurf converge  --op ID [--surface NAME]
    evosurf list
    evosurf report    --format json|csv [--input FILE]

Exit status: 0 when everything passed, 1 when any check failed, 2 for
configuration errors (bad config file, unknown names).  ``converge``
prints plot-ready CSV; ``report`` re-emits the saved canonical report.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from .. import ambient_ops as A
from .. import curv_ops as C
from .. import evolution as ev
from .. import navier_stokes as ns
from ..charts import interior_samples
from ..errors import ConfigError, EvosurfError
from ..geometry import SurfacePoint, value_of
from . import catalog
from .checks import build_checks
from .config import SuiteConfig, load_config
from .runner import report_from_json, run_suite

__all__ = ["main"]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="evosurf",
        description="verification suite for evolving-surface calculus")
    p.add_argument("--version", action="version",
                   version=f"evosurf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the full check suite")
    v.add_argument("--config", help="TOML or JSON config file")
    v.add_argument("--only", action="append", metavar="PREFIX",
                   help="run only checks whose id starts with PREFIX "
                        "(repeatable)")
    v.add_argument("--jobs", type=int, help="worker pool size")
    v.add_argument("--output", help="report path (overrides config)")
    v.add_argument("--sabotage", action="append", metavar="SWITCH",
                   help="enable a deliberate defect for a negative-control "
                        "run (repeatable)")

    r = sub.add_parser("residual", help="evaluate one system on one state")
    r.add_argument("--system", required=True, choices=ns.SYSTEM_IDS)
    r.add_argument("--state", required=True)
    r.add_argument("--config", help="TOML or JSON config file")
    r.add_argument("--points", type=int, default=200)
    r.add_argument("--time", type=float, default=0.0)

    c = sub.add_parser("converge", help="step sweep for one operator")
    c.add_argument("--op", required=True, choices=sorted(_CONVERGE_OPS))
    c.add_argument("--surface", default="unit_sphere")
    c.add_argument("--config", help="TOML or JSON config file")
    c.add_argument("--points", type=int, default=100)

    sub.add_parser("list", help="catalog surfaces, fields, states, checks")

    e = sub.add_parser("report", help="re-emit the saved report")
    e.add_argument("--format", required=True, choices=("json", "csv"))
    e.add_argument("--config", help="TOML or JSON config file")
    e.add_argument("--input", help="report file (default: config output_path)")
    return p


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.sabotage:
        from .config import _validate
        merged = dict(sabotage=sorted(set(cfg.sabotage) | set(args.sabotage)))
        cfg = _validate({**_cfg_dict(cfg), **merged}, "--sabotage")
    report = run_suite(cfg, only=args.only, jobs=args.jobs)
    for r in report.results:
        status = "pass" if r.passed else "FAIL"
        slope = f"  slope {r.slope:+.3f}" if r.slope is not None else ""
        print(f"{status}  {r.id:<48} {r.max_residual:.3e}  "
              f"(tol {r.tol:.0e}){slope}")
        if r.note and (not r.passed or sys.stdout.isatty()):
            print(f"      {r.note}")
    out = args.output or cfg.output_path
    report.write(out)
    n_fail = len(report.failures)
    print(f"\n{len(report.results)} checks, {n_fail} failed; report: {out}")
    return 0 if report.passed else 1


def _cfg_dict(cfg: SuiteConfig) -> dict:
    return {
        "surfaces": list(cfg.surfaces),
        "fields": list(cfg.fields),
        "tolerances": dict(cfg.tolerances),
        "fd_steps": {k: (list(v) if isinstance(v, tuple) else v)
                     for k, v in cfg.fd_steps.items()},
        "quadrature": dict(cfg.quadrature),
        "seed": cfg.seed,
        "output_path": cfg.output_path,
    }


def _cmd_residual(args) -> int:
    cfg = load_config(args.config)
    ch, state = catalog.flow_state(args.state)
    rng = np.random.default_rng([cfg.seed % 2**32, 0xE5])
    uv = interior_samples(ch, args.points, rng)
    sp = SurfacePoint(ch, uv[:, 0], uv[:, 1], args.time)
    res = ns.residual(args.system, state, sp)
    print(f"system {args.system} on state {args.state!r} "
          f"({args.points} points, t={args.time:g}, chart {ch.name})")
    for key, arr in res.parts.items():
        a = np.asarray(arr)
        print(f"  {key:<14} max |r| = {np.max(np.abs(a)):.6e}   "
              f"rms = {np.sqrt(np.mean(a ** 2)):.6e}")
    print(f"  overall        max |r| = {res.max_norm:.6e}   "
          f"rms = {res.l2_norm:.6e}")
    return 0


# operator registry for `converge`: each entry returns (steps, errors)
def _sweep_ambient(op, cfg, surface, npts):
    ch = catalog.surface(surface)
    rng = np.random.default_rng([cfg.seed % 2**32, 0xC0])
    uv = interior_samples(ch, npts, rng)
    sp = SurfacePoint(ch, uv[:, 0], uv[:, 1], 0.0)
    fieldmap = {
        "gradient": ("trig_mix",
                     lambda f: value_of(C.grad_scalar(f, sp)),
                     A.grad_hat_scalar),
        "covariant-derivative": ("poly_vector",
                                 lambda f: value_of(C.covariant_derivative(f, sp)),
                                 A.covderiv_hat),
        "vector-divergence": ("poly_vector",
                              lambda f: C.div_vector(f, sp),
                              A.div_hat_vector),
        "tensor-divergence": ("pressure_projector",
                              lambda f: C.div_tensor(f, sp),
                              A.div_hat_tensor_of_transpose),
        "pressure-pair": None,
    }
    hs = [float(h) for h in cfg.step("h_sweep")]
    if op == "pressure-pair":
        p, p1 = catalog.field("height"), catalog.field("centrifugal")
        target = value_of(C.grad_scalar(p, sp)) \
            + value_of(p1(sp))[..., None] * value_of(sp.normal)
        errs = []
        for h in hs:
            st = A.ExtensionStencil(ch, uv, h=h, center=sp)
            errs.append(float(np.max(np.abs(
                A.pressure_pair_gradient(p, p1, st) - target))))
        return hs, errs
    fname, curv, hat = fieldmap[op]
    f = catalog.field(fname)
    ref = np.asarray(curv(f))
    errs = []
    for h in hs:
        st = A.ExtensionStencil(ch, uv, h=h, center=sp)
        errs.append(float(np.max(np.abs(hat(f, st) - ref))))
    return hs, errs


def _sweep_material(cfg, surface, npts):
    ch = catalog.surface("rotating_sphere" if surface == "unit_sphere"
                         else surface)
    rng = np.random.default_rng([cfg.seed % 2**32, 0xD1])
    uv = interior_samples(ch, 1, rng)
    sp = SurfacePoint(ch, uv[:, 0], uv[:, 1], 0.0)
    x0 = value_of(sp.pos)[0]
    md = float(np.asarray(ev.material_derivative(
        catalog.field("trig_mix"), sp, "curvilinear"))[0])
    hts = [float(h) for h in cfg.step("h_t_sweep")]
    errs = []
    for h in hts:
        fwd = ev.integrate_flow(ch, x0, 0.0, h, richardson=False, dt=h / 4)
        bwd = ev.integrate_flow(ch, x0, 0.0, -h, richardson=False, dt=h / 4)
        fd = ((math.sin(fwd.x[0]) * math.cos(fwd.x[1]) + fwd.x[2])
              - (math.sin(bwd.x[0]) * math.cos(bwd.x[1]) + bwd.x[2])) / (2 * h)
        errs.append(abs(fd - md))
    return hts, errs


def _sweep_leibniz(cfg, surface, npts):
    ch = catalog.surface("expanding_sphere" if surface == "unit_sphere"
                         else surface)
    hts = [float(h) for h in cfg.step("h_t_sweep")]
    errs = [ev.leibniz_residual(ch, catalog.field("height_sq"), 0.0,
                                order_u=cfg.order("order_u"),
                                order_v=cfg.order("order_v"),
                                h_t=h).residual
            for h in hts]
    return hts, errs


_CONVERGE_OPS = {
    "gradient", "covariant-derivative", "vector-divergence",
    "tensor-divergence", "pressure-pair", "material-derivative", "leibniz",
}


def _cmd_converge(args) -> int:
    cfg = load_config(args.config)
    if args.op == "material-derivative":
        steps, errs = _sweep_material(cfg, args.surface, args.points)
    elif args.op == "leibniz":
        steps, errs = _sweep_leibniz(cfg, args.surface, args.points)
    else:
        steps, errs = _sweep_ambient(args.op, cfg, args.surface, args.points)
    slope = float(np.polyfit(np.log(steps),
                             np.log(np.maximum(errs, 1e-16)), 1)[0])
    print("step,max_error")
    for h, e in zip(steps, errs):
        print(f"{h!r},{e!r}")
    print(f"# op={args.op} surface={args.surface} fitted_slope={slope:.4f}")
    return 0


def _cmd_list(_args) -> int:
    print("surfaces:")
    for name in catalog.surface_ids():
        ch = catalog.surface(name)
        print(f"  {name:<18} domain {ch.domain}, margin {ch.margin}")
    print("fields:")
    for name in catalog.field_names():
        print(f"  {name:<18} {catalog.FIELDS[name].kind}")
    print("states:")
    for name in catalog.state_ids():
        print(f"  {name}")
    print("systems:")
    for name in ns.SYSTEM_IDS:
        print(f"  {name}")
    checks = build_checks(SuiteConfig())
    print(f"checks ({len(checks)}):")
    for c in checks:
        print(f"  {c.id:<48} [{c.anchor}]")
    return 0


def _cmd_report(args) -> int:
    cfg = load_config(args.config)
    path = Path(args.input or cfg.output_path)
    if path.exists():
        report = report_from_json(path.read_text())
    else:
        report = run_suite(cfg)
        report.write(str(path))
    sys.stdout.write(report.to_json() if args.format == "json"
                     else report.to_csv())
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handlers = {
        "verify": _cmd_verify,
        "residual": _cmd_residual,
        "converge": _cmd_converge,
        "list": _cmd_list,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EvosurfError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
