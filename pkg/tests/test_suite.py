"""Verification-suite plumbing: config, registry, runner, report, sabotage."""

import json

import numpy as np
import pytest

from evosurf import sabotage
from evosurf.errors import ConfigError
from evosurf.suite import (
    Check, CheckContext, CheckResult, SuiteConfig, build_checks,
    load_config, run_suite)
from evosurf.suite.config import DEFAULT_FD_STEPS
from evosurf.suite.runner import SuiteReport, report_from_json


# -- configuration ----------------------------------------------------------

def test_default_config():
    cfg = SuiteConfig()
    assert cfg.surfaces == ("unit_sphere", "ellipsoid", "torus")
    assert cfg.seed == 2026
    assert cfg.step("h_gap") == DEFAULT_FD_STEPS["h_gap"]
    assert cfg.order("order_u") == 48


def test_load_config_toml(tmp_path):
    f = tmp_path / "cfg.toml"
    f.write_text(
        'surfaces = ["torus"]\nseed = 11\n'
        '[tolerances]\n"component-formulas" = 1e-8\n'
        '[fd_steps]\nh_gap = 2e-4\n')
    cfg = load_config(str(f))
    assert cfg.surfaces == ("torus",)
    assert cfg.seed == 11
    assert cfg.tolerances["component-formulas"] == 1e-8
    assert cfg.step("h_gap") == 2e-4
    assert cfg.step("h_sweep") == DEFAULT_FD_STEPS["h_sweep"]  # untouched


def test_load_config_json(tmp_path):
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps({"surfaces": ["plane", "unit_sphere"]}))
    assert load_config(str(f)).surfaces == ("plane", "unit_sphere")


@pytest.mark.parametrize("payload", [
    {"nonsense_key": 1},
    {"surfaces": ["marsball"]},
    {"fields": ["no_such_field"]},
    {"sabotage": ["no_such_switch"]},
    {"fd_steps": {"h_bogus": 1e-4}},
    {"quadrature": {"order_u": 1}},
])
def test_bad_config_rejected(tmp_path, payload):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(payload))
    with pytest.raises(ConfigError):
        load_config(str(f))


def test_tolerance_overrides_by_id_and_anchor():
    ctx = CheckContext(SuiteConfig(tolerances={
        "component-formulas": 1e-8,
        "killing-strain-sphere-rotation": 3e-9,
    }))
    # id beats anchor beats built-in default
    assert ctx.tol("killing-strain-sphere-rotation",
                   "component-formulas", 1e-10) == 3e-9
    assert ctx.tol("some-other-check", "component-formulas", 1e-10) == 1e-8
    assert ctx.tol("some-other-check", "unrelated-anchor", 1e-10) == 1e-10


def test_per_check_rng_is_order_independent():
    ctx = CheckContext(SuiteConfig())
    a = ctx.rng("alpha").standard_normal(4)
    _ = ctx.rng("beta").standard_normal(100)    # interleaved consumer
    b = ctx.rng("alpha").standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, ctx.rng("gamma").standard_normal(4))


# -- registry and runner ----------------------------------------------------

def test_registry_ids_unique_and_anchored():
    checks = build_checks(SuiteConfig())
    ids = [c.id for c in checks]
    assert len(ids) == len(set(ids))
    assert len(ids) >= 85
    assert all(c.anchor for c in checks)


def test_run_suite_subset_passes():
    rep = run_suite(only=("quadrature-", "geometry-sphere"))
    assert rep.results
    assert rep.passed
    assert {r.anchor for r in rep.results} == {
        "surface-quadrature", "frame-and-curvature"}


def test_crashed_check_reports_sentinel():
    def boom(ctx, **kw):
        raise RuntimeError("deliberate test failure")

    from evosurf.suite.runner import _run_one
    ctx = CheckContext(SuiteConfig())
    res = _run_one(Check("exploding-check", "anchor", boom), ctx)
    assert not res.passed
    assert res.max_residual == -1.0
    assert "RuntimeError" in res.note and "deliberate" in res.note


def test_report_json_schema_and_determinism():
    r1 = run_suite(only=("killing-strain", "quadrature-plane"))
    r2 = run_suite(only=("killing-strain", "quadrature-plane"))
    assert r1.to_json() == r2.to_json()
    doc = json.loads(r1.to_json())
    assert set(doc) == {"meta", "checks"}
    assert doc["meta"]["seed"] == 2026
    ids = [c["id"] for c in doc["checks"]]
    assert ids == sorted(ids)
    for c in doc["checks"]:
        assert {"id", "anchor", "max_residual", "tol", "pass"} <= set(c)


def test_report_csv_and_roundtrip(tmp_path):
    rep = run_suite(only=("quadrature-plane",))
    csv = rep.to_csv()
    header, *rows = csv.strip().splitlines()
    assert header == "id,anchor,max_residual,tol,pass,slope"
    assert rows and rows[0].startswith("quadrature-plane-unit-square,")
    again = report_from_json(rep.to_json())
    assert again.to_json() == rep.to_json()

    out = tmp_path / "r.json"
    rep.write(str(out))
    assert json.loads(out.read_text())["checks"]


def test_failure_detection_not_vacuous():
    # force a failure by making a tolerance impossible and check that
    # `passed` reflects it (guards against an always-green aggregator)
    cfg = SuiteConfig(tolerances={"quadrature-plane-unit-square": 1e-300})
    rep = run_suite(cfg, only=("quadrature-plane",))
    assert not rep.passed
    assert [r.id for r in rep.failures] == ["quadrature-plane-unit-square"]


# -- sabotage switches: every deliberate defect must turn something red ------

def test_sabotage_requires_known_names():
    with pytest.raises(KeyError):
        with sabotage.enable("definitely_not_a_switch"):
            pass


def test_sabotage_is_scoped():
    assert sabotage.active() == ()
    with sabotage.enable("flip_curvature_sign"):
        assert sabotage.active() == ("flip_curvature_sign",)
    assert sabotage.active() == ()


@pytest.mark.parametrize("switch,prefixes", [
    ("drop_tensor_transpose", ("ambient-tensor-divergence",)),
    ("flip_curvature_sign", ("manufactured-rotation-normal",)),
    ("drop_pressure_curvature", ("full-normal-projection",)),
])
def test_sabotage_turns_checks_red(switch, prefixes):
    cfg = SuiteConfig(sabotage=(switch,))
    rep = run_suite(cfg, only=prefixes)
    assert rep.results, "prefix selected no checks"
    assert rep.failures, f"sabotage {switch!r} went undetected"


def test_sabotaged_run_records_switch_in_environment():
    cfg = SuiteConfig(sabotage=("flip_curvature_sign",))
    rep = run_suite(cfg, only=("geometry-sphere",))
    assert rep.environment["sabotage"] == ["flip_curvature_sign"]
