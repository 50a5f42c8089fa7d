"""Acceptance gate: ten numbered criteria, one verdict line apiece.

Each criterion reads its named checks out of one shared default-config
suite run (the ``suite_report`` session fixture) and enforces three
things: the checks exist, they passed, and they ran at a tolerance at
least as strict as the criterion states — so a silently loosened default
cannot turn the gate green.  Criterion 10 performs its own extra suite
runs (byte-determinism and the three sabotage switches).

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict
lines as they print; without ``-s`` the per-test PASSED/FAILED column of
``-v`` carries the same information.
"""

import numpy as np

from evosurf.suite import SuiteConfig, run_suite

SLOPE_2 = (1.9, 2.1)
SLOPE_1 = (0.9, 1.1)


def _select(report, *prefixes):
    hits = [r for r in report.results
            if any(r.id.startswith(p) for p in prefixes)]
    assert hits, f"no checks matched {prefixes!r}"
    return hits


def _verdict(num, label, failures):
    status = "PASS" if not failures else "FAIL"
    line = f"[{status}] acceptance {num:02d} — {label}"
    print(line)
    assert not failures, line + " :: " + "; ".join(failures)


def _enforce(results, *, tol=None, slope=None, failures=None):
    out = [] if failures is None else failures
    for r in results:
        if not r.passed:
            out.append(f"{r.id}: residual {r.max_residual:.3e} > {r.tol:g}"
                       + (f" ({r.note})" if r.note else ""))
        if tol is not None and r.tol > tol:
            out.append(f"{r.id}: ran at tolerance {r.tol:g}, "
                       f"criterion demands ≤ {tol:g}")
        if slope is not None:
            if r.slope is None or not slope[0] <= r.slope <= slope[1]:
                out.append(f"{r.id}: slope {r.slope} outside {slope}")
    return out


def test_criterion_01_surface_vs_ambient_comparison(suite_report):
    fails = []
    for op in ("gradient", "covariant-derivative", "vector-divergence",
               "tensor-divergence"):
        got = _select(suite_report, f"ambient-{op}-comparison")
        assert len(got) == 3           # sphere, ellipsoid, torus
        _enforce(got, tol=1e-5, slope=SLOPE_2, failures=fails)
    _enforce(_select(suite_report, "ambient-transpose-witness"),
             tol=1e-5, failures=fails)
    _verdict(1, "curvilinear vs Cartesian operator routes "
                "(slope 2, gap ≤ 1e−5, transpose witness)", fails)


def test_criterion_02_component_formulas(suite_report):
    got = _select(suite_report, "component-")
    assert len(got) == 9
    _verdict(2, "component formulas ≤ 1e−9 against direct differentiation",
             _enforce(got, tol=1e-9))


def test_criterion_03_rate_of_strain(suite_report):
    fails = _enforce(_select(suite_report, "metric-rate-pathways"), tol=1e-10)
    _enforce(_select(suite_report, "killing-strain"), tol=1e-10,
             failures=fails)
    _enforce(_select(suite_report, "expanding-strain-value"), tol=1e-10,
             failures=fails)
    _verdict(3, "metric-rate vs covariant-derivative strain ≤ 1e−10, "
                "Killing field strain-free", fails)


def test_criterion_04_material_derivative(suite_report):
    fails = _enforce(_select(suite_report, "material-derivative-pathways"),
                     tol=1e-6)
    _enforce(_select(suite_report, "material-derivative-trajectory-oracle"),
             slope=SLOPE_2, failures=fails)
    _enforce(_select(suite_report, "trajectory-endpoints"), failures=fails)
    _verdict(4, "material-derivative pathways ≤ 1e−6 with trajectory-FD "
                "oracle at slope 2", fails)


def test_criterion_05_transport_theorem(suite_report):
    fails = _enforce(_select(suite_report, "leibniz-transport-slope"),
                     slope=SLOPE_2)
    _enforce(_select(suite_report, "leibniz-area-rate"), tol=1e-6,
             failures=fails)
    _enforce(_select(suite_report, "leibniz-stationary"), tol=1e-6,
             failures=fails)
    _verdict(5, "transport theorem at slope 2; expanding-sphere area rate "
                "8πrṙ within 1e−6", fails)


def test_criterion_06_tangential_equivalence(suite_report):
    fails = _enforce(_select(suite_report, "tangential-forms-agreement"),
                     tol=1e-9)
    _enforce(_select(suite_report, "full-tangential-projection"), tol=1e-10,
             failures=fails)
    _enforce(_select(suite_report, "full-normal-projection"), tol=1e-10,
             failures=fails)
    _verdict(6, "three tangential forms agree ≤ 1e−9; P/n projections of "
                "the full system ≤ 1e−10", fails)


def test_criterion_07_manufactured_solutions(suite_report):
    fails = _enforce(_select(suite_report,
                             "manufactured-rotation-tangential",
                             "manufactured-rotation-normal",
                             "manufactured-rotation-full",
                             "manufactured-expansion-momentum"), tol=1e-9)
    _enforce(_select(suite_report, "manufactured-rest",
                     "expansion-continuity-witness"), tol=1e-12,
             failures=fails)
    _enforce(_select(suite_report, "full-cartesian-route"), tol=1e-5,
             failures=fails)
    _verdict(7, "manufactured states close: rotation (f_N = pκ − ‖v‖², "
                "p¹ = ‖v‖²), expansion, rest", fails)


def test_criterion_08_thin_film(suite_report):
    fails = _enforce(_select(suite_report, "thin-metric-expansion"),
                     tol=1e-11)
    _enforce(_select(suite_report, "thin-christoffel-limits"), tol=1e-10,
             failures=fails)
    _enforce(_select(suite_report, "thin-expansion-slope"), slope=SLOPE_1,
             failures=fails)
    _enforce(_select(suite_report, "thin-restriction-identities",
                     "thin-slip-extension", "thin-projected-divergence"),
             tol=1e-10, failures=fails)
    _enforce(_select(suite_report, "thin-metric-blocks",
                     "thin-relative-velocity", "thin-sphere-christoffel-flat"),
             failures=fails)
    _verdict(8, "tubular metric expansion exact ≤ 1e−11, Christoffel "
                "limits ≤ 1e−10, O(ζ) slopes, restrictions ≤ 1e−10", fails)


def test_criterion_09_flat_extension_expansion(suite_report):
    got = _select(suite_report, "pressure-pair-gradient-slope")
    fails = _enforce(got, tol=1e-5)
    for r in got:
        if r.slope is not None and r.slope < 1.0:
            fails.append(f"{r.id}: slope {r.slope:.3f} below 1")
    _enforce(_select(suite_report, "composite-derivative-at-surface",
                     "ambient-shape-operator"), tol=1e-5, failures=fails)
    _verdict(9, "pressure-pair extension gradient converges (slope ≥ 1); "
                "composite rules and ambient shape operator ≤ 1e−5", fails)


def test_criterion_10_determinism_and_witness_integrity(suite_report):
    fails = []
    if not suite_report.passed:
        fails.append(
            f"{len(suite_report.failures)} checks red in the default run: "
            + ", ".join(r.id for r in suite_report.failures))
    _enforce(_select(suite_report, "report-determinism"), failures=fails)

    second = run_suite()
    if suite_report.to_json() != second.to_json():
        fails.append("two default-config runs differ byte-for-byte")

    targets = {
        "drop_tensor_transpose": ("ambient-tensor-divergence-comparison",
                                  "ambient-transpose-witness"),
        "flip_curvature_sign": ("manufactured-rotation-normal",
                                "component-partial-vector"),
        "drop_pressure_curvature": ("full-normal-projection",
                                    "manufactured-rest"),
    }
    for switch, prefixes in targets.items():
        rep = run_suite(SuiteConfig(sabotage=(switch,)), only=prefixes)
        if not rep.failures:
            fails.append(f"sabotage {switch!r} turned nothing red")
    _verdict(10, "byte-deterministic full run; every sabotage switch "
                 "turns named checks red", fails)
