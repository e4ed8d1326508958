"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Tolerances are pinned here rather than taken from ``qig.verify`` so that a
change in the library cannot silently relax them. Criteria 3 and 6 are
expected to fail: the asymptotic targets they compare against omit a
subleading factor (see the notes in the repository's decisions ledger).

Run directly for a compact report: ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time

import pytest

from qig import verify


def _line(cid: str, ok: bool, text: str) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {text}"


@pytest.fixture
def report(capsys):
    def emit(cid, ok, text):
        with capsys.disabled():
            print("\n" + _line(cid, ok, text))
        return ok

    return emit


def test_c01_0d_closed_form_equivalence(report):
    r = verify.check_0d_grid()
    m = r.measured
    ok = m["max_rel_error"] < 1e-7 and m["grid_seconds"] < 1.0
    report(1, ok, f"max rel error {m['max_rel_error']:.2e} (< 1e-7), {m['grid_seconds']:.2f} s (< 1 s)")
    assert m["max_rel_error"] < 1e-7
    assert m["grid_seconds"] < 1.0


def test_c02_0d_small_r_law(report):
    r = verify.check_small_r()
    lo, hi = 4 / 9 * 0.99, 4 / 9 * 1.01
    vals = (r.measured["pipeline_ratio"], r.measured["closed_form_ratio"])
    ok = all(lo <= v <= hi for v in vals)
    report(2, ok, f"R/(beta r^2) = {vals[0]:.6f} pipeline, {vals[1]:.6f} closed form, in [{lo:.6f}, {hi:.6f}]")
    assert ok


def test_c03_0d_low_T_law(report):
    r = verify.check_0d_low_T()
    ratio = r.measured["ratio"]
    ok = 0.995 <= ratio <= 1.005
    report(3, ok, f"R/(beta e^(2r)/(4r)) at r = 10 is {ratio:.6f}, required [0.995, 1.005]")
    assert 0.995 <= ratio <= 1.005


def test_c04_0d_coefficient(report):
    t0 = time.perf_counter()
    r = verify.check_C0d_assembly()
    elapsed = time.perf_counter() - t0
    err = r.measured["max_rel_error"]
    ok = err < 1e-8 and elapsed < 1.0
    report(4, ok, f"C_0D max rel error {err:.2e} over 10 points (< 1e-8), {elapsed:.2f} s")
    assert err < 1e-8
    assert elapsed < 1.0


def test_c05_1d_high_T(report):
    r = verify.check_1d_high_T()
    m = r.measured
    ok = max(abs(m["ratio_0.05"] - 1), abs(m["ratio_0.1"] - 1)) <= 0.02 and m["seconds_1d"] < 10.0
    report(5, ok, f"ratios {m['ratio_0.05']:.5f} (0.05), {m['ratio_0.1']:.5f} (0.1), within 2%")
    assert abs(m["ratio_0.05"] - 1) <= 0.02
    assert abs(m["ratio_0.1"] - 1) <= 0.02
    assert m["seconds_1d"] < 10.0


def test_c06_1d_low_T(report):
    r = verify.check_1d_low_T()
    m = r.measured
    ok = abs(m["R"] / (math.exp(10) / 2) - 1) <= 0.02 and m["seconds"] < 60.0
    report(6, ok, f"R = {m['R']:.6g} vs e^10/2 = {math.exp(10) / 2:.6g} (ratio {m['ratio']:.4f}, need within 2%)")
    assert m["seconds"] < 60.0
    assert abs(m["R"] / (math.exp(10) / 2) - 1) <= 0.02


def test_c07_1d_zero_T_elliptic(report):
    t0 = time.perf_counter()
    r = verify.check_elliptic_gq0()
    elapsed = time.perf_counter() - t0
    err = r.measured["rel_error"]
    ok = err <= 0.005 and elapsed < 60.0
    report(7, ok, f"elliptic gq0 at (8, 12) vs extrapolated quadrature: rel error {err:.2e} (<= 0.5%)")
    assert err <= 0.005
    assert elapsed < 60.0


def test_c08_critical_exponents(report):
    r = verify.check_exponents()
    m = r.measured
    e0, e1 = m["exponent_0d"], m["exponent_1d"]
    ok = abs(e0 - 1) <= 1e-6 and abs(e1 - 1) <= 1e-6 and m["seconds"] < 1.0
    report(8, ok, f"exponents {e0:.9f} (0D), {e1:.9f} (1D), within 1e-6 of 1; {m['seconds']:.2f} s")
    assert abs(e0 - 1) <= 1e-6
    assert abs(e1 - 1) <= 1e-6
    assert m["seconds"] < 1.0


def test_c09_zero_T_constraints(report):
    t0 = time.perf_counter()
    r = verify.check_constraints()
    elapsed = time.perf_counter() - t0
    off, euler = r.measured["offdiag_residual"], r.measured["euler_residual"]
    ok = off < 1e-10 and euler < 1e-6 and elapsed < 5.0
    report(9, ok, f"off-diagonal residual {off:.1e} (< 1e-10), Euler residual {euler:.1e} (< 1e-6)")
    assert off < 1e-10
    assert euler < 1e-6
    assert elapsed < 5.0


def test_c10_oracle_suites(report):
    t0 = time.perf_counter()
    metric = verify.check_metric_oracle()
    legendre = verify.check_legendre()
    flat = verify.check_classical_flatness()
    chain = verify.check_finite_chain()
    elapsed = time.perf_counter() - t0
    errs = [chain.measured[f"N_{n}"] for n in (4, 6, 8, 10)]
    checks = {
        "metric": metric.measured["max_abs_diff"] < 1e-8,
        "legendre": legendre.measured["max_abs_residual"] < 1e-10,
        "flatness": flat.measured["max_rel_det"] < 1e-14,
        "chain": all(b < a for a, b in zip(errs, errs[1:])),
        "runtime": elapsed < 120.0,
    }
    report(10, all(checks.values()),
           f"metric {metric.measured['max_abs_diff']:.1e}, Legendre {legendre.measured['max_abs_residual']:.1e}, "
           f"flatness {flat.measured['max_rel_det']:.1e}, chain errors "
           + ", ".join(f"{e:.2e}" for e in errs) + f"; {elapsed:.1f} s")
    assert checks == {k: True for k in checks}


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
