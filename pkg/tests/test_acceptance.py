"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The lines are collected and printed in the "acceptance criteria" section of
the pytest terminal summary.  A criterion that cannot hold is asserted as
stated and marked ``xfail(strict=True)``, so the failure stays visible and a
later pass would be reported.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest

from modgen import byflow, bygen, cli, lcgeom, symcheck, yngvason
from modgen.bygen import Axis, GeneratorSpec
from modgen.lcgeom import LightConePoint
from modgen.specfun import (
    Grid1D,
    SampledFunction,
    cauchy_iterated_integral,
    forward_ft,
    gaussian,
    l2_norm,
    relative_l2,
    spectral_derivative,
)

RESULTS = Path(__file__).resolve().parents[1] / "results"


def _record_results(key, payload):
    RESULTS.mkdir(exist_ok=True)
    path = RESULTS / "acceptance.json"
    data = json.loads(path.read_text()) if path.exists() else {}
    data[key] = payload
    path.write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _sample_admissible(rng, flow_ok, count, x_range):
    """Draw (s, t, x) until ``count`` triples keep every intermediate admissible."""
    out = []
    while sum(len(o[0]) for o in out) < count:
        s, t = rng.uniform(-1, 1, (2, 4 * count))
        x = rng.uniform(*x_range, 4 * count)
        keep = flow_ok(s, t, x)
        out.append((s[keep], t[keep], x[keep]))
    s, t, x = (np.concatenate(v) for v in zip(*out))
    return s[:count], t[:count], x[:count]


def _rel(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def test_criterion_1_group_law(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(11)
    count, beta = 2000, 1.0
    errs = {}

    def plus_ok(s, t, x):
        ok = byflow.admissible_plus(t, x, beta) & byflow.admissible_plus(s + t, x, beta)
        inner = np.where(ok, byflow.nu_plus(np.where(ok, t, 0.0), np.where(ok, x, 0.0), beta), 0.0)
        return ok & byflow.admissible_plus(s, inner, beta)

    s, t, x = _sample_admissible(rng, plus_ok, count, (-2.0, 3.0))
    errs["nu_plus"] = _rel(byflow.nu_plus(s, byflow.nu_plus(t, x, beta), beta), byflow.nu_plus(s + t, x, beta))
    # nu_minus(t, x) = -nu_plus(-t, -x), so (-s, -t, -x) stays admissible
    errs["nu_minus"] = _rel(byflow.nu_minus(-s, byflow.nu_minus(-t, -x, beta), beta),
                            byflow.nu_minus(-s - t, -x, beta))

    s, t = rng.uniform(-1, 1, (2, count))
    q = LightConePoint(rng.uniform(-5, 5, count), rng.uniform(-5, 5, count))
    for name, flow in (("boost", lcgeom.boost_flow), ("dilation", lcgeom.dilation_flow)):
        a, b = flow(s, flow(t, q)), flow(s + t, q)
        errs[name] = max(_rel(a.xp, b.xp), _rel(a.xm, b.xm))
    x = rng.uniform(-0.999, 0.999, count)
    s, t = rng.uniform(-3, 3, (2, count))
    a = lcgeom.conformal_dc_flow(s, lcgeom.conformal_dc_flow(t, x))
    errs["conformal-dc"] = float(np.max(np.abs(a - lcgeom.conformal_dc_flow(s + t, x))
                                        / np.maximum(np.abs(lcgeom.conformal_dc_flow(s + t, x)), 1e-3)))

    g = Grid1D(-8, 8, 2048)
    f = gaussian(g, 1.5, 0.15)
    spec = GeneratorSpec(Axis.PLUS, 0, beta)
    eta_err = 0.0
    for s_, t_ in rng.uniform(-0.3, 0.3, (10, 2)):
        lhs = bygen.eta_n(s_, bygen.eta_n(t_, f, spec), spec)
        eta_err = max(eta_err, relative_l2(lhs, bygen.eta_n(s_ + t_, f, spec), f))
    runtime = time.perf_counter() - start
    ok = max(errs.values()) <= 1e-12 and eta_err <= 1e-8 and runtime < 10
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    criterion("1 group law", ok, f"{detail}; eta_0 composition {eta_err:.1e} (<= 1e-8); {count} triples; {runtime:.1f} s")
    assert ok


@pytest.mark.xfail(strict=True, reason="the O(1/beta) term grows like e^{4 pi |t|}; sup at t=-1 is 0.90")
def test_criterion_2a_flow_large_beta_limit(criterion):
    start = time.perf_counter()
    t = np.linspace(-1, 1, 401)[:, None]
    x = np.linspace(-1, 1, 401)[None, :]
    d = np.abs(byflow.nu_plus(t, x, 1e6) - np.exp(-2 * np.pi * t) * x)
    sup = float(d.max())
    # restricted window where the first-order term (pi x^2/beta)(e^{-2 pi t} - e^{-4 pi t}) stays small
    sub = float(d[t[:, 0] >= -0.25].max())
    runtime = time.perf_counter() - start
    ok = sup <= 1e-4 and runtime < 5
    criterion("2a beta->inf flow limit", ok,
              f"sup over [-1,1]^2 = {sup:.3g} (> 1e-4, unattainable); sup over t >= -0.25 = {sub:.1e}; {runtime:.2f} s")
    assert ok


def test_criterion_2b_generator_large_beta_limit(criterion):
    start = time.perf_counter()
    g = Grid1D(-16, 16, 4096)
    f = gaussian(g, 0.0, 1.0)
    d0 = bygen.delta0_axis(f, GeneratorSpec(Axis.PLUS, 0, 1e6))
    ref = SampledFunction(g, -2 * np.pi * g.x * spectral_derivative(f, 1).values)
    err = relative_l2(d0, ref, f)
    runtime = time.perf_counter() - start
    ok = err <= 1e-4 and runtime < 5
    criterion("2b beta->inf generator limit", ok, f"relative L2 {err:.2e} (<= 1e-4) on the unit Gaussian; {runtime:.2f} s")
    assert ok


def test_criterion_3_generator_oracle_matrix(criterion):
    start = time.perf_counter()
    grid = bygen.standard_grid(4096)
    cells = [(f, GeneratorSpec(Axis.PLUS, n, beta))
             for f in bygen.oracle_shapes(grid).values() for beta in (0.5, 1.0, 2.0) for n in range(4)]
    sign, table = bygen.resolve_correction_sign(cells, tol=1e-4)
    runtime = time.perf_counter() - start
    worst = max(errs[sign] for _, errs in table) if sign else float("nan")
    other = {s: sum(errs[s] > 1e-4 for _, errs in table) for s in (1, -1)}
    _record_results("generator_matrix", {
        "correction_sign": sign,
        "boundary_terms": True,
        "cells": len(table),
        "max_error_winning_sign": worst,
        "failing_cells": {str(k): v for k, v in other.items()},
    })
    ok = sign is not None and worst <= 1e-4 and runtime < 60
    criterion("3 generator-oracle matrix", ok,
              f"unique sign {sign:+d}, max error {worst:.1e} over {len(table)} cells; "
              f"opposite sign fails {other[-sign]} cells; {runtime:.1f} s")
    assert ok


def test_criterion_4_locality_dichotomy(criterion):
    start = time.perf_counter()
    grid = bygen.standard_grid()
    f = bygen.standard_bump(grid)
    local = max(bygen.support_leakage(f, t, GeneratorSpec(Axis.PLUS, 0, 1.0)).leakage_fraction
                for t in np.linspace(-0.5, 0.5, 21))
    one = bygen.support_leakage(f, 0.2, GeneratorSpec(Axis.PLUS, 1, 1.0)).leakage_fraction
    runtime = time.perf_counter() - start
    ok = local <= bygen.LOCAL_LEAKAGE and one >= bygen.NONLOCAL_LEAKAGE and runtime < 30
    criterion("4 locality dichotomy", ok,
              f"n=0 max {local:.1e} (<= 1e-8); n=1,t=0.2 {one:.3e} (>= frozen {bygen.NONLOCAL_LEAKAGE:g}; "
              f"below the 1e-3 placeholder); {runtime:.1f} s")
    assert ok


def test_criterion_5_yngvason_decomposition(criterion):
    start = time.perf_counter()
    axes = yngvason.centered_axes(128, 8.0, offset=8.0 / 128)
    phi = yngvason.gaussian3(axes, (0.3, -0.2, 0.1), 0.6)
    masses = (0.5, 1.0, 2.0)
    winner, status, runs = yngvason.resolve_conventions(phi, masses, tol=1e-4)
    runtime = time.perf_counter() - start
    passing = {k for k, e in runs[1.0]["errors"].items() if all(r["errors"][k] <= 1e-4 for r in runs.values())}
    prefactors = {k[0] for k in passing}
    dr = [runs[m]["remainder_norm"] for m in masses]
    monotone = all(a > b for a, b in zip(dr, dr[1:]))
    worst = max(runs[m]["errors"][winner] for m in masses) if winner else float("nan")
    _record_results("yngvason", {
        "boost_prefactor": winner[0] if winner else None,
        "multiplier_sign": winner[1] if winner else None,
        "resolution": status,
        "max_error": worst,
        "delta_r_norms": dict(zip(map(str, masses), dr)),
    })
    ok = len(prefactors) == 1 and status == "resolved" and monotone and runtime < 120
    criterion("5 Yngvason decomposition", ok,
              f"prefactor {winner[0] / np.pi:+.0f} pi, multiplier sign {winner[1]:+d}, max error {worst:.1e}; "
              f"delta_r norms {', '.join(f'{v:.3f}' for v in dr)} decreasing; grid 128^3; {runtime:.1f} s")
    assert ok


def test_criterion_6_symbol_orders(criterion):
    start = time.perf_counter()
    orders = {"yngvason-dr": symcheck.estimate_order(symcheck.reference_symbols("yngvason-dr"))}
    for n in (1, 2, 3):
        for beta in (0.5, 1.0, 2.0):
            orders[f"by-multiplier n={n} beta={beta:g}"] = symcheck.estimate_order(
                symcheck.reference_symbols("by-multiplier", n=n, beta=beta))
    poly = symcheck.estimate_order(symcheck.polynomial_symbol(2))
    claim = symcheck.SymbolClaim(0.0, 1.0, 0.5, (0.0, 1.0), 3, 3)
    checks = {}
    for name in ("yngvason-dr", "by-multiplier", "by-hoermander"):
        for n in (1, 2, 3):
            for beta in (0.5, 1.0, 2.0):
                sym = symcheck.reference_symbols(name, n=n, beta=beta)
                checks[(name, n, beta)] = symcheck.check_symbol_estimate(sym, claim).passed
                if name == "yngvason-dr":
                    break
            if name == "yngvason-dr":
                break
    runtime = time.perf_counter() - start
    worst = max(abs(v) for v in orders.values())
    ok = worst <= 0.1 and abs(poly - 2) <= 0.05 and all(checks.values()) and runtime < 30
    criterion("6 symbol orders", ok,
              f"max |order| of reference symbols {worst:.1e} (<= 0.1); xi^2 order {poly:.4f}; "
              f"{sum(checks.values())}/{len(checks)} symbol-class checks pass at slack 0.15; {runtime:.1f} s")
    assert ok


def test_criterion_7_kernel_invariants(criterion):
    start = time.perf_counter()
    grid = bygen.standard_grid()
    rng = np.random.default_rng(7)
    f = SampledFunction(grid, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    parseval = abs(l2_norm(forward_ft(f)) / l2_norm(f) - 1.0)
    g = gaussian(grid, 2.5, 0.25)
    trip = max(relative_l2(cauchy_iterated_integral(spectral_derivative(g, n), n), g) for n in (1, 2, 3, 4))
    errs = []
    for n in (64, 128, 256, 512):
        gr = Grid1D(-2.0, 2.0, n)
        out = cauchy_iterated_integral(SampledFunction(gr, np.exp(gr.x)), 2)
        errs.append(np.max(np.abs(out.values - (np.expm1(gr.x) - gr.x))))
    order = float(np.min(np.log2(np.array(errs[:-1]) / np.array(errs[1:]))))
    runtime = time.perf_counter() - start
    ok = parseval <= 1e-12 and trip <= 1e-8 and order >= 3.8 and runtime < 10
    criterion("7 kernel invariants", ok,
              f"Parseval {parseval:.1e}; round trip {trip:.1e}; quadrature order {order:.2f}; {runtime:.1f} s")
    assert ok


CLI_RUNS = {
    "flow-by-plus": ["flow", "--kind", "by-plus", "--beta", "1e6"],
    "flow-conformal": ["flow", "--kind", "conformal-dc", "--x", "0,0.3,-0.5"],
    "generator": ["generator", "--jobs", "2"],
    "leakage": ["leakage"],
    "yngvason": ["yngvason"],
    "symcheck": ["symcheck"],
}


def test_criterion_8_cli_determinism(criterion, tmp_path):
    start = time.perf_counter()
    cfg = tmp_path / "fixed.cfg"
    cfg.write_text("jobs = 1\n")
    mismatched, codes = [], {}
    for name, argv in CLI_RUNS.items():
        outs = []
        for k in range(2):
            out = tmp_path / f"{name}-{k}"
            codes[name] = cli.main(argv + ["--config", str(cfg), "--out", str(out)])
            outs.append(out)
        files = sorted(p.name for p in outs[0].iterdir())
        for fn in files:
            if (outs[0] / fn).read_bytes() != (outs[1] / fn).read_bytes():
                mismatched.append(f"{name}/{fn}")
    runtime = time.perf_counter() - start
    ok = not mismatched and all(c == 0 for c in codes.values())
    criterion("8 CLI determinism", ok,
              f"{len(CLI_RUNS)} commands x 2 runs, byte-identical CSV/JSON/SVG"
              + (f"; mismatches {mismatched}" if mismatched else "") + f"; exit codes {sorted(set(codes.values()))}; "
              f"{runtime:.1f} s")
    assert ok
