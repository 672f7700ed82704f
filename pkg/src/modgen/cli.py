"""Command-line front end: ``modgen {flow,generator,leakage,yngvason,symcheck}``.

Each command writes ``<command>.csv``, ``<command>.json`` and (except
``generator``) ``<command>.svg`` into the output directory.  Settings come
from command-line flags, then from a ``--config`` file of ``key = value``
lines (keys are the long flag names, dashes or underscores), then from the
built-in defaults.  The output directory falls back to ``$MODGEN_OUTPUT_DIR``
and then to ``./modgen-output``.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, byflow, bygen, lcgeom, report, symcheck, yngvason
from .errors import DomainError
from .specfun import SampledFunction

EXIT_OK, EXIT_OTHER, EXIT_DOMAIN, EXIT_CONVENTION, EXIT_SYMBOL = 0, 1, 2, 3, 4
OUTPUT_ENV = "MODGEN_OUTPUT_DIR"


class ConventionError(RuntimeError):
    pass


class SymbolClaimError(RuntimeError):
    pass


def float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def int_list(text):
    """Comma list of integers; ``a..b`` expands to the inclusive range."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _header(args):
    """Resolved configuration for the JSON header; the output path is left out."""
    return {k: v for k, v in sorted(vars(args).items()) if k != "out"}


def _runner(jobs):
    if jobs and jobs > 1:
        pool = ThreadPoolExecutor(max_workers=jobs)
        return pool, pool.map
    return None, map


# -- flow -------------------------------------------------------------------

FLOW_REGIONS = {
    byflow.FlowKind.THERMAL_PLUS: lcgeom.FORWARD_CONE,
    byflow.FlowKind.THERMAL_MINUS: lcgeom.BACKWARD_CONE,
    byflow.FlowKind.DILATION: lcgeom.FORWARD_CONE,
    byflow.FlowKind.BOOST: lcgeom.RIGHT_WEDGE,
    byflow.FlowKind.CONFORMAL_DC: lcgeom.Region.double_cone((-1.0, 0.0), (0.0, 1.0)),
}


def _times(args):
    t = args.t if args.t is not None else args.s
    if t is not None:
        return np.array([float(t)])
    return np.linspace(args.t_min, args.t_max, args.t_steps)


def _group_law(maps, ts, xs):
    """Max relative error of ``phi_s o phi_t - phi_{s+t}`` over a fixed sample set."""
    worst = 0.0
    for fmap in maps:
        for s in ts:
            for t in ts:
                try:
                    lhs = fmap(s, fmap(t, xs))
                    rhs = fmap(s + t, xs)
                except DomainError:
                    continue
                err = np.abs(np.asarray(lhs) - rhs) / np.maximum(1.0, np.abs(rhs))
                worst = max(worst, float(np.max(err)))
    return worst


def cmd_flow(args, out):
    kind = byflow.FlowKind(args.kind)
    params = byflow.ThermalFlowParams(args.beta) if kind.value.startswith("by-") else None
    spec = byflow.FlowSpec(kind, FLOW_REGIONS[kind], params)
    xs_p = np.array(float_list(args.x))
    xs_m = np.array(float_list(args.xm)) if args.xm else xs_p
    if xs_m.shape != xs_p.shape:
        raise DomainError("--x and --xm need the same number of values")
    ts = _times(args)
    rows, orbit = [], np.empty((ts.size, xs_p.size, 2))
    for i, t in enumerate(ts):
        q = byflow.flow_region(spec, t, lcgeom.LightConePoint(xs_p, xs_m))
        orbit[i, :, 0], orbit[i, :, 1] = q.xp, q.xm
        for j in range(xs_p.size):
            rows.append((t, j, xs_p[j], xs_m[j], q.xp[j], q.xm[j]))
    report.write_csv(out / "flow.csv", ["t", "point", "xp0", "xm0", "xp", "xm"], rows)

    results = {
        "group_law_max_rel_error": _group_law(byflow._axis_maps(spec), ts[:: max(1, ts.size // 11)],
                                              np.concatenate([xs_p, xs_m])),
        "points": xs_p.size,
        "times": ts.size,
    }
    if params is not None:
        # beta -> inf limit: dilation, mirrored in t for the minus flow
        sign = -1.0 if kind is byflow.FlowKind.THERMAL_MINUS else 1.0
        dil = np.exp(-sign * 2.0 * np.pi * ts)[:, None]
        ref_p, ref_m = dil * xs_p[None, :], dil * xs_m[None, :]
        results["dilation_discrepancy"] = float(max(np.max(np.abs(orbit[:, :, 0] - ref_p)),
                                                    np.max(np.abs(orbit[:, :, 1] - ref_m))))
    report.write_json(out / "flow.json", {"command": "flow", "config": _header(args), "results": results})

    fig, ax = report.new_figure()
    for j in range(xs_p.size):
        ax.plot(ts, orbit[:, j, 0], lw=1.2, label=f"x+ from {xs_p[j]:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("x+ (t)")
    ax.set_title(f"{kind.value} orbits")
    ax.legend(fontsize=7)
    report.save_svg(fig, out / "flow.svg")


# -- generator --------------------------------------------------------------

def _generator_cell(task):
    name, f, spec, h, tol = task
    errs = bygen.oracle_errors(f, spec, h)
    return {"shape": name, "n": spec.n, "beta": spec.beta, "error_plus": errs[1], "error_minus": errs[-1],
            "informative": spec.n > 0 and bool(np.any(f.values))}


def cmd_generator(args, out):
    grid = bygen.standard_grid(args.grid_n, args.half_width)
    shapes = bygen.oracle_shapes(grid)
    if args.shape != "all":
        shapes = {args.shape: shapes[args.shape]}
    if args.f == "zero":
        shapes = {k: SampledFunction(grid, np.zeros(grid.n), f.support) for k, f in shapes.items()}
    tasks = [(name, f, bygen.GeneratorSpec(bygen.Axis.PLUS, n, beta), args.h, args.tol)
             for name, f in shapes.items() for beta in float_list(args.beta) for n in int_list(args.n)]
    pool, run = _runner(args.jobs)
    try:
        cells = list(run(_generator_cell, tasks))
    finally:
        if pool:
            pool.shutdown()

    ok = {s: all(c[key] <= args.tol for c in cells) for s, key in ((1, "error_plus"), (-1, "error_minus"))}
    informative = any(c["informative"] for c in cells)
    if not informative:
        status, winner = "uninformative", bygen.RESOLVED_CORRECTION_SIGN
    elif ok[1] and ok[-1]:
        status, winner = "ambiguous", bygen.RESOLVED_CORRECTION_SIGN
    elif ok[1] or ok[-1]:
        status, winner = "resolved", 1 if ok[1] else -1
    else:
        status, winner = "failed", None
    for c in cells:
        c["error"] = c["error_plus" if (winner or 1) > 0 else "error_minus"]

    # sampled outputs for the first shape and the winning sign
    name, f = next(iter(shapes.items()))
    keep = slice(None, None, args.stride)
    header, cols = ["x", "f_re"], [grid.x[keep], f.values.real[keep]]
    for beta in float_list(args.beta):
        for n in int_list(args.n):
            d = bygen.delta_n(f, bygen.GeneratorSpec(bygen.Axis.PLUS, n, beta), winner or 1)
            header += [f"delta_n{n}_beta{beta:g}_re", f"delta_n{n}_beta{beta:g}_im"]
            cols += [d.values.real[keep], d.values.imag[keep]]
    report.write_csv(out / "generator.csv", header, zip(*cols))
    report.write_json(out / "generator.json", {
        "command": "generator",
        "config": _header(args),
        "conventions": {"correction_sign": winner, "resolution": status, "boundary_terms": True},
        "results": {"cells": cells, "max_error": max(c["error"] for c in cells)},
    })
    if status == "failed":
        raise ConventionError("no correction sign meets the tolerance in every cell")


# -- leakage ----------------------------------------------------------------

def cmd_leakage(args, out):
    interval = tuple(float_list(args.bump))
    if len(interval) != 2 or not 0.0 < interval[0] < interval[1]:
        raise DomainError(f"--bump must be an interval inside (0, inf), got {args.bump}")
    grid = bygen.standard_grid(args.grid_n, args.half_width)
    f = bygen.standard_bump(grid, interval)
    ts = _times(args)
    ns = int_list(args.n)
    tasks = [(t, bygen.GeneratorSpec(bygen.Axis.PLUS, n, args.beta)) for n in ns for t in ts]
    pool, run = _runner(args.jobs)
    try:
        reps = list(run(lambda tk: bygen.support_leakage(f, tk[0], tk[1]), tasks))
    finally:
        if pool:
            pool.shutdown()
    rows = [(r.n, r.t, r.mass_inside, r.mass_outside, r.leakage_fraction, r.interval[0], r.interval[1]) for r in reps]
    report.write_csv(out / "leakage.csv",
                     ["n", "t", "mass_inside", "mass_outside", "leakage_fraction", "lo", "hi"], rows)
    by_n = {n: [r for r in reps if r.n == n] for n in ns}
    results = {
        "max_leakage": {str(n): max(r.leakage_fraction for r in rs) for n, rs in by_n.items()},
        "local_threshold": bygen.LOCAL_LEAKAGE,
        "nonlocal_threshold": bygen.NONLOCAL_LEAKAGE,
        "local_for_n0": all(r.leakage_fraction <= bygen.LOCAL_LEAKAGE for r in by_n.get(0, [])),
    }
    sorted_ns = sorted(ns)
    results["monotone_in_n"] = all(
        a.leakage_fraction <= b.leakage_fraction + 1e-300
        for lo, hi in zip(sorted_ns, sorted_ns[1:])
        for a, b in zip(by_n[lo], by_n[hi])
    )
    report.write_json(out / "leakage.json", {"command": "leakage", "config": _header(args), "results": results})

    fig, ax = report.new_figure()
    for n, rs in by_n.items():
        ax.semilogy([r.t for r in rs], [max(r.leakage_fraction, 1e-300) for r in rs], marker="o", ms=3,
                    label=f"n = {n}")
    ax.axhline(bygen.LOCAL_LEAKAGE, color="0.5", ls="--", lw=0.8)
    ax.set_ylim(bottom=1e-32)
    ax.set_xlabel("t")
    ax.set_ylabel("leakage fraction")
    ax.legend(fontsize=8)
    report.save_svg(fig, out / "leakage.svg")


# -- yngvason ---------------------------------------------------------------

def cmd_yngvason(args, out):
    # half-cell offset keeps p0 = p2 = 0 off the nodes, where the m = 0 symbol is singular
    half = args.half_width
    axes = yngvason.centered_axes(args.grid_n, half, offset=half / args.grid_n)
    phi = yngvason.gaussian3(axes, tuple(float_list(args.center)), args.width)
    masses = float_list(args.m)
    pool, run = _runner(args.jobs)
    try:
        decs = list(run(lambda m: yngvason.decomposition(phi, yngvason.FFactory(m), args.h), masses))
    finally:
        if pool:
            pool.shutdown()
    winner, status = yngvason.select_convention(dict(zip(masses, decs)), args.tol)

    per_mass = []
    for m, d in zip(masses, decs):
        F = yngvason.FFactory(m)
        p0, p1, p2 = phi.mesh
        unit = {}
        for lam in float_list(args.lam):
            unit[f"{lam:g}"] = {
                "factorized_weight": yngvason.unitarity_residual(phi, F, lam),
                "printed_weight": yngvason.unitarity_residual(phi, F, lam, yngvason.printed_weight(p0, p1, p2, m)),
            }
        per_mass.append({
            "m": m,
            "errors": [{"boost_prefactor": k[0], "multiplier_sign": k[1], "error": e} for k, e in d["errors"].items()],
            "oracle_norm": d["oracle_norm"],
            "boost_norm": d["boost_norm"],
            "delta_r_norm": d["remainder_norm"],
            "delta_r_fraction": d["remainder_norm"] / d["oracle_norm"],
            "unitarity_residual": unit,
        })
    report.write_json(out / "yngvason.json", {
        "command": "yngvason",
        "config": _header(args),
        "conventions": {
            "boost_prefactor": None if winner is None else winner[0],
            "multiplier_sign": None if winner is None else winner[1],
            "resolution": status,
        },
        "results": {"masses": per_mass, "support_radius": phi.support_radius},
    })

    pts = np.linspace(-4.0, 4.0, 17) + 0.25
    rows = []
    for m in masses:
        for a in pts:
            for b in pts:
                v = yngvason.dr_symbol(a, b, 0.5, m)
                rows.append((m, a, b, 0.5, v.real, v.imag))
    report.write_csv(out / "yngvason.csv", ["m", "p0", "p1", "p2", "dr_re", "dr_im"], rows)

    fig, ax = report.new_figure()
    ax.loglog(masses, [p["delta_r_norm"] for p in per_mass], marker="o", label="correction part")
    ax.loglog(masses, [p["boost_norm"] for p in per_mass], marker="s", label="boost part")
    ax.set_xlabel("m")
    ax.set_ylabel("norm / ||phi||")
    ax.legend(fontsize=8)
    report.save_svg(fig, out / "yngvason.svg")
    if winner is None:
        raise ConventionError("no single (boost prefactor, multiplier sign) meets the tolerance for every mass")


# -- symcheck ---------------------------------------------------------------

def _symbol_variants(args):
    """(label, callable, is_reference_symbol, decides_exit) for the requested symbol."""
    name = args.symbol
    if name.startswith("polynomial"):
        k = int(name[len("polynomial"):] or 2)
        return [(name, symcheck.polynomial_symbol(k), False, True)]
    names = [p.value for p in symcheck.ReferenceSymbol] if name == "all" else [name]
    out = []
    for nm in names:
        if nm == "yngvason-dr":
            out.append((nm, symcheck.reference_symbols(nm, m=args.mass), True, True))
            continue
        for reading in ("k", "n+1"):
            sym = symcheck.reference_symbols(nm, n=args.n, beta=args.beta, reading=reading,
                                         include_beta=not args.no_beta_in_exponent)
            out.append((f"{nm}[{reading}]", sym, True, reading == "k"))
    return out


def cmd_symcheck(args, out):
    claim = symcheck.SymbolClaim(args.claim_order, args.rho, args.delta, tuple(float_list(args.x_window)),
                                 args.max_alpha, args.max_beta)
    reports, rows, failed = {}, [], []
    fig, ax = report.new_figure()
    xi = symcheck.xi_band(args.xi_max)
    for label, sym, _ref, decides in _symbol_variants(args):
        rep = symcheck.check_symbol_estimate(sym, claim, args.xi_max, args.slack)
        reports[label] = {
            "estimated_order": rep.estimated_order,
            "pass": rep.passed,
            "verdict": f"consistent with order {claim.m:g}" if rep.passed else f"inconsistent with order {claim.m:g}",
            "entries": [dict(zip(("alpha", "beta", "exponent", "allowed", "constant", "status"), e))
                        for e in rep.table()],
        }
        rows += [(label,) + e for e in rep.table()]
        if decides and not rep.passed:
            failed.append(label)
        ax.loglog(xi, np.abs(sym(np.zeros_like(xi), xi)), label=label)
    report.write_csv(out / "symcheck.csv", ["symbol", "alpha", "beta", "exponent", "allowed", "constant", "status"],
                     rows)
    report.write_json(out / "symcheck.json", {
        "command": "symcheck",
        "config": _header(args),
        "results": {"claim": {"m": claim.m, "rho": claim.rho, "delta": claim.delta}, "symbols": reports,
                    "failed": failed},
    })
    ax.set_xlabel("xi")
    ax.set_ylabel("|p(0, xi)|")
    ax.legend(fontsize=7)
    report.save_svg(fig, out / "symcheck.svg")
    if failed:
        raise SymbolClaimError(f"order claim fails for {', '.join(failed)}")


# -- parser -----------------------------------------------------------------

COMMANDS = {
    "flow": cmd_flow,
    "generator": cmd_generator,
    "leakage": cmd_leakage,
    "yngvason": cmd_yngvason,
    "symcheck": cmd_symcheck,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file")
    common.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./modgen-output)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for parameter sweeps")

    parser = argparse.ArgumentParser(prog="modgen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.commands = sub.choices

    p = sub.add_parser("flow", parents=[common], help="flow orbits and group-law residuals")
    p.add_argument("--kind", default="by-plus", choices=[k.value for k in byflow.FlowKind])
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--x", default="0.1,0.5,1.0", help="initial x+ values")
    p.add_argument("--xm", default="", help="initial x- values (default: same as --x)")
    p.add_argument("--t", type=float, default=None, help="single flow time")
    p.add_argument("--s", type=float, default=None, help="alias of --t")
    p.add_argument("--t-min", type=float, default=-0.5)
    p.add_argument("--t-max", type=float, default=0.5)
    p.add_argument("--t-steps", type=int, default=41)

    p = sub.add_parser("generator", parents=[common], help="generator vs finite-difference oracle")
    p.add_argument("--n", default="0..3")
    p.add_argument("--beta", default="0.5,1,2")
    p.add_argument("--shape", default="all", choices=["all", "gaussian", "two-hump", "packet"])
    p.add_argument("--f", default="bump", choices=["bump", "zero"])
    p.add_argument("--grid-n", type=int, default=4096)
    p.add_argument("--half-width", type=float, default=8.0)
    p.add_argument("--h", type=float, default=2.5e-3, help="oracle step in t")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--stride", type=int, default=8, help="CSV keeps every stride-th node")

    p = sub.add_parser("leakage", parents=[common], help="support leakage sweep over (n, t)")
    p.add_argument("--n", default="0,1,2")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--bump", default="0.5,1.5")
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--s", type=float, default=None, help=argparse.SUPPRESS)
    p.add_argument("--t-min", type=float, default=-0.5)
    p.add_argument("--t-max", type=float, default=0.5)
    p.add_argument("--t-steps", type=int, default=11)
    p.add_argument("--grid-n", type=int, default=4096)
    p.add_argument("--half-width", type=float, default=8.0)

    p = sub.add_parser("yngvason", parents=[common], help="wedge-model generator decomposition")
    p.add_argument("--m", default="0.5,1,2")
    p.add_argument("--lambda", dest="lam", default="0.8,1,1.25", help="flow parameters for the unitarity check")
    p.add_argument("--grid-n", type=int, default=128)
    p.add_argument("--half-width", type=float, default=8.0)
    p.add_argument("--width", type=float, default=0.6)
    p.add_argument("--center", default="0.3,-0.2,0.1")
    p.add_argument("--h", type=float, default=2.5e-3)
    p.add_argument("--tol", type=float, default=1e-4)

    p = sub.add_parser("symcheck", parents=[common], help="symbol-class order checks")
    p.add_argument("--symbol", default="all",
                   help="all, yngvason-dr, by-multiplier, by-hoermander or polynomialK")
    p.add_argument("--claim-order", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--x-window", default="0,1")
    p.add_argument("--max-alpha", type=int, default=3)
    p.add_argument("--max-beta", type=int, default=3)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0, help="mass in the Yngvason symbol")
    p.add_argument("--xi-max", type=float, default=1e4)
    p.add_argument("--slack", type=float, default=symcheck.DEFAULT_SLACK)
    p.add_argument("--no-beta-in-exponent", action="store_true",
                   help="use e^{-2 pi x} instead of e^{-2 pi x/beta} in by-hoermander")
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        values = read_config(args.config)
        sub = parser.commands[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            parser.error(f"unknown config keys: {', '.join(unknown)}")
        typed = {}
        for action in sub._actions:
            if action.dest in values:
                raw = values[action.dest]
                if action.const is True and action.nargs == 0:
                    typed[action.dest] = raw.lower() in ("1", "true", "yes", "on")
                else:
                    typed[action.dest] = action.type(raw) if action.type else raw
        sub.set_defaults(**typed)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with 2, which is reserved for domain errors
        return EXIT_OK if not exc.code else EXIT_OTHER
    except (OSError, ValueError) as exc:
        print(f"modgen: config error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    out = Path(args.out or os.environ.get(OUTPUT_ENV) or "modgen-output")
    out.mkdir(parents=True, exist_ok=True)
    args.out = str(out)
    start = time.perf_counter()
    try:
        COMMANDS[args.command](args, out)
    except DomainError as exc:
        print(f"modgen {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConventionError as exc:
        print(f"modgen {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONVENTION
    except SymbolClaimError as exc:
        print(f"modgen {args.command}: {exc}", file=sys.stderr)
        return EXIT_SYMBOL
    except Exception as exc:  # noqa: BLE001
        print(f"modgen {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    print(f"modgen {args.command}: wrote {out} in {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
