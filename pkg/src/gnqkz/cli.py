"""Command line front-end.

Each subcommand runs one computation and writes a self-describing JSON (or
CSV) artifact containing the resolved configuration and the seed.

Exit codes: 0 pass, 1 usage error, 2 identity/tolerance failure, 3 numeric error.
"""

import argparse
import json
import math
import sys

import numpy as np

from .errors import DomainError, GnqkzError, NumericError, SingularityError

SCHEMA_VERSION = "1.0"

EXIT_PASS, EXIT_USAGE, EXIT_FAIL, EXIT_NUMERIC = 0, 1, 2, 3

# keys that describe where output goes rather than what is computed
_IO_KEYS = ("out", "format", "config", "handler", "command")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- serialization ------------------------------------------------------------

def jsonable(x):
    """Recursively convert numpy/complex values into plain JSON types.

    Complex numbers become [re, im]; non-finite floats become strings so the
    output stays strict JSON.
    """
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def dumps(payload):
    return json.dumps(jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_csv(header, rows, config=None):
    """Comma separated table with a header row; the config goes in '#' comment lines."""
    lines = []
    if config is not None:
        lines.append("# schema_version: " + SCHEMA_VERSION)
        lines.append("# config: " + json.dumps(jsonable(config), sort_keys=True))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"{float(v.real)!r}{float(v.imag):+.17g}j"
    return str(v)


# --- argument helpers -----------------------------------------------------------

def parse_grid(text):
    """'a:b:h' -> inclusive grid a, a+h, ..., b; 'x,y,z' -> explicit list."""
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid {text!r} must be start:stop:step")
        a, b, h = (float(p) for p in parts)
        if h <= 0 or b < a:
            raise UsageError(f"grid {text!r} needs step > 0 and stop >= start")
        n = int(round((b - a) / h)) + 1
        return [a + k * h for k in range(n)]
    return parse_floats(text)


def parse_floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    if not text:
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_complexes(text):
    if isinstance(text, (list, tuple)):
        return [complex(v) for v in text]
    try:
        return [complex(v.replace(" ", "")) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_ints(text):
    return [int(round(v)) for v in parse_floats(text)]


def _positive(name, value):
    if not value > 0:
        raise UsageError(f"{name} must be positive, got {value}")


def _model(args):
    from .scattering import CouplingModel
    return CouplingModel(args.alpha, args.beta, getattr(args, "alpha0", 1.0))


# --- commands -----------------------------------------------------------------
# Each command returns (passed, results dict, optional CSV table).

def cmd_verify_yb(args):
    from .yang_baxter import check_yb_instantaneous_printed, run_yb_suite, summarize
    _positive("tol", args.tol)
    reports = run_yb_suite(args.samples, args.seed, _model(args), args.span, args.tol)
    summary = summarize(reports)
    g_witness = 0.5
    witness = check_yb_instantaneous_printed(g_witness)
    results = {"summary": summary,
               "witness": witness.to_dict(),
               "failures": [r.to_dict() for r in reports if not r.passed][:20]}
    rows = [(r.identity_id, k // 4, r.residual, r.passed) for k, r in enumerate(reports)]
    return summary["all_pass"] and witness.passed, results, (("identity", "sample", "residual", "pass"), rows)


def cmd_verify_transport(args):
    from .yang_baxter import (check_transfer_commute, check_transfer_commute_unequal,
                              run_transport_suite, summarize)
    _positive("tol", args.tol)
    model = _model(args)
    n = args.NL + args.NR
    if not 2 <= n <= 6:
        raise UsageError("verify-transport supports 2 <= N <= 6")
    compat = run_transport_suite(args.NL, args.NR, args.samples, args.seed, model, args.tol)
    commute = check_transfer_commute(args.t, args.NL, args.NR, model, args.tol)
    results = {"transport_compat": summarize(compat), "transfer_commute": commute.to_dict()}
    ok = all(r.passed for r in compat) and commute.passed
    if args.t2 is not None:
        witness = check_transfer_commute_unequal(args.t, args.t2, args.NL, args.NR, model)
        results["unequal_time_witness"] = witness.to_dict()
        ok = ok and witness.passed
    return ok, results, None


def cmd_qkz_check(args):
    from .qkz import KinematicFrame, qkz_ladder
    frame = KinematicFrame.from_rapidities(parse_floats(args.wbar), parse_floats(args.w), args.eta)
    base = parse_complexes(args.base)
    ladder = qkz_ladder(frame, args.M, base, args.j, args.l_start, args.rungs)
    proj = [r.projective for r in ladder]
    monotone = all(b < a for a, b in zip(proj, proj[1:]))
    # adaptive cutoff: the first rung whose successor changes the amplitude by < tol
    adaptive = next((r for r in ladder if r.tail_estimate <= args.tol), ladder[-1])
    ok = adaptive.projective <= args.tol and monotone
    results = {"frame": frame.to_dict(), "eta": frame.eta, "ladder": [r.to_dict() for r in ladder],
               "monotone": monotone, "adaptive_l_max": adaptive.l_max,
               "adaptive_residual": adaptive.projective}
    rows = [(r.l_max, r.projective, r.linear, r.tail_estimate) for r in ladder]
    return ok, results, (("l_max", "projective", "linear", "tail_estimate"), rows)


def cmd_yang_yang(args):
    from .bethe import BetheSector, ground_quantum_numbers, solve_log_bethe
    from .qkz import (KinematicFrame, sample_action_points, saddle_quantum_numbers,
                      saddle_residual, yang_yang_check)
    frame = KinematicFrame.from_rapidities(parse_floats(args.wbar), parse_floats(args.w), args.eta)
    points = sample_action_points(frame, args.M, args.points, args.seed)
    rel = yang_yang_check(frame, points)
    # saddle point at Newton-solved roots in a symmetric frame of half-width W
    sf = KinematicFrame.from_rapidities([args.saddle_w], [-args.saddle_w], 1.0)
    sector = BetheSector.driven(sf, ground_quantum_numbers(2, 1))
    sol = solve_log_bethe(sector)
    m_s = saddle_quantum_numbers(sol.roots, sf, sector.quantum_numbers)
    rep = saddle_residual(sol.roots, sf, m_s, sector.quantum_numbers)
    results = {"max_rel_error": rel, "points": points, "saddle_residual": rep.saddle_residual,
               "bethe_residual": rep.bethe_residual, "saddle_roots": sol.roots,
               "saddle_quantum_numbers": m_s}
    return rel <= args.tol and rep.saddle_residual <= args.saddle_tol, results, None


def _sector(args):
    from .bethe import BetheSector, ground_quantum_numbers
    n = args.NL + args.NR
    qn = parse_floats(args.qn) if args.qn else ground_quantum_numbers(n, args.M)
    if len(qn) != args.M:
        raise UsageError(f"--qn lists {len(qn)} numbers but M = {args.M}")
    if args.theta is not None:
        return BetheSector.from_theta(args.NL, args.NR, qn, args.theta)
    if args.g is None:
        raise UsageError("one of --g or --theta is required")
    return BetheSector.instantaneous(args.NL, args.NR, qn, args.g)


def cmd_solve_bethe(args):
    from .bethe import log_bethe_defect, solve_log_bethe
    sector = _sector(args)
    sol = solve_log_bethe(sector, tol=args.tol, seed=args.seed)
    roots = np.sort(sol.roots)
    results = {"roots": roots, "quantum_numbers": sector.quantum_numbers,
               "inhomogeneities": sector.inhomogeneities, "defect": sol.residual,
               "iterations": sol.iterations, "restarts": sol.restarts,
               "check_defect": float(np.max(np.abs(log_bethe_defect(sector, roots)), initial=0.0))}
    rows = [(k, r) for k, r in enumerate(roots)]
    return sol.converged, results, (("index", "root"), rows)


def cmd_verify_eigen(args):
    from .bethe import real_root_states, verify_bethe_eigenvector
    states = []
    ok = True
    for sector, sol in real_root_states(args.NL, args.NR, args.g):
        chk = verify_bethe_eigenvector(sector, sol.roots)
        err = chk.variant_errors[args.variant]
        passed = chk.max_residual <= args.tol and chk.ed_distance <= args.tol and err <= args.eig_tol
        ok = ok and passed
        states.append({"M": sector.M, "quantum_numbers": sector.quantum_numbers,
                       "roots": np.sort(sol.roots), "eigen_residual": chk.max_residual,
                       "ed_distance": chk.ed_distance, "variant_errors": chk.variant_errors,
                       "pass": passed})
    results = {"states": states, "variant": args.variant, "n_states": len(states),
               "max_eigen_residual": max((x["eigen_residual"] for x in states), default=0.0),
               "max_ed_distance": max((x["ed_distance"] for x in states), default=0.0),
               "max_variant_error": max((x["variant_errors"][args.variant] for x in states), default=0.0)}
    return ok and bool(states), results, None


def cmd_density(args):
    from .thermo import closed_form_density, solve_density_nystrom
    holes = parse_floats(args.holes)
    grid = solve_density_nystrom(args.N, args.inv_g, args.lam_max, args.nodes, holes)
    integral = grid.integral()
    results = {"integral": integral, "sz": grid.sz(), "n_nodes": args.nodes, "lam_max": args.lam_max,
               "holes": holes}
    if holes:
        target = len(holes) / 2.0
        ok = abs(grid.sz() - target) <= args.tol * args.N
        results["expected_sz"] = target
    else:
        err = float(np.max(np.abs(grid.rho - closed_form_density(args.N, args.inv_g, grid.nodes))))
        results["max_error_vs_closed_form"] = err
        ok = err <= args.tol * args.N and abs(integral - args.N / 2.0) <= 1e-8 * args.N
    if args.convergence:
        from .thermo import grid_convergence
        errs, orders = grid_convergence(args.N, args.inv_g, args.lam_max, parse_ints(args.convergence))
        results["convergence"] = {"nodes": parse_ints(args.convergence), "errors": errs,
                                  "orders": orders, "min_order": min(orders)}
        ok = ok and min(orders) >= 2.0
    rows = list(zip(grid.nodes, grid.rho))
    return ok, results, (("lam", "rho"), rows)


def cmd_spinon_fit(args):
    from .thermo import finite_size_extrapolation, predicted_gap, spinon_dispersion_fit
    lam = parse_grid(args.lam_grid)
    fit = spinon_dispersion_fit(args.N, args.inv_g, lam, args.L)
    results = {"fit": fit.to_dict(), "predicted_gap": predicted_gap(args.N, args.inv_g, args.L)}
    ok = fit.shape_dev <= args.tol
    if args.sizes:
        sizes = parse_ints(args.sizes)
        ratio, ratios = finite_size_extrapolation(sizes, args.inv_g)
        results["finite_size"] = {"sizes": sizes, "ratios": ratios, "extrapolated_ratio": ratio}
        ok = ok and abs(ratio - 1.0) <= args.gap_window
    rows = [(x, e, np.cosh(np.pi * x)) for x, e in zip(fit.lam, fit.energy / fit.energy[np.argmin(np.abs(fit.lam))])]
    return ok, results, (("lam", "E_over_E0", "cosh"), rows)


def cmd_mass_gap(args):
    from .thermo import log_gap_fit, mass_gap
    model = _model(args)
    ts = parse_grid(args.t_grid)
    gaps = [mass_gap(model, t, args.Lambda, args.m0, args.convention) for t in ts]
    m = np.array([x.m_t for x in gaps])
    increasing = bool(np.all(np.diff(m) > 0))
    decreasing = bool(np.all(np.diff(m) < 0))
    results = {"t0": gaps[0].t0, "monotone": increasing or decreasing,
               "direction": "decreasing" if decreasing else ("increasing" if increasing else "none"),
               "series": [x.to_dict() for x in gaps]}
    if len(ts) >= 3:
        fit = log_gap_fit(model, ts, args.Lambda, args.convention)
        results["log_fit"] = {"slope": fit.slope, "intercept": fit.intercept,
                              "max_residual": fit.max_residual, "kappa": fit.kappa}
    rows = [(x.t, x.g_t, x.m_t) for x in gaps]
    return results["monotone"], results, (("t", "g", "m"), rows)


def cmd_rg_flow(args):
    from .scattering import rg_trajectory
    traj = rg_trajectory(_model(args), parse_grid(args.t_grid), args.convention)
    ok = abs(traj.loglog_slope - 2.0) <= args.tol
    results = {"kappa": traj.kappa, "loglog_slope": traj.loglog_slope, "convention": traj.convention}
    rows = list(zip(traj.t, traj.g, traj.dgdt))
    return ok, results, (("t", "g", "dgdt"), rows)


def cmd_classify_regime(args):
    from .scattering import characteristic_time, classify_regime
    rep = classify_regime(_model(args), args.t, args.Lambda, args.m0, convention=args.convention)
    expected_t0 = math.log(2 * args.Lambda / args.m0) / (math.pi * args.alpha0)
    results = dict(rep.to_dict(), t0_reference=expected_t0, t0_error=abs(rep.t0 - expected_t0))
    ok = rep.t0 == characteristic_time(args.Lambda, args.m0, args.alpha0)
    if args.expect:
        ok = ok and rep.regime == args.expect
    return ok, results, None


def cmd_r_classical(args):
    from .qkz import check_classical_r
    lams = parse_floats(args.lams)
    if len(lams) != 3:
        raise UsageError("--lams needs three spectral parameters")
    etas = parse_floats(args.etas)
    out = check_classical_r(lams, etas)
    ok = out["antisymmetry"] <= args.tol and out["cybe"] <= args.tol and abs(out["order"] - 1.0) <= 0.05
    return ok, out, None


def cmd_replay(args):
    from . import corpus
    records = corpus.load_corpus(args.corpus_dir)
    if args.record:
        records = [r for r in records if r.record_id in set(args.record.split(","))]
        if not records:
            raise UsageError(f"no record named {args.record}")
    elif not args.all:
        raise UsageError("replay needs --all or --record")
    if args.bless:
        outcomes = corpus.bless(records, args.corpus_dir)
    else:
        outcomes = [corpus.replay(r, tolerance=args.override_tol) for r in records]
    ok = all(o.passed or o.skipped for o in outcomes)
    rows = [(o.record_id, o.criterion_id, o.measured, o.expected, o.tolerance, o.status) for o in outcomes]
    return ok, {"outcomes": [o.to_dict() for o in outcomes]}, \
        (("record", "criterion", "measured", "expected", "tolerance", "status"), rows)


# --- parser -------------------------------------------------------------------

def _common(p, tol):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=tol)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", default=None, help="JSON file with the same keys as the flags")


def _coupling(p):
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--alpha0", type=float, default=1.0)


def build_parser():
    parser = _Parser(prog="gnqkz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("verify-yb", help="Yang-Baxter residual suite")
    _coupling(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--span", type=float, default=5.0)
    _common(p, 1e-10)
    p.set_defaults(handler=cmd_verify_yb)

    p = sub.add_parser("verify-transport", help="transport compatibility and commutation")
    _coupling(p)
    p.add_argument("--NL", type=int, default=2)
    p.add_argument("--NR", type=int, default=2)
    p.add_argument("--samples", type=int, default=3)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--t2", type=float, default=None, help="second time for the unequal-time witness")
    _common(p, 1e-9)
    p.set_defaults(handler=cmd_verify_transport)

    p = sub.add_parser("qkz-check", help="difference-equation residual of the Jackson amplitude")
    p.add_argument("--wbar", default="0.4")
    p.add_argument("--w", default="-0.35")
    p.add_argument("--eta", type=float, default=0.3)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--base", default="0.21+0.13j", help="comma separated complex base points")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--l-start", dest="l_start", type=int, default=25)
    p.add_argument("--rungs", type=int, default=4)
    _common(p, 1e-4)
    p.set_defaults(handler=cmd_qkz_check)

    for name, fn, tol, text in (("solve-bethe", cmd_solve_bethe, 1e-12, "Newton solve of the logarithmic Bethe equations"),
                                ("verify-eigen", cmd_verify_eigen, 1e-8, "Bethe vectors against exact diagonalization")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--NL", type=int, default=1)
        p.add_argument("--NR", type=int, default=1)
        p.add_argument("--g", type=float, default=None)
        if name == "solve-bethe":
            p.add_argument("--M", type=int, default=1)
            p.add_argument("--qn", default=None, help="comma separated quantum numbers (default: ground)")
            p.add_argument("--theta", type=float, default=None)
        else:
            p.add_argument("--variant", default="single-particle")
            p.add_argument("--eig-tol", dest="eig_tol", type=float, default=1e-6)
        _common(p, tol)
        p.set_defaults(handler=fn)

    p = sub.add_parser("yang-yang", help="action integral against the Gamma-ratio product")
    p.add_argument("--wbar", default="0.4")
    p.add_argument("--w", default="-0.35")
    p.add_argument("--eta", type=float, default=0.3)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--saddle-w", dest="saddle_w", type=float, default=1000.0)
    p.add_argument("--saddle-tol", dest="saddle_tol", type=float, default=1e-4)
    _common(p, 1e-6)
    p.set_defaults(handler=cmd_yang_yang)

    p = sub.add_parser("density", help="Nystrom solution of the density equation")
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--inv-g", dest="inv_g", type=float, default=3.0)
    p.add_argument("--lam-max", dest="lam_max", type=float, default=20.0)
    p.add_argument("--nodes", type=int, default=2001)
    p.add_argument("--holes", default="", help="comma separated hole rapidities")
    p.add_argument("--convergence", default="", help="node ladder for a grid study, e.g. 41,81,161,321")
    _common(p, 1e-8)
    p.set_defaults(handler=cmd_density)

    p = sub.add_parser("spinon-fit", help="spinon dispersion against cosh")
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--inv-g", dest="inv_g", type=float, default=3.0)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--lam-grid", dest="lam_grid", default="-1:1:0.1")
    p.add_argument("--sizes", default="", help="finite-size ladder, e.g. 32,64,128")
    p.add_argument("--gap-window", dest="gap_window", type=float, default=0.1)
    _common(p, 5e-3)
    p.set_defaults(handler=cmd_spinon_fit)

    for name, fn, text in (("mass-gap", cmd_mass_gap, "mass gap along the coupling trajectory"),
                           ("rg-flow", cmd_rg_flow, "running coupling against the one-loop form")):
        p = sub.add_parser(name, help=text)
        _coupling(p)
        p.add_argument("--t-grid", dest="t_grid", default="10:1000:10")
        p.add_argument("--convention", choices=("exact", "universal"), default="exact")
        if name == "mass-gap":
            p.add_argument("--Lambda", type=float, default=2000.0)
            p.add_argument("--m0", type=float, default=None)
        _common(p, 1e-2 if name == "rg-flow" else 1e-8)
        p.set_defaults(handler=fn)

    p = sub.add_parser("classify-regime", help="adiabatic / fast-driving classification")
    _coupling(p)
    p.add_argument("--t", type=float, required=False, default=None)
    p.add_argument("--Lambda", type=float, default=2000.0)
    p.add_argument("--m0", type=float, default=4.0)
    p.add_argument("--convention", choices=("exact", "universal"), default="exact")
    p.add_argument("--expect", choices=("adiabatic", "intermediate", "fast-driving"), default=None)
    _common(p, 0.0)
    p.set_defaults(handler=cmd_classify_regime)

    p = sub.add_parser("r-classical", help="quasi-classical r-matrix checks")
    p.add_argument("--lams", default="0.7,-0.4,1.9")
    p.add_argument("--etas", default="0.02,0.01,0.005,0.0025,0.00125")
    _common(p, 1e-8)
    p.set_defaults(handler=cmd_r_classical)

    p = sub.add_parser("replay", help="replay the golden corpus")
    p.add_argument("--all", action="store_true")
    p.add_argument("--record", default=None)
    p.add_argument("--bless", action="store_true")
    p.add_argument("--corpus-dir", dest="corpus_dir", default=None)
    p.add_argument("--override-tol", dest="override_tol", type=float, default=None)
    _common(p, 0.0)
    p.set_defaults(handler=cmd_replay)

    return parser, sub


def resolve(argv):
    """Parse argv; values from --config fill in anything not given as a flag."""
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required")
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        known = vars(args)
        unknown = [k for k in cfg if k.replace("-", "_") not in known]
        if unknown:
            raise UsageError(f"unknown config keys: {unknown}")
        sub.choices[args.command].set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = parser.parse_args(argv)
    return args


def resolved_config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _IO_KEYS}


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run(argv=None):
    """Run one subcommand; returns the exit code."""
    try:
        args = resolve(argv)
    except UsageError as exc:
        sys.stderr.write(dumps({"schema_version": SCHEMA_VERSION, "status": "usage_error",
                                "error": {"type": "UsageError", "message": str(exc)}}))
        return EXIT_USAGE
    config = resolved_config(args)
    payload = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": config,
               "seed": args.seed}
    table = None
    try:
        if args.command == "classify-regime" and args.t is None:
            raise UsageError("--t is required")
        passed, results, table = args.handler(args)
        payload.update(results=results, status="pass" if passed else "fail")
        code = EXIT_PASS if passed else EXIT_FAIL
    except UsageError as exc:
        payload.update(status="usage_error", error={"type": "UsageError", "message": str(exc)})
        code = EXIT_USAGE
    except (NumericError, SingularityError, FloatingPointError, np.linalg.LinAlgError) as exc:
        payload.update(status="numeric_error", error={"type": type(exc).__name__, "message": str(exc)})
        code = EXIT_NUMERIC
    except (DomainError, GnqkzError) as exc:
        payload.update(status="usage_error", error={"type": type(exc).__name__, "message": str(exc)})
        code = EXIT_USAGE
    if args.format == "csv" and table is not None and code in (EXIT_PASS, EXIT_FAIL):
        header, rows = table
        text = to_csv(header, rows, dict(config, command=args.command, status=payload["status"]))
    else:
        text = dumps(payload)
    _emit(text, args.out)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
