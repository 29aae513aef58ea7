"""Command-line front end.

Subcommands: tau (optimize the witness for one state file), ppt
(partial-transpose check per bipartition), scan (parameter grids for the
cataloged families, CSV out), evolve (thermal-channel time scan, CSV
out), measure (simulate Gaussian measurements and estimate the witness),
limits (strong/weak-probe structure check for three-mode pure states).

Exit codes: 0 success, 2 input error, 3 numerical failure, 4 statistical
guard.  Every CSV is reproducible byte-for-byte for identical flags and
seed, independent of --jobs; randomness is keyed off --seed through
counter-based generators only.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .catalog import (
    CpsTsvsParams,
    GhzParams,
    ThermalChannel,
    cps_tsvs_state,
    ghz_state,
    green_propagate,
)
from .errors import (
    NumericalFailureError,
    OptimizationFailureError,
    OracleInapplicableError,
    SampleSizeError,
    StateFileError,
    ValidationError,
)
from .hierarchy import CoefficientScheme
from .measurement import (
    GaussianMeasurement,
    estimate_tau_monte_carlo,
    sample_outcomes,
    save_samples,
    tau_from_statistics,
)
from .optimize import OptimizerConfig, maximize_tau, scheme_for
from .ppt_analysis import verify_ppt_resemblance
from .probes import enumerate_bipartitions
from .statefile import load_coefficients, load_probe, load_state
from .symplectic import (
    ThreeModePureStandardForm,
    min_symplectic_eigenvalue,
    partial_transpose,
)

PPT_TOL = 1e-9


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.12g" % value


def _write_csv(path, metadata, header, rows):
    with open(path, "w", newline="") as fh:
        for key, value in metadata:
            fh.write("# %s=%s\n" % (key, value))
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _point_seed(seed, *indices):
    """Deterministic per-point seed, independent of execution order."""
    return int(np.random.SeedSequence([seed] + list(indices)).generate_state(1)[0])


def _scheme(args, n):
    if getattr(args, "coeffs", None):
        return load_coefficients(args.coeffs, n)
    return scheme_for(args.k, n)


def _config(args, seed=None, warm=None):
    return OptimizerConfig(
        restarts=args.restarts,
        seed=args.seed if seed is None else seed,
        max_evaluations=args.max_evals,
        initial_params=warm,
    )


def cmd_tau(args):
    state = load_state(args.state)
    cs = _scheme(args, state.n)
    report = maximize_tau(state, cs, _config(args))
    p = report.best_params
    print("# tau k=%d value=%s detected=%s restarts=%d converged=%d evaluations=%d"
          % (cs.k, _fmt(report.best_value),
             "yes" if report.detected else "no",
             report.restarts, report.converged_restarts, report.evaluations))
    print("n %d" % p.n)
    print("s " + " ".join(repr(float(v)) for v in p.s))
    print("theta " + " ".join(repr(float(v)) for v in p.theta))
    print("x " + " ".join(repr(float(v)) for v in p.x))
    return 0


def cmd_ppt(args):
    state = load_state(args.state)
    V = state.cov
    print("# ppt n=%d" % state.n)
    if not state.poly.is_constant():
        print("# note: polynomial factor ignored; the check covers the "
              "Gaussian envelope only")
    any_violation = False
    for b in enumerate_bipartitions(state.n):
        nu = min_symplectic_eigenvalue(partial_transpose(V, b.group0))
        entangled = nu < 0.5 - PPT_TOL
        any_violation = any_violation or entangled
        print("bipartition {%s}|{%s} min_nu %s %s"
              % (",".join(map(str, b.group0)), ",".join(map(str, b.group1)),
                 _fmt(nu), "entangled" if entangled else "separable"))
    print("verdict %s" % ("ppt_entangled" if any_violation else "ppt_separable"))
    return 0


def _ghz_point(task):
    idx, r, g, ks, restarts, max_evals, seed = task
    state = ghz_state(GhzParams(r=r, g=g))
    row = [r, g]
    for k in ks:
        cfg = OptimizerConfig(restarts=restarts, max_evaluations=max_evals,
                              seed=_point_seed(seed, idx, k))
        row.append(maximize_tau(state, scheme_for(k, 3), cfg).best_value)
    nus = [min_symplectic_eigenvalue(partial_transpose(state.cov, b.group0))
           for b in enumerate_bipartitions(3)]
    row.append(min(nus))
    row.append(min(nus) < 0.5 - PPT_TOL)
    return idx, row


def _cps_point(task):
    idx, alpha, r, restarts, max_evals, seed = task
    beta = np.sqrt(max(0.0, 1.0 - alpha * alpha))
    state = cps_tsvs_state(CpsTsvsParams(r=r, alpha=alpha, beta=beta))
    cfg = OptimizerConfig(restarts=restarts, max_evaluations=max_evals,
                          seed=_point_seed(seed, idx))
    value = maximize_tau(state, scheme_for(2, 2), cfg).best_value
    nu = min_symplectic_eigenvalue(partial_transpose(state.cov, (0,)))
    return idx, [alpha, r, value, nu, nu < 0.5 - PPT_TOL]


def _run_points(worker, tasks, jobs):
    if jobs <= 1:
        results = [worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(tasks) // (jobs * 4))
            results = list(pool.map(worker, tasks, chunksize=chunk))
    results.sort(key=lambda item: item[0])
    return [row for _, row in results]


def cmd_scan(args):
    if args.preset == "ghz":
        ks = sorted({int(v) for v in args.k.split(",")})
        if any(k < 2 or k > 3 for k in ks):
            raise ValidationError("ghz preset supports k in {2, 3}")
        rs = np.linspace(args.r_min, args.r_max, args.r_steps)
        gs = np.linspace(args.g_min, args.g_max, args.g_steps)
        tasks = []
        idx = 0
        for r in rs:
            for g in gs:
                tasks.append((idx, float(r), float(g), tuple(ks),
                              args.restarts, args.max_evals, args.seed))
                idx += 1
        rows = _run_points(_ghz_point, tasks, args.jobs)
        header = ["r", "g"] + ["tau_%d" % k for k in ks] + [
            "ppt_min_nu", "ppt_entangled"]
        grid = "r:%s..%s:%d,g:%s..%s:%d" % (
            _fmt(args.r_min), _fmt(args.r_max), args.r_steps,
            _fmt(args.g_min), _fmt(args.g_max), args.g_steps)
        scheme = ",".join("k=%d" % k for k in ks)
    else:
        alphas = np.linspace(0.0, 1.0, args.alpha_steps)
        tasks = [(i, float(a), args.r, args.restarts, args.max_evals, args.seed)
                 for i, a in enumerate(alphas)]
        rows = _run_points(_cps_point, tasks, args.jobs)
        header = ["alpha", "r", "tau_2", "cov_ppt_min_nu", "cov_ppt_entangled"]
        grid = "alpha:0..1:%d" % args.alpha_steps
        scheme = "k=2"
    _write_csv(args.out, [("seed", args.seed), ("preset", args.preset),
                          ("scheme", scheme), ("grid", grid)], header, rows)
    print("wrote %d rows to %s" % (len(rows), args.out))
    return 0


def cmd_evolve(args):
    beta = np.sqrt(max(0.0, 1.0 - args.alpha * args.alpha))
    state = cps_tsvs_state(CpsTsvsParams(r=args.r, alpha=args.alpha, beta=beta))
    channel = ThermalChannel(gamma=args.gamma, n_th=args.nth)
    times = np.linspace(0.0, args.t_max, args.steps)
    cs = scheme_for(2, 2)
    rows = []
    warm = None
    for idx, t in enumerate(times):
        evolved = green_propagate(state, channel, float(t))
        cfg = OptimizerConfig(restarts=args.restarts,
                              max_evaluations=args.max_evals,
                              seed=_point_seed(args.seed, idx),
                              initial_params=warm)
        report = maximize_tau(evolved, cs, cfg)
        warm = report.best_params
        rows.append([float(t), report.best_value])
    _write_csv(args.out,
               [("seed", args.seed), ("preset", "cps-tsvs"),
                ("scheme", "k=2"),
                ("grid", "t:0..%s:%d" % (_fmt(args.t_max), args.steps)),
                ("gamma", _fmt(args.gamma)), ("nth", _fmt(args.nth))],
               ["t", "tau_2"], rows)
    print("wrote %d rows to %s" % (len(rows), args.out))
    return 0


def cmd_measure(args):
    state = load_state(args.state)
    probe = load_probe(args.probes)
    if probe.n != state.n:
        raise ValidationError("probe file is for n=%d, state has n=%d"
                              % (probe.n, state.n))
    cs = _scheme(args, state.n)
    Sigma = probe.sigma()
    X = probe.x
    meas = GaussianMeasurement(Sigma)
    sample = sample_outcomes(state, meas, args.samples, args.seed)
    if args.save_samples:
        save_samples(args.save_samples, sample)
    est = estimate_tau_monte_carlo(sample, Sigma, X, cs,
                                   smoothing=args.smoothing,
                                   bootstrap_seed=args.seed)
    exact = None
    if state.poly.is_constant() and not np.abs(state.mean).any():
        exact = tau_from_statistics(state, Sigma, X, cs)
    print("samples %d" % est.count)
    if exact is not None:
        print("exact %s" % _fmt(exact))
    print("estimate %s" % _fmt(est.estimate))
    print("stderr %s" % _fmt(est.stderr))
    if exact is not None:
        print("deviation_sigmas %s"
              % _fmt(abs(est.estimate - exact) / max(est.stderr, 1e-300)))
    return 0


def cmd_limits(args):
    state = load_state(args.state)
    sf = ThreeModePureStandardForm.from_covariance(state.cov)
    report = verify_ppt_resemblance(
        sf, tolerance=args.tolerance, eig_tolerance=args.eig_tolerance,
        r_small=args.r_small, r_large=args.r_large)
    for check in report.checks:
        b = check.bipartition
        print("bipartition {%s}|{%s} direction %s entry_dev %s eig_dev %s %s"
              % (",".join(map(str, b.group0)), ",".join(map(str, b.group1)),
                 check.direction, _fmt(check.entry_deviation),
                 _fmt(check.eig_deviation),
                 "ok" if check.passed else "MISMATCH"))
    print("verdict %s" % ("resemblance_holds" if report.passed
                          else "resemblance_fails"))
    return 0


def _add_optimizer_flags(p, restarts=8, max_evals=2000):
    p.add_argument("--restarts", type=int, default=restarts,
                   help="optimizer restarts per point")
    p.add_argument("--max-evals", type=int, default=max_evals,
                   help="objective evaluation budget per restart")
    p.add_argument("--seed", type=int, default=0, help="master seed")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvsep",
        description="Entanglement witnesses for polynomial-times-Gaussian "
                    "continuous-variable states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tau", help="optimize the witness for a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--k", type=int, default=2, help="detection level")
    p.add_argument("--coeffs", help="custom coefficient table file")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("ppt", help="partial-transpose check per bipartition")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_ppt)

    p = sub.add_parser("scan", help="parameter-grid scan to CSV")
    p.add_argument("--preset", required=True, choices=("ghz", "cps-tsvs"))
    p.add_argument("--out", required=True)
    p.add_argument("--k", default="2,3", help="comma list of levels (ghz)")
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, default=1.2)
    p.add_argument("--r-steps", type=int, default=61)
    p.add_argument("--g-min", type=float, default=0.0)
    p.add_argument("--g-max", type=float, default=1.2)
    p.add_argument("--g-steps", type=int, default=61)
    p.add_argument("--alpha-steps", type=int, default=51,
                   help="grid size for the cps-tsvs amplitude sweep")
    p.add_argument("--r", type=float, default=0.0,
                   help="squeezing for the cps-tsvs preset")
    p.add_argument("--jobs", type=int, default=1)
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("evolve", help="thermal-channel time scan to CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--nth", type=float, default=2.0)
    p.add_argument("--t-max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=61)
    p.add_argument("--alpha", type=float, default=np.sqrt(0.5),
                   help="superposition amplitude of the initial state")
    p.add_argument("--r", type=float, default=0.0,
                   help="squeezing of the initial state")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("measure",
                       help="simulate Gaussian measurements, estimate tau")
    p.add_argument("--state", required=True)
    p.add_argument("--probes", required=True,
                   help="probe parameter file (n, s, theta, x records)")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--coeffs")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--smoothing", type=float, default=1.0)
    p.add_argument("--save-samples", help="also write the outcome CSV here")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("limits",
                       help="strong/weak-probe structure check (3-mode pure)")
    p.add_argument("--state", required=True)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--eig-tolerance", type=float, default=1e-4)
    p.add_argument("--r-small", type=float, default=1e-6)
    p.add_argument("--r-large", type=float, default=1e6)
    p.set_defaults(func=cmd_limits)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StateFileError, ValidationError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except SampleSizeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 4
    except (NumericalFailureError, OptimizationFailureError,
            OracleInapplicableError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
