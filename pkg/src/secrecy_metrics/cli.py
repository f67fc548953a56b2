"""Command-line front end: ``eval``, ``sweep``, ``design`` and ``verify``.

SNRs enter in dB and are converted to linear scale here, nowhere else.
Options can also come from a flat ``key = value`` config file (``--config``);
flags given on the command line take precedence. ``--config figN`` loads a
bundled figure recipe.
"""

import argparse
import csv
import io
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import metrics, monte_carlo, rate_optimizer
from .channel_model import ChannelStats, RatePair
from .errors import DomainError, InfeasibleError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
MC_SIGMA = 4.0
GRID_N = 4000
OPTIMIZER_TOL = 1e-4
THROUGHPUT_TOL = 1e-9
IDENTITY_TOL = 1e-12


class UsageError(Exception):
    pass


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def fmt(value):
    return f"{value:.9g}"


def _theta_list(text):
    try:
        values = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid theta list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("theta list is empty")
    return values


def _stop_value(text):
    return text if str(text).strip() == "max" else float(text)


def _bool(text):
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"invalid boolean: {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--snr-b-db", type=float, default=10.0, help="Bob's average SNR [dB]")
    common.add_argument("--snr-e-db", type=float, default=0.0, help="Eve's average SNR [dB]")
    common.add_argument("--rb", type=float, help="codeword rate Rb [bits/channel use]")
    common.add_argument("--rs", type=float, help="confidential rate Rs [bits/channel use]")
    common.add_argument("--theta", type=_theta_list, default=[1.0],
                        help="equivocation threshold(s), comma separated for sweeps")
    common.add_argument("--gamma", type=float, help="throughput floor [bits/channel use]")
    common.add_argument("--objective", choices=rate_optimizer.OBJECTIVES)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=1_000_000)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write output to FILE instead of stdout")
    common.add_argument("--config", help="key = value file, or a bundled recipe name (fig2 ... fig10)")
    common.add_argument("--verify", action="store_true", default=False,
                        help="run the Monte Carlo / brute-force oracle alongside")

    parser = argparse.ArgumentParser(prog="secrecy-metrics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {
        "eval": sub.add_parser("eval", parents=[common], help="evaluate all metrics for one configuration"),
        "sweep": sub.add_parser("sweep", parents=[common], help="tabulate metrics or designs over a grid"),
        "design": sub.add_parser("design", parents=[common], help="solve a throughput-constrained design"),
        "verify": sub.add_parser("verify", parents=[common], help="check closed forms and optimizers against oracles"),
    }
    sw = subparsers["sweep"]
    sw.add_argument("--variable", choices=("rate_secret", "avg_snr_eve_db", "gamma"))
    sw.add_argument("--start", type=float)
    sw.add_argument("--stop", type=_stop_value, help="upper end; 'max' for the largest feasible gamma")
    sw.add_argument("--steps", type=int)
    return parser, subparsers


def find_recipe(name):
    path = Path(name)
    if path.exists():
        return path.read_text()
    stem = name[:-4] if name.endswith(".cfg") else name
    res = resources.files("secrecy_metrics") / "recipes" / f"{stem}.cfg"
    if res.is_file():
        return res.read_text()
    raise UsageError(f"config file not found: {name}")


def parse_config(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def parse_args(argv):
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = subparsers[args.command]
        known = {a.dest for a in sub._actions}
        cfg = parse_config(find_recipe(args.config))
        unknown = sorted(set(cfg) - known - {"config"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        cfg.pop("config", None)
        if "verify" in cfg:
            cfg["verify"] = _bool(cfg["verify"])
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args, subparsers[args.command]


def _stats(args):
    return ChannelStats(db_to_linear(args.snr_b_db), db_to_linear(args.snr_e_db))


def _single_theta(args):
    if len(args.theta) != 1:
        raise UsageError("exactly one --theta value is expected for this command")
    return args.theta[0]


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")


def _mc_checks(stats, rates, theta, seed, samples):
    """Rows of (name, closed form, estimate) for the four Monte Carlo checks."""
    cfg = monte_carlo.McConfig(seed=seed, n_samples=samples)
    return [
        ("p_out", metrics.outage_probability(stats, rates, theta),
         monte_carlo.estimate_outage(stats, rates, theta, cfg.with_stream(0))),
        ("avg_equivocation", metrics.avg_equivocation(stats, rates),
         monte_carlo.estimate_avg_equivocation(stats, rates, cfg.with_stream(1))),
        ("leakage_rate", metrics.leakage_rate(stats, rates),
         monte_carlo.estimate_leakage_rate(stats, rates, cfg.with_stream(2))),
        ("p_tx", metrics.transmit_probability(stats, rates),
         monte_carlo.estimate_ptx(stats, rates, cfg.with_stream(3))),
    ]


def cmd_eval(args, out):
    _require(args, "rb", "rs")
    theta = _single_theta(args)
    stats = _stats(args)
    rates = RatePair(args.rb, args.rs)
    report = metrics.full_report(stats, rates, theta)
    ok = True
    checks = []
    if args.verify:
        for name, exact, est in _mc_checks(stats, rates, theta, args.seed, args.samples):
            z = est.z_score(exact)
            ok &= abs(z) <= MC_SIGMA
            checks.append({"metric": name, "mc_mean": est.mean, "mc_std_error": est.std_error,
                           "n": est.n, "z": z})
    if args.format == "json":
        doc = report.as_dict()
        if checks:
            doc["verify"] = checks
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for key, value in report.as_dict().items():
            out.write(f"{key} = {value:.6f}\n")
        for c in checks:
            out.write(f"mc {c['metric']} = {c['mc_mean']:.6f} +/- {c['mc_std_error']:.2e} (z = {c['z']:+.2f})\n")
    return EXIT_OK if ok else EXIT_FAIL


def _grid(args):
    _require(args, "variable", "start", "stop", "steps")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    return args.start, args.stop, args.steps


def _metric_rows(args, stats_for, rates_for, xs):
    thetas = args.theta
    header = [args.variable] + [f"p_out@theta={t:g}" for t in thetas] + [
        "avg_equivocation", "leakage_rate", "p_tx", "throughput"]
    rows = []
    worst = 0.0
    for x in xs:
        stats, rates = stats_for(x), rates_for(x)
        report = metrics.full_report(stats, rates, thetas[0])
        row = [x] + [metrics.outage_probability(stats, rates, t) for t in thetas]
        row += [report.avg_equivocation, report.leakage_rate, report.p_tx, report.throughput]
        rows.append(row)
        if args.verify:
            for t in thetas:
                for _, exact, est in _mc_checks(stats, rates, t, args.seed, args.samples):
                    worst = max(worst, abs(est.z_score(exact)))
    return header, rows, worst


def _design_tags(args):
    objectives = [args.objective] if args.objective else list(rate_optimizer.OBJECTIVES)
    tags = []
    for obj in objectives:
        if obj == "outage":
            tags += [(f"outage@theta={t:g}", obj, t) for t in args.theta]
        else:
            tags.append((obj, obj, args.theta[0]))
    return tags


def _design_rows(args, stats, xs):
    tags = _design_tags(args)
    header = ["gamma"]
    for tag, _, _ in tags:
        header += [f"rs_{tag}", f"rb_{tag}", f"p_out_{tag}", f"avg_equivocation_{tag}",
                   f"leakage_rate_{tag}"]
    rows = []
    worst = 0.0
    for gamma in xs:
        row = [gamma]
        for _, obj, theta in tags:
            problem = rate_optimizer.DesignProblem(stats, gamma, obj, theta)
            sol = rate_optimizer.optimize(problem)
            r = sol.rates
            row += [sol.rate_s, sol.rate_b, metrics.outage_probability(stats, r, theta),
                    metrics.avg_equivocation(stats, r), metrics.leakage_rate(stats, r)]
            if args.verify:
                worst = max(worst, _optimizer_gap(problem, sol))
        rows.append(row)
    return header, rows, worst


def _optimizer_gap(problem, sol):
    """Amount by which the analytic design is worse than the grid oracle (<= 0 is ideal)."""
    ref = rate_optimizer.brute_force_optimize(problem, GRID_N)
    gap = sol.objective_value - ref.objective_value
    return -gap if problem.objective == "equivocation" else gap


def cmd_sweep(args, out):
    start, stop, steps = _grid(args)
    stats = _stats(args)
    if args.variable == "gamma":
        gamma_max = rate_optimizer.max_throughput(stats)[1]
        stop = gamma_max if stop == "max" else stop
    elif stop == "max":
        raise UsageError("--stop max is only meaningful for gamma sweeps")
    if not start < stop:
        raise UsageError("--start must be < --stop")
    xs = [float(x) for x in np.linspace(start, stop, steps)]

    if args.variable == "gamma":
        header, rows, worst = _design_rows(args, stats, xs)
        band = OPTIMIZER_TOL
    else:
        _require(args, "rb")
        if args.variable == "rate_secret":
            header, rows, worst = _metric_rows(
                args, lambda x: stats, lambda x: RatePair(args.rb, x), xs)
        else:
            _require(args, "rs")
            header, rows, worst = _metric_rows(
                args,
                lambda x: ChannelStats(stats.avg_snr_bob, db_to_linear(x)),
                lambda x: RatePair(args.rb, args.rs),
                xs,
            )
        band = MC_SIGMA
    write_table(header, rows, args.format, out)
    if args.verify:
        sys.stderr.write(f"verify: worst deviation {worst:.3g} (band {band:g})\n")
        return EXIT_OK if worst <= band else EXIT_FAIL
    return EXIT_OK


def write_table(header, rows, fmt_name, out):
    if fmt_name == "json":
        out.write(json.dumps([dict(zip(header, row)) for row in rows], indent=2) + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    out.write(buf.getvalue())


def cmd_design(args, out):
    _require(args, "gamma")
    problem = rate_optimizer.DesignProblem(
        _stats(args), args.gamma, args.objective or "outage", _single_theta(args))
    sol = rate_optimizer.optimize(problem)
    result = {
        "objective": problem.objective,
        "gamma": problem.gamma,
        "theta": problem.theta,
        "rate_b": sol.rate_b,
        "rate_s": sol.rate_s,
        "objective_value": sol.objective_value,
        "throughput": metrics.throughput(problem.stats, sol.rates),
        "binding": sol.binding.names(),
    }
    ok = True
    if args.verify:
        ref = rate_optimizer.brute_force_optimize(problem, GRID_N)
        gap = _optimizer_gap(problem, sol)
        ok = gap <= OPTIMIZER_TOL
        result.update(grid_rate_s=ref.rate_s, grid_objective_value=ref.objective_value, grid_gap=gap)
    if args.format == "json":
        out.write(json.dumps(result, indent=2) + "\n")
    else:
        for key, value in result.items():
            if isinstance(value, float):
                value = fmt(value)
            elif isinstance(value, list):
                value = ",".join(value)
            out.write(f"{key} = {value}\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args, out):
    stats = _stats(args)
    rb = 1.0 if args.rb is None else args.rb
    rs = 0.5 if args.rs is None else args.rs
    rates = RatePair(rb, rs)
    theta = _single_theta(args)
    gamma_max = rate_optimizer.max_throughput(stats)[1]
    gamma = 0.5 * gamma_max if args.gamma is None else args.gamma

    lines = []
    ok = True

    def record(passed, name, detail):
        nonlocal ok
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")

    for name, exact, est in _mc_checks(stats, rates, theta, args.seed, args.samples):
        z = est.z_score(exact)
        record(abs(z) <= MC_SIGMA, f"mc {name}",
               f"closed={fmt(exact)} mc={fmt(est.mean)} se={est.std_error:.3e} z={z:+.3f}")

    d = metrics.avg_equivocation(stats, rates)
    leak = metrics.leakage_rate(stats, rates)
    err = abs(leak - (1.0 - d) * rates.rate_secret)
    record(err <= IDENTITY_TOL, "identity leakage=(1-avg_equivocation)*rs", f"err={err:.3e}")

    for obj in rate_optimizer.OBJECTIVES:
        problem = rate_optimizer.DesignProblem(stats, gamma, obj, theta)
        sol = rate_optimizer.optimize(problem)
        gap = _optimizer_gap(problem, sol)
        eta = metrics.throughput(stats, sol.rates)
        record(gap <= OPTIMIZER_TOL and eta >= gamma - THROUGHPUT_TOL and sol.rate_b >= sol.rate_s,
               f"design {obj}",
               f"rs={fmt(sol.rate_s)} rb={fmt(sol.rate_b)} value={fmt(sol.objective_value)} "
               f"grid_gap={gap:+.3e} throughput={fmt(eta)} gamma={fmt(gamma)}")

    if args.format == "json":
        out.write(json.dumps({"passed": ok, "checks": lines}, indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
        out.write(f"{'PASS' if ok else 'FAIL'} overall\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "design": cmd_design, "verify": cmd_verify}


def main(argv=None):
    try:
        args, sub = parse_args(argv)
    except SystemExit as exc:
        return exc.code
    except UsageError as exc:
        sys.stderr.write(f"secrecy-metrics: error: {exc}\n")
        return EXIT_USAGE
    try:
        if args.out:
            with open(args.out, "w", newline="") as fh:
                return COMMANDS[args.command](args, fh)
        return COMMANDS[args.command](args, sys.stdout)
    except UsageError as exc:
        sys.stderr.write(sub.format_usage())
        sys.stderr.write(f"secrecy-metrics {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except InfeasibleError as exc:
        sys.stderr.write(f"secrecy-metrics {args.command}: infeasible: {exc}\n")
        return EXIT_FAIL
    except DomainError as exc:
        sys.stderr.write(f"secrecy-metrics {args.command}: invalid input: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
