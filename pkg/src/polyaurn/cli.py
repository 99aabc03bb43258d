"""Command-line surface: simulate the processes, print exact moments and
limit constants, and run the closed-form verifiers.

Every run echoes its fully resolved configuration (including the master
seed) in the output, so a result file is reproducible from its own header.
Exact quantities print as "num/den"; float mode prints 15 significant
digits.  Exit codes: 0 success, 1 domain or verification failure, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction

from . import __version__
from .crp import CrpParams, seating_probabilities, simulate_table_count_batch, tree_equivalents
from .laws import verify_decomposition
from .martingale import tail_sum_experiment, tail_variance
from .moments import (
    asymptotic_constants,
    g_factor,
    limit_density,
    limit_moments,
    raw_moments,
)
from .rng import resolve_master_seed
from .stirling import (
    block_count_law,
    block_count_pmf_from_urn,
    block_count_urn,
    simulate_block_counts,
    stirling_count,
)
from .trees import (
    dary_family,
    descendants_urn,
    gport_family,
    outdegree_urn,
    recursive_family,
    root_descendants_urn,
    simulate_statistic_batch,
)
from .urns import (
    Pmf,
    empirical_pmf,
    exact_pmf_dp,
    multicolor_polya_young,
    polya_young,
    sequence_urn,
    simulate_counts_batch,
    simulate_white_batch,
    triangular,
)

CSV_SCHEMA_VERSION = 1


def _fmt(x, mode: str) -> str:
    if isinstance(x, Fraction):
        if mode == "exact":
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        x = float(x)
    if isinstance(x, float):
        return format(x, ".15g")
    return str(x)


def _fraction_list(text: str) -> list[Fraction]:
    return [Fraction(part) for part in text.split(",") if part.strip()]


def _add_urn_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=["py", "tri", "multi", "seq"], default="py")
    parser.add_argument("--p", type=int, default=1, help="period")
    parser.add_argument("--sigma", default="1")
    parser.add_argument("--ell", default="1")
    parser.add_argument("--ell1", default="0")
    parser.add_argument("--ell2", default="1", help="refresh-step reinforcement (tri)")
    parser.add_argument("--w0", default="1")
    parser.add_argument("--b0", default="1")
    parser.add_argument("--offset", type=int, default=0)
    parser.add_argument("--initial", default="1,1", help="multi: comma counts per color")
    parser.add_argument("--sequence", default="thue-morse", help="seq: driving sequence name")
    parser.add_argument("--ells", default="1,2", help="seq: reinforcement per sequence value")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (default: POLYA_SEED or 0)")
    parser.add_argument("--mode", choices=["exact", "float"], default="exact")
    parser.add_argument("--format", choices=["csv", "json"], default=None)
    parser.add_argument("--output", default=None, help="path (default: stdout)")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--config", default=None, help="JSON file with flag defaults")


def _spec_from_args(args) -> "UrnSpec":
    if args.family == "py":
        return polya_young(args.p, Fraction(args.sigma), Fraction(args.ell),
                           Fraction(args.w0), Fraction(args.b0), args.offset)
    if args.family == "tri":
        return triangular(args.p, Fraction(args.sigma), Fraction(args.ell1),
                          Fraction(args.ell2), Fraction(args.w0), Fraction(args.b0),
                          args.offset)
    if args.family == "multi":
        return multicolor_polya_young(args.p, Fraction(args.sigma), Fraction(args.ell),
                                      _fraction_list(args.initial))
    return sequence_urn(args.sequence, Fraction(args.sigma),
                        _fraction_list(args.ells), Fraction(args.w0), Fraction(args.b0))


def _resolved_config(args) -> dict:
    skip = {"func", "config", "output"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        out[key] = value if isinstance(value, (int, float, str, bool)) else str(value)
    return out


def _emit(args, rows=None, header=None, payload=None) -> None:
    """CSV (header + rows) or JSON (payload); both carry version and config."""
    config = _resolved_config(args)
    fmt = args.format or ("json" if payload is not None and rows is None else "csv")
    if fmt == "json":
        body = payload if payload is not None else [dict(zip(header, row)) for row in rows]
        text = json.dumps(
            {"version": __version__, "schema": CSV_SCHEMA_VERSION,
             "config": config, "results": body},
            indent=2, default=str,
        ) + "\n"
    else:
        lines = [
            f"# version={__version__} schema={CSV_SCHEMA_VERSION}",
            f"# config={json.dumps(config, default=str)}",
        ]
        if payload is not None and rows is None:
            header = ["key", "value"]
            rows = sorted(payload.items())
        lines.append(",".join(header))
        lines += [",".join(str(c) for c in row) for row in rows]
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pmf_rows(pmf: Pmf, mode: str):
    return [(_fmt(v, mode), _fmt(pr, mode)) for v, pr in zip(pmf.support, pmf.probs)]


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(args) -> int:
    spec = _spec_from_args(args)
    c = asymptotic_constants(spec)
    payload = {
        "psi": float(c.psi),
        "lambda": float(c.Lambda),
        "delta": float(c.delta),
        "sigma_unit": float(c.sigma_unit),
        "z": float(c.z),
        "kappa": float(c.kappa),
    }
    _emit(args, payload={k: format(v, ".15g") for k, v in payload.items()})
    return 0


def cmd_urn_exact(args) -> int:
    spec = _spec_from_args(args)
    if args.pmf:
        pmf = exact_pmf_dp(spec, args.N, mode=args.mode if args.mode == "exact" else "float")
        _emit(args, rows=_pmf_rows(pmf, args.mode), header=["value", "probability"])
        return 0
    mode = "exact" if args.mode == "exact" else "float"
    moments = raw_moments(spec, args.N, args.moments, mode=mode)
    rows = [(s, _fmt(m, args.mode)) for s, m in enumerate(moments, start=1)]
    _emit(args, rows=rows, header=["s", "moment"])
    return 0


def cmd_urn_sim(args) -> int:
    spec = _spec_from_args(args)
    seed = args.seed = resolve_master_seed(args.seed)
    if spec.kind == "py_like" and spec.colors == 2:
        samples = simulate_white_batch(spec, [args.N], args.replicates, seed)[0]
    else:
        samples = simulate_counts_batch(spec, args.N, args.replicates, seed)[:, 0]
    pmf = empirical_pmf(samples.tolist())
    _emit(args, rows=_pmf_rows(pmf, args.mode), header=["value", "probability"])
    return 0


def cmd_urn_limit(args) -> int:
    spec = _spec_from_args(args)
    rows = []
    mom = limit_moments(spec, args.smax, normalization=args.normalization)
    for s in range(1, args.smax + 1):
        rows.append(("moment", s, format(mom[s - 1], ".15g")))
    if args.density_grid:
        for x in (float(v) for v in args.density_grid.split(",") if v.strip()):
            rows.append(("density", format(x, ".15g"), format(limit_density(spec, x), ".15g")))
    _emit(args, rows=rows, header=["quantity", "arg", "value"])
    return 0


def cmd_tail_sum(args) -> int:
    spec = _spec_from_args(args)
    seed = args.seed = resolve_master_seed(args.seed)
    report = tail_sum_experiment(spec, args.N, args.far, args.replicates, seed,
                                 threads=args.threads)
    payload = {
        "N": report.N,
        "N_far": report.N_far,
        "n_reps": report.n_reps,
        "conditional": asdict(report.conditional),
        "plugin": asdict(report.plugin),
        "plugin_expected_attenuation": report.plugin_expected_attenuation,
        "plugin_expected_variance_factor": report.plugin_expected_variance_factor,
        "tail_sd": report.tail_sd,
        "tail_variance_at_N": tail_variance(spec, args.N),
    }
    args.format = args.format or "json"
    _emit(args, payload=payload)
    return 0


def _tree_family_from_args(args):
    if args.tree_family == "recursive":
        return recursive_family(Fraction(args.ell))
    if args.tree_family == "dary":
        return dary_family(args.d, Fraction(args.ell))
    return gport_family(Fraction(args.alpha), Fraction(args.ell))


def cmd_tree_sim(args) -> int:
    family = _tree_family_from_args(args)
    seed = args.seed = resolve_master_seed(args.seed)
    stat_name = args.statistic.replace("-", "_")
    statistic = (stat_name,) if stat_name == "table_count" else (stat_name, args.index)
    values = simulate_statistic_batch(
        family, args.p, args.N, args.replicates, seed, statistic,
        mode=args.tree_mode,
        bar_beta=Fraction(args.bar_beta) if args.bar_beta else None,
    )
    pmf = empirical_pmf(values.tolist())
    rows = _pmf_rows(pmf, args.mode)
    if args.compare and stat_name != "table_count":
        builders = {
            "descendants": lambda: descendants_urn(family, args.p, args.index),
            "root_descendants": lambda: root_descendants_urn(family, args.p, args.index),
            "outdegree": lambda: outdegree_urn(family, args.p, args.index),
        }
        urn = builders[stat_name]()
        steps = args.N - args.index * (args.p if stat_name == "root_descendants" else 1)
        exact = exact_pmf_dp(urn, steps)
        shift = 1 if stat_name == "descendants" else 0
        exact = exact.map_support(
            lambda w: int((w - urn.initial[0]) / urn.sigma) + shift
        )
        tv = empirical_pmf(values.tolist()).tv_distance(exact)
        rows.append(("tv_vs_urn", format(float(tv), ".15g")))
    _emit(args, rows=rows, header=["value", "probability"])
    return 0


def cmd_stirling(args) -> int:
    if args.what == "count":
        _emit(args, payload={"count": stirling_count(args.d, args.p, args.t, args.N)})
        return 0
    if args.what == "enumerate-law":
        pmf = block_count_law(args.d, args.p, args.t, args.N)
    elif args.what == "urn-law":
        pmf = block_count_pmf_from_urn(block_count_urn(args.d, args.p, args.t), args.N)
    else:
        seed = args.seed = resolve_master_seed(args.seed)
        counts = simulate_block_counts(args.d, args.p, args.t, args.N,
                                       args.replicates, seed)
        pmf = empirical_pmf(counts.tolist())
    _emit(args, rows=_pmf_rows(pmf, args.mode), header=["blocks", "probability"])
    return 0


def cmd_crp(args) -> int:
    params = CrpParams(Fraction(args.a), Fraction(args.theta), args.p,
                       Fraction(args.theta_bar) if args.theta_bar else None)
    if args.tables is not None:
        sizes = [int(s) for s in args.tables.split(",") if s.strip()]
        probs, fresh, bar = seating_probabilities(params, sizes, sum(sizes) + args.bar_count,
                                                  args.bar_count)
        alpha, ell, beta = tree_equivalents(params)
        payload = {
            "join": [_fmt(q, args.mode) for q in probs],
            "new_table": _fmt(fresh, args.mode),
            "bar": None if bar is None else _fmt(bar, args.mode),
            "tree_alpha": _fmt(alpha, args.mode),
            "tree_ell": _fmt(ell, args.mode),
            "tree_beta": None if beta is None else _fmt(beta, args.mode),
        }
        args.format = args.format or "json"
        _emit(args, payload=payload)
        return 0
    seed = args.seed = resolve_master_seed(args.seed)
    counts = simulate_table_count_batch(params, args.N, args.replicates, seed)
    pmf = empirical_pmf(counts.tolist())
    _emit(args, rows=_pmf_rows(pmf, args.mode), header=["tables", "probability"])
    return 0


def cmd_verify(args) -> int:
    spec = _spec_from_args(args)
    if args.tol is None:
        args.tol = 1e-6 if args.what == "density" else 1e-9
    if args.what == "decomposition":
        report = verify_decomposition(spec, smax=args.smax)
        payload = {
            "label": report.label,
            "expected_scale": report.expected_scale,
            "fitted_scale": report.fitted_scale,
            "scale_rel_error": report.scale_rel_error,
            "moment_rel_errors": report.moment_rel_errors,
            "max_rel_error": report.max_rel_error,
            "tolerance": args.tol,
            "status": "ok" if report.max_rel_error < args.tol else "fail",
        }
        args.format = args.format or "json"
        _emit(args, payload=payload)
        return 0 if payload["status"] == "ok" else 1
    if args.what == "martingale":
        worst = 0.0
        for N in (1, 2, 5, 10, 100, 1000):
            expect = sum(
                pr * float(g_factor(spec, N, mode="float")) * float(w)
                for w, pr in exact_pmf_dp(spec, N, mode="float").as_dict().items()
            ) if N <= 10 else float(g_factor(spec, N, mode="float")) * float(
                raw_moments(spec, N, 1, mode="float")[0]
            )
            worst = max(worst, abs(expect / float(spec.initial[0]) - 1.0))
        payload = {"max_rel_error": worst, "tolerance": args.tol,
                   "status": "ok" if worst < args.tol else "fail"}
        args.format = args.format or "json"
        _emit(args, payload=payload)
        return 0 if payload["status"] == "ok" else 1
    # density: integrate the limit density against 1, x, x^2 and compare
    from .moments import tilted_density_moment

    mom = limit_moments(spec, 2, normalization="per_period")
    errs = {
        "mass": abs(tilted_density_moment(spec, 0) - 1.0),
        "mean": abs(tilted_density_moment(spec, 1) / mom[0] - 1.0),
        "second": abs(tilted_density_moment(spec, 2) / mom[1] - 1.0),
    }
    status = "ok" if max(errs.values()) < args.tol else "fail"
    payload = {**{k: format(v, ".6g") for k, v in errs.items()},
               "tolerance": args.tol, "status": status}
    args.format = args.format or "json"
    _emit(args, payload=payload)
    return 0 if status == "ok" else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyaurn",
        description="Periodic urn models, growing forests, Stirling-type words, "
                    "and restaurant seating, with exact cross-checks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.command_parsers = {}

    def add(name, fn, urn=True):
        sp = sub.add_parser(name)
        if urn:
            _add_urn_args(sp)
        _add_common_args(sp)
        sp.set_defaults(func=fn)
        parser.command_parsers[name] = sp
        return sp

    add("constants", cmd_constants)

    sp = add("urn-exact", cmd_urn_exact)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--moments", type=int, default=2)
    sp.add_argument("--pmf", action="store_true", help="emit the distribution instead")

    sp = add("urn-sim", cmd_urn_sim)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--replicates", type=int, default=10_000)

    sp = add("urn-limit", cmd_urn_limit)
    sp.add_argument("--smax", type=int, default=3)
    sp.add_argument("--normalization", choices=["family", "per_period", "per_step"],
                    default="family")
    sp.add_argument("--density-grid", default=None, help="comma list of x values")

    sp = add("tail-sum", cmd_tail_sum)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--far", type=int, required=True)
    sp.add_argument("--replicates", type=int, default=10_000)

    sp = add("tree-sim", cmd_tree_sim, urn=False)
    sp.add_argument("--tree-family", choices=["recursive", "dary", "gport"],
                    default="recursive")
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--ell", default="1")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--alpha", default="1")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--replicates", type=int, default=10_000)
    sp.add_argument("--statistic",
                    choices=["descendants", "root-descendants", "outdegree", "table-count"],
                    default="descendants")
    sp.add_argument("--index", type=int, default=1,
                    help="node birth step, or root number for root-descendants")
    sp.add_argument("--tree-mode", choices=["standard", "crp"], default="standard")
    sp.add_argument("--bar-beta", default=None)
    sp.add_argument("--compare", action="store_true",
                    help="append total-variation distance to the matching urn law")

    sp = add("stirling", cmd_stirling, urn=False)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--what", choices=["count", "enumerate-law", "urn-law", "simulate"],
                    default="urn-law")
    sp.add_argument("--replicates", type=int, default=10_000)

    sp = add("crp", cmd_crp, urn=False)
    sp.add_argument("--a", default="1/2")
    sp.add_argument("--theta", default="1/2")
    sp.add_argument("--theta-bar", default=None)
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--N", type=int, default=50)
    sp.add_argument("--replicates", type=int, default=10_000)
    sp.add_argument("--tables", default=None,
                    help="comma sizes: print exact seating probabilities and stop")
    sp.add_argument("--bar-count", type=int, default=0)

    sp = add("verify", cmd_verify)
    sp.add_argument("--what", choices=["decomposition", "martingale", "density"],
                    required=True)
    sp.add_argument("--smax", type=int, default=6)
    sp.add_argument("--tol", type=float, default=None,
                    help="default 1e-9 (decomposition, martingale) or 1e-6 (density)")

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args, remaining = parser.parse_known_args(argv)
    if remaining:
        parser.error(f"unrecognized arguments: {' '.join(remaining)}")
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            defaults = json.load(fh)
        # defaults must land on the subcommand parser: the subparser re-applies
        # its own defaults on every parse, clobbering top-level set_defaults
        sub = parser.command_parsers[args.command]
        known = {action.dest for action in sub._actions}
        unknown = sorted(set(defaults) - known)
        if unknown:
            parser.error(f"unknown config keys: {', '.join(unknown)}")
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, ZeroDivisionError, NotImplementedError,
            RuntimeError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
