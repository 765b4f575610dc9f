"""Batch command-line front end.

Exit codes: 0 on success, 2 on input/validation problems, 3 when a solver
gives up.  All structured output is JSON (single results) or CSV (sweeps);
``--verbose`` adds a human-readable trace on standard error only.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import families, mle, montecarlo, serialization, uniqueness
from .errors import SolverError, ValidationError

__all__ = ["main", "run"]

CSV_HEADER = "family,k_or_N,n,replicates,estimate,stderr,reference,z"

N_RULES = {
    "m*K*log(K)": lambda size: size * math.log(size) if size > 1 else 1.0,
    "m*log2(k)": lambda size: math.log2(size) if size > 1 else 1.0,
    "m*k*2^k": lambda size: size * 2.0**size,
    "m*k*2**k": lambda size: size * 2.0**size,
    "m*log(N)": lambda size: math.log(size),
}


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as handle:
            handle.write(text)


def _trace(args, message: str) -> None:
    if args.verbose:
        print(message, file=sys.stderr)


def _load_inputs(args):
    space = serialization.space_from_dict(serialization.load_json(args.space))
    span = serialization.span_from_dict(serialization.load_json(args.basis))
    if span.num_states != space.size:
        raise ValidationError(
            f"basis rows have {span.num_states} columns, space has {space.size} states"
        )
    sample = serialization.load_sample(args.sample, space)
    return space, span, sample


def _cmd_check_uniqueness(args) -> int:
    space, span, sample = _load_inputs(args)
    _trace(args, f"checking subset of size {len(sample.support)} of {space.size} states")
    report = uniqueness.closure(span, sample.support)
    _emit(serialization.dumps_stable(
        serialization.report_to_dict(report, space, span)), args.out)
    return 0


def _cmd_fit(args) -> int:
    space, span, sample = _load_inputs(args)
    _trace(args, f"fitting sample of size {sample.size} on {space.size} states")
    result = mle.fit(
        space, span, sample, tol=args.tol, max_iter=args.max_iter
    )
    _trace(args, f"kind={result.kind.value} iterations={result.iterations}")
    _emit(serialization.dumps_stable(
        serialization.mle_to_dict(result, space)), args.out)
    return 0


def _family_objects(args):
    if args.kind == "rademacher":
        _require(args, "k")
        cube, span = families.rademacher_span(args.k)
        return cube.space, span, {}
    if args.kind == "walsh":
        _require(args, "k", "q")
        cube, span = families.walsh_span(args.k, args.q)
        return cube.space, span, {}
    if args.kind == "graph":
        _require(args, "nodes")
        params = _graph_params_from_args(args)
        gspace, span, _ = families.graph_family(args.nodes, params)
        return gspace.space, span, {"edges": [list(e) for e in gspace.edges]}
    _require(args, "states")
    space = serialization.space_from_dict(
        {"labels": list(range(args.states)), "weights": [1.0] * args.states}
    )
    return space, families.full_span(space), {}


def _graph_params_from_args(args) -> families.GraphParams:
    if getattr(args, "c", None) is None:
        return families.graph_params(args.nodes, 0.0)
    data = serialization.load_json(args.c)
    if isinstance(data, dict):
        data = data.get("c")
    return families.graph_params(args.nodes, data)


def _cmd_family(args) -> int:
    space, span, extra = _family_objects(args)
    space_doc = serialization.space_to_dict(space)
    basis_doc = serialization.span_to_dict(span)
    if args.out_space:
        _emit(serialization.dumps_stable(space_doc), args.out_space)
    if args.out_basis:
        _emit(serialization.dumps_stable(basis_doc), args.out_basis)
    if not (args.out_space or args.out_basis) or args.out:
        combined = {"space": space_doc, "basis": basis_doc, **extra}
        _emit(serialization.dumps_stable(combined), args.out)
    return 0


def _cmd_formulas(args) -> int:
    if args.formula == "rademacher-prob":
        _require(args, "k", "n")
        got = families.exists_probability_rademacher(args.k, args.n)
        doc = {
            "probability": got.probability,
            "bernoulli_lower_bound": got.bernoulli_lower_bound,
        }
    elif args.formula == "graph-prob":
        _require(args, "nodes", "n")
        params = _graph_params_from_args(args)
        doc = {"probability": families.exists_probability_graphs(args.n, params)}
    elif args.formula == "eisenberg":
        _require(args, "k")
        lower, upper = families.eisenberg_bounds(args.k)
        doc = {"lower": lower, "upper": upper}
    else:  # walsh-dim
        _require(args, "k", "q")
        dim = sum(math.comb(args.k, j) for j in range(args.q + 1))
        doc = {"dimension": dim, "entropy_bound": None}
        if 1 <= args.q <= args.k / 2:
            frac = args.q / args.k
            entropy = -frac * math.log2(frac) - (1 - frac) * math.log2(1 - frac)
            doc["entropy_bound"] = 2.0 ** (args.k * entropy)
    _emit(serialization.dumps_stable(doc), args.out)
    return 0


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValidationError(f"missing required option(s): {flags}")


def _simulate_family(args) -> montecarlo.FamilySpec:
    if args.family == "full":
        _require(args, "states")
        return montecarlo.FullFamily(args.states)
    if args.family == "rademacher":
        _require(args, "k")
        return montecarlo.RademacherFamily(args.k)
    if args.family == "walsh":
        _require(args, "k", "q")
        return montecarlo.WalshFamily(args.k, args.q)
    _require(args, "nodes")
    if getattr(args, "c", None) is not None:
        data = serialization.load_json(args.c)
        if isinstance(data, dict):
            data = data.get("c")
        return montecarlo.GraphFamily(args.nodes, tuple(float(v) for v in data))
    return montecarlo.GraphFamily(args.nodes, 0.0)


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".12g")


def _csv_line(n: int, summary: montecarlo.ExperimentSummary) -> str:
    return ",".join(
        [
            summary.family,
            str(summary.size),
            str(n),
            str(summary.replicates),
            _fmt(summary.estimate),
            _fmt(summary.stderr),
            _fmt(summary.reference),
            _fmt(summary.zscore),
        ]
    )


def _cmd_simulate(args) -> int:
    family = _simulate_family(args)
    lines = [CSV_HEADER]
    if args.multipliers is not None:
        cfg = montecarlo.ExperimentConfig(
            family=family,
            estimator="existence",
            sample_size=1,  # placeholder; the sweep sets n per point
            replicates=args.replicates,
            seed=args.seed,
        )
        mults = [float(tok) for tok in args.multipliers.split(",") if tok.strip()]
        if not mults:
            raise ValidationError("no multipliers given")
        if args.n_rule is not None:
            rule = N_RULES.get(args.n_rule.replace(" ", ""))
            if rule is None:
                raise ValidationError(
                    f"unknown --n-rule {args.n_rule!r}; supported: {sorted(set(N_RULES))}"
                )
            base = rule(montecarlo._size(family))
            for point, mult in enumerate(mults):
                n = max(1, math.ceil(mult * base))
                point_cfg = montecarlo.ExperimentConfig(
                    family=family,
                    estimator="existence",
                    sample_size=n,
                    replicates=args.replicates,
                    seed=args.seed + point,
                )
                summary = montecarlo.estimate_existence_probability(point_cfg)
                _trace(args, f"m={mult} n={n} estimate={summary.estimate}")
                lines.append(_csv_line(n, summary))
        else:
            for row in montecarlo.threshold_sweep(cfg, mults):
                _trace(args, f"m={row.multiplier} estimate={row.summary.estimate}")
                lines.append(_csv_line(row.summary.sample_size, row.summary))
    else:
        cfg = montecarlo.ExperimentConfig(
            family=family,
            estimator=args.estimator,
            sample_size=args.n,
            tail_threshold=args.tail_t,
            replicates=args.replicates,
            seed=args.seed,
        )
        if args.estimator == "existence":
            summary = montecarlo.estimate_existence_probability(cfg)
            n_out = args.n
        else:
            summary = montecarlo.estimate_nu_uniq(cfg)
            n_out = 0
        _trace(args, f"estimate={summary.estimate} stderr={summary.stderr}")
        lines.append(_csv_line(n_out, summary))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dexpfam",
        description="MLE existence certification and fitting for exponential "
        "families on finite state spaces",
    )
    parser.add_argument("--verbose", action="store_true", help="trace to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p):
        p.add_argument("--space", required=True, help="state-space JSON file")
        p.add_argument("--basis", required=True, help="basis JSON file")
        p.add_argument("--sample", required=True, help="sample file (JSON indices or labels)")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p_check = sub.add_parser("check-uniqueness", help="decide set-of-uniqueness")
    add_io(p_check)
    p_check.set_defaults(func=_cmd_check_uniqueness)

    p_closure = sub.add_parser("closure", help="compute the closure of a support")
    add_io(p_closure)
    p_closure.set_defaults(func=_cmd_check_uniqueness)

    p_fit = sub.add_parser("fit", help="maximum likelihood (genuine or reduced)")
    add_io(p_fit)
    p_fit.add_argument("--tol", type=float, default=mle.DEFAULT_TOL)
    p_fit.add_argument("--max-iter", type=int, default=mle.DEFAULT_MAX_ITER)
    p_fit.set_defaults(func=_cmd_fit)

    p_family = sub.add_parser("family", help="emit built-in space/basis JSON")
    p_family.add_argument("kind", choices=["rademacher", "walsh", "graph", "full"])
    p_family.add_argument("--k", type=int, help="cube dimension")
    p_family.add_argument("--q", type=int, help="Walsh product order")
    p_family.add_argument("--nodes", type=int, help="graph node count")
    p_family.add_argument("--states", type=int, help="state count for the full span")
    p_family.add_argument("--c", help="JSON file of per-edge coefficients")
    p_family.add_argument("--out", default=None)
    p_family.add_argument("--out-space", default=None)
    p_family.add_argument("--out-basis", default=None)
    p_family.set_defaults(func=_cmd_family)

    p_form = sub.add_parser("formulas", help="closed-form values")
    p_form.add_argument(
        "formula",
        choices=["rademacher-prob", "graph-prob", "eisenberg", "walsh-dim"],
    )
    p_form.add_argument("--k", type=int)
    p_form.add_argument("--q", type=int)
    p_form.add_argument("--n", type=int)
    p_form.add_argument("--nodes", type=int)
    p_form.add_argument("--c", help="JSON file of per-edge coefficients")
    p_form.add_argument("--out", default=None)
    p_form.set_defaults(func=_cmd_formulas)

    p_sim = sub.add_parser("simulate", help="Monte Carlo experiments")
    p_sim.add_argument("--family", required=True,
                       choices=["full", "rademacher", "walsh", "graph"])
    p_sim.add_argument("--k", type=int)
    p_sim.add_argument("--q", type=int)
    p_sim.add_argument("--states", type=int, help="state count (full family)")
    p_sim.add_argument("--nodes", type=int, help="node count (graph family)")
    p_sim.add_argument("--c", help="JSON file of per-edge coefficients")
    p_sim.add_argument("--estimator", default="existence",
                       choices=["existence", "nu-mean", "nu-tail"])
    p_sim.add_argument("--n", type=int, default=None, help="fixed sample size")
    p_sim.add_argument("--tail-t", type=float, default=None,
                       help="threshold t for the nu-tail estimator")
    p_sim.add_argument("--multipliers", default=None,
                       help="comma list; sweep n = ceil(m * base)")
    p_sim.add_argument("--n-rule", default=None,
                       help=f"base rule for sweeps, one of {sorted(set(N_RULES))}")
    p_sim.add_argument("--replicates", type=int, default=100_000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p_sim.set_defaults(func=_cmd_simulate)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
