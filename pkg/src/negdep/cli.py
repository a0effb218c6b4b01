"""Command-line front end.

Subcommands: generate (point sets), analyze (exact dependence queries),
variance (replication studies), reproduce-paper (the built-in acceptance
suite).  Exit codes: 0 success / no violation, 1 violation found,
2 usage error, 3 enumeration budget exceeded.

Anchors and generators arrive as decimal or fraction strings and are parsed
into exact rationals; binary floats never enter the exact path.  Every
file output is accompanied by a <path>.manifest.json recording the command,
arguments, seed, tool version and wall-clock duration; reruns with equal
arguments produce byte-identical data files.
"""

import argparse
import csv
import io
import json
import sys
import time

from . import __version__
from .analyzer import (
    AnchoredBox,
    BudgetExceededError,
    HypothesisViolatedError,
    UnsupportedSchemeError,
    copula_equality_check,
    coordinate_independence_check,
    no_shift_mass,
    nuod_scan,
    pair_box_prob,
    pair_marginal_prob,
    report_to_json_dict,
    resolve_budget,
    scan_pairs_rows,
    shift_only_conditional,
    triple_distinguisher,
)
from .exact import format_rational, parse_rational
from .schemes import SchemeSpec, spec_to_dict
from .variance import (
    get_integrand,
    load_batch_config,
    result_csv_header,
    result_csv_row,
    result_to_json_dict,
    run_variance_batch,
    variance_compare,
)
from .rng import RngStream

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

_SCHEME_ALIASES = {
    "stratified": "stratified1d",
    "lhs": "lhs",
    "patterson": "patterson",
    "rsj": "rsj_lattice",
}
_SHIFT_ALIASES = {"grid": "grid", "torus": "continuous_torus", "none": "none"}


def _parse_generator(text):
    if text is None or text == "random":
        return "random"
    return tuple(int(v) for v in text.split(","))


def _parse_anchor(text, dim):
    vals = tuple(parse_rational(v) for v in text.split(","))
    if len(vals) != dim:
        raise ValueError(f"anchor has {len(vals)} coordinates, expected {dim}")
    return AnchoredBox(vals)


def _spec_from_args(args) -> SchemeSpec:
    return SchemeSpec(
        kind=_SCHEME_ALIASES[args.scheme],
        n=args.n,
        dim=args.dim,
        generator=_parse_generator(getattr(args, "generator", None)),
        shift=_SHIFT_ALIASES[getattr(args, "shift", "grid")],
        jitter=getattr(args, "jitter", "on") == "on",
    )


def _write_with_manifest(path: str, data: str, argv, seed, t0, extra=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(data)
    manifest = {
        "command": "negdep " + " ".join(argv),
        "argv": list(argv),
        "seed": seed,
        "tool_version": __version__,
        "outputs": [path],
        "duration_seconds": time.perf_counter() - t0,
    }
    if extra:
        manifest.update(extra)
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)


def _emit(args, payload: dict, argv, seed, t0) -> None:
    text = json.dumps(payload, sort_keys=True, indent=1)
    out = getattr(args, "out", None)
    if out:
        _write_with_manifest(out, text + "\n", argv, seed, t0)
    else:
        print(text)


# -- generate ------------------------------------------------------------------


def _cmd_generate(args, argv, t0) -> int:
    from .samplers import generate, point_set_to_csv, point_set_to_json

    spec = _spec_from_args(args)
    ps = generate(spec, args.seed)
    data = point_set_to_csv(ps) if args.format == "csv" else point_set_to_json(ps) + "\n"
    if args.out:
        _write_with_manifest(args.out, data, argv, args.seed, t0,
                             extra={"scheme": spec_to_dict(spec)})
    else:
        sys.stdout.write(data)
    return EXIT_OK


# -- analyze -------------------------------------------------------------------


def _cmd_analyze(args, argv, t0) -> int:
    budget = resolve_budget(args.budget)
    threads = args.threads
    sub = args.analysis

    if sub == "pairprob":
        spec = _spec_from_args(args)
        Q = _parse_anchor(args.Q, spec.dim)
        R = _parse_anchor(args.R, spec.dim)
        joint = pair_box_prob(spec, Q, R, budget=budget, threads=threads)
        prodv = (pair_marginal_prob(spec, Q, 0, budget=budget, threads=threads)
                 * pair_marginal_prob(spec, R, 1, budget=budget, threads=threads))
        payload = {
            "scheme": spec_to_dict(spec),
            "Q": [format_rational(a) for a in Q.anchor],
            "R": [format_rational(a) for a in R.anchor],
            "joint": format_rational(joint),
            "joint_decimal": float(joint),
            "product": format_rational(prodv),
            "product_decimal": float(prodv),
            "violation": joint > prodv,
        }
        _emit(args, payload, argv, None, t0)
        return EXIT_OK

    if sub == "nuod":
        spec = _spec_from_args(args)
        report = nuod_scan(spec, args.grid, budget=budget, threads=threads)
        if args.pairs_csv:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["Q", "R", "joint", "product", "violation"])
            for Q, R, joint, prodv, bad in scan_pairs_rows(
                spec, args.grid, budget=budget, threads=threads
            ):
                writer.writerow([
                    ";".join(format_rational(a) for a in Q.anchor),
                    ";".join(format_rational(a) for a in R.anchor),
                    format_rational(joint), format_rational(prodv), bad,
                ])
            _write_with_manifest(args.pairs_csv, buf.getvalue(), argv, None, t0)
        _emit(args, report_to_json_dict(report), argv, None, t0)
        return EXIT_OK if report.ok else EXIT_VIOLATION

    if sub == "copula":
        spec = _spec_from_args(args)
        cc = copula_equality_check(args.n, args.dim, spec=spec, budget=budget, threads=threads)
        payload = {
            "scheme": spec_to_dict(spec),
            "equal": cc.equal,
            "max_discrepancy": format_rational(cc.max_discrepancy),
        }
        _emit(args, payload, argv, None, t0)
        return EXIT_OK

    if sub == "independence":
        spec = _spec_from_args(args)
        rep = coordinate_independence_check(args.n, args.dim, spec=spec,
                                            budget=budget, threads=threads)
        payload = {"scheme": spec_to_dict(spec), "independent": rep.ok}
        if rep.witness is not None:
            payload["witness"] = {
                "subset": list(rep.witness["subset"]),
                "cells": [list(c) for c in rep.witness["cells"]],
                "joint": format_rational(rep.witness["joint"]),
                "product": format_rational(rep.witness["product"]),
            }
        _emit(args, payload, argv, None, t0)
        return EXIT_OK

    if sub == "triple":
        a = tuple(int(v) for v in args.a.split(","))
        b = tuple(int(v) for v in args.b.split(","))
        lat, lhsc = triple_distinguisher(args.n, args.dim, a, b, budget=budget)
        payload = {"n": args.n, "dim": args.dim, "a": list(a), "b": list(b),
                   "lattice": lat, "lhs": lhsc}
        _emit(args, payload, argv, None, t0)
        return EXIT_OK

    if sub == "ablation":
        n, dim = args.n, args.dim
        eps = parse_rational(args.epsilon) if args.epsilon else None
        payload = {"n": n, "dim": dim}

        mass = no_shift_mass(n, dim, budget=budget)
        payload["no_shift"] = {
            "first_cell_mass": format_rational(mass),
            "uniform_would_give": format_rational(parse_rational(f"1/{n**dim}")),
            "sampling_scheme": mass == parse_rational(f"1/{n**dim}"),
        }

        from fractions import Fraction
        eps_val = eps if eps is not None else Fraction(1, 2 * n)
        so_spec = SchemeSpec("rsj_lattice", n, dim, shift="continuous_torus", jitter=False)
        cond = shift_only_conditional(so_spec, eps_val, budget=budget)
        lam_q = 1 - eps_val / 2
        payload["fixed_distance"] = {
            "epsilon": format_rational(eps_val),
            "conditional": format_rational(cond),
            "box_volume": format_rational(lam_q),
            "negatively_dependent": cond <= lam_q,
        }

        gen = _parse_generator(args.generator) if args.generator else (1,) * dim
        fg_spec = SchemeSpec("rsj_lattice", n, dim, generator=gen)
        Q = AnchoredBox((Fraction(n - 2, n),) * dim)
        R = AnchoredBox((Fraction(n - 1, n),) * dim)
        joint = pair_box_prob(fg_spec, Q, R, budget=budget, threads=threads)
        prodv = (pair_marginal_prob(fg_spec, Q, 0, budget=budget, threads=threads)
                 * pair_marginal_prob(fg_spec, R, 1, budget=budget, threads=threads))
        payload["fixed_generator"] = {
            "generator": list(gen),
            "Q": [format_rational(a) for a in Q.anchor],
            "R": [format_rational(a) for a in R.anchor],
            "joint": format_rational(joint),
            "product": format_rational(prodv),
            "violation": joint > prodv,
        }
        _emit(args, payload, argv, None, t0)
        return EXIT_OK

    raise ValueError(f"unknown analysis {sub!r}")


# -- variance ------------------------------------------------------------------


def _results_to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result_csv_header())
    for res in results:
        writer.writerow(result_csv_row(res))
    return buf.getvalue()


def _cmd_variance(args, argv, t0) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = load_batch_config(fh.read())
        if args.replications:
            cfg["replications"] = args.replications
        if args.seed is not None:
            cfg["seed"] = args.seed
        results = run_variance_batch(cfg)
    else:
        spec = _spec_from_args(args)
        f = get_integrand(args.integrand, spec.dim)
        reps = args.replications or 1000
        results = [variance_compare(f, spec, reps, RngStream(args.seed or 0),
                                    threads=args.threads)]

    payload = {"results": [result_to_json_dict(r) for r in results]}
    if args.out_csv:
        _write_with_manifest(args.out_csv, _results_to_csv(results), argv,
                             args.seed, t0)
    if args.out_json:
        _write_with_manifest(args.out_json, json.dumps(payload, sort_keys=True, indent=1) + "\n",
                             argv, args.seed, t0)
    if not args.out_csv and not args.out_json:
        print(json.dumps(payload, sort_keys=True, indent=1))
    failed = [r for r in results if not r.dominates and not r.biased_capable]
    return EXIT_VIOLATION if failed else EXIT_OK


# -- reproduce-paper -------------------------------------------------------------


def _cmd_reproduce(args, argv, t0) -> int:
    from .acceptance import run_acceptance

    ids = args.criteria.split(",") if args.criteria else None
    ok = run_acceptance(ids=ids)
    return EXIT_OK if ok else EXIT_VIOLATION


# -- parser -----------------------------------------------------------------------


def _add_spec_flags(p, need_seed=False):
    p.add_argument("--scheme", required=True, choices=sorted(_SCHEME_ALIASES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--generator", default=None,
                   help="comma-separated field integers, or 'random'")
    p.add_argument("--shift", choices=sorted(_SHIFT_ALIASES), default="grid")
    p.add_argument("--jitter", choices=["on", "off"], default="on")
    if need_seed:
        p.add_argument("--seed", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="negdep",
        description="Negatively dependent sampling schemes: generation, exact "
                    "dependence analysis, and variance experiments.",
    )
    ap.add_argument("--version", action="version", version=f"negdep {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a point set")
    _add_spec_flags(g, need_seed=True)
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    g.add_argument("--out", default=None, help="output path (stdout if omitted)")

    a = sub.add_parser("analyze", help="exact dependence analysis")
    asub = a.add_subparsers(dest="analysis", required=True)

    def common_analysis_flags(p):
        p.add_argument("--budget", type=int, default=None,
                       help="enumeration term budget (default ND_BUDGET or 1e8)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=None)

    pp = asub.add_parser("pairprob", help="joint anchored-box probability")
    _add_spec_flags(pp)
    pp.add_argument("--Q", required=True, help="comma-separated anchor, e.g. 0.6,0.6")
    pp.add_argument("--R", required=True)
    common_analysis_flags(pp)

    nu = asub.add_parser("nuod", help="scan joint <= product over a box grid")
    _add_spec_flags(nu)
    nu.add_argument("--grid", type=int, required=True, help="anchors at k/grid")
    nu.add_argument("--pairs-csv", default=None,
                    help="also write one CSV row per probed (Q, R) pair")
    common_analysis_flags(nu)

    cp = asub.add_parser("copula", help="compare pair cell law with lhs")
    _add_spec_flags(cp)
    common_analysis_flags(cp)

    ind = asub.add_parser("independence", help="coordinate factorization check")
    _add_spec_flags(ind)
    common_analysis_flags(ind)

    tr = asub.add_parser("triple", help="containment counts for a cell-vector pair")
    tr.add_argument("--n", type=int, required=True)
    tr.add_argument("--dim", type=int, required=True)
    tr.add_argument("--a", required=True, help="comma-separated cells")
    tr.add_argument("--b", required=True)
    common_analysis_flags(tr)

    ab = asub.add_parser("ablation", help="run the minimal-randomness probes")
    ab.add_argument("--n", type=int, required=True)
    ab.add_argument("--dim", type=int, required=True)
    ab.add_argument("--epsilon", default=None, help="distance bound (default 1/(2n))")
    ab.add_argument("--generator", default=None)
    common_analysis_flags(ab)

    v = sub.add_parser("variance", help="replication variance study")
    v.add_argument("--config", default=None, help="JSON batch config path")
    v.add_argument("--scheme", choices=sorted(_SCHEME_ALIASES))
    v.add_argument("--n", type=int)
    v.add_argument("--dim", type=int, default=1)
    v.add_argument("--generator", default=None)
    v.add_argument("--shift", choices=sorted(_SHIFT_ALIASES), default="grid")
    v.add_argument("--jitter", choices=["on", "off"], default="on")
    v.add_argument("--integrand", default="additive")
    v.add_argument("--replications", type=int, default=None)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--out-csv", default=None)
    v.add_argument("--out-json", default=None)

    r = sub.add_parser("reproduce-paper", help="run the built-in acceptance suite")
    r.add_argument("--criteria", default=None, help="comma-separated ids, e.g. 1,3,8")

    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)

    t0 = time.perf_counter()
    try:
        if args.command == "generate":
            return _cmd_generate(args, argv, t0)
        if args.command == "analyze":
            return _cmd_analyze(args, argv, t0)
        if args.command == "variance":
            if not args.config and not (args.scheme and args.n):
                print("error: provide --config or --scheme/--n", file=sys.stderr)
                return EXIT_USAGE
            return _cmd_variance(args, argv, t0)
        if args.command == "reproduce-paper":
            return _cmd_reproduce(args, argv, t0)
        print(f"error: unknown command {args.command!r}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UnsupportedSchemeError, HypothesisViolatedError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
