"""
Command-line front end.

Exit codes: 0 ok, 1 invalid input, 2 bad flags, 3 projection failure,
4 star-decomposition failure, 5 zero-probability evidence.
"""

from __future__ import annotations

import argparse
import sys

from . import formats
from .distribution import (
    MAX_RANDOM_VARIABLES,
    ZeroProbabilityEvidence,
    marginal,
    posterior,
    random_table,
    triplet_stats,
    validate,
)
from .search import SearchOptions, branch_and_bound, chow_liu, greedy
from .star import StarDegenerate, StarError, star_posterior, star_residual, star_solve
from .structure import (
    ProjectionError,
    direct_weight_sum,
    i_divergence,
    log_score,
    model_joint,
    project_parameters,
    quadratic_score,
    spherical_score,
)
from .weights import build_catalog

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FLAGS = 2
EXIT_PROJECTION = 3
EXIT_STAR = 4
EXIT_EVIDENCE = 5


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_table(path):
    try:
        return formats.read_table(path)
    except (OSError, formats.FormatError) as exc:
        raise CLIError(EXIT_INVALID, f"cannot read table {path}: {exc}") from None


def _load_structure(path):
    try:
        return formats.read_structure(path)
    except (OSError, formats.FormatError, ValueError) as exc:
        raise CLIError(EXIT_INVALID, f"cannot read structure {path}: {exc}") from None


def _project(table, topology, catalog=None):
    try:
        return project_parameters(table, topology, catalog)
    except ProjectionError as exc:
        raise CLIError(EXIT_PROJECTION, f"projection failed: {exc}") from None


def _model_for(table, variables, topology, model):
    if list(variables) != list(table.variables):
        raise CLIError(EXIT_INVALID, "structure and table are over different variables")
    return model if model is not None else _project(table, topology)


def _parse_evidence(text: str) -> dict:
    ev = {}
    if not text:
        return ev
    for item in text.split(","):
        name, sep, val = item.partition("=")
        name = name.strip()
        val = val.strip().lower()
        if not sep or val not in ("0", "1", "true", "false"):
            raise CLIError(EXIT_FLAGS, f"bad evidence item {item!r}; use name=0 or name=1")
        if name in ev:
            raise CLIError(EXIT_FLAGS, f"variable {name!r} assigned twice in evidence")
        ev[name] = val in ("1", "true")
    return ev


def cmd_gen(args) -> int:
    if not 1 <= args.n <= MAX_RANDOM_VARIABLES:
        args.parser.error(f"--n must be between 1 and {MAX_RANDOM_VARIABLES}")
    if args.min_mass < 0:
        args.parser.error("--min-mass must be nonnegative")
    if not 0 <= args.seed < 1 << 64:
        args.parser.error("--seed must be a 64-bit unsigned integer")
    table = random_table(args.n, args.seed, args.min_mass)
    _emit(formats.table_to_text(table), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        table = formats.read_table(args.input, check=False)
    except (OSError, formats.FormatError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    problems = validate(table)
    if problems:
        for p in problems:
            print(f"violation: {p}")
        return EXIT_INVALID
    print(f"ok: {table.n} variables")
    return EXIT_OK


def cmd_fit(args) -> int:
    table = _load_table(args.input)
    if table.n < 2:
        raise CLIError(EXIT_INVALID, "fitting needs at least two variables")
    catalog = build_catalog(table)
    if args.method == "greedy":
        report = greedy(catalog, SearchOptions(mode=args.mode))
    elif args.method == "chow-liu":
        report = chow_liu(catalog)
    else:
        report = branch_and_bound(catalog, SearchOptions(mode="connected", node_budget=args.budget))
    model = _project(table, report.topology, catalog)
    optimal = report.optimal if args.method == "exact" else False
    search = {
        "method": args.method,
        "mode": args.mode if args.method == "greedy" else "connected",
        "nodes_expanded": report.nodes_expanded,
        "nodes_pruned": report.nodes_pruned,
        "greedy_iterations": report.greedy_iterations,
        "optimal": optimal,
    }
    text = formats.structure_to_text(table.variables, report.topology, model, search)
    if args.out:
        formats.write_structure(args.out, text)
    s = model.scores
    print(
        f"method={args.method} weight_sum={s.weight_sum:.6f} log_score={s.log_score:.6f} "
        f"i_divergence={s.i_divergence:.6f} nodes_expanded={report.nodes_expanded} "
        f"optimal={str(optimal).lower()}"
    )
    return EXIT_OK


def cmd_score(args) -> int:
    table = _load_table(args.input)
    variables, topology, model = _load_structure(args.structure)
    model = _model_for(table, variables, topology, model)
    approx = model_joint(model)
    ws = direct_weight_sum(table, topology)
    print(f"log_score={log_score(table, approx):.6f}")
    print(f"i_divergence={i_divergence(table, approx):.6f}")
    print(f"weight_sum={ws:.6f}")
    print(f"quadratic_score={quadratic_score(table, approx):.6f}")
    print(f"spherical_score={spherical_score(table, approx):.6f}")
    return EXIT_OK


def cmd_star(args) -> int:
    table = _load_table(args.input)
    names = [v.strip() for v in args.vars.split(",")]
    if len(names) != 3 or len(set(names)) != 3:
        raise CLIError(EXIT_FLAGS, "--vars needs three distinct variable names")
    unknown = [v for v in names if v not in table.variables]
    if unknown:
        raise CLIError(EXIT_INVALID, f"unknown variables {unknown}")
    stats = triplet_stats(table, *names)
    print("stats p1={:.6f} p2={:.6f} p3={:.6f} p12={:.6f} p13={:.6f} p23={:.6f} p123={:.6f}".format(
        *stats.as_tuple()))
    try:
        params = star_solve(stats)
    except StarDegenerate as exc:
        raise CLIError(EXIT_STAR, f"degenerate: {exc}") from None
    except StarError as exc:
        raise CLIError(EXIT_STAR, f"no real solution: {exc}") from None
    print(f"w={params.w:.6f}")
    print("u=({:.6f}, {:.6f}, {:.6f})".format(*params.u))
    print("v=({:.6f}, {:.6f}, {:.6f})".format(*params.v))
    print(f"proper={str(params.proper).lower()}")
    print(f"residual={star_residual(params, stats):.3e}")
    return EXIT_OK


def cmd_query(args) -> int:
    table = _load_table(args.input)
    variables, topology, model = _load_structure(args.structure)
    model = _model_for(table, variables, topology, model)
    ev = _parse_evidence(args.evidence)
    names = list(variables)
    for v in list(ev) + [args.target]:
        if v not in names:
            raise CLIError(EXIT_INVALID, f"unknown variable {v!r}")
    if args.target in ev:
        raise CLIError(EXIT_FLAGS, "target is part of the evidence")
    approx = model_joint(model)
    try:
        value = posterior(approx, ev, args.target)
    except ZeroProbabilityEvidence:
        raise CLIError(EXIT_EVIDENCE, "evidence has zero probability under the model") from None
    cond = ",".join(f"{k}={int(v)}" for k, v in ev.items())
    print(f"P({args.target}=1 | {cond}) = {value:.6f}")
    if len(topology.components) == 1 and topology.components[0].kind == "triple" and len(names) == 3:
        members = list(topology.components[0].members)
        stats = triplet_stats(marginal(approx, members), *members)
        try:
            params = star_solve(stats)
        except StarError as exc:
            print(f"star route: unavailable ({exc})")
            return EXIT_OK
        via_star = star_posterior(params, ev, args.target, names=members)
        gap = abs(via_star - value)
        if gap > 1e-9:
            raise CLIError(EXIT_INVALID, f"star route disagrees with the joint by {gap:.3e}")
        print(f"star route = {via_star:.6f} (agreement {gap:.1e})")
    return EXIT_OK


def dot_text(topology) -> str:
    """DOT digraph: observables as ellipses, one auxiliary node per triple."""
    observables = []
    seen = set()
    for v in list(topology.roots) + [x for c in topology.components for x in c.members]:
        if v not in seen:
            seen.add(v)
            observables.append(v)
    lines = ["digraph tree_decomposable {"]
    for v in observables:
        lines.append(f'  "{v}" [shape=ellipse];')
    aux = 0
    edges = []
    for c in topology.components:
        if c.kind == "triple":
            aux += 1
            w = f"W{aux}"
            lines.append(f'  "{w}" [shape=circle, style=dashed];')
            edges.extend((w, m) for m in c.members)
        else:
            edges.append((c.parent, c.children[0]))
    for a, b in edges:
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args) -> int:
    _variables, topology, _model = _load_structure(args.structure)
    _emit(dot_text(topology), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treedecomp",
        description="Tree-decomposable approximations of joint distributions over binary variables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded random table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--min-mass", type=float, default=1e-6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen, parser=p)

    p = sub.add_parser("validate", help="check a table file")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate, parser=p)

    p = sub.add_parser("fit", help="search for a structure and project its parameters")
    p.add_argument("input")
    p.add_argument("--method", choices=["greedy", "exact", "chow-liu"], default="exact")
    p.add_argument("--mode", choices=["paper", "connected"], default="paper",
                   help="greedy acceptance rule (default: paper)")
    p.add_argument("--budget", type=int, default=1_000_000, help="node budget for --method exact")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit, parser=p)

    p = sub.add_parser("score", help="score a structure against a table")
    p.add_argument("input")
    p.add_argument("structure")
    p.set_defaults(func=cmd_score, parser=p)

    p = sub.add_parser("star", help="star-decompose a triplet")
    p.add_argument("input")
    p.add_argument("--vars", required=True, help="three comma-separated variable names")
    p.set_defaults(func=cmd_star, parser=p)

    p = sub.add_parser("query", help="posterior probability under a fitted structure")
    p.add_argument("input")
    p.add_argument("structure")
    p.add_argument("--evidence", default="", help="e.g. A=1,B=0")
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_query, parser=p)

    p = sub.add_parser("export-dot", help="emit a Graphviz DOT digraph")
    p.add_argument("structure")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot, parser=p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "budget", 1) < 1:
        args.parser.error("--budget must be at least 1")
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
