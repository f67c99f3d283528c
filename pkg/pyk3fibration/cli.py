"""Command-line front end.

Subcommands: ``analyze``, ``autocheck``, ``enumerate``, ``lattice``, ``cyclo``,
``mw`` and ``catalog``. Every number is printed as an exact rational.
Exit codes: 0 success, 1 failed verification, 2 bad input.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .autom import (
    MonomialAutomorphism,
    WeightedAutomorphism,
    WeightedHypersurface,
    check_weierstrass_invariance,
    check_weighted_invariance,
    omega_multiplier,
    orders,
    solve_automorphisms,
    weighted_order,
)
from .catalog import catalog_table, entries, get_entry, verify_all
from .classify import (
    orbit_count_solutions,
    power_of_three_report,
    stable_pairs_table,
    trivial_action_rank_check,
)
from .cyclotomic import (
    cyclotomic_poly,
    fixed_discriminant_dimension,
    fixed_vectors_mod_p,
    phi_euler,
    trace_power,
)
from .fibration import (
    FiberConfiguration,
    WeierstrassModel,
    analysis_report,
    analyze,
    trivial_lattice,
)
from .lattice import discriminant_group, p_elementary_profile, parse_lattice_spec, signature
from .mw import HeightContext, mw_determinant, realize_height, shioda_tate, torsion_free_bound
from .utils import (
    configure_logging,
    format_extval,
    format_rational,
    get_settings,
    parse_int_list,
    to_json,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


@dataclass
class Command:
    """A parsed subcommand with validated arguments."""

    kind: str
    options: Dict[str, Any] = field(default_factory=dict)
    json: bool = False
    verbose: bool = False


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Machine readable output")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        prog="pyk3fibration",
        description="Exact checks for elliptic K3 surfaces with non-symplectic automorphisms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze_p = sub.add_parser("analyze", parents=[common], help="Classify singular fibers")
    analyze_p.add_argument("--a", required=True, help="Coefficient a(t)")
    analyze_p.add_argument("--b", required=True, help="Coefficient b(t)")

    auto_p = sub.add_parser("autocheck", parents=[common], help="Check a monomial automorphism")
    auto_p.add_argument("--a", help="Coefficient a(t)")
    auto_p.add_argument("--b", help="Coefficient b(t)")
    auto_p.add_argument("--order", type=int, required=True, help="Order N")
    auto_p.add_argument("--alpha", type=int, help="x -> z^alpha x")
    auto_p.add_argument("--beta", type=int, help="y -> z^beta y")
    auto_p.add_argument("--gamma", type=int, help="t -> z^gamma t")
    auto_p.add_argument("--solve", action="store_true", help="List all solutions of order N")
    auto_p.add_argument("--weights", help="Weights of a weighted hypersurface, e.g. 1,1,1,3")
    auto_p.add_argument("--equation", help="Weighted homogeneous equation")
    auto_p.add_argument("--exponents", help="Diagonal exponents, e.g. 0,20,1,0")
    auto_p.add_argument("--variables", default="x0,x1,x2,y", help="Coordinate names")

    enum_p = sub.add_parser("enumerate", parents=[common], help="Fiber enumerations")
    group = enum_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--prime", type=int, help="Stable pairs for a prime order")
    group.add_argument("--power-of-three", type=int, help="Order 3, 9 or 27")

    lattice_p = sub.add_parser("lattice", parents=[common], help="Lattice invariants")
    lattice_p.add_argument("spec", help="Direct sum such as U+E8+E6")
    lattice_p.add_argument("--prime", type=int, help="Prime for the p-elementary profile")

    cyclo_p = sub.add_parser("cyclo", parents=[common], help="Cyclotomic data")
    cyclo_p.add_argument("--order", type=int, required=True, help="Order N")
    cyclo_p.add_argument("--prime", type=int, help="Prime divisor of N")
    cyclo_p.add_argument("--power", type=int, default=1, help="Power of the companion matrix")

    mw_p = sub.add_parser("mw", parents=[common], help="Mordell-Weil data of a fibration")
    mw_p.add_argument("--config", help="JSON file written by 'analyze --json'")
    mw_p.add_argument("--a", help="Coefficient a(t)")
    mw_p.add_argument("--b", help="Coefficient b(t)")
    mw_p.add_argument("--rho", type=int, required=True, help="Picard number")
    mw_p.add_argument("--det-s", type=int, help="|det NS| for the height search")
    mw_p.add_argument("--max-intersection", type=int, help="Largest P.O tried")

    catalog_p = sub.add_parser("catalog", parents=[common], help="Built-in catalog")
    catalog_p.add_argument("action", choices=["list", "verify"])
    catalog_p.add_argument("--id", action="append", dest="ids", help="Entry id (repeatable)")
    catalog_p.add_argument("--parallel", action="store_true", help="Verify on a thread pool")
    return parser


def _parse_model(parser: argparse.ArgumentParser, a: Optional[str], b: Optional[str]):
    if a is None or b is None:
        parser.error("both --a and --b are required")
    try:
        return WeierstrassModel.from_strings(a, b)
    except ValueError as err:
        parser.error(str(err))


def parse_args(argv: Optional[Sequence[str]] = None) -> Command:
    """Parse and validate a command line.

    Parameters
    ----------
    argv : sequence of str, optional
        Arguments without the program name; defaults to ``sys.argv[1:]``.

    Returns
    -------
    Command
        Validated command.

    Raises
    ------
    SystemExit
        With code 2 and usage text on malformed input.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    options: Dict[str, Any] = {}

    if args.command == "analyze":
        options["model"] = _parse_model(parser, args.a, args.b)

    elif args.command == "autocheck":
        if args.order < 1:
            parser.error(f"--order must be positive, got {args.order}")
        options["order"] = args.order
        options["solve"] = args.solve
        if args.weights or args.equation or args.exponents:
            if not (args.weights and args.equation and args.exponents):
                parser.error("weighted checks need --weights, --equation and --exponents")
            try:
                weights = parse_int_list(args.weights)
                variables = [v.strip() for v in args.variables.split(",")]
                options["hypersurface"] = WeightedHypersurface.from_equation(
                    weights, args.equation, variables
                )
                options["automorphism"] = WeightedAutomorphism(
                    args.order, tuple(parse_int_list(args.exponents))
                )
            except ValueError as err:
                parser.error(str(err))
        else:
            options["model"] = _parse_model(parser, args.a, args.b)
            if not args.solve:
                if None in (args.alpha, args.beta, args.gamma):
                    parser.error("--alpha, --beta and --gamma are required unless --solve is given")
                options["automorphism"] = MonomialAutomorphism(
                    args.order, args.alpha, args.beta, args.gamma
                )

    elif args.command == "enumerate":
        options["prime"] = args.prime
        options["power_of_three"] = args.power_of_three

    elif args.command == "lattice":
        try:
            options["lattice"] = parse_lattice_spec(args.spec)
        except ValueError as err:
            parser.error(str(err))
        options["prime"] = args.prime

    elif args.command == "cyclo":
        if args.order < 1:
            parser.error(f"--order must be positive, got {args.order}")
        options.update(order=args.order, prime=args.prime, power=args.power)

    elif args.command == "mw":
        if args.config:
            try:
                with open(args.config) as f:
                    options["config"] = FiberConfiguration.from_dict(json.load(f))
            except (OSError, ValueError, KeyError) as err:
                parser.error(f"cannot read configuration {args.config}: {err}")
        else:
            options["model"] = _parse_model(parser, args.a, args.b)
        options.update(rho=args.rho, det_s=args.det_s, max_intersection=args.max_intersection)

    elif args.command == "catalog":
        options.update(action=args.action, ids=args.ids, parallel=args.parallel)

    return Command(args.command, options, json=args.json, verbose=args.verbose)


def _render(data: Dict[str, Any], lines: List[str], as_json: bool) -> str:
    return to_json(data) if as_json else "\n".join(lines)


def _run_analyze(cmd: Command) -> Tuple[int, str]:
    config = analyze(cmd.options["model"])
    report = analysis_report(config)
    lines = [f"Model: {config.model}"]
    if "minimalized" in report["flags"]:
        lines.append(f"Minimal model: {config.minimal_model}")
    lines.append("Fibers:")
    for item in config.assignments:
        count = f" x{item.place.degree}" if item.place.degree > 1 else ""
        lines.append(
            f"  {item.place.label}: {item.fiber}{count} "
            f"(v(a), v(b), v(D)) = ({format_extval(item.va)}, {format_extval(item.vb)}, {item.vd})"
        )
    lattice = report["trivial_lattice"]
    lines.append(f"Euler total: {config.euler_total}, K3: {'yes' if config.is_k3 else 'no'}")
    lines.append(
        f"Trivial lattice: {lattice['name']} (rank {lattice['rank']}, |det| {lattice['det_abs']})"
    )
    if "j_invariant" in report:
        j_values = sorted(report["j_invariant"]["values"].items())
        values = ", ".join(f"J({k}) = {v}" for k, v in j_values)
        lines.append(f"J-invariant: {report['j_invariant']['kind']}; {values}")
    return EXIT_OK, _render(report, lines, cmd.json)


def _run_autocheck(cmd: Command) -> Tuple[int, str]:
    opts = cmd.options
    if "hypersurface" in opts:
        h, g = opts["hypersurface"], opts["automorphism"]
        result = check_weighted_invariance(h, g)
        order = weighted_order(h, g)
        data = {
            "valid": result.valid,
            "equation_multiplier": result.equation_multiplier,
            "omega_multiplier": result.omega_multiplier,
            "order": order,
        }
        lines = [
            f"Weighted hypersurface of degree {h.degree} in P{tuple(h.weights)}",
            f"Invariant: {'yes' if result.valid else 'no'}",
            f"Equation multiplier: z^{result.equation_multiplier}",
            f"Omega multiplier: z^{result.omega_multiplier}",
            f"Order: {order}",
        ]
        return (EXIT_OK if result.valid else EXIT_FAILED), _render(data, lines, cmd.json)

    model = opts["model"]
    if opts["solve"]:
        solutions = solve_automorphisms(model, opts["order"])
        data = {
            "model": model.to_dict(),
            "solutions": [
                dict(g.to_dict(), omega=omega_multiplier(g), orders=list(orders(g)))
                for g in solutions
            ],
        }
        lines = [f"Monomial automorphisms of order dividing {opts['order']} for {model}:"]
        lines += [
            f"  {g}  omega z^{omega_multiplier(g)}  orders {orders(g)}" for g in solutions
        ]
        return EXIT_OK, _render(data, lines, cmd.json)

    g = opts["automorphism"]
    valid, failures = check_weierstrass_invariance(model, g)
    total, base = orders(g)
    omega = omega_multiplier(g)
    data = {
        "automorphism": g.to_dict(),
        "valid": valid,
        "failures": [str(c) for c in failures],
        "orders": [total, base],
        "omega_multiplier": omega,
    }
    lines = [f"Automorphism {g} on {model}", f"Invariant: {'yes' if valid else 'no'}"]
    lines += [f"  fails: {c}" for c in failures]
    lines += [f"Orders: total {total}, base {base}", f"Omega multiplier: z^{omega}"]
    return (EXIT_OK if valid else EXIT_FAILED), _render(data, lines, cmd.json)


def _run_enumerate(cmd: Command) -> Tuple[int, str]:
    p = cmd.options["prime"]
    if p is not None:
        table = stable_pairs_table(p)
        # no K3 automorphism has prime order p once p - 1 exceeds 21
        rank, forced = trivial_action_rank_check(p) if p - 1 <= 21 else (None, None)
        records = [
            {
                "t0": row["t0"],
                "t_inf": row["t_inf"],
                "euler": int(row["euler"]),
                "orbits": [list(s) for s in row["orbits (c1, c2)"]],
            }
            for _, row in table.iterrows()
        ]
        data = {"prime": p, "pairs": records, "rank_S": rank, "forces_trivial_action": forced}
        lines = [f"Stable pairs for p = {p}:"]
        lines += [
            f"  ({r['t0']}, {r['t_inf']})  euler {r['euler']}  (c1, c2) {r['orbits']}"
            for r in records
        ]
        if rank is not None:
            lines.append(f"rank S = {rank}, rank < p - 1: {'yes' if forced else 'no'}")
        if records:
            lines.append(f"Orbit counts for 24 - p: {sorted(orbit_count_solutions(p, 24 - p))}")
        return EXIT_OK, _render(data, lines, cmd.json)

    report = power_of_three_report(cmd.options["power_of_three"])
    lines = [f"{key}: {value}" for key, value in report.items()]
    return EXIT_OK, _render(report, lines, cmd.json)


def _run_lattice(cmd: Command) -> Tuple[int, str]:
    lattice = cmd.options["lattice"]
    group = discriminant_group(lattice)
    data: Dict[str, Any] = {
        "name": lattice.name,
        "rank": lattice.rank,
        "determinant": lattice.determinant,
        "even": lattice.is_even,
        "signature": list(signature(lattice)),
        "discriminant_group": list(group.invariant_factors),
    }
    lines = [
        f"Lattice: {lattice.name}",
        f"Rank: {lattice.rank}, determinant: {lattice.determinant}",
        f"Signature: {signature(lattice)}, even: {'yes' if lattice.is_even else 'no'}",
        f"Discriminant group: {list(group.invariant_factors) or 'trivial'}",
    ]
    p = cmd.options["prime"]
    if p is not None:
        elementary, length = p_elementary_profile(lattice, p)
        data["p_elementary"] = {"p": p, "is_p_elementary": elementary, "length": length}
        lines.append(f"{p}-elementary: {'yes' if elementary else 'no'}, length {length}")
    return EXIT_OK, _render(data, lines, cmd.json)


def _run_cyclo(cmd: Command) -> Tuple[int, str]:
    N, p, power = cmd.options["order"], cmd.options["prime"], cmd.options["power"]
    traces = [trace_power(N, k) for k in range(1, N + 1)]
    data: Dict[str, Any] = {
        "N": N,
        "phi": phi_euler(N),
        "cyclotomic_polynomial": str(cyclotomic_poly(N)),
        "traces": traces,
    }
    lines = [
        f"Phi_{N}(t) = {cyclotomic_poly(N)}",
        f"phi({N}) = {phi_euler(N)}",
        f"Traces of C^k, k = 1..{N}: {traces}",
    ]
    if p is not None:
        vectors = fixed_vectors_mod_p(N, p, power)
        dimension = fixed_discriminant_dimension(N, p, power)
        data["fixed"] = {"p": p, "power": power, "dimension": dimension, "basis": vectors}
        lines.append(f"Fixed space of C^{power} mod {p}: dimension {dimension}")
        lines += [f"  {vector}" for vector in vectors]
    return EXIT_OK, _render(data, lines, cmd.json)


def _run_mw(cmd: Command) -> Tuple[int, str]:
    opts = cmd.options
    config = opts.get("config") or analyze(opts["model"])
    ctx = HeightContext(config)
    mw_rank, trivial_rank = shioda_tate(ctx, opts["rho"])
    bound = torsion_free_bound(ctx)
    triv = trivial_lattice(config)
    data: Dict[str, Any] = {
        "trivial_lattice": triv.name,
        "trivial_rank": trivial_rank,
        "mw_rank": mw_rank,
        "torsion_free_bound": format_rational(bound),
    }
    lines = [
        f"Trivial lattice: {triv.name} (rank {trivial_rank}, |det| {triv.det_abs})",
        f"Mordell-Weil rank: {mw_rank}",
        f"Torsion free bound: {format_rational(bound)}"
        + (" (torsion free)" if bound > 0 else ""),
    ]
    code = EXIT_OK
    if opts["det_s"] is not None:
        target = mw_determinant(opts["det_s"], triv.det_abs)
        section = realize_height(ctx, target, opts["max_intersection"])
        data["height"] = {
            "target": format_rational(target),
            "realized": section is not None,
        }
        lines.append(f"Target height: {format_rational(target)}")
        if section is None:
            lines.append("  not realized")
            code = EXIT_FAILED
        else:
            corrections = [format_rational(c) for c in section.contributions]
            data["height"]["intersection_with_zero"] = section.intersection_with_zero
            data["height"]["contributions"] = corrections
            lines.append(
                f"  realized with P.O = {section.intersection_with_zero}, corrections {corrections}"
            )
    return code, _render(data, lines, cmd.json)


def _run_catalog(cmd: Command) -> Tuple[int, str]:
    opts = cmd.options
    if opts["action"] == "list":
        if opts["ids"]:
            selected = [get_entry(entry_id) for entry_id in opts["ids"]]
        else:
            selected = list(entries())
        data = {"entries": [entry.to_dict() for entry in selected]}
        table = catalog_table()
        table = table[table["id"].isin([entry.id for entry in selected])]
        return EXIT_OK, _render(data, [table.to_string(index=False)], cmd.json)

    summary = verify_all(parallel=opts["parallel"], ids=opts["ids"])
    lines = [summary.table().to_string(index=False)] if summary.reports else []
    lines.append(
        f"{len(summary.reports)} entries, {len(summary.flagged)} flagged discrepancies, "
        f"{len(summary.failed)} failures"
    )
    for report in summary.reports:
        for name, result in report.checks.items():
            if result.status == "fail":
                lines.append(f"  {report.entry_id} {name}: {result.detail}")
    return summary.exit_code, _render(summary.to_dict(), lines, cmd.json)


_HANDLERS = {
    "analyze": _run_analyze,
    "autocheck": _run_autocheck,
    "enumerate": _run_enumerate,
    "lattice": _run_lattice,
    "cyclo": _run_cyclo,
    "mw": _run_mw,
    "catalog": _run_catalog,
}


def run(cmd: Command) -> Tuple[int, str]:
    """Dispatch a command.

    Returns
    -------
    tuple
        ``(exit code, output text)``. Input errors raised while running
        (for example an Euler sum other than 24) give exit code 2.
    """
    try:
        return _HANDLERS[cmd.kind](cmd)
    except ValueError as err:
        logger.debug(f"{cmd.kind} failed: {err}")
        return EXIT_INPUT, f"Error: {err}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cmd = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        level = "DEBUG" if cmd.verbose else get_settings()["log_level"]
    except ValueError as err:
        print(f"Error: {err}", file=sys.stderr)
        return EXIT_INPUT
    configure_logging(level)
    code, output = run(cmd)
    stream = sys.stderr if code == EXIT_INPUT else sys.stdout
    print(output, file=stream)
    return code
