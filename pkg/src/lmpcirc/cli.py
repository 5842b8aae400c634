"""Command-line front end.

    lmpcirc solve            -i net.json [-o out.json] [--format json|text]
    lmpcirc circuit          -i net.json [--voltage-sources]
    lmpcirc check            -i net.json [--tol X]
    lmpcirc superpose        -i net.json
    lmpcirc predict-negative -i net.json
    lmpcirc recover          -i limited_info.json
    lmpcirc gen --seed N -n N [--edge-prob P] [-o net.json]

Exit codes: 0 ok, 1 parse/schema error, 2 infeasible, 3 unbounded,
4 no congestion / no marginal injector (circuit undefined), 5 check failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import reports
from .analysis import LimitedInfo, congestion_impact, predict_negative_prices, recover_lmps
from .circuit import CircuitError, NoCongestion, build_circuit, solve_circuit
from .dcopf import NoMarginalInjector, OpfInfeasible, OpfUnbounded, solve_opf
from .network import NetworkError, SchemaError, generate_random_network, load_network, network_to_doc

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_INFEASIBLE = 2
EXIT_UNBOUNDED = 3
EXIT_NO_CIRCUIT = 4
EXIT_CHECK_FAILED = 5


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmpcirc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", "-i", required=True, help="input file path")
        p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--tol", type=float, default=1e-7, help="check/binding tolerance (> 0)")
        p.add_argument("--ref-bus", type=int, default=0, help="angle reference bus")

    common(sub.add_parser("solve", help="solve the OPF and report prices"))
    pc = sub.add_parser("circuit", help="convert the dual solution to a circuit")
    common(pc)
    pc.add_argument("--voltage-sources", action="store_true",
                    help="render the netlist with series voltage sources")
    common(sub.add_parser("check", help="verify optimality, node balances, loop sums"))
    common(sub.add_parser("superpose", help="per-congestion price contributions"))
    common(sub.add_parser("predict-negative", help="negative-price prediction"))
    common(sub.add_parser("recover", help="recover prices from limited information"))
    pg = sub.add_parser("gen", help="generate a random network file")
    common(pg, needs_input=False)
    pg.add_argument("--seed", type=int, required=True)
    pg.add_argument("-n", type=int, required=True, dest="n_buses", help="bus count (>= 3)")
    pg.add_argument("--edge-prob", type=float, default=0.4)
    return parser


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solved(args):
    net = load_network(args.input)
    sol = solve_opf(net, ref_bus=args.ref_bus)
    return net, sol


def _cmd_solve(args) -> int:
    net, sol = _solved(args)
    if args.format == "text":
        _emit(args, reports.solution_table(net, sol))
    else:
        _emit(args, reports.dumps(reports.solution_doc(net, sol)))
        if args.output:
            sys.stdout.write(reports.solution_table(net, sol))
    return EXIT_OK


def _cmd_circuit(args) -> int:
    net, sol = _solved(args)
    circ = build_circuit(net, sol, binding_eps=args.tol)
    if args.format == "text":
        _emit(args, "\n".join(reports.netlist_lines(circ, voltage_sources=args.voltage_sources)) + "\n")
    else:
        _emit(args, reports.dumps(reports.circuit_doc(circ)))
        if args.output:
            sys.stdout.write("\n".join(reports.netlist_lines(circ, voltage_sources=args.voltage_sources)) + "\n")
    return EXIT_OK


def _cmd_check(args) -> int:
    net, sol = _solved(args)
    doc = reports.check_doc(net, sol, args.tol)
    if args.format == "text":
        _emit(args, reports.check_text(doc))
    else:
        _emit(args, reports.dumps(doc))
    return EXIT_OK if doc["passed"] else EXIT_CHECK_FAILED


def _cmd_superpose(args) -> int:
    net, sol = _solved(args)
    circ = build_circuit(net, sol, binding_eps=args.tol)
    doc = reports.superpose_doc(circ, congestion_impact(circ))
    _emit(args, reports.superpose_text(doc) if args.format == "text" else reports.dumps(doc))
    return EXIT_OK


def _cmd_predict_negative(args) -> int:
    net, sol = _solved(args)
    circ = build_circuit(net, sol, binding_eps=args.tol)
    rep = predict_negative_prices(circ, solve_circuit(circ))
    doc = reports.negative_doc(rep, sol.lmp)
    _emit(args, reports.negative_text(doc) if args.format == "text" else reports.dumps(doc))
    return EXIT_OK


def _load_limited_info(path) -> LimitedInfo:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("limited-info document must be an object")
    unknown = set(doc) - {"topology", "sources", "ground", "offset"}
    if unknown:
        raise SchemaError(f"limited info: unknown key(s) {sorted(unknown)}")
    topo = doc.get("topology")
    if not isinstance(topo, dict) or not isinstance(topo.get("lines"), list):
        raise SchemaError("limited info: topology.lines array is required")
    unknown = set(topo) - {"lines"}
    if unknown:
        raise SchemaError(f"topology: unknown key(s) {sorted(unknown)}")
    lines = []
    for k, item in enumerate(topo["lines"]):
        try:
            lines.append((int(item["from"]), int(item["to"]), float(item["susceptance"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"topology.lines[{k}]: needs integer from/to and numeric susceptance") from exc
        unknown = set(item) - {"from", "to", "susceptance"}
        if unknown:
            raise SchemaError(f"topology.lines[{k}]: unknown key(s) {sorted(unknown)}")
    sources = []
    for k, item in enumerate(doc.get("sources", [])):
        try:
            sources.append((int(item["from"]), int(item["to"]), float(item["mu"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"sources[{k}]: needs integer from/to and numeric mu") from exc
        unknown = set(item) - {"from", "to", "mu"}
        if unknown:
            raise SchemaError(f"sources[{k}]: unknown key(s) {sorted(unknown)}")
    nodes = {e for ln in lines for e in ln[:2]}
    if not lines or sorted(nodes) != list(range(max(nodes) + 1)):
        raise SchemaError("topology must use contiguous 0-based node ids")
    ground = doc.get("ground")
    offset = doc.get("offset")
    if ground is not None and not isinstance(ground, int):
        raise SchemaError("ground must be an integer bus id")
    try:
        return LimitedInfo(
            n_nodes=max(nodes) + 1, lines=tuple(lines), sources=tuple(sources),
            ground=ground, offset=None if offset is None else float(offset),
        )
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def _cmd_recover(args) -> int:
    info = _load_limited_info(args.input)
    res = recover_lmps(info)
    _emit(args, reports.recover_text(res) if args.format == "text" else reports.dumps(reports.recover_doc(res)))
    return EXIT_OK


def _cmd_gen(args) -> int:
    net = generate_random_network(args.seed, args.n_buses, args.edge_prob)
    _emit(args, reports.dumps(network_to_doc(net)))
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "circuit": _cmd_circuit,
    "check": _cmd_check,
    "superpose": _cmd_superpose,
    "predict-negative": _cmd_predict_negative,
    "recover": _cmd_recover,
    "gen": _cmd_gen,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.tol is not None and args.tol <= 0:
        print("error: --tol must be > 0", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        return _COMMANDS[args.command](args)
    except (SchemaError, NetworkError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OpfInfeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        diag = exc.diagnostics
        if diag:
            print(
                f"  capacity {diag['total_generation_capacity']:g} MW vs fixed demand "
                f"{diag['total_fixed_demand']:g} MW; deficit buses {diag['deficit_buses']}; "
                f"limited boundary lines {[(c['from'], c['to']) for c in diag['cut_lines']]}",
                file=sys.stderr,
            )
        return EXIT_INFEASIBLE
    except OpfUnbounded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNBOUNDED
    except (NoCongestion, NoMarginalInjector) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CIRCUIT
    except CircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
