"""Machine- and human-readable renderings of solutions, circuits, and checks.

JSON output is deterministic: every float is rounded half-even to 9
significant digits before serialization (and negative zero normalized), so
identical inputs produce byte-identical documents across platforms.
"""

from __future__ import annotations

import json

import numpy as np

from .circuit import EquivalentCircuit, kvl_loop_sums, to_voltage_sources
from .dcopf import DcopfSolution, verify_optimality
from .network import KIND_GENERATOR, Network
from .analysis import CongestionImpact, NegativePriceReport, RecoveredPrices
from . import dcopf as _dcopf


def round9(x: float) -> float:
    """Round half-even to 9 significant digits; normalize -0.0.

    Magnitudes below 1e-12 (far under every tolerance in the package) are
    representation noise from the dual factorization and snap to zero so that
    serialized output is stable across linear-algebra builds.
    """
    v = float(f"{float(x):.9g}")
    return 0.0 if abs(v) < 1e-12 else v


def fnum(x: float) -> str:
    """Compact text rendering of a number (9 significant digits, no trailing zeros)."""
    v = round9(x)
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def dumps(doc) -> str:
    return json.dumps(_rounded(doc), indent=2) + "\n"


def _rounded(doc):
    if isinstance(doc, dict):
        return {k: _rounded(v) for k, v in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [_rounded(v) for v in doc]
    if isinstance(doc, (np.floating, float)):
        return round9(float(doc))
    if isinstance(doc, np.integer):
        return int(doc)
    return doc


# ---------------------------------------------------------------------------
# OPF solution
# ---------------------------------------------------------------------------

def solution_doc(net: Network, sol: DcopfSolution) -> dict:
    n = net.n
    p_entries, gamma_entries = [], []
    for inj in net.injectors:
        slot = inj.bus if inj.kind == KIND_GENERATOR else n + inj.bus
        p_entries.append({"bus": inj.bus, "kind": inj.kind, "value": float(sol.p[slot])})
        gamma_entries.append({
            "bus": inj.bus, "kind": inj.kind,
            "lower": float(sol.gamma[slot]), "upper": float(sol.gamma[2 * n + slot]),
        })
    return {
        "lmp": {str(i): float(sol.lmp[i]) for i in range(n)},
        "mu": [
            {"from": d.from_bus, "to": d.to_bus, "value": d.value, "mw_basis": d.mw_basis}
            for d in sol.mu
        ],
        "gamma": gamma_entries,
        "p": p_entries,
        "theta": [float(t) for t in sol.theta],
        "objective": float(sol.objective),
        "marginal": list(sol.marginal_buses(net)),
        "degenerate": sol.degenerate,
    }


def solution_table(net: Network, sol: DcopfSolution) -> str:
    marginal = set(sol.marginal_buses(net))
    flows = _dcopf.solution_flows(net, sol)
    mu_by_line = {d.line_index: d for d in sol.mu}
    lines = ["bus   lmp           marginal"]
    for b in net.buses:
        flag = "*" if b.id in marginal else ""
        lines.append(f"{b.id:<5d} {fnum(sol.lmp[b.id]):<13} {flag}".rstrip())
    lines.append("")
    lines.append("line        flow          limit         mu            mu_mw")
    for k, ln in enumerate(net.lines):
        d = mu_by_line.get(k)
        lines.append(
            f"{ln.from_bus}-{ln.to_bus:<9d} {fnum(flows[k]):<13} "
            f"{fnum(ln.flow_limit) if ln.flow_limit is not None else '-':<13} "
            f"{fnum(d.value) if d else '-':<13} {fnum(d.mw_basis) if d else '-'}"
        )
    lines.append("")
    lines.append(f"objective: {fnum(sol.objective)} $/h")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# circuit
# ---------------------------------------------------------------------------

def circuit_doc(c: EquivalentCircuit) -> dict:
    view = to_voltage_sources(c)
    return {
        "nodes": list(range(c.n_nodes)),
        "ground": c.ground,
        "offset": float(c.offset),
        "meshed": c.meshed,
        "resistors": [{"from": r.from_node, "to": r.to_node, "ohms": r.ohms} for r in c.resistors],
        "current_sources": [
            {"from": s.from_node, "to": s.to_node, "amps": s.amps} for s in c.current_sources
        ],
        "voltage_source_view": [
            {"from": e.from_node, "to": e.to_node, "volts": e.volts} for e in view.elements
        ],
    }


def netlist_lines(c: EquivalentCircuit, voltage_sources: bool = False) -> list[str]:
    out = [f"* ground node {c.ground}, price offset {fnum(c.offset)}"]
    if not c.meshed:
        out.append("* radial network: conversion valid, but the analogy is stated for meshed grids")
    if voltage_sources:
        view = to_voltage_sources(c)
        transformed = {(min(e.from_node, e.to_node), max(e.from_node, e.to_node)) for e in view.elements}
        k = 1
        for r in c.resistors:
            pair = (min(r.from_node, r.to_node), max(r.from_node, r.to_node))
            if pair not in transformed:
                out.append(f"R{k} {r.from_node} {r.to_node} {fnum(r.ohms)}")
                k += 1
        for i, e in enumerate(view.elements, start=1):
            mid = f"m{i}"
            out.append(f"V{i} {e.from_node} {mid} {fnum(e.volts)}")
            out.append(f"R{k} {mid} {e.to_node} {fnum(e.series_ohms)}")
            k += 1
    else:
        for k, r in enumerate(c.resistors, start=1):
            out.append(f"R{k} {r.from_node} {r.to_node} {fnum(r.ohms)}")
        for k, s in enumerate(c.current_sources, start=1):
            out.append(f"I{k} {s.from_node} {s.to_node} {fnum(s.amps)}")
    return out


# ---------------------------------------------------------------------------
# check report: optimality residuals + dual KCL ledger + KVL loop sums
# ---------------------------------------------------------------------------

def dual_kcl_ledger(net: Network, sol: DcopfSolution, tol: float, binding_eps: float = 1e-7):
    """Per-bus ledger of price-flow terms: inflows, outflows, residual.

    Works for uncongested solutions too (no source terms, zero flows).
    """
    n = net.n
    inflows = [[] for _ in range(n)]
    outflows = [[] for _ in range(n)]
    net_in = np.zeros(n)
    for ln in net.lines:
        cur = ln.susceptance * (sol.lmp[ln.from_bus] - sol.lmp[ln.to_bus])
        if cur > 1e-9:
            outflows[ln.from_bus].append(cur)
            inflows[ln.to_bus].append(cur)
        elif cur < -1e-9:
            outflows[ln.to_bus].append(-cur)
            inflows[ln.from_bus].append(-cur)
        net_in[ln.from_bus] -= cur
        net_in[ln.to_bus] += cur
    for d in sol.mu:
        if d.value <= binding_eps:
            continue
        lo, hi = d.export_bus, d.import_bus
        inflows[hi].append(d.value)
        outflows[lo].append(d.value)
        net_in[hi] += d.value
        net_in[lo] -= d.value
    ledger = []
    for i in range(n):
        residual = float(-net_in[i])  # sum of currents out minus sources in
        ledger.append({
            "node": i,
            "inflows": inflows[i],
            "outflows": outflows[i],
            "residual": abs(residual),
            "passed": abs(residual) <= tol,
        })
    return ledger


def check_doc(net: Network, sol: DcopfSolution, tol: float) -> dict:
    report = verify_optimality(net, sol, tol=tol)
    kcl = dual_kcl_ledger(net, sol, tol)
    loops = kvl_loop_sums(net, sol.lmp)
    return {
        "tolerance": tol,
        "optimality": [
            {"name": c.name, "value": c.value, "tol": c.tol, "passed": c.passed}
            for c in report.checks
        ],
        "kcl": kcl,
        "kvl": [
            {"loop": list(l.nodes), "terms": list(l.terms), "total": l.total,
             "passed": abs(l.total) <= tol}
            for l in loops
        ],
        "passed": report.all_passed
                  and all(e["passed"] for e in kcl)
                  and all(abs(l.total) <= tol for l in loops),
    }


def _side(terms: list[float]) -> str:
    return " + ".join(fnum(t) for t in terms) if terms else "0"


def check_text(doc: dict) -> str:
    out = [f"optimality conditions (tol {doc['tolerance']:g})"]
    for entry in doc["optimality"]:
        mark = "ok" if entry["passed"] else "FAIL"
        out.append(f"  {entry['name']:<28} {entry['value']:.3e}  {mark}")
    out.append("price-flow balance at each node (inflow = outflow)")
    for e in doc["kcl"]:
        mark = "ok" if e["passed"] else "FAIL"
        out.append(
            f"  node {e['node']}: {_side(e['inflows'])} = {_side(e['outflows'])}"
            f"  [residual {e['residual']:.1e}] {mark}"
        )
    if doc["kvl"]:
        out.append("price drops around fundamental cycles")
        for l in doc["kvl"]:
            mark = "ok" if l["passed"] else "FAIL"
            loop = "-".join(str(x) for x in l["loop"])
            terms = " + ".join(f"({fnum(t)})" for t in l["terms"])
            out.append(f"  loop {loop}: {terms} = {fnum(l['total'])}  {mark}")
    else:
        out.append("no cycles (tree network): nothing to check for loop sums")
    out.append("result: " + ("PASS" if doc["passed"] else "FAIL"))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# analysis reports
# ---------------------------------------------------------------------------

def superpose_doc(c: EquivalentCircuit, impact: CongestionImpact) -> dict:
    return {
        "ground": c.ground,
        "offset": float(c.offset),
        "sources": [
            {"from": f, "to": t, "amps": a, "min_contribution": lo, "max_contribution": hi,
             "negative_buses": list(neg)}
            for (f, t, a), lo, hi, neg in zip(
                impact.sources, impact.min_contribution, impact.max_contribution,
                impact.negative_buses)
        ],
        "contributions": [[float(x) for x in v] for v in impact.vectors],
        "totals": [float(x) for x in impact.totals],
        "lmp": [float(x) for x in impact.totals + c.offset],
    }


def superpose_text(doc: dict) -> str:
    heads = [f"source {s['from']}->{s['to']} ({fnum(s['amps'])} A)" for s in doc["sources"]]
    out = ["node  " + "".join(f"{h:<26}" for h in heads) + "total"]
    for i in range(len(doc["totals"])):
        row = f"{i:<5d} "
        for v in doc["contributions"]:
            row += f"{fnum(v[i]):<26}"
        row += fnum(doc["totals"][i])
        out.append(row)
    out.append("")
    out.append("source                 min contribution   max contribution   negative buses")
    for s in doc["sources"]:
        neg = ",".join(str(b) for b in s["negative_buses"]) or "-"
        out.append(
            f"{s['from']}->{s['to']} ({fnum(s['amps'])} A)".ljust(23)
            + f"{fnum(s['min_contribution']):<19}{fnum(s['max_contribution']):<19}{neg}"
        )
    return "\n".join(out) + "\n"


def negative_doc(rep: NegativePriceReport, lmp: np.ndarray) -> dict:
    return {
        "negative": rep.negative,
        "witnesses": list(rep.witnesses),
        "ground_is_minimum": rep.ground_is_minimum,
        "offset": rep.offset,
        "min_price": rep.min_price,
        "min_price_bus": rep.min_price_bus,
        "lmp": [float(x) for x in lmp],
    }


def negative_text(doc: dict) -> str:
    if doc["negative"]:
        buses = ", ".join(f"bus {b}" for b in doc["witnesses"])
        head = f"negative prices: YES ({buses}; lowest lmp={fnum(doc['min_price'])} at bus {doc['min_price_bus']})"
    else:
        head = f"negative prices: NO (lowest lmp={fnum(doc['min_price'])} at bus {doc['min_price_bus']})"
    tail = ("ground is at the minimum-voltage node" if doc["ground_is_minimum"]
            else "ground is NOT at the minimum-voltage node")
    return head + "\n" + tail + f" (offset {fnum(doc['offset'])})\n"


def recover_doc(res: RecoveredPrices) -> dict:
    if res.lmp is not None:
        return {"lmp": {str(i): float(v) for i, v in enumerate(res.lmp)}}
    return {"delta": [[float(x) for x in row] for row in res.delta]}


def recover_text(res: RecoveredPrices) -> str:
    if res.lmp is not None:
        out = ["bus   lmp"]
        for i, v in enumerate(res.lmp):
            out.append(f"{i:<5d} {fnum(v)}")
        return "\n".join(out) + "\n"
    out = ["pairwise price differences (row minus column); absolute level unknown"]
    n = res.delta.shape[0]
    out.append("      " + "".join(f"{j:<12d}" for j in range(n)))
    for i in range(n):
        out.append(f"{i:<5d} " + "".join(f"{fnum(res.delta[i, j]):<12}" for j in range(n)))
    return "\n".join(out) + "\n"
