"""Equivalent DC circuit of an OPF dual solution.

Lines become resistors (ohms = 1/susceptance), each binding flow limit becomes
an ideal current source in parallel with its line's resistor (amps = the
angle-basis congestion price, injected at the import end, which is
generically the higher-price end), ground sits at the cheapest marginal injector's bus, and
node voltages plus the ground offset reproduce the bus prices.

The source orientation follows the binding side of the flow limit (the sign
structure of the angle-stationarity block): that is what makes the nodal solve
reproduce the prices exactly, even on instances where congestion pushes power
toward the lower-priced end.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dcopf import DcopfSolution, cheapest_marginal
from .network import Network

BINDING_EPS = 1e-7


class CircuitError(Exception):
    pass


class NoCongestion(CircuitError):
    """No binding flow limit: prices are uniform and there is no source to build."""


@dataclass(frozen=True)
class Resistor:
    from_node: int
    to_node: int
    ohms: float


@dataclass(frozen=True)
class CurrentSource:
    """Injects ``amps`` into to_node and withdraws it from from_node."""

    from_node: int
    to_node: int
    amps: float


@dataclass(frozen=True)
class SeriesVoltageSource:
    """Voltage source (+ terminal toward to_node) in series with the line's resistor."""

    from_node: int
    to_node: int
    volts: float
    series_ohms: float


@dataclass(frozen=True)
class EquivalentCircuit:
    n_nodes: int
    resistors: tuple[Resistor, ...]
    current_sources: tuple[CurrentSource, ...]
    ground: int
    offset: float
    meshed: bool = True

    def conductance_matrix(self) -> np.ndarray:
        g = np.zeros((self.n_nodes, self.n_nodes))
        for r in self.resistors:
            w = 1.0 / r.ohms
            g[r.from_node, r.to_node] -= w
            g[r.to_node, r.from_node] -= w
            g[r.from_node, r.from_node] += w
            g[r.to_node, r.to_node] += w
        return g

    def injections(self, which: int | None = None) -> np.ndarray:
        """Net source current into each node (all sources, or a single one)."""
        j = np.zeros(self.n_nodes)
        sources = self.current_sources if which is None else (self.current_sources[which],)
        for s in sources:
            j[s.to_node] += s.amps
            j[s.from_node] -= s.amps
        return j


@dataclass(frozen=True)
class CircuitSolution:
    voltages: np.ndarray
    branch_currents: tuple[tuple[int, int, float], ...]
    per_source_voltages: tuple[np.ndarray, ...] | None = None


@dataclass(frozen=True)
class VoltageSourceView:
    base: EquivalentCircuit
    elements: tuple[SeriesVoltageSource, ...]


@dataclass(frozen=True)
class LoopSum:
    nodes: tuple[int, ...]          # closed walk, first node repeated implicitly
    terms: tuple[float, ...]        # consecutive potential drops around the walk
    total: float


def build_circuit(net: Network, sol: DcopfSolution, *, binding_eps: float = BINDING_EPS) -> EquivalentCircuit:
    """Convert a congested optimal solution into its equivalent circuit."""
    sources = []
    for dual in sol.mu:
        if dual.value <= binding_eps:
            continue
        sources.append(CurrentSource(dual.export_bus, dual.import_bus, dual.value))
    if not sources:
        raise NoCongestion(
            "no binding flow limit: every bus price equals the cheapest marginal "
            "cost, so the network has no congestion source to convert"
        )
    ground, offset = cheapest_marginal(sol, net)
    resistors = tuple(Resistor(ln.from_bus, ln.to_bus, 1.0 / ln.susceptance) for ln in net.lines)
    return EquivalentCircuit(
        n_nodes=net.n, resistors=resistors, current_sources=tuple(sources),
        ground=ground, offset=offset, meshed=len(net.lines) >= net.n,
    )


def circuit_from_parts(n_nodes, lines, sources, ground, offset, *, require_source: bool = True) -> EquivalentCircuit:
    """Assemble a circuit directly from (from, to, susceptance) lines and
    (from, to, amps) sources; used by recovery and by direct constructions."""
    resistors = []
    pairs = set()
    for i, j, sus in lines:
        if sus <= 0:
            raise CircuitError(f"line {i}-{j}: susceptance must be > 0")
        pairs.add((min(i, j), max(i, j)))
        resistors.append(Resistor(i, j, 1.0 / sus))
    for i, j, amps in sources:
        if amps <= 0:
            raise CircuitError(f"source {i}->{j}: magnitude must be > 0")
        if (min(i, j), max(i, j)) not in pairs:
            raise CircuitError(f"source {i}->{j} has no parallel line in the topology")
    if require_source and not sources:
        raise NoCongestion("a circuit needs at least one source")
    if not 0 <= ground < n_nodes:
        raise CircuitError(f"ground node {ground} out of range")
    return EquivalentCircuit(
        n_nodes=n_nodes, resistors=tuple(resistors),
        current_sources=tuple(CurrentSource(i, j, a) for i, j, a in sources),
        ground=ground, offset=offset, meshed=len(resistors) >= n_nodes,
    )


def _check_connected(c: EquivalentCircuit) -> None:
    adj = [[] for _ in range(c.n_nodes)]
    for r in c.resistors:
        adj[r.from_node].append(r.to_node)
        adj[r.to_node].append(r.from_node)
    seen = [False] * c.n_nodes
    stack = [c.ground]
    seen[c.ground] = True
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    if not all(seen):
        raise CircuitError("circuit graph is disconnected; reduced conductance matrix is singular")


def _solve_refined(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.linalg.solve(a, b)
    return x + np.linalg.solve(a, b - a @ x)


def _reduced_solve(c: EquivalentCircuit, injections: np.ndarray) -> np.ndarray:
    keep = [i for i in range(c.n_nodes) if i != c.ground]
    g_red = c.conductance_matrix()[np.ix_(keep, keep)]
    v = np.zeros(c.n_nodes)
    v[keep] = _solve_refined(g_red, injections[keep])
    return v


def solve_circuit(c: EquivalentCircuit) -> CircuitSolution:
    """Nodal solve: ground-reduced conductance system, one refinement step."""
    _check_connected(c)
    v = _reduced_solve(c, c.injections())
    currents = tuple(
        (r.from_node, r.to_node, float((v[r.from_node] - v[r.to_node]) / r.ohms))
        for r in c.resistors
    )
    return CircuitSolution(voltages=v, branch_currents=currents)


def superpose(c: EquivalentCircuit) -> CircuitSolution:
    """Full solve plus one nodal solve per source with the others open-circuited."""
    if not c.current_sources:
        raise NoCongestion("superposition needs at least one source")
    full = solve_circuit(c)
    parts = []
    for k in range(len(c.current_sources)):
        parts.append(_reduced_solve(c, c.injections(which=k)))
    return CircuitSolution(
        voltages=full.voltages, branch_currents=full.branch_currents,
        per_source_voltages=tuple(parts),
    )


def to_voltage_sources(c: EquivalentCircuit) -> VoltageSourceView:
    """Source transformation: each parallel current source becomes volts = amps * ohms
    in series with the same resistor (+ terminal toward the import end)."""
    by_pair = {(min(r.from_node, r.to_node), max(r.from_node, r.to_node)): r for r in c.resistors}
    elements = []
    for s in c.current_sources:
        r = by_pair[(min(s.from_node, s.to_node), max(s.from_node, s.to_node))]
        elements.append(SeriesVoltageSource(s.from_node, s.to_node, s.amps * r.ohms, r.ohms))
    return VoltageSourceView(base=c, elements=tuple(elements))


def from_voltage_sources(view: VoltageSourceView) -> EquivalentCircuit:
    """Inverse transformation; round-trips to the identical circuit."""
    sources = tuple(
        CurrentSource(e.from_node, e.to_node, e.volts / e.series_ohms) for e in view.elements
    )
    return replace(view.base, current_sources=sources)


def solve_voltage_view(view: VoltageSourceView) -> CircuitSolution:
    """Modified nodal analysis of the voltage-source form (series V + R chains).

    Each transformed line is replaced by from -[V]- internal -[R]- to; the
    remaining lines keep their plain resistors. Used to check that the
    transformation leaves all node voltages unchanged.
    """
    c = view.base
    transformed_pairs = {(min(e.from_node, e.to_node), max(e.from_node, e.to_node)) for e in view.elements}
    n = c.n_nodes
    k = len(view.elements)
    size = n + k + k   # node voltages, internal nodes, source currents
    a = np.zeros((size, size))
    rhs = np.zeros(size)

    def stamp_resistor(i, j, ohms):
        w = 1.0 / ohms
        a[i, i] += w
        a[j, j] += w
        a[i, j] -= w
        a[j, i] -= w

    for r in c.resistors:
        pair = (min(r.from_node, r.to_node), max(r.from_node, r.to_node))
        if pair not in transformed_pairs:
            stamp_resistor(r.from_node, r.to_node, r.ohms)
    for idx, e in enumerate(view.elements):
        mid = n + idx
        cur = n + k + idx
        stamp_resistor(mid, e.to_node, e.series_ohms)
        # branch current variable runs from from_node through the source into
        # the internal node; constraint row enforces v[mid] - v[from] = volts
        a[e.from_node, cur] += 1.0
        a[mid, cur] -= 1.0
        a[cur, mid] += 1.0
        a[cur, e.from_node] -= 1.0
        rhs[cur] = e.volts

    a[c.ground, :] = 0.0
    a[c.ground, c.ground] = 1.0
    rhs[c.ground] = 0.0

    sol = _solve_refined(a, rhs)
    v = sol[:n]
    currents = tuple(
        (r.from_node, r.to_node, float((v[r.from_node] - v[r.to_node]) / r.ohms))
        for r in c.resistors
    )
    return CircuitSolution(voltages=v, branch_currents=currents)


def kcl_residuals(c: EquivalentCircuit, s: CircuitSolution) -> np.ndarray:
    """Per-node sum of resistor currents out minus net source current in."""
    g = c.conductance_matrix()
    return g @ s.voltages - c.injections()


def fundamental_cycles(n_nodes: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    """Cycle basis from a lowest-id-first spanning tree (one cycle per chord).

    Each cycle is returned as a closed node walk without repeating the start.
    """
    adj: dict[int, list[int]] = {i: [] for i in range(n_nodes)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for i in adj:
        adj[i].sort()

    parent = {0: None}
    order = [0]
    queue = [0]
    while queue:
        u = queue.pop(0)
        for w in adj[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
                queue.append(w)

    tree_edges = {(min(u, p), max(u, p)) for u, p in parent.items() if p is not None}
    chords = sorted(
        {(min(u, v), max(u, v)) for u, v in edges} - tree_edges
    )

    def path_to_root(x):
        path = []
        while x is not None:
            path.append(x)
            x = parent[x]
        return path

    cycles = []
    for u, v in chords:
        pu, pv = path_to_root(u), path_to_root(v)
        anc = set(pu)
        meet = next(x for x in pv if x in anc)
        up = pu[:pu.index(meet) + 1]          # u ... meet
        down = pv[:pv.index(meet)][::-1]      # below meet ... v
        cycles.append(up + down)              # u -> meet -> v (-> u via chord)
    return cycles


def kvl_loop_sums(net_or_edges, lmps) -> list[LoopSum]:
    """Sum of price drops around each fundamental cycle (telescopes to zero)."""
    if isinstance(net_or_edges, Network):
        edges = [(ln.from_bus, ln.to_bus) for ln in net_or_edges.lines]
        n = net_or_edges.n
    else:
        edges = list(net_or_edges)
        n = max(max(u, v) for u, v in edges) + 1
    lam = np.asarray(lmps, dtype=float)
    out = []
    for cyc in fundamental_cycles(n, edges):
        walk = cyc + [cyc[0]]
        terms = tuple(float(lam[walk[i]] - lam[walk[i + 1]]) for i in range(len(cyc)))
        out.append(LoopSum(nodes=tuple(cyc), terms=terms, total=float(sum(terms))))
    return out


def loop_sum_along(nodes: list[int], lmps) -> LoopSum:
    """Price-drop sum around an explicit closed walk of bus ids."""
    lam = np.asarray(lmps, dtype=float)
    walk = list(nodes) + [nodes[0]]
    terms = tuple(float(lam[walk[i]] - lam[walk[i + 1]]) for i in range(len(nodes)))
    return LoopSum(nodes=tuple(nodes), terms=terms, total=float(sum(terms)))
