"""Power network model and LP matrix assembly.

Conventions
-----------
- Bus ids are 0-based and contiguous; susceptances are per-unit on an implicit
  1 MVA base so MW and pu power coincide.
- Power balance is written ``A p + B theta = a`` with ``B`` the susceptance
  Laplacian, which makes the flow on a line from i to j equal to
  ``b_ij * (theta_j - theta_i)`` in MW.
- Injector variables use the dense slot layout: slot ``j`` (j < n) is the
  generator at bus j, slot ``n + j`` the controllable load at bus j, so
  ``A = [I, -I]``. Buses without an injector of a given kind get a slot pinned
  to zero by its bounds.
- Flow limits are stored in MW but canonicalized to angle-difference rows
  (divide by b_ij), so ``D`` has entries 0/+1/-1 and the flow-limit duals are
  directly the circuit source magnitudes; the MW-basis shadow price is mu/b.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

KIND_GENERATOR = "generator"
KIND_LOAD = "load"


class NetworkError(ValueError):
    """A network violates a structural invariant."""


class SchemaError(ValueError):
    """A network file violates the canonical JSON schema."""


@dataclass(frozen=True)
class Bus:
    id: int
    fixed_demand: float = 0.0


@dataclass(frozen=True)
class Line:
    from_bus: int
    to_bus: int
    susceptance: float
    flow_limit: float | None = None


@dataclass(frozen=True)
class Injector:
    bus: int
    kind: str
    cost: float
    p_min: float
    p_max: float


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and np.isfinite(x)


class Network:
    """Immutable bus/line/injector collection; validates invariants on construction."""

    def __init__(self, buses: Iterable[Bus], lines: Iterable[Line], injectors: Iterable[Injector]):
        self.buses = tuple(buses)
        self.lines = tuple(lines)
        self.injectors = tuple(injectors)
        self._validate()

    @property
    def n(self) -> int:
        return len(self.buses)

    @property
    def fixed_demand(self) -> np.ndarray:
        a = np.array([b.fixed_demand for b in self.buses], dtype=float)
        a.flags.writeable = False
        return a

    def limited_lines(self) -> list[int]:
        """Indices into self.lines of lines carrying a flow limit."""
        return [k for k, ln in enumerate(self.lines) if ln.flow_limit is not None]

    def injector_at(self, bus: int, kind: str) -> Injector | None:
        for inj in self.injectors:
            if inj.bus == bus and inj.kind == kind:
                return inj
        return None

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for ln in self.lines:
            adj[ln.from_bus].append(ln.to_bus)
            adj[ln.to_bus].append(ln.from_bus)
        return adj

    def is_connected(self) -> bool:
        return _connected(self.n, [(ln.from_bus, ln.to_bus) for ln in self.lines])

    def _validate(self) -> None:
        n = len(self.buses)
        if n < 2:
            raise NetworkError(f"network needs at least 2 buses, got {n}")
        ids = [b.id for b in self.buses]
        if sorted(ids) != list(range(n)):
            raise NetworkError(f"bus ids must be 0..{n - 1} and unique, got {sorted(ids)}")
        if ids != list(range(n)):
            raise NetworkError("buses must be listed in id order")
        for b in self.buses:
            if not _is_number(b.fixed_demand) or b.fixed_demand < 0:
                raise NetworkError(f"bus {b.id}: fixed_demand must be a finite number >= 0")

        seen_pairs = set()
        for ln in self.lines:
            if ln.from_bus == ln.to_bus:
                raise NetworkError(f"line {ln.from_bus}-{ln.to_bus}: self loop")
            for end in (ln.from_bus, ln.to_bus):
                if not isinstance(end, int) or not 0 <= end < n:
                    raise NetworkError(f"line references unknown bus {end}")
            pair = (min(ln.from_bus, ln.to_bus), max(ln.from_bus, ln.to_bus))
            if pair in seen_pairs:
                raise NetworkError(f"parallel lines between buses {pair[0]} and {pair[1]}; pre-merge them")
            seen_pairs.add(pair)
            if not _is_number(ln.susceptance) or ln.susceptance <= 0:
                raise NetworkError(f"line {pair}: susceptance must be finite and > 0")
            if ln.flow_limit is not None and (not _is_number(ln.flow_limit) or ln.flow_limit <= 0):
                raise NetworkError(f"line {pair}: flow_limit must be finite and > 0 when present")

        if not self.injectors:
            raise NetworkError("network has no injectors")
        seen_slots = set()
        for inj in self.injectors:
            if not isinstance(inj.bus, int) or not 0 <= inj.bus < n:
                raise NetworkError(f"injector references unknown bus {inj.bus}")
            if inj.kind not in (KIND_GENERATOR, KIND_LOAD):
                raise NetworkError(f"injector kind must be 'generator' or 'load', got {inj.kind!r}")
            slot = (inj.bus, inj.kind)
            if slot in seen_slots:
                raise NetworkError(f"bus {inj.bus} already has a {inj.kind}")
            seen_slots.add(slot)
            for name, val in (("cost", inj.cost), ("p_min", inj.p_min), ("p_max", inj.p_max)):
                if not _is_number(val):
                    raise NetworkError(f"injector at bus {inj.bus}: {name} must be a finite number")
            if inj.p_min > inj.p_max:
                raise NetworkError(f"injector at bus {inj.bus}: p_min > p_max")

        if not self.is_connected():
            raise NetworkError("network graph is not connected")


def _connected(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    if n == 0:
        return False
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    return all(seen)


def build_b_matrix(net: Network) -> np.ndarray:
    """DC bus admittance matrix: -b_ij off-diagonal, incident-susceptance sums on the diagonal.

    Symmetric with zero row sums (the all-ones vector is in the null space).
    """
    b = np.zeros((net.n, net.n))
    for ln in net.lines:
        i, j, s = ln.from_bus, ln.to_bus, ln.susceptance
        b[i, j] -= s
        b[j, i] -= s
        b[i, i] += s
        b[j, j] += s
    b.flags.writeable = False
    return b


@dataclass(frozen=True)
class OpfLp:
    """Assembled DC-OPF blocks: min c'p s.t. A p + B theta = a, C p >= b, D theta >= d.

    ``limited_lines[r]`` is the line index behind D rows 2r (from-minus-to) and
    2r+1 (to-minus-from); both right-hand sides are -flow_limit/susceptance.
    """

    c: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    limited_lines: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def slot_of(self, bus: int, kind: str) -> int:
        return bus if kind == KIND_GENERATOR else self.n + bus


def assemble_lp(net: Network) -> OpfLp:
    """Assemble the OPF LP blocks for a validated network."""
    n = net.n
    nb = build_b_matrix(net)

    c = np.zeros(2 * n)
    p_min = np.zeros(2 * n)
    p_max = np.zeros(2 * n)
    for inj in net.injectors:
        j = inj.bus if inj.kind == KIND_GENERATOR else n + inj.bus
        c[j] = inj.cost if inj.kind == KIND_GENERATOR else -inj.cost
        p_min[j] = inj.p_min
        p_max[j] = inj.p_max

    eye = np.eye(n)
    a_loc = np.hstack([eye, -eye])
    c_mat = np.vstack([np.eye(2 * n), -np.eye(2 * n)])
    b_vec = np.concatenate([p_min, -p_max])

    limited = net.limited_lines()
    d_mat = np.zeros((2 * len(limited), n))
    d_vec = np.zeros(2 * len(limited))
    for r, k in enumerate(limited):
        ln = net.lines[k]
        bound = -ln.flow_limit / ln.susceptance
        d_mat[2 * r, ln.from_bus] = 1.0
        d_mat[2 * r, ln.to_bus] = -1.0
        d_vec[2 * r] = bound
        d_mat[2 * r + 1, ln.from_bus] = -1.0
        d_mat[2 * r + 1, ln.to_bus] = 1.0
        d_vec[2 * r + 1] = bound

    for arr in (c, a_loc, c_mat, b_vec, d_mat, d_vec):
        arr.flags.writeable = False
    return OpfLp(
        c=c, A=a_loc, B=nb, C=c_mat, D=d_mat,
        a=net.fixed_demand, b=b_vec, d=d_vec, limited_lines=tuple(limited),
    )


def line_flows(net: Network, theta: np.ndarray) -> np.ndarray:
    """MW flow per line, positive from from_bus toward to_bus: b_ij*(theta_j - theta_i)."""
    th = np.asarray(theta, dtype=float)
    return np.array([ln.susceptance * (th[ln.to_bus] - th[ln.from_bus]) for ln in net.lines])


def balance_residual(opf: OpfLp, p: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Per-bus residual of A p + B theta - a."""
    return opf.A @ np.asarray(p, float) + opf.B @ np.asarray(theta, float) - opf.a


def generate_random_network(seed: int, n: int, edge_prob: float) -> Network:
    """Deterministic random connected meshed network with randomized costs and limits.

    Topology is a random recursive tree plus extra edges (at least one, so a
    cycle always exists). Every positive-demand bus gets a generator with
    p_max >= demand, which keeps the zero-flow dispatch feasible under any
    flow limits; a final balancing pass scales capacities until total capacity
    covers total fixed demand with margin.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if not 0 < edge_prob <= 1:
        raise ValueError(f"edge_prob must be in (0, 1], got {edge_prob}")
    rng = np.random.default_rng(seed)

    edges: set[tuple[int, int]] = set()
    order = rng.permutation(n)
    for idx in range(1, n):
        u = int(order[idx])
        v = int(order[rng.integers(0, idx)])
        edges.add((min(u, v), max(u, v)))
    spare = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in edges]
    picks = rng.random(len(spare)) < edge_prob
    for pair, take in zip(spare, picks):
        if take:
            edges.add(pair)
    if len(edges) < n:  # tree only: force one chord
        k = int(rng.integers(0, len(spare)))
        edges.add(spare[k])

    demand = np.where(rng.random(n) < 0.7, rng.uniform(10.0, 100.0, n), 0.0)
    if not demand.any():
        demand[int(rng.integers(0, n))] = rng.uniform(20.0, 100.0)

    buses = [Bus(i, float(demand[i])) for i in range(n)]

    lines = []
    for i, j in sorted(edges):
        sus = float(rng.uniform(0.5, 2.0))
        limit = float(rng.uniform(5.0, 80.0)) if rng.random() < 0.45 else None
        lines.append(Line(i, j, sus, limit))

    injectors = []
    p_max = np.zeros(n)
    for i in range(n):
        has_gen = demand[i] > 0 or rng.random() < 0.75
        if has_gen:
            cost = 0.0 if rng.random() < 0.15 else float(rng.uniform(5.0, 50.0))
            cap = float(demand[i] + rng.uniform(0.0, 150.0)) if demand[i] > 0 else float(rng.uniform(20.0, 200.0))
            p_max[i] = cap
            injectors.append(Injector(i, KIND_GENERATOR, cost, 0.0, cap))
        if rng.random() < 0.3:
            injectors.append(Injector(i, KIND_LOAD, float(rng.uniform(55.0, 150.0)), 0.0, float(rng.uniform(10.0, 60.0))))

    # capacity-balancing pass: total generation capacity must cover fixed demand
    while p_max.sum() < 1.2 * demand.sum():
        injectors = [
            Injector(inj.bus, inj.kind, inj.cost, inj.p_min, inj.p_max * 1.3)
            if inj.kind == KIND_GENERATOR else inj
            for inj in injectors
        ]
        p_max *= 1.3

    return Network(buses, lines, injectors)


# ---------------------------------------------------------------------------
# canonical JSON file format
# ---------------------------------------------------------------------------

_BUS_KEYS = {"id", "demand"}
_LINE_KEYS = {"from", "to", "susceptance", "flow_limit"}
_INJ_KEYS = {"bus", "kind", "cost", "p_min", "p_max"}


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown key(s) {sorted(unknown)}")


def parse_network(doc) -> Network:
    """Build a Network from a decoded canonical JSON document (strict keys)."""
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    _reject_unknown(doc, {"buses", "lines", "injectors"}, "top level")
    for key in ("buses", "lines", "injectors"):
        if key not in doc or not isinstance(doc[key], list):
            raise SchemaError(f"top level: missing or non-array {key!r}")

    buses = []
    for k, item in enumerate(doc["buses"]):
        if not isinstance(item, dict):
            raise SchemaError(f"buses[{k}]: must be an object")
        _reject_unknown(item, _BUS_KEYS, f"buses[{k}]")
        if not isinstance(item.get("id"), int) or isinstance(item.get("id"), bool):
            raise SchemaError(f"buses[{k}]: id must be an integer")
        demand = item.get("demand", 0.0)
        if not _is_number(demand):
            raise SchemaError(f"buses[{k}]: demand must be a number")
        buses.append(Bus(item["id"], float(demand)))

    lines = []
    for k, item in enumerate(doc["lines"]):
        if not isinstance(item, dict):
            raise SchemaError(f"lines[{k}]: must be an object")
        _reject_unknown(item, _LINE_KEYS, f"lines[{k}]")
        for key in ("from", "to"):
            if not isinstance(item.get(key), int) or isinstance(item.get(key), bool):
                raise SchemaError(f"lines[{k}]: {key} must be an integer")
        if not _is_number(item.get("susceptance")):
            raise SchemaError(f"lines[{k}]: susceptance must be a number")
        limit = item.get("flow_limit")
        if limit is not None and not _is_number(limit):
            raise SchemaError(f"lines[{k}]: flow_limit must be a number")
        lines.append(Line(item["from"], item["to"], float(item["susceptance"]),
                          None if limit is None else float(limit)))

    injectors = []
    for k, item in enumerate(doc["injectors"]):
        if not isinstance(item, dict):
            raise SchemaError(f"injectors[{k}]: must be an object")
        _reject_unknown(item, _INJ_KEYS, f"injectors[{k}]")
        if not isinstance(item.get("bus"), int) or isinstance(item.get("bus"), bool):
            raise SchemaError(f"injectors[{k}]: bus must be an integer")
        if item.get("kind") not in (KIND_GENERATOR, KIND_LOAD):
            raise SchemaError(f"injectors[{k}]: kind must be 'generator' or 'load'")
        for key in ("cost", "p_min", "p_max"):
            if not _is_number(item.get(key)):
                raise SchemaError(f"injectors[{k}]: {key} must be a number")
        injectors.append(Injector(item["bus"], item["kind"], float(item["cost"]),
                                  float(item["p_min"]), float(item["p_max"])))

    try:
        return Network(buses, lines, injectors)
    except NetworkError as exc:
        raise SchemaError(str(exc)) from exc


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_network(doc)


def network_to_doc(net: Network) -> dict:
    """Canonical JSON document for a network (inverse of parse_network)."""
    doc = {
        "buses": [{"id": b.id, "demand": b.fixed_demand} for b in net.buses],
        "lines": [],
        "injectors": [
            {"bus": i.bus, "kind": i.kind, "cost": i.cost, "p_min": i.p_min, "p_max": i.p_max}
            for i in net.injectors
        ],
    }
    for ln in net.lines:
        item = {"from": ln.from_bus, "to": ln.to_bus, "susceptance": ln.susceptance}
        if ln.flow_limit is not None:
            item["flow_limit"] = ln.flow_limit
        doc["lines"].append(item)
    return doc
