"""Applications of the equivalent circuit: negative-price prediction,
price recovery from limited information, and per-congestion impact reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import (
    CircuitError,
    CircuitSolution,
    EquivalentCircuit,
    circuit_from_parts,
    solve_circuit,
    superpose,
)

_NEG_EPS = 1e-9


@dataclass(frozen=True)
class NegativePriceReport:
    negative: bool
    witnesses: tuple[int, ...]       # buses with price below zero
    ground_is_minimum: bool          # ground sits at the lowest node voltage
    offset: float
    min_price: float
    min_price_bus: int


@dataclass(frozen=True)
class LimitedInfo:
    """Topology, susceptances, and congestion sources; optionally ground + offset.

    Source orientation: ``from`` is the export (lower-price) end, ``to`` the
    import end where the source injects.
    """

    n_nodes: int
    lines: tuple[tuple[int, int, float], ...]       # (from, to, susceptance)
    sources: tuple[tuple[int, int, float], ...]     # (from, to, mu)
    ground: int | None = None
    offset: float | None = None

    def __post_init__(self):
        if (self.ground is None) != (self.offset is None):
            raise ValueError("ground and offset must be given together")


@dataclass(frozen=True)
class RecoveredPrices:
    lmp: np.ndarray | None          # absolute prices when ground+offset known
    delta: np.ndarray | None        # otherwise: delta[i, j] = lmp_i - lmp_j


@dataclass(frozen=True)
class CongestionImpact:
    sources: tuple[tuple[int, int, float], ...]
    vectors: tuple[np.ndarray, ...]
    min_contribution: tuple[float, ...]
    max_contribution: tuple[float, ...]
    negative_buses: tuple[tuple[int, ...], ...]
    totals: np.ndarray


def predict_negative_prices(c: EquivalentCircuit, s: CircuitSolution) -> NegativePriceReport:
    """Negative prices occur iff some node voltage plus the ground offset is below zero.

    The report also carries the pure circuit-side criterion (is ground the
    minimum-voltage node); the two coincide whenever the offset is zero. With a
    positive offset a node needs voltage below -offset to price negative, so
    the price test is the economically meaningful one and is the flag.
    """
    prices = s.voltages + c.offset
    witnesses = tuple(int(i) for i in np.nonzero(prices < -_NEG_EPS)[0])
    vmin = float(s.voltages.min())
    ground_is_minimum = s.voltages[c.ground] <= vmin + _NEG_EPS
    k = int(np.argmin(prices))
    return NegativePriceReport(
        negative=bool(witnesses),
        witnesses=witnesses,
        ground_is_minimum=bool(ground_is_minimum),
        offset=c.offset,
        min_price=float(prices[k]),
        min_price_bus=k,
    )


def recover_lmps(info: LimitedInfo) -> RecoveredPrices:
    """Rebuild prices from topology + susceptances + congestion sources.

    With ground and offset the absolute price at every bus is recovered;
    without them only the full matrix of pairwise differences is returned
    (no absolute level is invented).
    """
    if not info.sources:
        raise CircuitError("recovery needs at least one congestion source")
    ground = info.ground if info.ground is not None else 0
    offset = info.offset if info.offset is not None else 0.0
    c = circuit_from_parts(info.n_nodes, info.lines, info.sources, ground, offset)
    v = solve_circuit(c).voltages
    if info.ground is not None:
        return RecoveredPrices(lmp=v + offset, delta=None)
    return RecoveredPrices(lmp=None, delta=v[:, None] - v[None, :])


def congestion_impact(c: EquivalentCircuit) -> CongestionImpact:
    """Per-source node-voltage contributions (others open-circuited) with summary stats."""
    s = superpose(c)
    vectors = s.per_source_voltages
    return CongestionImpact(
        sources=tuple((src.from_node, src.to_node, src.amps) for src in c.current_sources),
        vectors=vectors,
        min_contribution=tuple(float(v.min()) for v in vectors),
        max_contribution=tuple(float(v.max()) for v in vectors),
        negative_buses=tuple(
            tuple(int(i) for i in np.nonzero(v < -_NEG_EPS)[0]) for v in vectors
        ),
        totals=s.voltages,
    )
