"""DC optimal power flow duals as a DC circuit.

Solves the DC-OPF linear program, extracts bus prices (balance duals) and
congestion prices (flow-limit duals), converts the dual solution into an
equivalent resistor/current-source circuit, and analyzes it: nodal solve,
KCL/KVL ledgers, superposition, negative-price prediction, and price recovery
from partial information.
"""

from ._kernels import BACKEND
from .analysis import (
    CongestionImpact,
    LimitedInfo,
    NegativePriceReport,
    RecoveredPrices,
    congestion_impact,
    predict_negative_prices,
    recover_lmps,
)
from .circuit import (
    CircuitError,
    CircuitSolution,
    CurrentSource,
    EquivalentCircuit,
    LoopSum,
    NoCongestion,
    Resistor,
    SeriesVoltageSource,
    VoltageSourceView,
    build_circuit,
    circuit_from_parts,
    from_voltage_sources,
    kcl_residuals,
    kvl_loop_sums,
    loop_sum_along,
    solve_circuit,
    solve_voltage_view,
    superpose,
    to_voltage_sources,
)
from .dcopf import (
    CheckReport,
    DcopfSolution,
    LineDual,
    NoMarginalInjector,
    OpfError,
    OpfInfeasible,
    OpfUnbounded,
    ResidualCheck,
    cheapest_marginal,
    solution_flows,
    solve_opf,
    verify_optimality,
)
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, LpSolution, solve_lp
from .network import (
    Bus,
    Injector,
    Line,
    Network,
    NetworkError,
    OpfLp,
    SchemaError,
    assemble_lp,
    build_b_matrix,
    generate_random_network,
    line_flows,
    load_network,
    network_to_doc,
    parse_network,
)

__version__ = "0.1.0"
