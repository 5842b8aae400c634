import numpy as np
import pytest

from lmpcirc import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, assemble_lp, solve_lp
from lmpcirc.dcopf import opf_lp_problem

import oracles


def _lp(c, a_eq=None, b_eq=None, a_ge=None, b_ge=None):
    nv = len(c)
    return LpProblem(
        c=np.asarray(c, float),
        a_eq=np.zeros((0, nv)) if a_eq is None else np.asarray(a_eq, float),
        b_eq=np.zeros(0) if b_eq is None else np.asarray(b_eq, float),
        a_ge=np.zeros((0, nv)) if a_ge is None else np.asarray(a_ge, float),
        b_ge=np.zeros(0) if b_ge is None else np.asarray(b_ge, float),
    )


# ---------------------------------------------------------------------------
# elementary cases
# ---------------------------------------------------------------------------

def test_single_bound():
    sol = solve_lp(_lp([1.0], a_ge=[[1.0]], b_ge=[3.0]))
    assert sol.status == OPTIMAL
    assert sol.x[0] == pytest.approx(3.0, abs=1e-12)
    assert sol.ge_duals[0] == pytest.approx(1.0, abs=1e-12)


def test_unbounded_ray():
    sol = solve_lp(_lp([-1.0], a_ge=[[1.0]], b_ge=[0.0]))
    assert sol.status == UNBOUNDED


def test_infeasible_band():
    sol = solve_lp(_lp([1.0], a_ge=[[1.0], [-1.0]], b_ge=[3.0, -1.0]))
    assert sol.status == INFEASIBLE
    assert sol.infeasible_rows


def test_equality_and_duals():
    sol = solve_lp(_lp([1.0, 2.0], a_eq=[[1.0, 1.0]], b_eq=[4.0], a_ge=np.eye(2), b_ge=[0.0, 0.0]))
    assert sol.status == OPTIMAL
    assert sol.x == pytest.approx([4.0, 0.0])
    assert sol.eq_duals[0] == pytest.approx(1.0)
    assert sol.objective == pytest.approx(4.0)


def test_empty_row_presolve():
    sol = solve_lp(_lp([1.0], a_eq=[[0.0]], b_eq=[0.0], a_ge=[[1.0]], b_ge=[2.0]))
    assert sol.status == OPTIMAL and sol.x[0] == pytest.approx(2.0)
    sol = solve_lp(_lp([1.0], a_eq=[[0.0]], b_eq=[1.0], a_ge=[[1.0]], b_ge=[2.0]))
    assert sol.status == INFEASIBLE


def test_deterministic_repeat():
    prob = _lp([1.0, -2.0, 0.5],
               a_eq=[[1.0, 1.0, 1.0]], b_eq=[3.0],
               a_ge=np.vstack([np.eye(3), [[-1.0, -1.0, 0.0]]]), b_ge=[0.0, 0.0, 0.0, -5.0])
    a, b = solve_lp(prob), solve_lp(prob)
    assert np.array_equal(a.x, b.x)
    assert a.objective == b.objective
    assert np.array_equal(a.eq_duals, b.eq_duals)
    assert np.array_equal(a.ge_duals, b.ge_duals)


# ---------------------------------------------------------------------------
# anti-cycling: classic degenerate instances terminate at the right optimum
# ---------------------------------------------------------------------------

def test_beale_cycling_example():
    # min -0.75a + 150b - 0.02c + 6d with the classic degenerate rows; the
    # textbook Dantzig pivot sequence cycles without a safeguard
    c = [-0.75, 150.0, -0.02, 6.0]
    a_ge = [
        [-0.25, 60.0, 0.04, -9.0],
        [-0.5, 90.0, 0.02, -3.0],
        [0.0, 0.0, -1.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
    b_ge = [0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]
    sol = solve_lp(_lp(c, a_ge=a_ge, b_ge=b_ge))
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(-0.05, abs=1e-9)
    assert sol.residuals["stationarity"] < 1e-8
    assert sol.residuals["gap"] < 1e-7


def test_fully_degenerate_origin():
    # every rhs zero: all bases are degenerate; must still terminate
    rng = np.random.default_rng(3)
    a_ge = np.vstack([rng.normal(size=(6, 4)), np.eye(4)])
    b_ge = np.zeros(10)
    c = np.abs(rng.normal(size=4))  # bounded: x = 0 optimal
    sol = solve_lp(_lp(c, a_ge=a_ge, b_ge=b_ge))
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(0.0, abs=1e-9)
    assert sol.degenerate


# ---------------------------------------------------------------------------
# degeneracy flag
# ---------------------------------------------------------------------------

def test_degenerate_flag_set_and_clear():
    # nondegenerate: unique vertex strictly away from redundant bounds
    clean = solve_lp(_lp([1.0, 1.0], a_ge=[[1.0, 0.0], [0.0, 1.0]], b_ge=[1.0, 2.0]))
    assert clean.status == OPTIMAL and not clean.degenerate
    # degenerate: three active constraints at a 2-d vertex
    deg = solve_lp(_lp([1.0, 1.0],
                       a_ge=[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], b_ge=[1.0, 1.0, 2.0]))
    assert deg.status == OPTIMAL and deg.degenerate


# ---------------------------------------------------------------------------
# oracle equivalence (module-level slice; the acceptance suite runs 1000)
# ---------------------------------------------------------------------------

def test_matches_vertex_enumeration_oracle():
    statuses = {"optimal": 0, "infeasible": 0, "unbounded": 0}
    for seed in range(300):
        c, a_eq, b_eq, a_ge, b_ge = oracles.random_small_lp(seed)
        want_status, want_value, _ = oracles.brute_force_lp(c, a_eq, b_eq, a_ge, b_ge)
        sol = solve_lp(_lp(c, a_eq=a_eq, b_eq=b_eq, a_ge=a_ge, b_ge=b_ge))
        assert sol.status == want_status, f"seed {seed}: {sol.status} != {want_status}"
        statuses[want_status] += 1
        if want_status == "optimal":
            assert sol.objective == pytest.approx(want_value, abs=1e-6 * (1 + abs(want_value))), f"seed {seed}"
            assert sol.residuals["stationarity"] <= 1e-8
            assert sol.residuals["primal_eq"] <= 1e-8
            assert sol.residuals["primal_ge"] <= 1e-8
            assert sol.residuals["complementarity"] <= 1e-8
            assert sol.residuals["gap"] <= 1e-7 * (1 + abs(sol.objective))
            assert sol.ge_duals.min(initial=0.0) >= -1e-9
    # the generator must exercise every status
    assert min(statuses.values()) >= 15, statuses


# ---------------------------------------------------------------------------
# assembled OPF duals against the enumeration + KKT oracle
# ---------------------------------------------------------------------------

def test_fig1_opf_duals_match_oracle(fig1_net):
    prob = opf_lp_problem(assemble_lp(fig1_net), ref_bus=0)
    verts = oracles._candidate_vertices(prob.a_eq, prob.b_eq, prob.a_ge, prob.b_ge, box=None)
    assert verts.shape[0] > 0
    values = verts @ prob.c
    best = verts[int(np.argmin(values))]
    assert values.min() == pytest.approx(600.0, abs=1e-6)

    lam_oracle, ge_oracle, resid = oracles.kkt_duals(
        prob.c, prob.a_eq, prob.b_eq, prob.a_ge, prob.b_ge, best)
    assert resid < 1e-6

    sol = solve_lp(prob)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(600.0, abs=1e-8)
    # balance prices: lmp = (0, 40, 20); reference-row dual is zero
    assert sol.eq_duals == pytest.approx([0.0, 40.0, 20.0, 0.0], abs=1e-7)
    assert lam_oracle[:3] == pytest.approx([0.0, 40.0, 20.0], abs=1e-6)
    # the binding angle row (flow 0->1 at +20 MW) prices at 60
    assert sol.ge_duals[12] == pytest.approx(60.0, abs=1e-7)
    assert sol.ge_duals[13] == pytest.approx(0.0, abs=1e-9)
    assert ge_oracle[12] == pytest.approx(60.0, abs=1e-6)

    # cross-check with the independent nodal oracle (ground at the $0 bus)
    lam_nodal = oracles.nodal_voltages_pinv(
        3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)], [(0, 1, 60.0)], ground=0)
    assert lam_nodal == pytest.approx([0.0, 40.0, 20.0], abs=1e-9)
