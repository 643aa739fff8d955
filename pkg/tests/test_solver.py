import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cflcolor.graphs import ConstraintGraph, SensingGraph, is_proper_coloring, unsatisfied_set
from cflcolor.solver import (
    RENORMALIZE_EVERY,
    SolverParams,
    absorption_check,
    gamma,
    init,
    run,
    step,
    unsatisfied_update,
    vertex_uniforms,
)

from conftest import random_instance

K3 = ConstraintGraph(3, [(0, 1), (1, 2), (0, 2)])
K3_FULL = SensingGraph.full(K3)


@pytest.mark.parametrize(
    "a, b, d, expected",
    [
        (1.0, 0.1, 3, 0.1 / 12),
        (1.0, 0.1, 11, 0.005),
        (0.3, 0.3, 5, 0.3 / 5),
    ],
)
def test_gamma(a, b, d, expected):
    assert gamma(SolverParams(d, a, b)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("a, b", [(0.0, 0.1), (1.1, 0.1), (1.0, 0.0), (1.0, 1.5)])
def test_params_validation(a, b):
    with pytest.raises(ValueError):
        SolverParams(3, a, b)


def test_init_uniform():
    st_ = init(2, SolverParams(4), seed=0)
    assert np.all(st_.probs == 0.25)
    assert st_.round == 0
    assert np.all(st_.probs.sum(axis=1) == 1.0)
    assert init(1, SolverParams(1), 0).probs.tolist() == [[1.0]]
    with pytest.raises(ValueError):
        init(0, SolverParams(2), 0)


def test_unsatisfied_update_hand_values():
    # (1-b)/3 + a/(D-1+a/b) = 0.3 + 1/12 ; (1-b)/3 + b/12 = 0.3 + 0.1/12
    row = unsatisfied_update(np.full((1, 3), 1 / 3), np.array([0]), SolverParams(3, 1.0, 0.1))[0]
    assert row == pytest.approx([0.3 + 1 / 12, 0.3 + 0.1 / 12, 0.3 + 0.1 / 12], abs=1e-15)
    assert row[0] == pytest.approx(0.3833333333333333, abs=1e-12)
    assert row[1] == pytest.approx(0.3083333333333333, abs=1e-12)
    assert row.sum() == pytest.approx(1.0, abs=1e-15)


def test_step_matches_update_rule():
    params = SolverParams(3, 1.0, 0.1)
    g = ConstraintGraph(2, [(0, 1)])
    s = SensingGraph.full(g)
    for seed in range(50):
        st0 = init(2, params, seed)
        st1 = step(st0, s, params)
        assert st0.round == 0 and np.all(st0.probs == 1 / 3)
        assert st1.round == 1
        x = st1.assignment
        if x[0] == x[1]:
            for i in range(2):
                expected = np.full(3, 0.3 + 0.1 / 12)
                expected[x[i]] = 0.3 + 1 / 12
                assert st1.probs[i] == pytest.approx(expected, abs=1e-15)
            return
        else:
            for i in range(2):
                assert st1.probs[i].tolist() == [1.0 if c == x[i] else 0.0 for c in range(3)]
    pytest.fail("no conflicting draw in 50 seeds")


def test_satisfied_vertex_locks():
    params = SolverParams(3)
    st_ = step(init(1, params, 7), SensingGraph(1), params)
    c = st_.assignment[0]
    assert st_.probs[0].tolist() == [1.0 if k == c else 0.0 for k in range(3)]


def test_unsensing_vertex_freezes_after_first_round():
    # vertex 0 senses nothing, vertex 1 senses 0
    params = SolverParams(2)
    s = SensingGraph(2, [(0, 1)])
    st_ = init(2, params, 3)
    first = None
    for _ in range(30):
        st_ = step(st_, s, params)
        first = st_.assignment[0] if first is None else first
        assert st_.assignment[0] == first
        assert 0 not in st_.unsatisfied.nonzero()[0]


def test_step_dimension_mismatch():
    params = SolverParams(3)
    with pytest.raises(ValueError):
        step(init(2, params, 0), K3_FULL, params)
    with pytest.raises(ValueError):
        step(init(3, params, 0), K3_FULL, SolverParams(4))


def test_run_single_vertex():
    out = run(SensingGraph(1), SolverParams(1), seed=0, max_rounds=5)
    assert out.converged and out.rounds_used == 1


def test_run_infeasible_never_converges():
    out = run(K3_FULL, SolverParams(2), seed=0, max_rounds=1000, graph=K3)
    assert not out.converged
    assert out.rounds_used == 1000
    assert not out.per_vertex_full_satisfaction.all()


def test_run_k3_converges_every_seed():
    params = SolverParams(3)
    for seed in range(1000):
        out = run(K3_FULL, params, seed=seed, max_rounds=100_000, graph=K3)
        assert out.converged
        assert is_proper_coloring(K3, out.final_assignment)
        assert out.per_vertex_full_satisfaction.all()


def test_run_deterministic():
    rng = np.random.default_rng(4)
    g, s = random_instance(rng, 8)
    a = run(s, SolverParams(4), seed=123, max_rounds=5000, graph=g)
    b = run(s, SolverParams(4), seed=123, max_rounds=5000, graph=g)
    assert a.to_dict() == b.to_dict()
    assert a.final_assignment.tobytes() == b.final_assignment.tobytes()


def test_absorption_check():
    params = SolverParams(3)
    st_ = init(3, params, 0)
    assert not absorption_check(st_)
    st_.probs[0] = [1, 0, 0]
    assert not absorption_check(st_)
    out_state = init(3, params, 1)
    run(K3_FULL, params, max_rounds=10_000, state=out_state)
    assert absorption_check(out_state)
    frozen = out_state.assignment.copy()
    for _ in range(100):
        out_state = step(out_state, K3_FULL, params)
        assert np.array_equal(out_state.assignment, frozen)


def test_point_mass_iff_satisfied():
    rng = np.random.default_rng(11)
    g, s = random_instance(rng, 7)
    params = SolverParams(3)
    st_ = init(7, params, 5)
    for _ in range(200):
        st_ = step(st_, s, params)
        point = (st_.probs == 1.0).any(axis=1)
        assert np.array_equal(point, ~st_.unsatisfied)
        assert unsatisfied_set(s, st_.assignment) == set(np.flatnonzero(st_.unsatisfied))


def test_renormalization_keeps_rows():
    params = SolverParams(2)
    st_ = init(3, params, 9)
    run(K3_FULL, params, max_rounds=RENORMALIZE_EVERY * 3, state=st_)
    assert np.allclose(st_.probs.sum(axis=1), 1.0, atol=1e-12)


def test_vertex_uniforms_order_independent():
    u = vertex_uniforms(99, 17, 10)
    v = vertex_uniforms(99, 17, np.array([9, 3, 0]))
    assert v.tolist() == [u[9], u[3], u[0]]
    assert np.all((u >= 0) & (u < 1))
    assert not np.array_equal(vertex_uniforms(99, 18, 10), u)
    assert not np.array_equal(vertex_uniforms(98, 17, 10), u)


def test_vertex_uniforms_are_uniform():
    u = vertex_uniforms(2024, 1, 200_000)
    hist, _ = np.histogram(u, bins=20, range=(0, 1))
    expected = len(u) / 20
    chi2 = ((hist - expected) ** 2 / expected).sum()
    assert chi2 < 43.8  # 0.999 quantile, 19 dof
    lag = np.corrcoef(u[:-1], u[1:])[0, 1]
    assert abs(lag) < 0.01


@given(
    st.floats(0.01, 1.0),
    st.floats(0.01, 1.0),
    st.integers(2, 12),
    st.integers(0, 2**32 - 1),
)
def test_update_row_stochastic_and_gamma_floor(a, b, d, seed):
    params = SolverParams(d, a, b)
    rng = np.random.default_rng(seed)
    rows = rng.dirichlet(np.full(d, 0.3), size=20)
    chosen = rng.integers(0, d, size=20)
    out = unsatisfied_update(rows.copy(), chosen, params)
    assert np.allclose(out.sum(axis=1), 1.0, atol=1e-9)
    assert out.min() >= gamma(params) - 1e-12
