import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sbo_vqa.circuit_sim import (
    Graph,
    PauliTerm,
    QaoaParams,
    QubitLimitError,
    ShotPlan,
    StateVector,
    exact_expectation,
    group_commuting,
    hardware_efficient_state,
    maxcut_observable,
    qaoa_state,
    random_connected_graph,
    sample_estimate,
    transverse_ising_observable,
)

from conftest import dense_hea_state, dense_observable, dense_qaoa_state


def _params(rng, p):
    return QaoaParams(rng.uniform(0, 2 * np.pi, p), rng.uniform(0, 2 * np.pi, p))


def test_zero_angles_give_uniform_superposition():
    g = Graph(3, ((0, 1, 1.0), (1, 2, 1.0)))
    psi = qaoa_state(g, QaoaParams([0.0], [0.0])).amplitudes
    assert np.allclose(psi, 2 ** -1.5, atol=1e-15)


def test_single_edge_matches_dense_oracle():
    g = Graph(2, ((0, 1, 1.0),))
    psi = qaoa_state(g, QaoaParams([0.3], [0.4])).amplitudes
    assert np.allclose(psi, dense_qaoa_state(g, [0.3], [0.4]), atol=1e-10)


@given(st.integers(2, 5), st.integers(1, 3), st.integers(0, 10_000))
def test_qaoa_matches_dense_oracle_and_is_normalised(n, p, seed):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(n, 0.6, rng)
    params = _params(rng, p)
    state = qaoa_state(g, params)
    assert abs(state.norm() - 1.0) < 1e-12
    assert np.allclose(state.amplitudes, dense_qaoa_state(g, params.gammas, params.betas), atol=1e-10)


def test_weighted_graph_matches_dense_oracle(rng):
    g = Graph(4, ((0, 1, 0.5), (1, 3, -1.25), (0, 2, 2.0), (2, 3, 1.0)))
    params = _params(rng, 2)
    assert np.allclose(qaoa_state(g, params).amplitudes, dense_qaoa_state(g, params.gammas, params.betas), atol=1e-10)


def test_hea_zero_params_is_all_zeros_state():
    psi = hardware_efficient_state(3, 2, np.zeros(6)).amplitudes
    expected = np.zeros(8)
    expected[0] = 1.0
    assert np.allclose(psi, expected)


def test_hea_single_qubit_flip():
    psi = hardware_efficient_state(1, 1, [np.pi]).amplitudes
    assert abs(abs(psi[1]) - 1.0) < 1e-12


@given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 10_000))
def test_hea_matches_dense_oracle(n, layers, seed):
    params = np.random.default_rng(seed).uniform(-np.pi, np.pi, n * layers)
    state = hardware_efficient_state(n, layers, params)
    assert abs(state.norm() - 1.0) < 1e-12
    assert np.allclose(state.amplitudes, dense_hea_state(n, layers, params), atol=1e-10)


def test_hea_parameter_count_checked():
    with pytest.raises(ValueError):
        hardware_efficient_state(2, 2, np.zeros(3))


def test_qubit_cap():
    g = Graph(5, ((0, 1, 1.0),))
    with pytest.raises(QubitLimitError):
        qaoa_state(g, QaoaParams([0.1], [0.1]), max_qubits=4)


def test_uniform_state_zeroes_every_zz_term():
    g = random_connected_graph(4, 0.7, np.random.default_rng(3))
    state = qaoa_state(g, QaoaParams([0.0], [0.0]))
    assert abs(exact_expectation(state, maxcut_observable(g))) < 1e-14


def test_computational_eigenstate():
    zero = StateVector(np.array([1, 0, 0, 0], dtype=complex), 2)
    obs = maxcut_observable(Graph(2, ((0, 1, 1.0),)))
    assert exact_expectation(zero, obs) == pytest.approx(1.0, abs=1e-15)
    assert sample_estimate(zero, obs, ShotPlan((1,)), np.random.default_rng(0)) == 1.0


@given(st.integers(0, 10_000))
def test_exact_expectation_matches_dense_oracle_multibasis(seed):
    rng = np.random.default_rng(seed)
    n = 3
    strings = ["".join(rng.choice(list("IXYZ"), n)) for _ in range(6)]
    obs = group_commuting([PauliTerm(float(rng.normal()), s) for s in strings])
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    exact = exact_expectation(StateVector(psi, n), obs)
    assert exact == pytest.approx(np.vdot(psi, dense_observable(obs) @ psi).real, abs=1e-10)


def test_identity_observable_is_exact_for_any_shots(rng):
    obs = group_commuting([PauliTerm(0.37, "III")])
    state = hardware_efficient_state(3, 1, rng.uniform(0, 3, 3))
    for shots in (1, 7, 100):
        assert sample_estimate(state, obs, ShotPlan((shots,)), rng) == 0.37


def test_exact_plan_bypasses_sampling(rng):
    g = Graph(3, ((0, 1, 1.0), (1, 2, 1.0)))
    state = qaoa_state(g, _params(rng, 1))
    obs = maxcut_observable(g)
    assert sample_estimate(state, obs, ShotPlan.exact(), rng) == exact_expectation(state, obs)


def _draws(state, obs, shots, count, seed):
    rng = np.random.default_rng(seed)
    plan = ShotPlan.uniform(shots, obs.num_bases)
    return np.array([sample_estimate(state, obs, plan, rng) for _ in range(count)])


@pytest.mark.parametrize("kind", ["maxcut", "ising"])
def test_estimator_unbiased_and_variance_scales(kind):
    rng = np.random.default_rng(99)
    if kind == "maxcut":
        g = random_connected_graph(4, 0.6, rng)
        state, obs = qaoa_state(g, _params(rng, 2)), maxcut_observable(g)
    else:
        obs = transverse_ising_observable(3, 0.8)
        state = hardware_efficient_state(3, 2, rng.uniform(0, 2 * np.pi, 6))
    exact = exact_expectation(state, obs)
    d1 = _draws(state, obs, 100, 1000, 1)
    d4 = _draws(state, obs, 400, 1000, 2)
    assert abs(d1.mean() - exact) < 4 * d1.std(ddof=1) / math.sqrt(d1.size)
    ratio = d1.var(ddof=1) / d4.var(ddof=1)
    assert 3.0 <= ratio <= 5.0


def test_sampling_is_deterministic_per_seed(rng):
    g = random_connected_graph(4, 0.6, rng)
    state, obs = qaoa_state(g, _params(rng, 2)), maxcut_observable(g)
    assert np.array_equal(_draws(state, obs, 50, 20, 5), _draws(state, obs, 50, 20, 5))


def test_shot_plan_validation():
    with pytest.raises(ValueError):
        ShotPlan((0,))
    assert ShotPlan.uniform(10, 3).total == 30
    obs = transverse_ising_observable(2)
    state = hardware_efficient_state(2, 1, [0.1, 0.2])
    with pytest.raises(ValueError):
        sample_estimate(state, obs, ShotPlan((10,)), np.random.default_rng(0))


def test_qaoa_params_vector_layout():
    params = QaoaParams.from_vector([1.0, 2.0, 3.0, 4.0])
    assert list(params.gammas) == [1.0, 2.0] and list(params.betas) == [3.0, 4.0]
    assert list(params.to_vector()) == [1.0, 2.0, 3.0, 4.0]
    with pytest.raises(ValueError):
        QaoaParams.from_vector([1.0, 2.0, 3.0])
