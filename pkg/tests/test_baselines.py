import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sbo_vqa.baselines import QuasiNewtonConfig, SpsaConfig, quasi_newton_run, spsa_gradient, spsa_run
from sbo_vqa.objective import FunctionObjective, quadratic_bowl


def _bowl(center, noise=0.0):
    center = np.asarray(center, dtype=float)
    return FunctionObjective(quadratic_bowl(center), center.size, noise=noise)


def test_gain_sequences():
    cfg = SpsaConfig()
    assert cfg.perturbation_gain(0) == cfg.c
    c = [cfg.perturbation_gain(k) for k in range(200)]
    a = [cfg.step_gain(k) for k in range(200)]
    assert all(x > 0 for x in a + c)
    assert all(y < x for x, y in zip(c, c[1:]))
    assert all(y < x for x, y in zip(a, a[1:]))
    assert SpsaConfig(A=10.0).step_gain(0) == pytest.approx(0.2 / 11**0.602)


@pytest.mark.parametrize("bad", [dict(a=0.0), dict(c=-1.0), dict(alpha=0.1, gamma=0.2), dict(alpha=1.5),
                                 dict(A=-1.0), dict(iterations=0)])
def test_spsa_config_validation(bad):
    with pytest.raises(ValueError):
        SpsaConfig(**bad)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8), st.floats(0.01, 1.0), st.integers(0, 2**31))
def test_gradient_on_linear_objectives(g, ck, seed):
    # The two-point difference is exact, so ghat = (g . delta) * delta for every
    # draw; for D = 1 that is g itself.
    g = np.array(g)
    obj = FunctionObjective(lambda x: float(g @ x), g.size)
    rng = np.random.default_rng(seed)
    delta = rng.choice([-1.0, 1.0], size=g.size)
    ghat, _, _ = spsa_gradient(obj, rng.normal(size=g.size), ck, delta, rng)
    assert np.allclose(ghat, (g @ delta) * delta, rtol=1e-9, atol=1e-9)
    if g.size == 1:
        assert ghat[0] == pytest.approx(g[0], rel=1e-9, abs=1e-9)


def test_gradient_on_linear_objective_is_unbiased_over_all_signs():
    g = np.array([0.5, -1.5, 2.0])
    obj = FunctionObjective(lambda x: float(g @ x), 3)
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * 3)).reshape(3, -1).T
    mean = np.mean([spsa_gradient(obj, np.zeros(3), 0.1, d, None)[0] for d in signs], axis=0)
    assert np.allclose(mean, g, atol=1e-12)


def test_spsa_converges_on_bowl():
    c = np.array([0.3, -0.2, 0.1, 0.4])
    trace = spsa_run(_bowl(c), np.zeros(4), SpsaConfig(iterations=500), np.random.default_rng(0))
    assert np.linalg.norm(trace.theta_opt - c) < 0.05


def test_spsa_shot_accounting_and_replay():
    obj = _bowl([0.0, 0.0], noise=0.1).with_shots(11)
    cfg = SpsaConfig(iterations=17)
    a = spsa_run(obj, [1.0, 1.0], cfg, np.random.default_rng(3))
    b = spsa_run(obj, [1.0, 1.0], cfg, np.random.default_rng(3))
    assert a.total_shots == 2 * 11 * 17
    assert len(a) == 17 and all(r.samples.shape == (2, 2) for r in a.records)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())


def test_qn_converges_on_noiseless_bowl():
    c = np.array([0.3, -0.2, 0.1, 0.4])
    trace = quasi_newton_run(_bowl(c), np.zeros(4), QuasiNewtonConfig(iterations=50), np.random.default_rng(0))
    assert np.linalg.norm(trace.theta_opt - c) < 1e-4
    assert len(trace) == 50


def test_qn_pure_noise_trace_is_well_formed():
    obj = FunctionObjective(lambda x: 1.0, 3, noise=0.5).with_shots(5)
    trace = quasi_newton_run(obj, np.zeros(3), QuasiNewtonConfig(iterations=20), np.random.default_rng(1))
    assert trace.total_shots == (2 * 3 + 1) * 5 * 20
    assert [r.cumulative_shots for r in trace.records] == [7 * 5 * k for k in range(1, 21)]
    assert all(r.samples.shape == (7, 3) and r.values.shape == (7,) for r in trace.records)
    assert np.all(np.isfinite(trace.estimates()))


def test_qn_replay_and_bounds():
    obj = _bowl([2.0, -2.0], noise=0.01)
    cfg = QuasiNewtonConfig(iterations=15, bounds=([-1.0, -1.0], [1.0, 1.0]))
    a = quasi_newton_run(obj, [0.0, 0.0], cfg, np.random.default_rng(2))
    b = quasi_newton_run(obj, [0.0, 0.0], cfg, np.random.default_rng(2))
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    for r in a.records:
        assert np.all(np.abs(r.output) <= 1.0 + 1e-15)
    assert np.allclose(a.theta_opt, [1.0, -1.0], atol=0.05)


def test_qn_config_validation():
    with pytest.raises(ValueError):
        QuasiNewtonConfig(iterations=0)
    with pytest.raises(ValueError):
        QuasiNewtonConfig(fd_step=0.0)


def test_baselines_share_trace_schema():
    obj = _bowl([0.0, 0.0])
    keys = set(spsa_run(obj, [0.5, 0.5], SpsaConfig(iterations=2), np.random.default_rng(0)).to_dict())
    assert keys == set(quasi_newton_run(obj, [0.5, 0.5], QuasiNewtonConfig(iterations=2),
                                        np.random.default_rng(0)).to_dict())
