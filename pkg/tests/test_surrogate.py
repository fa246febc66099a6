import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra.numpy import arrays

from sbo_vqa.sbo import latin_hypercube
from sbo_vqa.surrogate import SamplePoint, SurrogateModel, fit, fit_arrays, silverman_bandwidth

finite = st.floats(-5, 5, allow_nan=False)


def scalar_oracle(points, values, sigma, theta, normalized=False):
    """Straight-line re-evaluation with Python floats."""
    num = den = 0.0
    for x, v in zip(points.tolist(), values.tolist()):
        d2 = sum((a - b) ** 2 for a, b in zip(x, theta))
        k = math.exp(-d2 / (2.0 * sigma))
        num += v * k
        den += k
    return num / den if normalized else num


def fd_gradient(model, theta, h=1e-5):
    return np.array([(model.evaluate(theta + h * e) - model.evaluate(theta - h * e)) / (2 * h)
                     for e in np.eye(theta.size)])


def test_silverman_closed_form():
    assert silverman_bandwidth(1, 2) == 1.0
    mp = mpmath.mpf(4) / (20 * 6)
    expected = float(mp ** (mpmath.mpf(1) / 8))
    assert silverman_bandwidth(20, 4) == pytest.approx(expected, rel=1e-15)
    assert round(silverman_bandwidth(20, 4), 4) == 0.6537


@pytest.mark.parametrize("tau,dim", [(0, 2), (2, 0), (-1, 3)])
def test_silverman_rejects_nonpositive(tau, dim):
    with pytest.raises(ValueError):
        silverman_bandwidth(tau, dim)


def test_fit_examples():
    m = fit([SamplePoint(np.array([0.1, 0.2]), -1.0)], 0.5)
    assert m.tau == 1 and m.dim == 2
    rng = np.random.default_rng(0)
    pts = latin_hypercube(20, 3, rng)
    m = fit_arrays(pts, rng.normal(size=20), 0.5)
    assert m.tau == 20
    with pytest.raises(ValueError):
        fit([], 0.5)
    with pytest.raises(ValueError):
        fit([SamplePoint(np.zeros(2), 1.0), SamplePoint(np.zeros(3), 1.0)], 0.5)
    with pytest.raises(ValueError):
        fit_arrays(np.zeros((2, 2)), np.zeros(2), 0.0)
    with pytest.raises(ValueError):
        fit_arrays(np.zeros((2, 2)), np.array([0.0, np.inf]), 1.0)
    with pytest.raises(ValueError):
        m.evaluate(np.zeros(2))


@pytest.mark.parametrize("normalized", [False, True])
def test_single_sample(normalized):
    m = fit_arrays(np.array([[0.3, -0.2]]), np.array([-0.7]), 0.4, normalized)
    assert m.evaluate([0.3, -0.2]) == -0.7
    assert np.array_equal(m.gradient([0.3, -0.2]), np.zeros(2))


def test_two_symmetric_samples():
    v, r, sigma = 0.8, 0.6, 0.3
    m = fit_arrays(np.array([[-r / 2, 0.0], [r / 2, 0.0]]), np.array([v, v]), sigma)
    assert m.evaluate([0.0, 0.0]) == pytest.approx(2 * v * math.exp(-(r / 2) ** 2 / (2 * sigma)), rel=1e-15)
    assert np.allclose(m.gradient([0.0, 0.0]), 0.0, atol=1e-16)


@pytest.mark.parametrize("normalized", [False, True])
def test_matches_scalar_oracle(normalized):
    rng = np.random.default_rng(1)
    for _ in range(20):
        dim = int(rng.integers(1, 15))
        pts, vals, theta = rng.random((20, dim)), rng.normal(size=20), rng.random(dim)
        m = fit_arrays(pts, vals, float(rng.uniform(0.1, 1.0)), normalized)
        assert m.evaluate(theta) == pytest.approx(scalar_oracle(pts, vals, m.sigma, theta, normalized), abs=1e-12)


def test_gradient_formula_plain():
    rng = np.random.default_rng(2)
    pts, vals, theta = rng.random((20, 4)), rng.normal(size=20), rng.random(4)
    m = fit_arrays(pts, vals, 0.3)
    k = np.exp(-((pts - theta) ** 2).sum(1) / 0.6)
    assert np.allclose(m.gradient(theta), (vals * k) @ (pts - theta) / 0.3, rtol=1e-12)


@pytest.mark.parametrize("normalized", [False, True])
@given(seed=st.integers(0, 2**31), dim=st.sampled_from([2, 4, 14]))
def test_gradient_matches_finite_differences(normalized, seed, dim):
    rng = np.random.default_rng(seed)
    pts = 0.2 * latin_hypercube(20, dim, rng)
    m = fit_arrays(pts, rng.normal(size=20), silverman_bandwidth(20, dim), normalized)
    theta = 0.2 * rng.random(dim)
    g = m.gradient(theta)
    fd = fd_gradient(m, theta)
    assume(np.linalg.norm(g) > 1e-6)
    assert np.linalg.norm(g - fd) / np.linalg.norm(g) < 1e-6


@given(arrays(float, (6, 3), elements=finite), arrays(float, 6, elements=finite),
       arrays(float, 3, elements=finite), st.floats(0.05, 3.0), st.booleans())
def test_interpolation_bound(pts, vals, theta, sigma, normalized):
    m = fit_arrays(pts, vals, sigma, normalized)
    bound = np.max(np.abs(vals)) if normalized else np.sum(np.abs(vals))
    assert abs(m.evaluate(theta)) <= bound * (1 + 1e-12) + 1e-300


@given(arrays(float, (5, 2), elements=finite), arrays(float, 5, elements=finite),
       arrays(float, 2, elements=finite), arrays(float, 2, elements=finite), st.booleans())
def test_translation_equivariance(pts, vals, theta, shift, normalized):
    a = fit_arrays(pts, vals, 0.7, normalized).evaluate(theta)
    b = fit_arrays(pts + shift, vals, 0.7, normalized).evaluate(theta + shift)
    assert b == pytest.approx(a, abs=1e-12 * max(1.0, np.abs(vals).sum()))


@pytest.mark.parametrize("normalized", [False, True])
def test_smoothing_reduces_noise(normalized):
    rng = np.random.default_rng(3)
    c, s, ell, dim = 2.0, 0.3, 0.2, 2
    pts = ell * latin_hypercube(20, dim, rng)
    m = fit_arrays(pts, c + s * rng.normal(size=20), silverman_bandwidth(20, dim), normalized)
    grid = np.linspace(0, ell, 41)
    w = np.array([m.evaluate([x, y]) for x in grid for y in grid])
    assert w.std() < s


def test_normalized_model_is_offset_invariant():
    rng = np.random.default_rng(4)
    pts, vals = rng.random((20, 3)), rng.normal(size=20)
    a = fit_arrays(pts, vals, 0.5, normalized=True)
    b = fit_arrays(pts, vals - 10.0, 0.5, normalized=True)
    theta = rng.random(3)
    assert b.evaluate(theta) == pytest.approx(a.evaluate(theta) - 10.0, abs=1e-12)
    assert np.allclose(a.gradient(theta), b.gradient(theta), atol=1e-12)


def test_normalized_far_query_does_not_underflow():
    m = fit_arrays(np.array([[0.0], [1.0]]), np.array([1.0, 3.0]), 1e-4, normalized=True)
    assert m.evaluate([50.0]) == pytest.approx(3.0)


def test_dump_round_trip():
    rng = np.random.default_rng(5)
    m = fit_arrays(rng.random((4, 2)), rng.normal(size=4), 0.25, normalized=True)
    back = SurrogateModel.from_dict(json.loads(m.dumps()))
    assert back.sigma == m.sigma and back.normalized
    assert np.array_equal(back.points, m.points) and np.array_equal(back.values, m.values)


def test_model_arrays_are_read_only():
    m = fit_arrays(np.zeros((2, 2)), np.ones(2), 1.0)
    with pytest.raises(ValueError):
        m.values[0] = 3.0
