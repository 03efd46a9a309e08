import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxselftest.errors import InvalidArgumentError, PreconditionError
from ctxselftest.graphs import cycle_graph
from ctxselftest.robustness import (
    ProbePoint,
    RobustnessProbe,
    fit_scaling_exponent,
    gram_closeness_bound,
    normalization_bound_check,
    projector_bound_check,
    random_family_probe,
    suboptimality_distance_probe,
)
from ctxselftest.theta_sdp import build_problem, solve

C5 = cycle_graph(5)


def random_psd_pair(rng, n, eps):
    b = rng.standard_normal((n, rng.integers(1, n + 1)))
    x = b @ b.T
    d = rng.standard_normal((n, n))
    d = (d + d.T) / 2
    x2 = x + eps * d / np.linalg.norm(d)
    w, q = np.linalg.eigh(x2)
    x2 = (q * np.maximum(w, 0)) @ q.T
    return x, x2


def test_gram_closeness_identical():
    b = np.random.default_rng(0).standard_normal((5, 3))
    x = b @ b.T
    _, dist, bound = gram_closeness_bound(x, x)
    assert dist <= 1e-7 and bound == 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 12), st.floats(1e-6, 1e-1))
def test_gram_closeness_property(seed, n, eps):
    x, x2 = random_psd_pair(np.random.default_rng(seed), n, eps)
    u, dist, bound = gram_closeness_bound(x, x2)
    assert np.allclose(u.T @ u, np.eye(u.shape[0]), atol=1e-9)
    assert dist <= bound + 1e-8


def test_normalization_examples():
    assert normalization_bound_check([1.0, 2.0], [1.0, 2.0]) == (0.0, 0.0)
    lhs, rhs = normalization_bound_check([1.0, 0.0], [1.0, 0.1])
    # chord between unit vectors at angle atan(0.1)
    assert lhs == pytest.approx(2 * math.sin(math.atan(0.1) / 2), abs=1e-15)
    assert lhs == pytest.approx(0.0997, abs=1e-4)
    assert rhs == pytest.approx(0.2, abs=1e-15)


def test_normalization_precondition():
    with pytest.raises(PreconditionError):
        normalization_bound_check([1.0, 0.0], [0.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 8), st.floats(0, 0.499))
def test_normalization_property(seed, dim, frac):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(dim) * rng.uniform(0.1, 10)
    d = rng.standard_normal(dim)
    b = a + frac * np.linalg.norm(a) * d / np.linalg.norm(d)
    lhs, rhs = normalization_bound_check(a, b)
    assert lhs <= rhs + 1e-12


def test_projector_examples():
    x = np.array([0.6, 0.8])
    assert projector_bound_check(x, x) == (0.0, 0.0)
    lhs, rhs = projector_bound_check(x, -x)
    assert lhs == 0.0 and rhs == pytest.approx(2 * math.sqrt(2))
    with pytest.raises(PreconditionError):
        projector_bound_check(np.array([1.0, 1.0]), x)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 8))
def test_projector_property(seed, dim):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal((2, dim))
    x /= np.linalg.norm(x)
    y /= np.linalg.norm(y)
    lhs, rhs = projector_bound_check(x, y)
    assert lhs <= rhs + 1e-12


def test_probe_endpoint_zero(c5_solution):
    probe = suboptimality_distance_probe(C5, c5_solution, steps=3, include_zero=True)
    p0 = probe.points[0]
    assert p0.t == 0.0
    assert abs(p0.epsilon) <= 1e-8
    assert max(p0.gram_distance, p0.vector_distance, p0.projector_distance) <= 1e-6


def test_probe_epsilon_linear_in_t(c5_solution):
    probe = suboptimality_distance_probe(C5, c5_solution, steps=8)
    kappa = math.sqrt(5) - 5 / 6
    assert np.allclose(probe.column("epsilon"), kappa * probe.t, rtol=1e-3)


def test_probe_ratios_bounded(c5_solution):
    probe = suboptimality_distance_probe(C5, c5_solution, steps=20, t_min=1e-6, t_max=1e-1)
    gram = probe.ratios("gram_distance", 1.0)
    assert np.all(np.isfinite(gram)) and gram.max() / gram.min() < 10
    proj = probe.ratios("projector_distance", 0.5)
    assert np.all(np.isfinite(proj)) and proj.max() < 10
    slope, r2 = fit_scaling_exponent(probe, "gram_distance")
    assert 0.9 <= slope <= 1.1 and r2 > 0.99


def test_probe_rejects_unconverged():
    sol = solve(build_problem(C5), max_iter=5)
    with pytest.raises(InvalidArgumentError):
        suboptimality_distance_probe(C5, sol)


def test_probe_rejects_bad_grid(c5_solution):
    with pytest.raises(InvalidArgumentError):
        suboptimality_distance_probe(C5, c5_solution, t_min=0.2, t_max=0.1)


def test_random_family_deterministic(c5_solution):
    a = random_family_probe(C5, c5_solution, trials=4, seed=3)
    b = random_family_probe(C5, c5_solution, trials=4, seed=3)
    assert [p.as_row() for p in a.points] == [p.as_row() for p in b.points]
    assert len(a.points) >= 1
    assert a.ratios("projector_distance", 0.5).max() < 10


def synthetic(power):
    eps = np.geomspace(1e-6, 1e-1, 10)
    return RobustnessProbe(C5, [ProbePoint(e, e, e**power, e**power, e**power) for e in eps])


@pytest.mark.parametrize("power", [1.0, 0.5])
def test_fit_exponent_synthetic(power):
    slope, r2 = fit_scaling_exponent(synthetic(power), "gram_distance")
    assert slope == pytest.approx(power, abs=1e-6)
    assert r2 == pytest.approx(1.0, abs=1e-9)


def test_fit_exponent_errors():
    probe = synthetic(1.0)
    probe.points = probe.points[:3]
    with pytest.raises(InvalidArgumentError):
        fit_scaling_exponent(probe, "gram_distance")
    with pytest.raises(InvalidArgumentError):
        fit_scaling_exponent(synthetic(1.0), "bogus")
