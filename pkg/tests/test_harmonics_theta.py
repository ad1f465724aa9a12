import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starval import harmonics
from starval.errors import DomainExceededError, ParameterError, SpecError
from starval.sphere import build_quadrature
from starval.theta import builtin, parse_theta, piecewise, polynomial, power


@pytest.mark.parametrize("n, degree", [(2, 9), (3, 7)])
def test_basis_is_orthonormal(n, degree):
    q = build_quadrature(n, 2 * degree)
    Y = harmonics.basis(q.nodes, n, degree)
    gram = (Y * q.weights[:, None]).T @ Y
    assert np.max(np.abs(gram - np.eye(Y.shape[1]))) < 1e-12


def test_basis_sizes():
    assert harmonics.n_coefficients(3, 4) == 25
    assert harmonics.n_coefficients(2, 4) == 9
    assert harmonics.degree_from_length(3, 16) == 3
    with pytest.raises(ParameterError):
        harmonics.degree_from_length(3, 5)


def test_low_degree_values():
    U = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
    Y = harmonics.basis(U, 3, 1)
    assert np.allclose(Y[:, 0], 1 / math.sqrt(4 * math.pi))
    # the l = 1 block spans x, y, z with the same normalization
    c = math.sqrt(3 / (4 * math.pi))
    assert np.allclose(np.sort(np.abs(Y[0, 1:])), [0, 0, c], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 6))
def test_sup_bound_dominates(seed, degree):
    c = np.random.default_rng(seed).standard_normal(harmonics.n_coefficients(3, degree))
    q = build_quadrature(3, 40)
    vals = harmonics.basis(q.nodes, 3, degree) @ c
    assert np.max(np.abs(vals)) <= harmonics.sup_bound(3, c) * (1 + 1e-12)


def test_theta_domain_is_enforced():
    th = power(2.0, 2.0)
    assert th(np.array([2.0]))[0] == 4.0
    with pytest.raises(DomainExceededError):
        th(np.array([2.1]))
    with pytest.raises(DomainExceededError):
        th(np.array([-0.1]))


@pytest.mark.parametrize("th", [power(2.0, 2.0), power(0.5, 2.0), builtin("sin", 2.0),
                                builtin("exp-minus-one", 2.0), builtin("logistic-hump", 2.0),
                                polynomial([0.3, -1.0, 0.5, 0.2], 2.0),
                                piecewise([0.0, 0.5, 1.2, 2.0], [0.0, 1.0, -0.5, 0.25])])
@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.0, 2.0), y=st.floats(0.0, 2.0))
def test_declared_modulus_bounds_increments(th, x, y):
    fx, fy = th(np.array([x, y]))
    assert abs(fx - fy) <= th.modulus(abs(x - y)) * (1 + 1e-12) + 1e-15


def test_logistic_hump_shape():
    th = builtin("logistic-hump", 3.0)
    assert th(np.array([0.0]))[0] == 0.0
    assert th.max_on(3.0) == pytest.approx(1.0, abs=1e-12)
    assert th(np.array([math.log(3.0)]))[0] == pytest.approx(1.0, abs=1e-14)


def test_max_on_uses_interior_optimum():
    th = polynomial([0.0, 1.0, -1.0], 1.0, positive=True)
    assert th.max_on(1.0) == pytest.approx(0.25, abs=1e-14)
    assert th.max_on(0.25) == pytest.approx(0.25 - 0.0625, abs=1e-14)


def test_positive_flag_validated():
    with pytest.raises(ParameterError):
        polynomial([1.0, 1.0], 1.0, positive=True)
    with pytest.raises(ParameterError):
        builtin("sin", 4.0, positive=True)


def test_theta_spec():
    th = parse_theta({"kind": "builtin", "id": "power", "p": 3, "M": 2})
    assert th(np.array([1.5]))[0] == pytest.approx(3.375)
    assert parse_theta(th.to_spec()).to_spec() == th.to_spec()
    with pytest.raises(SpecError):
        parse_theta({"kind": "builtin", "id": "power"})
    with pytest.raises(SpecError):
        parse_theta({"kind": "spline", "M": 1})
    with pytest.raises(SpecError):
        parse_theta({"kind": "piecewise", "grid": [0.1, 1], "values": [0, 1], "M": 1})
