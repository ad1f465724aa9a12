"""Integral valuations V(K) = int theta(rho_K) dm, dual quermassintegrals,
and residual checkers for the valuation identities.

Checkers return magnitudes; thresholds belong to callers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bodies import Ball, StarBody, intersection, radial_sum, rotate, union
from .errors import DimensionMismatchError, DomainExceededError, ParameterError
from .sphere import Rotation, SphereQuadrature, integrate, surface_measure
from .theta import ThetaFunction


def _check_dim(K: StarBody, q: SphereQuadrature):
    if K.n != q.n:
        raise DimensionMismatchError(f"{K.n}-dimensional body integrated with a rule on S^{q.n - 1}")


def eval_valuation(theta: ThetaFunction, K: StarBody, q: SphereQuadrature) -> float:
    _check_dim(K, q)
    rho = K(q.nodes)
    top = float(rho.max())
    if top > theta.M * (1.0 + 1e-12):
        raise DomainExceededError(f"radial function reaches {top!r} > M = {theta.M!r}", value=top, bound=theta.M)
    return integrate(q, lambda _: theta(rho))


@dataclass(frozen=True, eq=False)
class BlackBoxValuation:
    """An opaque map body -> value, with its declared bound and dimension."""

    evaluator: Callable[[StarBody], float]
    M: float
    n: int
    positive: bool = False
    label: str = "black-box"

    def __call__(self, K: StarBody) -> float:
        if K.n != self.n:
            raise DimensionMismatchError(f"{self.label} is defined on {self.n}-dimensional bodies, got {K.n}")
        return float(self.evaluator(K))


def theta_valuation(theta: ThetaFunction, q: SphereQuadrature) -> BlackBoxValuation:
    return BlackBoxValuation(lambda K: eval_valuation(theta, K, q), theta.M, q.n, theta.positive,
                             f"theta-backed ({theta.kind})")


def as_valuation(V, q: SphereQuadrature | None) -> BlackBoxValuation:
    if isinstance(V, BlackBoxValuation):
        return V
    if isinstance(V, ThetaFunction):
        if q is None:
            raise ParameterError("a quadrature rule is required for a theta-backed valuation")
        return theta_valuation(V, q)
    raise ParameterError(f"expected a ThetaFunction or BlackBoxValuation, got {type(V).__name__}")


def dual_quermassintegral(K: StarBody, k: int, q: SphereQuadrature) -> float:
    """W~_{n-k}(K) = (1/n) int rho_K^k dm, with rho^0 = 1 everywhere."""
    _check_dim(K, q)
    if int(k) != k or not 0 <= k <= q.n:
        raise ParameterError(f"quermassintegral index k must lie in 0..{q.n}, got {k!r}")
    if k == 0:
        return integrate(q, lambda U: np.ones(U.shape[0])) / q.n
    rho = K(q.nodes)
    return integrate(q, lambda _: rho ** int(k)) / q.n


def polynomial_valuation(k: int, density: Callable, K: StarBody, q: SphereQuadrature) -> float:
    """int rho_K^k d(mu) for the signed measure mu = density * m."""
    _check_dim(K, q)
    if int(k) != k or k < 0:
        raise ParameterError(f"homogeneity degree must be a nonnegative integer, got {k!r}")
    dens = np.broadcast_to(np.asarray(density(q.nodes), dtype=float), q.weights.shape)
    rho = K(q.nodes)
    return integrate(q, lambda _: dens * rho ** int(k))


def check_valuation_axiom(V, K: StarBody, L: StarBody, q: SphereQuadrature | None = None) -> float:
    """|V(K u L) + V(K n L) - V(K) - V(L)|."""
    V = as_valuation(V, q)
    if K.n != L.n:
        raise DimensionMismatchError("bodies of different dimensions")
    return abs((V(union(K, L)) + V(intersection(K, L))) - (V(K) + V(L)))


def axiom_scale(V, K: StarBody, L: StarBody, q: SphereQuadrature | None = None) -> float:
    """Normalizer 1 + |V(K)| + |V(L)| for the relative axiom residual."""
    V = as_valuation(V, q)
    return 1.0 + abs(V(K)) + abs(V(L))


def inclusion_exclusion_terms(V, bodies: Sequence[StarBody], q: SphereQuadrature | None = None):
    """(V(max of all), [signed V(min over each nonempty subset)])."""
    V = as_valuation(V, q)
    N = len(bodies)
    if not 2 <= N <= 5:
        raise ParameterError(f"inclusion-exclusion is checked for 2 <= N <= 5 bodies, got {N}")
    top = V(union(*bodies))
    terms = []
    for r in range(1, N + 1):
        sign = 1.0 if r % 2 else -1.0
        for subset in itertools.combinations(bodies, r):
            meet = subset[0] if r == 1 else intersection(*subset)
            terms.append(sign * V(meet))
    return top, terms


def inclusion_exclusion_residual(V, bodies: Sequence[StarBody], q: SphereQuadrature | None = None) -> float:
    top, terms = inclusion_exclusion_terms(V, bodies, q)
    return abs(top - math.fsum(terms))


def check_rotation_invariance(V, K: StarBody, rotations: Sequence[Rotation],
                              q: SphereQuadrature | None = None) -> float:
    """max over R of |V(R K) - V(K)|."""
    V = as_valuation(V, q)
    base = V(K)
    return max((abs(V(rotate(K, R)) - base) for R in rotations), default=0.0)


@dataclass(frozen=True)
class ContinuityCheck:
    eta: float
    difference: float
    bound: float
    holds: bool


def continuity_modulus_check(theta: ThetaFunction, K: StarBody, eta: float,
                             q: SphereQuadrature) -> ContinuityCheck:
    """Compare |V(K) - V(L)| with omega(eta) * sigma for L = K +~ eta B (delta(K, L) = eta)."""
    if eta < 0:
        raise ParameterError("perturbation must be >= 0")
    if K.bound + eta > theta.M * (1.0 + 1e-12):
        raise DomainExceededError(f"||rho_K|| + eta = {K.bound + eta!r} exceeds M = {theta.M!r}",
                                  value=K.bound + eta, bound=theta.M)
    L = radial_sum(K, Ball(K.n, float(eta)))
    diff = abs(eval_valuation(theta, K, q) - eval_valuation(theta, L, q))
    bound = theta.modulus(eta) * surface_measure(q.n)
    # quadrature mass equals sigma only to rounding
    return ContinuityCheck(float(eta), diff, bound, diff <= bound * (1.0 + 1e-12))
