"""Recovering theta from a valuation and approximating the valuation by a
combination of dual quermassintegrals with a certified error."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from ._parallel import parallel_map
from .bodies import Ball, StarBody
from .errors import ContractViolation, DomainExceededError, ParameterError
from .sphere import SphereQuadrature, integrate, surface_measure
from .theta import ThetaFunction
from .valuation import BlackBoxValuation, as_valuation, dual_quermassintegral, eval_valuation

MAX_MONOMIAL_DEGREE = 32


@dataclass(frozen=True, eq=False)
class ThetaRecovery:
    """theta(lambda_i) = V(lambda_i B) / sigma_{n-1} on a grid.

    Calling the recovery queries the source valuation off-grid when it is
    available and interpolates linearly otherwise.
    """

    lambda_grid: np.ndarray
    theta_values: np.ndarray
    n: int
    source: BlackBoxValuation | None = None

    @property
    def M(self) -> float:
        return float(self.lambda_grid[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.source is None:
            return np.interp(x, self.lambda_grid, self.theta_values)
        sigma = surface_measure(self.n)
        flat = [self.source(Ball(self.n, float(t))) / sigma for t in x.reshape(-1)]
        return np.asarray(flat).reshape(x.shape)


def recover_theta(V, M: float, grid_size: int, q: SphereQuadrature | None = None) -> ThetaRecovery:
    if grid_size < 2:
        raise ParameterError("grid_size must be >= 2")
    if not M > 0:
        raise ParameterError("M must be positive")
    V = as_valuation(V, q)
    sigma = surface_measure(V.n)
    grid = np.linspace(0.0, float(M), int(grid_size))
    values = []
    for lam in grid:
        try:
            values.append(V(Ball(V.n, float(lam))) / sigma)
        except Exception as exc:
            exc.args = (f"valuation failed at lambda = {lam!r}: {exc}",) + exc.args[1:]
            exc.lam = float(lam)
            raise
    return ThetaRecovery(grid, np.asarray(values), V.n, V)


@dataclass(frozen=True, eq=False)
class PolynomialFit:
    coefficients: np.ndarray  # monomial a_0..a_l (NaN beyond MAX_MONOMIAL_DEGREE)
    fit_error: float
    chebyshev: Chebyshev
    M: float
    sample_points: int

    @property
    def degree(self) -> int:
        return self.chebyshev.degree()

    def __iter__(self):
        yield self.coefficients
        yield self.fit_error

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.degree <= MAX_MONOMIAL_DEGREE:
            return np.polynomial.polynomial.polyval(x, self.coefficients)
        return self.chebyshev(x)


def fit_polynomial(theta, M: float, degree: int, sample_factor: int = 50) -> PolynomialFit:
    """Chebyshev interpolation of theta on [0, M], re-expanded in monomials.

    ``fit_error`` is the max deviation on a uniform grid of
    ``sample_factor * (degree + 1) + 1`` points (an estimate of the sup-norm).
    For a recovery without a source valuation, a discrete Chebyshev least
    squares fit on the recovery grid is used and the error is measured there.
    """
    if int(degree) != degree or degree < 0:
        raise ParameterError(f"fit degree must be a nonnegative integer, got {degree!r}")
    if not (math.isfinite(M) and M > 0):
        raise ParameterError(f"degenerate fit interval [0, {M!r}]")
    degree = int(degree)
    if sample_factor < 50:
        raise ParameterError("sample grid must be at least 50 x (degree + 1) points")
    if isinstance(theta, ThetaRecovery) and theta.source is None:
        if theta.lambda_grid.size < degree + 1:
            raise ParameterError("recovery grid too small for the requested degree")
        cheb = Chebyshev.fit(theta.lambda_grid, theta.theta_values, degree, domain=[0.0, M])
        grid, target = theta.lambda_grid, theta.theta_values
    else:
        cheb = Chebyshev.interpolate(lambda x: np.asarray(theta(x), dtype=float), degree, domain=[0.0, M])
        grid = np.linspace(0.0, M, sample_factor * (degree + 1) + 1)
        target = np.asarray(theta(grid), dtype=float)
    if degree <= MAX_MONOMIAL_DEGREE:
        coeffs = cheb.convert(kind=Polynomial, domain=[-1, 1], window=[-1, 1]).coef
        coeffs = np.concatenate([coeffs, np.zeros(degree + 1 - coeffs.size)])
        approx = np.polynomial.polynomial.polyval(grid, coeffs)
    else:
        coeffs = np.full(degree + 1, np.nan)
        approx = cheb(grid)
    err = float(np.max(np.abs(target - approx)))
    return PolynomialFit(coeffs, err, cheb, float(M), int(grid.size))


def quermass_combination(coefficients, K: StarBody, q: SphereQuadrature, M: float | None = None,
                         max_degree: int = MAX_MONOMIAL_DEGREE) -> float:
    """sum_k a_k n W~_{n-k}(K).

    A ``PolynomialFit`` above ``max_degree`` is evaluated in its Chebyshev
    basis (the same polynomial, better conditioned).
    """
    if M is not None and K.bound > M:
        raise DomainExceededError(f"body bound {K.bound!r} exceeds M = {M!r}", value=K.bound, bound=M)
    if isinstance(coefficients, PolynomialFit) and coefficients.degree > max_degree:
        rho = K(q.nodes)
        return integrate(q, lambda _: coefficients.chebyshev(rho))
    a = coefficients.coefficients if isinstance(coefficients, PolynomialFit) else np.asarray(coefficients, float)
    if a.size - 1 > max_degree:
        raise ParameterError(f"monomial combinations are capped at degree {max_degree}")
    n = q.n
    terms = []
    for k, ak in enumerate(a):
        if ak == 0.0:
            continue
        if k <= n:
            terms.append(ak * n * dual_quermassintegral(K, k, q))
        else:
            # beyond k = n this is still (1/n) int rho^k dm, outside the classical index range
            rho = K(q.nodes)
            terms.append(ak * integrate(q, lambda _: rho ** k))
    return math.fsum(terms)


@dataclass
class ApproxReport:
    degree: int
    coefficients: list
    fit_error: float
    valuation_error_bound: float
    empirical_max_residual: float
    M: float
    n: int
    probe_family: str
    probe_count: int
    quadrature_tolerance: float
    bound_holds: bool
    surface_measure: float
    fit_sample_points: int
    residuals: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ApproxReport":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__})


def approximation_report(V, M: float, degree: int, probe_bodies: Sequence[StarBody],
                         q: SphereQuadrature, probe_family: str = "user probes",
                         quadrature_tolerance: float = 1e-9, strict: bool = True) -> ApproxReport:
    """Fit theta on [0, M], then compare V with its quermassintegral
    combination on every probe; the residual must stay within
    eps * sigma_{n-1} + 10 * quadrature_tolerance."""
    for i, K in enumerate(probe_bodies):
        if K.bound > M:
            raise DomainExceededError(f"probe {i} has bound {K.bound!r} > M = {M!r}", value=K.bound, bound=M)
    if isinstance(V, ThetaFunction):
        theta, value = V, (lambda K: eval_valuation(V, K, q))
    else:
        V = as_valuation(V, q)
        theta, value = recover_theta(V, M, max(degree + 1, 2)), V
    fit = fit_polynomial(theta, M, degree)
    sigma = surface_measure(q.n)

    def residual(K):
        return abs(value(K) - quermass_combination(fit, K, q))

    residuals = list(parallel_map(residual, probe_bodies))
    worst = max(residuals, default=0.0)
    bound = fit.fit_error * sigma
    holds = worst <= bound + 10.0 * quadrature_tolerance
    report = ApproxReport(
        degree=int(degree), fit_error=fit.fit_error,
        coefficients=[float(c) if math.isfinite(c) else None for c in fit.coefficients],
        valuation_error_bound=bound, empirical_max_residual=worst, M=float(M), n=q.n,
        probe_family=probe_family, probe_count=len(probe_bodies), quadrature_tolerance=quadrature_tolerance,
        bound_holds=bool(holds), surface_measure=sigma, fit_sample_points=fit.sample_points,
        residuals=residuals)
    if strict and not holds:
        raise ContractViolation(f"approximation residual {worst!r} exceeds eps * sigma + 10 tol = "
                                f"{bound + 10 * quadrature_tolerance!r}")
    return report
