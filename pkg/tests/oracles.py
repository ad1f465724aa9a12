"""Independent closed-form oracles used by the tests (no starval imports)."""

import itertools
import math

import numpy as np


def sphere_moment(alpha):
    """int over S^{n-1} of prod t_i^{alpha_i} dm."""
    if any(a % 2 for a in alpha):
        return 0.0
    b = [(a + 1) / 2.0 for a in alpha]
    return 2.0 * math.prod(math.gamma(x) for x in b) / math.gamma(sum(b))


def monomials(n, degree):
    return [a for a in itertools.product(range(degree + 1), repeat=n) if sum(a) <= degree]


def random_polynomial(rng, n, degree):
    """Random dense polynomial of total degree <= degree as {alpha: coef}."""
    return {a: float(rng.standard_normal()) for a in monomials(n, degree)}


def poly_eval(poly, U):
    out = np.zeros(U.shape[0])
    for a, c in poly.items():
        out += c * np.prod(U ** np.array(a), axis=1)
    return out


def poly_integral(poly):
    return math.fsum(c * sphere_moment(a) for a, c in poly.items())


def poly_scale(poly):
    return math.fsum(abs(c * sphere_moment(a)) for a, c in poly.items())


def sigma(n):
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def ellipsoid_volume(axes):
    n = len(axes)
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * math.prod(axes)


def cap_area_s2(angle):
    return 2.0 * math.pi * (1.0 - math.cos(angle))


def grid_max(f, lo, hi, samples=200_001):
    x = np.linspace(lo, hi, samples)
    return float(np.max(f(x)))


def best_linear_sup_error(f, lo, hi, n_grid=2001, n_slopes=801):
    """Brute-force minimax over lines a + b x: for each slope the best
    intercept is the midrange of the residual."""
    x = np.linspace(lo, hi, n_grid)
    y = f(x)
    best = math.inf
    for b in np.linspace(-3.0, 3.0, n_slopes):
        r = y - b * x
        best = min(best, 0.5 * float(r.max() - r.min()))
    return best
