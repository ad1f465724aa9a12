"""Orthonormal real harmonic bases on S^1 and S^2, evaluated as polynomials.

Coefficient layouts:
  n = 2: [a_0, a_1, b_1, a_2, b_2, ...] for 1/sqrt(2 pi), cos(k phi)/sqrt(pi), sin(k phi)/sqrt(pi)
  n = 3: index l*l + l + m for Y_lm, m = -l..l (m < 0 is the sine family)
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError, UnsupportedSchemeError


def degree_from_length(n: int, length: int) -> int:
    if n == 2:
        if length < 1 or length % 2 == 0:
            raise ParameterError(f"circle harmonics need an odd number of coefficients, got {length}")
        return (length - 1) // 2
    if n == 3:
        d = math.isqrt(length) - 1
        if length < 1 or (d + 1) ** 2 != length:
            raise ParameterError(f"sphere harmonics need (d+1)^2 coefficients, got {length}")
        return d
    raise UnsupportedSchemeError(f"harmonic bodies are only available for n = 2, 3 (got n = {n})")


def n_coefficients(n: int, degree: int) -> int:
    return 2 * degree + 1 if n == 2 else (degree + 1) ** 2


def _powers_xy(x, y, d):
    """Re and Im of (x + iy)^m for m = 0..d."""
    re = [np.ones_like(x)]
    im = [np.zeros_like(x)]
    for _ in range(d):
        r, i = re[-1], im[-1]
        re.append(r * x - i * y)
        im.append(r * y + i * x)
    return re, im


def circle_basis(U: np.ndarray, degree: int) -> np.ndarray:
    x, y = U[:, 0], U[:, 1]
    re, im = _powers_xy(x, y, degree)
    cols = [np.full_like(x, 1.0 / math.sqrt(2.0 * math.pi))]
    s = 1.0 / math.sqrt(math.pi)
    for k in range(1, degree + 1):
        cols.append(s * re[k])
        cols.append(s * im[k])
    return np.column_stack(cols)


def sphere_basis(U: np.ndarray, degree: int) -> np.ndarray:
    """Real orthonormal Y_lm at the rows of U, via the normalized Legendre recurrence
    with the sin^m factor folded into (x + iy)^m (no Condon-Shortley phase)."""
    x, y, z = U[:, 0], U[:, 1], U[:, 2]
    re, im = _powers_xy(x, y, degree)
    out = np.empty((U.shape[0], (degree + 1) ** 2))
    pmm = np.full_like(z, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(degree + 1):
        if m > 0:
            pmm = pmm * math.sqrt((2 * m + 1) / (2 * m))
        p_prev2, p_prev = None, pmm
        for l in range(m, degree + 1):
            if l == m + 1:
                p = math.sqrt(2 * m + 3) * z * pmm
            elif l > m + 1:
                a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
                b = math.sqrt(((l - 1) ** 2 - m * m) * (2 * l + 1) / ((2 * l - 3) * (l * l - m * m)))
                p = a * z * p_prev - b * p_prev2
            else:
                p = pmm
            if l > m:
                p_prev2, p_prev = p_prev, p
            base = l * l + l
            if m == 0:
                out[:, base] = p
            else:
                out[:, base + m] = math.sqrt(2.0) * p * re[m]
                out[:, base - m] = math.sqrt(2.0) * p * im[m]
    return out


def basis(U: np.ndarray, n: int, degree: int) -> np.ndarray:
    if n == 2:
        return circle_basis(U, degree)
    if n == 3:
        return sphere_basis(U, degree)
    raise UnsupportedSchemeError(f"harmonic bodies are only available for n = 2, 3 (got n = {n})")


def sup_bound(n: int, coefficients) -> float:
    """Upper bound on |sum c_i Y_i| over the sphere (Cauchy-Schwarz per degree
    with the addition theorem sum_m Y_lm^2 = (2l+1)/(4 pi))."""
    c = np.asarray(coefficients, dtype=float)
    d = degree_from_length(n, c.size)
    if n == 2:
        total = abs(c[0]) / math.sqrt(2.0 * math.pi)
        for k in range(1, d + 1):
            total += math.hypot(c[2 * k - 1], c[2 * k]) / math.sqrt(math.pi)
        return total
    total = 0.0
    for l in range(d + 1):
        block = c[l * l:(l + 1) ** 2]
        total += math.sqrt(float(block @ block)) * math.sqrt((2 * l + 1) / (4.0 * math.pi))
    return total
