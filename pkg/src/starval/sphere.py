"""Directions, rotations and quadrature rules for the surface measure on S^{n-1}.

All rules integrate against the full (non-normalized) surface measure, so the
weights of every rule add up to ``surface_measure(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    NonFiniteIntegrandError,
    ParameterError,
    UnsupportedSchemeError,
)

SCHEMES = ("product-gauss", "monte-carlo")
UNIT_TOL = 1e-12
WEIGHT_SUM_RTOL = 1e-10


def _check_dimension(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def surface_measure(n: int) -> float:
    """Total mass 2 pi^{n/2} / Gamma(n/2) of the unit sphere S^{n-1}."""
    n = _check_dimension(n)
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def as_direction(coords, normalize: bool = True) -> np.ndarray:
    u = np.asarray(coords, dtype=float).reshape(-1)
    _check_dimension(u.size)
    norm = math.sqrt(math.fsum(u * u))
    if not np.all(np.isfinite(u)) or norm == 0.0:
        raise ParameterError(f"not a direction: {coords!r}")
    if normalize:
        return u / norm
    if abs(norm - 1.0) > UNIT_TOL:
        raise ParameterError(f"direction has norm {norm!r}, expected 1")
    return u


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Rotation:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError(f"rotation must be a square matrix, got shape {m.shape}")
        _check_dimension(m.shape[0])
        err = np.max(np.abs(m.T @ m - np.eye(m.shape[0])))
        if err > UNIT_TOL:
            raise ParameterError(f"matrix is not orthogonal (max |R^T R - I| = {err:.3g})")
        if abs(np.linalg.det(m) - 1.0) > UNIT_TOL:
            raise ParameterError("matrix has determinant != +1")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def inverse(self) -> "Rotation":
        return Rotation(self.matrix.T)

    @classmethod
    def identity(cls, n: int) -> "Rotation":
        return cls(np.eye(_check_dimension(n)))

    @classmethod
    def plane(cls, n: int, i: int, j: int, angle: float) -> "Rotation":
        """Rotation by ``angle`` in the (e_i, e_j) coordinate plane."""
        m = np.eye(_check_dimension(n))
        c, s = math.cos(angle), math.sin(angle)
        m[i, i], m[i, j], m[j, i], m[j, j] = c, -s, s, c
        return cls(m)


def random_rotation(n: int, seed: int) -> Rotation:
    """Haar-distributed rotation: QR of a seeded Gaussian matrix, signs fixed."""
    n = _check_dimension(n)
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return Rotation(q)


def apply_rotation(R: Rotation, u) -> np.ndarray:
    """R u for one direction, or row-wise for an (N, n) array; renormalized."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != R.n:
        raise DimensionMismatchError(f"rotation is {R.n}-dimensional, direction has {u.shape[-1]} coordinates")
    v = u @ R.matrix.T
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes and positive weights approximating the surface measure on S^{n-1}.

    ``exact_degree`` is the largest total polynomial degree integrated exactly
    (0 for Monte Carlo). ``mesh_angle`` is a geodesic spacing scale of the nodes.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int
    scheme_id: str
    mesh_angle: float = math.nan
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = _check_dimension(self.n)
        nodes = _frozen(self.nodes)
        weights = _frozen(self.weights)
        if nodes.ndim != 2 or nodes.shape[1] != n or weights.shape != (nodes.shape[0],):
            raise ParameterError("nodes must be (N, n) and weights (N,)")
        if not np.all(weights > 0):
            raise ParameterError("quadrature weights must be strictly positive")
        total = math.fsum(weights.tolist())
        sigma = surface_measure(n)
        if abs(total - sigma) > WEIGHT_SUM_RTOL * sigma:
            raise ParameterError(f"weights sum to {total!r}, expected {sigma!r}")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.weights.shape[0]

    def spec(self) -> dict:
        """Config-style description from which the rule can be rebuilt."""
        return {"scheme": self.scheme_id, "degree": self.exact_degree, **self.params}


def _circle_rule(N: int, degree: int) -> SphereQuadrature:
    t = 2.0 * np.pi * np.arange(N) / N
    nodes = np.column_stack([np.cos(t), np.sin(t)])
    return SphereQuadrature(2, nodes, np.full(N, 2.0 * np.pi / N), N - 1, "product-gauss",
                            2.0 * np.pi / N, {"target_degree": degree})


def _sphere_product_rule(degree: int) -> SphereQuadrature:
    m = degree // 2 + 1  # Gauss-Legendre in z, exact to 2m - 1 >= degree
    n_phi = max(degree + 1, 4)  # trapezoid in azimuth, exact to trig degree n_phi - 1
    z, wz = np.polynomial.legendre.leggauss(m)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    s = np.sqrt(1.0 - zz ** 2)
    nodes = np.stack([s * np.cos(pp), s * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    weights = np.outer(wz, np.full(n_phi, 2.0 * np.pi / n_phi)).reshape(-1)
    polar = np.sort(np.arccos(z))
    gaps = np.diff(np.concatenate([[0.0], polar, [np.pi]]))
    mesh = max(float(gaps.max()), 2.0 * np.pi / n_phi)
    exact = min(2 * m - 1, n_phi - 1)
    return SphereQuadrature(3, nodes, weights, exact, "product-gauss", mesh, {"target_degree": degree})


def monte_carlo_rule(n: int, n_nodes: int, seed: int = 0) -> SphereQuadrature:
    n = _check_dimension(n)
    if n_nodes < 1:
        raise ParameterError("Monte Carlo rule needs at least one node")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n_nodes, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    sigma = surface_measure(n)
    mesh = (sigma / n_nodes) ** (1.0 / (n - 1))
    return SphereQuadrature(n, x, np.full(n_nodes, sigma / n_nodes), 0, "monte-carlo", mesh,
                            {"seed": seed, "n_nodes": n_nodes})


def build_quadrature(n: int, target_degree: int, scheme: str = "product-gauss",
                     seed: int | None = None, n_nodes: int | None = None) -> SphereQuadrature:
    """Build a deterministic rule.

    ``product-gauss`` (n = 2, 3) is exact to at least ``target_degree``;
    ``monte-carlo`` (any n) draws ``n_nodes`` i.i.d. uniform nodes from ``seed``.
    """
    n = _check_dimension(n)
    if int(target_degree) != target_degree or target_degree < 0:
        raise ParameterError(f"target degree must be a nonnegative integer, got {target_degree!r}")
    target_degree = int(target_degree)
    if scheme == "product-gauss":
        if n == 2:
            return _circle_rule(max(target_degree + 1, 4), target_degree)
        if n == 3:
            return _sphere_product_rule(target_degree)
        raise UnsupportedSchemeError(f"product-gauss is only available for n = 2, 3 (got n = {n})")
    if scheme == "monte-carlo":
        return monte_carlo_rule(n, 10_000 if n_nodes is None else int(n_nodes), 0 if seed is None else int(seed))
    raise UnsupportedSchemeError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def quadrature_from_spec(n: int, spec: dict) -> SphereQuadrature:
    """Rebuild a rule from ``{scheme, degree, seed?, n_nodes?}``."""
    return build_quadrature(n, int(spec.get("degree", 0)), spec.get("scheme", "product-gauss"),
                            spec.get("seed"), spec.get("n_nodes"))


def orthonormal_frame(center) -> np.ndarray:
    """Rotation matrix whose last column is ``center``."""
    c = as_direction(center)
    n = c.size
    q, _ = np.linalg.qr(np.column_stack([c, np.eye(n)]))
    q = q[:, :n]
    if q[:, 0] @ c < 0:
        q = -q
    frame = np.column_stack([q[:, 1:], q[:, 0]])
    if np.linalg.det(frame) < 0:
        frame[:, 0] = -frame[:, 0]
    return frame


def _composite_gauss(breaks: Sequence[float], degree: int):
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        m = int(math.ceil((degree + 2) * (b - a) / math.pi)) + 8
        x, w = np.polynomial.legendre.leggauss(m)
        xs.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def cap_aligned_quadrature(center, breakpoints: Sequence[float], degree: int) -> SphereQuadrature:
    """Product rule in polar coordinates about ``center`` with Gauss panels split
    at the given geodesic angles, so zonal integrands with kinks at those angles
    are integrated without node-placement bias. Supported for n = 2, 3.
    """
    c = as_direction(center)
    n = c.size
    breaks = sorted({0.0, math.pi, *(float(b) for b in breakpoints if 0.0 < b < math.pi)})
    frame = orthonormal_frame(c)
    if n == 2:
        sym = sorted({*(-b for b in breaks), *breaks})
        psi, w = _composite_gauss(sym, degree)
        local = np.column_stack([np.sin(psi), np.cos(psi)])
        nodes = local @ frame.T
        mesh = float(np.max(np.diff(np.concatenate([psi, [psi[0] + 2 * np.pi]]))))
        return SphereQuadrature(2, nodes, w, degree, "cap-aligned", mesh,
                                {"center": c.tolist(), "breakpoints": breaks[1:-1]})
    if n != 3:
        raise UnsupportedSchemeError(f"cap-aligned rules are only available for n = 2, 3 (got n = {n})")
    phi, w = _composite_gauss(breaks, degree)
    n_az = max(degree + 1, 4)
    beta = 2.0 * np.pi * np.arange(n_az) / n_az
    pp, bb = np.meshgrid(phi, beta, indexing="ij")
    s = np.sin(pp)
    local = np.stack([s * np.cos(bb), s * np.sin(bb), np.cos(pp)], axis=-1).reshape(-1, 3)
    weights = np.outer(w * np.sin(phi), np.full(n_az, 2.0 * np.pi / n_az)).reshape(-1)
    mesh = max(float(np.max(np.diff(np.concatenate([[0.0], phi, [np.pi]])))), 2.0 * np.pi / n_az)
    return SphereQuadrature(3, local @ frame.T, weights, degree, "cap-aligned", mesh,
                            {"center": c.tolist(), "breakpoints": breaks[1:-1]})


def integrate(q: SphereQuadrature, g: Callable, pointwise: bool = False) -> float:
    """Sum of weight * g(node), with an exactly rounded (order-independent) sum.

    ``g`` receives the (N, n) node array and returns N values; pass
    ``pointwise=True`` for a function of a single direction.
    """
    if pointwise:
        values = np.array([g(u) for u in q.nodes], dtype=float)
    else:
        values = np.broadcast_to(np.asarray(g(q.nodes), dtype=float), q.weights.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise NonFiniteIntegrandError(f"integrand is {values[i]!r} at node {q.nodes[i].tolist()}",
                                      node=q.nodes[i].copy(), index=i)
    return math.fsum((q.weights * values).tolist())
