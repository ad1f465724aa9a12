"""Desk-scale outer measures and contents of a theta-backed valuation.

The outer measure of an open cap G at level lam is the sup of V(f) over
bumps f with f / lam supported in G; the content of a closed cap K is the inf
of V(f) over bumps equal to lam on K. Both are searched over the trapezoidal
cap-bump family with a budgeted grid + golden-section search.

Two integration modes:

* ``aligned`` (default): each candidate bump is integrated with a rule built
  in the bump's own polar frame, with Gauss panels split at the plateau and
  support angles. Steep shoulders are then resolved at any degree.
* ``global``: every candidate is integrated with one fixed rule ``q``; the
  shoulder width is kept >= 4 x the rule's mesh angle, and the resulting
  family bias is reported.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ._parallel import parallel_map
from .bodies import CapBump, GeodesicCap, cap_measure, random_direction
from .errors import InsufficientBudgetError, ParameterError
from .optimize import BoxSearch
from .sphere import SphereQuadrature, cap_aligned_quadrature
from .theta import ThetaFunction
from .valuation import eval_valuation

MIN_BUDGET = 4
MESH_FACTOR = 4.0


@dataclass
class MeasureEstimate:
    target: str  # "outer" | "content"
    n: int
    center: list
    angle: float
    lam: float
    value: float
    cap_measure: float
    best_bump: dict
    bias_bound: float
    budget: int
    evaluations: int
    rule: str
    degree: int
    theta: dict
    trace: list = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.value / self.cap_measure

    def to_dict(self, with_trace: bool = True) -> dict:
        d = asdict(self)
        if not with_trace:
            d.pop("trace")
        return d


@dataclass
class ProportionalityReport:
    lam: float
    angles: list
    centers: list
    ratios: list
    vartheta: float
    max_relative_deviation: float
    theta_direct: float
    max_deviation_from_theta: float
    estimates: list = field(default_factory=list)

    def to_dict(self, with_trace: bool = False) -> dict:
        d = asdict(self)
        d["estimates"] = [e.to_dict(with_trace) for e in self.estimates]
        return d


@dataclass
class VanishingRow:
    angle: float
    cap_measure: float
    bound: float
    estimate: float

    @property
    def holds(self) -> bool:
        return self.estimate <= self.bound * (1.0 + 1e-12)


def _check_common(theta: ThetaFunction, lam: float, budget: int, rule: str, q):
    if budget < MIN_BUDGET:
        raise InsufficientBudgetError(f"optimizer budget must be >= {MIN_BUDGET}, got {budget}")
    if not theta.positive:
        raise ParameterError("measure constructions need a theta flagged positive (theta(0) = 0, theta >= 0)")
    if not 0.0 <= lam <= theta.M:
        raise ParameterError(f"level lambda = {lam!r} must lie in [0, M = {theta.M!r}]")
    if rule not in ("aligned", "global"):
        raise ParameterError(f"unknown integration mode {rule!r}")
    if rule == "global" and not isinstance(q, SphereQuadrature):
        raise ParameterError("global mode needs a quadrature rule q")


def _value(theta, bump: CapBump, rule, q, degree):
    if rule == "aligned":
        q = cap_aligned_quadrature(bump.center, [bump.inner_angle, bump.outer_angle], degree)
    return eval_valuation(theta, bump, q)


def _trace_rows(search: BoxSearch, names, sign):
    return [{**dict(zip(names, p)), "value": sign * v} for p, v in search.trace]


def estimate_outer_measure(theta: ThetaFunction, G: GeodesicCap, lam: float, budget: int = 200,
                           q: SphereQuadrature | None = None, *, rule: str | None = None,
                           degree: int = 40, max_shoulder: float = 0.995) -> MeasureEstimate:
    """Best V(f) over make_bump(G, h, s), 0 <= h <= lam: a lower bound of the
    sup over this family (and of the outer measure)."""
    rule = rule or ("global" if q is not None else "aligned")
    _check_common(theta, lam, budget, rule, q)
    s_min = 0.05
    s_max = max_shoulder
    if rule == "global":
        s_max = min(s_max, 1.0 - MESH_FACTOR * q.mesh_angle / G.angle)
        if s_max <= s_min:
            raise ParameterError(f"cap of angle {G.angle:.4g} is under-resolved by a rule with mesh angle "
                                 f"{q.mesh_angle:.4g}; refine the rule or use aligned mode")
    n = G.n

    def objective(p):
        h, s = p
        return _value(theta, CapBump(G.center, s * G.angle, G.angle, h), rule, q, degree)

    h_grid = np.linspace(0.0, lam, 9)
    s_grid = [s for s in (0.25, 0.5, 0.75, 0.9) if s < s_max] + [s_max]
    search = BoxSearch(objective, [(0.0, lam), (s_min, s_max)], [h_grid, s_grid], budget, parallel_map)
    (h, s), value = search.run()
    vartheta = theta.max_on(lam)
    bias = vartheta * (G.measure() - cap_measure(n, s_max * G.angle))
    return MeasureEstimate("outer", n, list(G.center), G.angle, float(lam), value, G.measure(),
                           {"height": h, "shoulder": s, "inner_angle": s * G.angle, "outer_angle": G.angle},
                           bias, budget, len(search.trace), rule, degree if rule == "aligned" else q.exact_degree,
                           theta.to_spec(), _trace_rows(search, ("height", "shoulder"), 1.0))


def estimate_content(theta: ThetaFunction, K: GeodesicCap, lam: float, budget: int = 200,
                     q: SphereQuadrature | None = None, *, rule: str | None = None,
                     degree: int = 40, min_width_fraction: float = 0.005) -> MeasureEstimate:
    """Smallest V(f) over bumps equal to lam on a plateau containing the
    closed cap K: an upper bound of the inf over this family."""
    rule = rule or ("global" if q is not None else "aligned")
    _check_common(theta, lam, budget, rule, q)
    a = K.angle
    room = min(a, math.pi - a)
    w_min = min_width_fraction * a
    if rule == "global":
        w_min = max(w_min, MESH_FACTOR * q.mesh_angle)
    beta_max = a + 0.25 * room
    w_max = max(0.5 * room, 2.0 * w_min)
    if beta_max + w_max >= math.pi:
        raise ParameterError(f"cap of angle {a:.4g} leaves no room for a shoulder of width {w_min:.4g}")
    n = K.n

    def objective(p):
        beta, w = p
        return -_value(theta, CapBump(K.center, beta, beta + w, lam), rule, q, degree)

    beta_grid = np.linspace(a, beta_max, 4)
    w_grid = np.geomspace(w_min, w_max, 5)
    search = BoxSearch(objective, [(a, beta_max), (w_min, w_max)], [beta_grid, w_grid], budget, parallel_map)
    (beta, w), neg = search.run()
    vartheta = theta.max_on(lam)
    bias = vartheta * (cap_measure(n, a + w_min) - cap_measure(n, a))
    return MeasureEstimate("content", n, list(K.center), a, float(lam), -neg, K.measure(),
                           {"height": float(lam), "inner_angle": beta, "outer_angle": beta + w},
                           bias, budget, len(search.trace), rule, degree if rule == "aligned" else q.exact_degree,
                           theta.to_spec(), _trace_rows(search, ("inner_angle", "width"), -1.0))


def _centers(n: int, count: int, seed: int | None):
    if seed is None:
        return [tuple(np.eye(n)[-1])] * count
    rng = np.random.default_rng(seed)
    return [tuple(random_direction(rng, n)) for _ in range(count)]


def proportionality_check(theta: ThetaFunction, lam: float, cap_angles: Sequence[float], budget: int = 200,
                          q: SphereQuadrature | None = None, *, n: int = 3, center_seed: int | None = None,
                          **kwargs) -> ProportionalityReport:
    """Content / m(cap) over several caps; proportionality means every ratio
    equals the same constant, cross-checked against theta(lam)."""
    if len(set(cap_angles)) < 3:
        raise ParameterError("proportionality needs at least 3 distinct cap angles")
    if q is not None:
        n = q.n
    centers = _centers(n, len(cap_angles), center_seed)
    estimates = [estimate_content(theta, GeodesicCap(c, a), lam, budget, q, **kwargs)
                 for c, a in zip(centers, cap_angles)]
    ratios = [e.ratio for e in estimates]
    vartheta = math.fsum(ratios) / len(ratios)
    direct = float(theta(np.array([lam]))[0])
    spread = max(abs(r - vartheta) for r in ratios)
    rel = spread / vartheta if vartheta > 0 else spread
    return ProportionalityReport(float(lam), list(cap_angles), [list(c) for c in centers], ratios, vartheta, rel,
                                 direct, max(abs(r - direct) for r in ratios), estimates)


def vanishing_check(theta: ThetaFunction, lam: float, cap_angles: Sequence[float], budget: int = 200,
                    q: SphereQuadrature | None = None, *, n: int = 3, **kwargs) -> list[VanishingRow]:
    """Outer estimates on shrinking caps against vartheta_lam * m(G), with
    vartheta_lam = max of theta on [0, lam]."""
    if q is not None:
        n = q.n
    vartheta = theta.max_on(lam)
    center = tuple(np.eye(n)[-1])
    rows = []
    for a in cap_angles:
        e = estimate_outer_measure(theta, GeodesicCap(center, a), lam, budget, q, **kwargs)
        rows.append(VanishingRow(float(a), e.cap_measure, vartheta * e.cap_measure, e.value))
    return rows
