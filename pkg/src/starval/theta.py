"""Continuous profile functions theta on [0, M] with a modulus of continuity.

The modulus ``omega(eta)`` bounds |theta(x) - theta(y)| whenever x, y lie in
[0, M] and |x - y| <= eta.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainExceededError, ParameterError, SpecError

BUILTINS = ("power", "sin", "exp-minus-one", "logistic-hump")
DOMAIN_SLACK = 1e-12


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _logistic_hump(x):
    s = _sigmoid(x)
    return 16.0 * (s - 0.5) * (1.0 - s)


@dataclass(frozen=True, eq=False)
class ThetaFunction:
    kind: str
    params: dict
    M: float
    positive: bool = False
    _fn: Callable = field(init=False, repr=False)
    _omega: Callable = field(init=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.M) and self.M > 0):
            raise ParameterError(f"domain bound M must be positive and finite, got {self.M!r}")
        fn, omega = _build(self.kind, self.params, self.M)
        object.__setattr__(self, "_fn", fn)
        object.__setattr__(self, "_omega", omega)
        if self.positive:
            grid = np.linspace(0.0, self.M, 4001)
            vals = fn(grid)
            if abs(vals[0]) > 1e-15 or vals.min() < -1e-15:
                raise ParameterError("theta flagged positive must satisfy theta(0) = 0 and theta >= 0 on [0, M]")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.size:
            hi, lo = float(np.max(x)), float(np.min(x))
            if hi > self.M * (1.0 + DOMAIN_SLACK) or lo < 0.0:
                bad = hi if hi > self.M else lo
                raise DomainExceededError(f"theta evaluated at {bad!r}, outside its domain [0, {self.M!r}]",
                                          value=bad, bound=self.M)
        return self._fn(np.minimum(x, self.M))

    def modulus(self, eta: float) -> float:
        if eta < 0:
            raise ParameterError("modulus argument must be >= 0")
        return float(self._omega(float(eta)))

    def max_on(self, lam: float, samples: int = 10_001) -> float:
        """max of theta on [0, lam]: dense grid plus golden-section polish."""
        from .optimize import golden_section_max

        if lam <= 0:
            return float(self(np.array([0.0]))[0])
        grid = np.linspace(0.0, lam, samples)
        vals = self(grid)
        i = int(np.argmax(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, samples - 1)]
        x, v = golden_section_max(lambda t: float(self(np.array([t]))[0]), lo, hi, tol=1e-12)
        return max(float(vals[i]), v)

    def to_spec(self) -> dict:
        return {"kind": self.kind, **self.params, "M": self.M, "positive": self.positive}


def _build(kind, params, M):
    if kind == "polynomial":
        a = np.asarray(params.get("coefficients", []), dtype=float)
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise ParameterError("polynomial theta needs finite coefficients a_0..a_l")
        lip = sum(k * abs(ak) * M ** (k - 1) for k, ak in enumerate(a) if k > 0)
        return (lambda x: np.polynomial.polynomial.polyval(x, a)), (lambda eta: lip * eta)
    if kind == "piecewise":
        grid = np.asarray(params.get("grid", []), dtype=float)
        vals = np.asarray(params.get("values", []), dtype=float)
        if grid.size < 2 or grid.shape != vals.shape or np.any(np.diff(grid) <= 0):
            raise ParameterError("piecewise theta needs an increasing grid (>= 2 points) and matching values")
        if grid[0] != 0.0 or grid[-1] < M:
            raise ParameterError(f"piecewise grid must span [0, M] = [0, {M}]")
        slope = float(np.max(np.abs(np.diff(vals) / np.diff(grid))))
        spread = float(vals.max() - vals.min())
        return (lambda x: np.interp(x, grid, vals)), (lambda eta: min(slope * eta, spread))
    if kind == "builtin":
        ident = params.get("id")
        if ident == "power":
            p = float(params.get("p", 1.0))
            if not (math.isfinite(p) and p > 0):
                raise ParameterError(f"power theta needs p > 0, got {p!r}")
            if p >= 1:
                # convex: the largest increment over a window of width eta sits at the right end
                omega = lambda eta: M ** p - max(M - eta, 0.0) ** p
            else:
                omega = lambda eta: min(eta, M) ** p
            return (lambda x: np.power(x, p)), omega
        if ident == "sin":
            return np.sin, (lambda eta: min(eta, 2.0))
        if ident == "exp-minus-one":
            return np.expm1, (lambda eta: math.exp(M) - math.exp(max(M - eta, 0.0)))
        if ident == "logistic-hump":
            # |theta'| <= 2 (attained at 0) and 0 <= theta <= 1
            return _logistic_hump, (lambda eta: min(2.0 * eta, 1.0))
        raise ParameterError(f"unknown builtin theta {ident!r}; expected one of {list(BUILTINS)}")
    raise ParameterError(f"unknown theta kind {kind!r}")


def polynomial(coefficients, M: float, positive: bool = False) -> ThetaFunction:
    return ThetaFunction("polynomial", {"coefficients": [float(c) for c in coefficients]}, float(M), positive)


def piecewise(grid, values, M: float | None = None, positive: bool = False) -> ThetaFunction:
    grid = [float(g) for g in grid]
    return ThetaFunction("piecewise", {"grid": grid, "values": [float(v) for v in values]},
                         float(grid[-1] if M is None else M), positive)


def builtin(ident: str, M: float, positive: bool = False, **extra) -> ThetaFunction:
    return ThetaFunction("builtin", {"id": ident, **extra}, float(M), positive)


def power(p: float, M: float) -> ThetaFunction:
    return builtin("power", M, positive=True, p=float(p))


def parse_theta(spec) -> ThetaFunction:
    if not isinstance(spec, dict):
        raise SpecError("theta spec must be an object")
    kind = spec.get("kind")
    if kind not in ("polynomial", "piecewise", "builtin"):
        raise SpecError(f"unknown theta kind {kind!r}", "/kind")
    M = spec.get("M")
    if isinstance(M, bool) or not isinstance(M, (int, float)):
        raise SpecError("missing or non-numeric domain bound 'M'", "/M")
    positive = spec.get("positive", False)
    if not isinstance(positive, bool):
        raise SpecError("'positive' must be a boolean", "/positive")
    params = {k: v for k, v in spec.items() if k not in ("kind", "M", "positive")}
    try:
        return ThetaFunction(kind, params, float(M), positive)
    except ParameterError as exc:
        raise SpecError(str(exc)) from None


def load_theta(path) -> ThetaFunction:
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON ({exc.msg})") from None
    return parse_theta(spec)
