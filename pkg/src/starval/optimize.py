"""Derivative-free 1-D and box-constrained search used by the measure lab."""

from __future__ import annotations

import math
from typing import Callable, Sequence

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10,
                       max_iter: int = 200) -> tuple[float, float]:
    """Maximize f on [lo, hi]; returns (argmax, max) including the endpoints."""
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    best = max([(f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi)], key=lambda t: (t[0], -t[1]))
    return best[1], best[0]


class BudgetExhausted(Exception):
    pass


class BoxSearch:
    """Budgeted maximization over a box: a lexicographic grid, then alternating
    coordinate golden-section refinement around the incumbent.

    The candidate sequence does not depend on the budget, so a larger budget
    evaluates a superset of candidates and the incumbent can only improve.
    Ties go to the lexicographically smallest parameter vector.
    """

    def __init__(self, objective: Callable[[tuple], float], bounds: Sequence[tuple[float, float]],
                 grid: Sequence[Sequence[float]], budget: int, batch_map=map):
        self.objective = objective
        self.bounds = [tuple(map(float, b)) for b in bounds]
        self.grid = [sorted(float(v) for v in axis) for axis in grid]
        self.budget = int(budget)
        self.batch_map = batch_map
        self.trace: list[tuple[tuple, float]] = []
        self._cache: dict[tuple, float] = {}
        self.best: tuple | None = None
        self.best_value = -math.inf

    def _better(self, value, params):
        if self.best is None or value > self.best_value:
            return True
        return value == self.best_value and params < self.best

    def _record(self, params, value):
        self.trace.append((params, value))
        self._cache[params] = value
        if self._better(value, params):
            self.best, self.best_value = params, value

    def evaluate(self, params: tuple) -> float:
        params = tuple(float(p) for p in params)
        if params in self._cache:
            return self._cache[params]
        if len(self.trace) >= self.budget:
            raise BudgetExhausted
        value = float(self.objective(params))
        self._record(params, value)
        return value

    def _grid_points(self):
        pts = [()]
        for axis in self.grid:
            pts = [p + (v,) for p in pts for v in axis]
        return pts

    def run(self) -> tuple[tuple, float]:
        pts = [p for p in self._grid_points()][: self.budget]
        for p, v in zip(pts, self.batch_map(self.objective, pts)):
            self._record(tuple(p), float(v))
        try:
            self._refine()
        except BudgetExhausted:
            pass
        return self.best, self.best_value

    def _bracket(self, axis: int, x: float) -> tuple[float, float]:
        vals = self.grid[axis]
        lo_b, hi_b = self.bounds[axis]
        below = [v for v in vals if v < x]
        above = [v for v in vals if v > x]
        return (below[-1] if below else lo_b), (above[0] if above else hi_b)

    def _refine(self):
        widths = [None] * len(self.bounds)
        for sweep in range(1000):
            improved = False
            for axis in range(len(self.bounds)):
                base = self.best
                if widths[axis] is None:
                    lo, hi = self._bracket(axis, base[axis])
                else:
                    lo_b, hi_b = self.bounds[axis]
                    lo, hi = max(lo_b, base[axis] - widths[axis]), min(hi_b, base[axis] + widths[axis])
                if hi - lo <= 1e-12 * max(1.0, abs(hi)):
                    continue

                def f(t, axis=axis, base=base):
                    p = list(base)
                    p[axis] = t
                    return self.evaluate(tuple(p))

                before = self.best_value
                golden_section_max(f, lo, hi, tol=(hi - lo) * 1e-3, max_iter=16)
                widths[axis] = 0.25 * (hi - lo)
                improved |= self.best_value > before
            if not improved and all(w is not None and w < 1e-9 for w in widths):
                return
