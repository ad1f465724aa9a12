"""Star bodies represented by their radial functions.

A body is an immutable expression tree over a few primitives (ball, ellipsoid,
clamped harmonic expansion, cap bump) and the combinators max (union), min
(intersection), radial sum, positive scaling and rotation. Every node carries
a certified upper bound on its radial function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import harmonics
from .errors import (
    DimensionMismatchError,
    InvalidScaleError,
    MalformedBodyError,
    ParameterError,
    SpecError,
)
from .sphere import Rotation, SphereQuadrature, as_direction, surface_measure


class StarBody:
    n: int

    def _eval(self, U: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def bound(self) -> float:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    def __call__(self, U) -> np.ndarray:
        """Radial function at the rows of an (N, n) array of unit vectors."""
        U = np.asarray(U, dtype=float)
        if U.ndim != 2 or U.shape[1] != self.n:
            raise DimensionMismatchError(f"{self.n}-dimensional body evaluated at array of shape {U.shape}")
        r = self._eval(U)
        if not np.all(np.isfinite(r)):
            raise MalformedBodyError(f"radial function is not finite for {self.to_spec()['type']} body")
        return r

    def __repr__(self) -> str:
        return f"StarBody({json.dumps(self.to_spec())})"


@dataclass(frozen=True, eq=False, repr=False)
class Ball(StarBody):
    n: int
    radius: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius >= 0):
            raise ParameterError(f"ball radius must be finite and >= 0, got {self.radius!r}")

    def _eval(self, U):
        return np.full(U.shape[0], float(self.radius))

    @property
    def bound(self):
        return float(self.radius)

    def to_spec(self):
        return {"type": "ball", "radius": self.radius}


@dataclass(frozen=True, eq=False, repr=False)
class Ellipsoid(StarBody):
    axes: tuple

    def __post_init__(self):
        axes = tuple(float(a) for a in self.axes)
        if not all(math.isfinite(a) and a > 0 for a in axes):
            raise ParameterError(f"ellipsoid semi-axes must be positive, got {self.axes!r}")
        object.__setattr__(self, "axes", axes)

    @property
    def n(self):
        return len(self.axes)

    def _eval(self, U):
        a = np.asarray(self.axes)
        return 1.0 / np.sqrt(np.sum((U / a) ** 2, axis=1))

    @property
    def bound(self):
        return max(self.axes)

    def to_spec(self):
        return {"type": "ellipsoid", "axes": list(self.axes)}


@dataclass(frozen=True, eq=False, repr=False)
class Harmonic(StarBody):
    """max(floor, sum_i c_i Y_i) in the orthonormal real harmonic basis."""

    n: int
    coefficients: tuple
    floor: float = 0.0

    def __post_init__(self):
        c = tuple(float(x) for x in self.coefficients)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "_degree", harmonics.degree_from_length(self.n, len(c)))
        if not (math.isfinite(self.floor) and self.floor >= 0):
            raise ParameterError(f"harmonic floor must be >= 0, got {self.floor!r}")
        object.__setattr__(self, "_bound", max(float(self.floor), harmonics.sup_bound(self.n, c)))

    @property
    def degree(self) -> int:
        return self._degree

    def expansion(self, U) -> np.ndarray:
        return harmonics.basis(np.asarray(U, dtype=float), self.n, self._degree) @ np.asarray(self.coefficients)

    def _eval(self, U):
        return np.maximum(self.floor, self.expansion(U))

    @property
    def bound(self):
        return self._bound

    def to_spec(self):
        return {"type": "harmonic", "n": self.n, "coefficients": list(self.coefficients), "floor": self.floor}


def geodesic_angle(U, center) -> np.ndarray:
    """Angle between each row of U and ``center`` (atan2 form, accurate near 0 and pi)."""
    c = np.asarray(center, dtype=float)
    dots = U @ c
    perp = np.linalg.norm(U - dots[:, None] * c, axis=1)
    return np.arctan2(perp, dots)


@dataclass(frozen=True, eq=False, repr=False)
class CapBump(StarBody):
    """Height on the closed cap of ``inner_angle``, zero outside the open cap of
    ``outer_angle``, linear in geodesic angle in between."""

    center: tuple
    inner_angle: float
    outer_angle: float
    height: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(as_direction(self.center).tolist()))
        if not (0.0 <= self.inner_angle < self.outer_angle <= math.pi):
            raise ParameterError(
                f"cap bump needs 0 <= inner < outer <= pi, got {self.inner_angle!r}, {self.outer_angle!r}")
        if not (math.isfinite(self.height) and self.height >= 0):
            raise ParameterError(f"cap bump height must be >= 0, got {self.height!r}")

    @property
    def n(self):
        return len(self.center)

    def _eval(self, U):
        ang = geodesic_angle(U, self.center)
        t = (self.outer_angle - ang) / (self.outer_angle - self.inner_angle)
        return self.height * np.clip(t, 0.0, 1.0)

    @property
    def bound(self):
        return float(self.height)

    def to_spec(self):
        return {"type": "cap_bump", "center": list(self.center), "inner_angle": self.inner_angle,
                "outer_angle": self.outer_angle, "height": self.height}


def _same_dimension(bodies: Sequence[StarBody]) -> int:
    dims = {b.n for b in bodies}
    if len(dims) != 1:
        raise DimensionMismatchError(f"bodies of different dimensions {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True, eq=False, repr=False)
class _Nary(StarBody):
    args: tuple

    def __post_init__(self):
        if len(self.args) < 1:
            raise ParameterError(f"{self.kind} needs at least one argument")
        object.__setattr__(self, "args", tuple(self.args))
        _same_dimension(self.args)

    @property
    def n(self):
        return self.args[0].n

    def to_spec(self):
        return {"type": self.kind, "args": [a.to_spec() for a in self.args]}


class Union(_Nary):
    kind = "max"

    def _eval(self, U):
        return np.maximum.reduce([a(U) for a in self.args])

    @property
    def bound(self):
        return max(a.bound for a in self.args)


class Intersection(_Nary):
    kind = "min"

    def _eval(self, U):
        return np.minimum.reduce([a(U) for a in self.args])

    @property
    def bound(self):
        return min(a.bound for a in self.args)


class RadialSum(_Nary):
    kind = "sum"

    def _eval(self, U):
        vals = [a(U) for a in self.args]
        out = vals[0].copy()
        for v in vals[1:]:
            out += v
        return out

    @property
    def bound(self):
        return sum(a.bound for a in self.args)


@dataclass(frozen=True, eq=False, repr=False)
class Scaled(StarBody):
    body: StarBody
    factor: float

    def __post_init__(self):
        if not (math.isfinite(self.factor) and self.factor > 0):
            raise InvalidScaleError(f"scale factor must be > 0, got {self.factor!r}")

    @property
    def n(self):
        return self.body.n

    def _eval(self, U):
        return self.factor * self.body(U)

    @property
    def bound(self):
        return self.factor * self.body.bound

    def to_spec(self):
        return {"type": "scale", "factor": self.factor, "body": self.body.to_spec()}


@dataclass(frozen=True, eq=False, repr=False)
class Rotated(StarBody):
    """The image R(K); its radial function is rho_K(R^T u)."""

    body: StarBody
    rotation: Rotation

    def __post_init__(self):
        if self.rotation.n != self.body.n:
            raise DimensionMismatchError(f"{self.rotation.n}-dimensional rotation of {self.body.n}-dimensional body")

    @property
    def n(self):
        return self.body.n

    def _eval(self, U):
        return self.body(U @ self.rotation.matrix)

    @property
    def bound(self):
        return self.body.bound

    def to_spec(self):
        return {"type": "rotate", "matrix": self.rotation.matrix.tolist(), "body": self.body.to_spec()}


def eval_radial(K: StarBody, u) -> float:
    u = np.asarray(u, dtype=float)
    if u.shape != (K.n,):
        raise DimensionMismatchError(f"{K.n}-dimensional body evaluated at direction of shape {u.shape}")
    return float(K(u[None, :])[0])


def union(*bodies: StarBody) -> StarBody:
    return Union(bodies)


def intersection(*bodies: StarBody) -> StarBody:
    return Intersection(bodies)


def radial_sum(*bodies: StarBody) -> StarBody:
    return RadialSum(bodies)


def scale(K: StarBody, c: float) -> StarBody:
    return Scaled(K, float(c))


def rotate(K: StarBody, R: Rotation) -> StarBody:
    return Rotated(K, R)


def radial_distance(K: StarBody, L: StarBody, grid) -> float:
    """Max of |rho_K - rho_L| over the grid nodes.

    This is a lower bound for the radial metric (a sup over the whole sphere);
    refine the grid to tighten it.
    """
    _same_dimension([K, L])
    U = grid.nodes if isinstance(grid, SphereQuadrature) else np.asarray(grid, dtype=float)
    return float(np.max(np.abs(K(U) - L(U))))


@dataclass(frozen=True)
class GeodesicCap:
    center: tuple
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(as_direction(self.center).tolist()))
        if not (0.0 < self.angle < math.pi):
            raise ParameterError(f"cap angle must lie in (0, pi), got {self.angle!r}")

    @property
    def n(self) -> int:
        return len(self.center)

    def measure(self) -> float:
        return cap_measure(self.n, self.angle)

    def contains(self, U, closed: bool = False) -> np.ndarray:
        ang = geodesic_angle(np.asarray(U, dtype=float), self.center)
        return ang <= self.angle if closed else ang < self.angle


def cap_measure(n: int, angle: float) -> float:
    """Surface measure of a geodesic cap of the given angular radius on S^{n-1}."""
    if n == 2:
        return 2.0 * angle
    if n == 3:
        return 2.0 * math.pi * (1.0 - math.cos(angle))
    from scipy.special import betainc

    sigma = surface_measure(n)
    half = 0.5 * sigma * float(betainc((n - 1) / 2, 0.5, math.sin(min(angle, math.pi - angle)) ** 2))
    return half if angle <= math.pi / 2 else sigma - half


def make_bump(G: GeodesicCap, height: float, shoulder: float) -> CapBump:
    """Plateau ``height`` on the closed cap of angle ``shoulder * G.angle``,
    zero outside G, linear ramp between."""
    if not (0.0 < shoulder < 1.0):
        raise ParameterError(f"shoulder must lie in (0, 1), got {shoulder!r}")
    if height < 0:
        raise ParameterError(f"bump height must be >= 0, got {height!r}")
    return CapBump(G.center, shoulder * G.angle, G.angle, float(height))


# -- body-spec format ---------------------------------------------------------

BODY_TYPES = ("ball", "ellipsoid", "harmonic", "cap_bump", "max", "min", "sum", "scale", "rotate")


def _num(spec, key, path, default=None):
    if key not in spec:
        if default is not None:
            return default
        raise SpecError(f"missing required field {key!r}", path)
    v = spec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"expected a finite number, got {v!r}", f"{path}/{key}")
    return float(v)


def _vector(spec, key, path):
    if key not in spec:
        raise SpecError(f"missing required field {key!r}", path)
    v = spec[key]
    if not isinstance(v, list) or not v:
        raise SpecError("expected a non-empty list of numbers", f"{path}/{key}")
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise SpecError(f"expected a finite number, got {x!r}", f"{path}/{key}/{i}")
    return [float(x) for x in v]


def _matrix(spec, path):
    if "matrix" not in spec:
        raise SpecError("missing required field 'matrix'", path)
    m = spec["matrix"]
    if isinstance(m, list) and m and all(isinstance(r, list) for r in m):
        rows = [_vector({"r": r}, "r", f"{path}/matrix/{i}") for i, r in enumerate(m)]
        if len({len(r) for r in rows}) != 1:
            raise SpecError("rows of unequal length", f"{path}/matrix")
        return np.array(rows)
    flat = np.array(_vector(spec, "matrix", path))
    k = math.isqrt(flat.size)
    if k * k != flat.size:
        raise SpecError("flat row-major matrix must have a square number of entries", f"{path}/matrix")
    return flat.reshape(k, k)


def parse_body(spec, n: int | None = None, path: str = "") -> StarBody:
    """Build a body from its JSON-compatible spec.

    ``n`` fixes the dimension for bodies that do not carry one (balls).
    Errors carry a JSON-pointer path to the offending node.
    """
    if not isinstance(spec, dict):
        raise SpecError("body spec must be an object", path)
    kind = spec.get("type")
    if kind not in BODY_TYPES:
        raise SpecError(f"unknown body type {kind!r}; expected one of {list(BODY_TYPES)}", f"{path}/type")
    if "n" in spec:
        declared = spec["n"]
        if isinstance(declared, bool) or not isinstance(declared, int) or declared < 2:
            raise SpecError(f"dimension must be an integer >= 2, got {declared!r}", f"{path}/n")
        if n is not None and declared != n:
            raise SpecError(f"body declares n = {declared} but n = {n} was requested", f"{path}/n")
        n = declared
    try:
        body = _parse_node(spec, kind, n, path)
    except (SpecError, InvalidScaleError):
        raise
    except (ParameterError, DimensionMismatchError) as exc:
        raise SpecError(str(exc), path) from None
    if n is not None and body.n != n:
        raise SpecError(f"body has dimension {body.n}, expected {n}", path)
    return body


def _parse_node(spec, kind, n, path):
    if kind == "ball":
        if n is None:
            raise SpecError("ball needs a dimension: pass n or set field 'n'", path)
        return Ball(n, _num(spec, "radius", path))
    if kind == "ellipsoid":
        return Ellipsoid(tuple(_vector(spec, "axes", path)))
    if kind == "harmonic":
        if n is None:
            raise SpecError("harmonic needs a dimension: pass n or set field 'n'", path)
        return Harmonic(n, tuple(_vector(spec, "coefficients", path)), _num(spec, "floor", path, 0.0))
    if kind == "cap_bump":
        return CapBump(tuple(_vector(spec, "center", path)), _num(spec, "inner_angle", path),
                       _num(spec, "outer_angle", path), _num(spec, "height", path))
    if kind in ("max", "min", "sum"):
        args = spec.get("args")
        if not isinstance(args, list) or not args:
            raise SpecError("expected a non-empty list of body specs", f"{path}/args")
        children = [parse_body(a, n, f"{path}/args/{i}") for i, a in enumerate(args)]
        return {"max": Union, "min": Intersection, "sum": RadialSum}[kind](tuple(children))
    if "body" not in spec:
        raise SpecError("missing required field 'body'", path)
    if kind == "scale":
        factor = _num(spec, "factor", path)
        if factor <= 0:
            raise InvalidScaleError(f"{path}/factor: scale factor must be > 0, got {factor!r}")
        return Scaled(parse_body(spec["body"], n, f"{path}/body"), factor)
    matrix = _matrix(spec, path)
    child = parse_body(spec["body"], n if n is not None else matrix.shape[0], f"{path}/body")
    return Rotated(child, Rotation(matrix))


def load_body(path, n: int | None = None) -> StarBody:
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{Path(path).name}: invalid JSON ({exc.msg})") from None
    return parse_body(spec, n)


def dump_body(K: StarBody, path) -> None:
    Path(path).write_text(json.dumps(K.to_spec(), indent=2) + "\n", encoding="utf-8")


# -- random families (test inputs and probe sets) -----------------------------

def random_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_body(rng: np.random.Generator, n: int, kind: str, max_radius: float = 2.0,
                degree: int = 6, positive: bool = False) -> StarBody:
    """Draw a body with certified bound <= ``max_radius``.

    ``positive`` harmonic bodies have a dominant constant term so that the
    clamp at zero never activates.
    """
    if kind == "ellipsoid":
        return Ellipsoid(tuple(rng.uniform(0.25, 1.0, n) * max_radius))
    if kind == "cap_bump":
        outer = rng.uniform(0.2, 2.0)
        return CapBump(tuple(random_direction(rng, n)), outer * rng.uniform(0.0, 0.9), outer,
                       rng.uniform(0.1, 1.0) * max_radius)
    if kind == "harmonic":
        d = int(rng.integers(0, degree + 1))
        c = rng.standard_normal(harmonics.n_coefficients(n, d))
        y0 = 1.0 / math.sqrt(2 * math.pi if n == 2 else 4 * math.pi)
        if positive:
            c[0] = 0.0
            rest = harmonics.sup_bound(n, c)
            c[0] = (rest * rng.uniform(1.2, 2.0) + 0.05) / y0
        target = rng.uniform(0.3, 1.0) * max_radius
        total = harmonics.sup_bound(n, c)
        if total > 0:
            c *= target / total
        return Harmonic(n, tuple(c))
    raise ParameterError(f"unknown random body kind {kind!r}")
