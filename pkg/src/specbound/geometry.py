"""Rotationally symmetric model manifolds.

A model is determined by its dimension n and a warping function f: the metric
is dr^2 + f(r)^2 dTheta^2, so geodesic spheres have area w_{n-1} f(r)^{n-1}
and geodesic balls have volume w_{n-1} * integral_0^R f^{n-1} dt, where
w_{n-1} is the total measure of the unit (n-1)-sphere.

Three warping kinds are supported:

* Euclidean:   f(r) = r
* hyperbolic:  f(r) = sinh(sqrt(k) r) / sqrt(k)   (constant curvature -k)
* Jacobi:      f obtained by integrating f'' = -K(r) f, f(0)=0, f'(0)=1
               for a user-supplied radial curvature K(r) <= 0

Nonpositive curvature makes f convex with f' >= 1, which every Jacobi
integration is checked against.
"""

from __future__ import annotations

import math
import threading
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable

from scipy.integrate import solve_ivp

from ._quadrature import adaptive_quad
from .errors import DomainError, InvalidModelError, NumericError

# Default relative tolerances; the Jacobi equation and the volume integrand
# are smooth and non-stiff, so embedded RK45 / adaptive Gauss rules converge.
JACOBI_RTOL = 1e-10
VOLUME_QUAD_RTOL = 1e-10

_CURVATURE_SLACK = 1e-12  # tolerated positive excursion of K on grid points
_MONOTONE_SLACK = 1e-9    # tolerated dip of f' below 1 on grid points


def _gamma_half_integer(x: float) -> float:
    """Gamma(x) for x a positive integer or half-integer.

    Downward recursion onto Gamma(1) = 1 or Gamma(1/2) = sqrt(pi); the only
    arguments ever needed are n/2 for small integer dimensions n.
    """
    k2 = round(2 * x)
    if k2 <= 0 or abs(2 * x - k2) > 1e-9:
        raise DomainError(f"gamma argument must be a positive half-integer, got {x}")
    if k2 % 2 == 0:
        return float(math.factorial(k2 // 2 - 1))
    value = math.sqrt(math.pi)  # Gamma(1/2)
    m = 1
    while m < k2:
        value *= m / 2.0
        m += 2
    return value


def sphere_measure(dimension: int) -> float:
    """Total measure w_{n-1} = 2 pi^{n/2} / Gamma(n/2) of the unit (n-1)-sphere."""
    if dimension < 2:
        raise DomainError(f"dimension must be >= 2, got {dimension}")
    return 2.0 * math.pi ** (dimension / 2.0) / _gamma_half_integer(dimension / 2.0)


def unit_ball_volume(dimension: int) -> float:
    """Volume of the unit ball in R^n (= sphere_measure(n) / n)."""
    return sphere_measure(dimension) / dimension


class _JacobiCache:
    """Lazily extended dense solution of f'' = -K(r) f, f(0)=0, f'(0)=1.

    Extension is serialized by a lock; lookups read an immutable snapshot of
    the segment list, so concurrent queries are safe while one thread extends.
    """

    def __init__(self, curvature: Callable[[float], float], max_step: float,
                 rtol: float = JACOBI_RTOL):
        self._curvature = curvature
        self._max_step = max_step
        self._rtol = rtol
        self._lock = threading.Lock()
        self._segments: tuple = ()   # ((t_end, OdeSolution), ...)
        self._state = (0.0, 0.0, 1.0)  # (r, f, f') at the integrated frontier

    def _rhs(self, r, y):
        return [y[1], -self._curvature(r) * y[0]]

    def _validate(self, ts, ys):
        for r, f, fp in zip(ts, ys[0], ys[1]):
            k = self._curvature(r)
            if k > _CURVATURE_SLACK:
                raise InvalidModelError(
                    f"radial curvature must be <= 0, got K({r:g}) = {k:g}")
            if r > 0 and f <= 0:
                raise InvalidModelError(f"warping became nonpositive at r = {r:g}")
            if fp < 1.0 - _MONOTONE_SLACK:
                raise InvalidModelError(
                    f"warping derivative dropped below 1 at r = {r:g} (f' = {fp:.12g})")

    def _extend_to(self, r_target: float):
        with self._lock:
            r0, f0, fp0 = self._state
            if r_target <= r0:
                return
            # Overshoot so nearby follow-up queries hit the cache.
            r1 = max(r_target * 1.25, r0 * 2.0, 1.0)
            sol = solve_ivp(self._rhs, (r0, r1), [f0, fp0], method="RK45",
                            rtol=self._rtol, atol=1e-14, dense_output=True,
                            max_step=self._max_step)
            if not sol.success:
                raise NumericError(
                    f"Jacobi integration failed on [{r0:g}, {r1:g}]: {sol.message}")
            self._validate(sol.t, sol.y)
            self._segments = self._segments + ((r1, sol.sol),)
            self._state = (r1, float(sol.y[0, -1]), float(sol.y[1, -1]))

    def eval(self, r: float) -> tuple[float, float]:
        if r == 0.0:
            return 0.0, 1.0
        segments = self._segments
        if not segments or r > segments[-1][0]:
            self._extend_to(r)
            segments = self._segments
        idx = bisect_left([end for end, _ in segments], r)
        f, fp = segments[min(idx, len(segments) - 1)][1](r)
        return float(f), float(fp)


class WarpingModel:
    """A rotationally symmetric manifold of dimension n >= 2.

    Immutable after construction except for the lazily grown Jacobi cache.
    Build instances through the ``euclidean`` / ``hyperbolic`` / ``jacobi``
    classmethods.
    """

    def __init__(self, dimension: int, kind: str, *, curvature_magnitude=None,
                 curvature_fn=None, grid_resolution: float = 0.1, label: str = ""):
        if int(dimension) != dimension or dimension < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {dimension}")
        self.dimension = int(dimension)
        self.kind = kind
        self.curvature_magnitude = curvature_magnitude
        self.grid_resolution = float(grid_resolution)
        self.label = label or f"{kind}:{dimension}"
        self._curvature_fn = curvature_fn
        self._jacobi = None
        if kind == "jacobi":
            if grid_resolution <= 0:
                raise DomainError("grid_resolution must be positive")
            self._jacobi = _JacobiCache(curvature_fn, max_step=self.grid_resolution)
        self._volume_cache: dict = {}

    # -- constructors -----------------------------------------------------

    @classmethod
    def euclidean(cls, dimension: int) -> "WarpingModel":
        return cls(dimension, "euclidean", label=f"euclidean:{dimension}")

    @classmethod
    def hyperbolic(cls, dimension: int, curvature: float = 1.0) -> "WarpingModel":
        """Constant sectional curvature -curvature, with curvature > 0."""
        if curvature <= 0:
            raise DomainError(f"curvature magnitude must be positive, got {curvature}")
        return cls(dimension, "hyperbolic", curvature_magnitude=float(curvature),
                   label=f"hyperbolic:{dimension}:{curvature:g}")

    @classmethod
    def jacobi(cls, dimension: int, curvature: Callable[[float], float],
               grid_resolution: float = 0.1, label: str = "") -> "WarpingModel":
        """Warping integrated from a radial curvature profile K(r) <= 0."""
        return cls(dimension, "jacobi", curvature_fn=curvature,
                   grid_resolution=grid_resolution,
                   label=label or f"jacobi:{dimension}")

    # -- evaluation --------------------------------------------------------

    def warping(self, r: float) -> tuple[float, float]:
        """(f(r), f'(r)); exact closed form except for the Jacobi kind."""
        if r < 0:
            raise DomainError(f"radius must be nonnegative, got {r}")
        if self.kind == "euclidean":
            return float(r), 1.0
        if self.kind == "hyperbolic":
            sk = math.sqrt(self.curvature_magnitude)
            return math.sinh(sk * r) / sk, math.cosh(sk * r)
        return self._jacobi.eval(float(r))

    def radial_curvature(self, r: float) -> float:
        """Sectional curvature K(r) in radial planes."""
        if self.kind == "euclidean":
            return 0.0
        if self.kind == "hyperbolic":
            return -self.curvature_magnitude
        return float(self._curvature_fn(r))

    def boundary_density(self, r: float) -> float:
        """f(r)^{n-1}, the area density of the geodesic sphere of radius r."""
        return self.warping(r)[0] ** (self.dimension - 1)

    def __repr__(self):
        return f"WarpingModel({self.label})"


@dataclass(frozen=True)
class BallGeometry:
    """Exact measures of one geodesic ball."""
    radius: float
    volume: float
    boundary_area: float


def warping_eval(model: WarpingModel, r: float) -> tuple[float, float]:
    """Warping function and derivative, (f(r), f'(r))."""
    return model.warping(r)


def ball_area(model: WarpingModel, R: float) -> float:
    """Boundary measure w_{n-1} f(R)^{n-1} of the geodesic sphere of radius R."""
    if R <= 0:
        raise DomainError(f"radius must be positive, got {R}")
    f, _ = model.warping(R)
    return sphere_measure(model.dimension) * f ** (model.dimension - 1)


def ball_volume(model: WarpingModel, R: float, tol: float = VOLUME_QUAD_RTOL) -> float:
    """Volume w_{n-1} * integral_0^R f(t)^{n-1} dt of the geodesic ball.

    Adaptive quadrature with relative tolerance ``tol``; results are memoized
    per (R, tol) since profile inversions query repeated radii.
    """
    if R <= 0:
        raise DomainError(f"radius must be positive, got {R}")
    key = (R, tol)
    cached = model._volume_cache.get(key)
    if cached is not None:
        return cached
    n = model.dimension
    if model.kind == "jacobi":
        model.warping(R)  # grow the cache once, outside the quadrature loop
    value = adaptive_quad(lambda t: model.warping(t)[0] ** (n - 1), 0.0, R,
                          tol, what="ball volume quadrature")
    result = sphere_measure(n) * value
    model._volume_cache[key] = result
    return result


def ball_geometry(model: WarpingModel, R: float) -> BallGeometry:
    return BallGeometry(radius=R, volume=ball_volume(model, R),
                        boundary_area=ball_area(model, R))


def inverse_ball_volume(model: WarpingModel, v: float, tol: float = 1e-12) -> float:
    """Radius R with ball_volume(R) = v, by bracket growth and bisection.

    The volume is strictly increasing and smooth, so plain bisection to an
    absolute tolerance tol*(1+v) on the volume mismatch is reliable.
    """
    if v < 0:
        raise DomainError(f"volume must be nonnegative, got {v}")
    if v == 0.0:
        return 0.0
    lo, hi = 0.0, max(1.0, (v * model.dimension / sphere_measure(model.dimension))
                      ** (1.0 / model.dimension))
    while ball_volume(model, hi) < v:
        lo = hi
        hi *= 2.0
        if hi > 1e9:
            raise NumericError(f"volume {v:g} unreachable below radius 1e9")
    target_tol = tol * (1.0 + v)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        vm = ball_volume(model, mid)
        if abs(vm - v) <= target_tol and (hi - lo) <= 1e-13 * (1.0 + mid):
            return mid
        if vm < v:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
