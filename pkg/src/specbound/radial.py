"""Radial solutions on rotationally symmetric models.

Two ordinary differential equation reductions are solved here, both with the
regularity condition u'(0) = 0 forced by rotational symmetry:

* the eigenvalue equation  u'' + (n-1)(f'/f) u' + lambda u = 0, u(0) = 1,
  whose first Dirichlet eigenvalue on a geodesic ball is located by shooting;
* the torsion equation (constant negative Laplacian, zero boundary data),
  whose radial solution is u(r) = integral_r^R F(s)^{-1} integral_0^s F dt ds
  with F = f^{n-1}.

The coefficient (n-1) f'/f ~ (n-1)/r is singular at the pole, so every
integration starts from a short power-series segment.

Norms, superlevel-set volumes and boundary-flux identities are evaluated on
piecewise-cubic interpolants that carry both values and derivatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from ._quadrature import adaptive_quad
from .errors import DomainError, NumericError, SearchError
from .geometry import WarpingModel, ball_volume, sphere_measure

ODE_RTOL = 1e-10
NORM_QUAD_RTOL = 1e-10
LAMBDA_FLOOR = 1e-6
LAMBDA_CEILING = 1e6

# Whole-manifold truncation rule: stop once the decay exponent estimate
# sigma(r) = -(log u)'(r) moves by less than this fraction over one unit of
# radius, then extrapolate the norm tail as a pure exponential.
SIGMA_STABLE_REL = 1e-3
DIVERGENCE_MARGIN = 1e-3
TAIL_FRACTION_TARGET = 1e-6
R_GLOBAL_CAP = 400.0


class RadialFunction:
    """A radial profile sampled with derivatives on a grid starting at 0.

    Interpolation is piecewise cubic Hermite, so sampled values and
    derivatives are reproduced exactly at the nodes.
    """

    def __init__(self, model: WarpingModel, radii, values, derivatives):
        r = np.asarray(radii, dtype=float)
        u = np.asarray(values, dtype=float)
        du = np.asarray(derivatives, dtype=float)
        if r.ndim != 1 or r.shape != u.shape or r.shape != du.shape:
            raise DomainError("radii, values and derivatives must be equal-length 1-d")
        if r[0] != 0.0:
            raise DomainError("grid must start at the pole r = 0")
        if np.any(np.diff(r) <= 0):
            raise DomainError("grid radii must be strictly increasing")
        scale = float(np.max(np.abs(u))) or 1.0
        if abs(du[0]) > 1e-8 * scale:
            raise DomainError(f"pole regularity requires u'(0) = 0, got {du[0]:g}")
        self.model = model
        self.radii = r
        self.values = u
        self.derivatives = du
        self._spline = CubicHermiteSpline(r, u, du)
        self._dspline = self._spline.derivative()

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def _check_range(self, r):
        if np.any(r < 0) or np.any(r > self.r_max * (1 + 1e-12)):
            raise DomainError(f"radius outside the sampled range [0, {self.r_max:g}]")

    def __call__(self, r):
        r = np.clip(r, 0.0, self.r_max)
        out = self._spline(r)
        return float(out) if np.ndim(out) == 0 else out

    def value(self, r: float) -> float:
        self._check_range(np.asarray(r))
        return self(r)

    def derivative(self, r):
        self._check_range(np.asarray(r))
        out = self._dspline(np.clip(r, 0.0, self.r_max))
        return float(out) if np.ndim(out) == 0 else out

    def to_csv(self, path) -> None:
        """Write ``r,u,du`` rows at 12 significant digits."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("r,u,du\n")
            for r, u, du in zip(self.radii, self.values, self.derivatives):
                fh.write(f"{r:.11e},{u:.11e},{du:.11e}\n")


@dataclass(frozen=True)
class DirichletEigenpair:
    """First Dirichlet eigenvalue of a geodesic ball with its eigenfunction."""
    eigenvalue: float
    radius: float
    eigenfunction: RadialFunction


def _series_coefficients(model: WarpingModel, lam: float):
    """Quadratic and quartic Taylor coefficients of the regular solution.

    With f = r + c3 r^3 + O(r^5), c3 = -K(0)/6, the expansion
    u = 1 + b2 r^2 + b4 r^4 + O(r^6) satisfies the radial equation to the
    orders shown (the Euclidean case reproduces the classical oscillatory
    profile 1 - x^2/4 + x^4/64 in x = sqrt(lambda) r for n = 2).
    """
    n = model.dimension
    c3 = -model.radial_curvature(0.0) / 6.0
    b2 = -lam / (2.0 * n)
    b4 = -b2 * (lam + 4.0 * (n - 1) * c3) / (4.0 * (n + 2))
    return b2, b4


def _series_eval(b2, b4, r):
    u = 1.0 + b2 * r * r + b4 * r ** 4
    du = 2.0 * b2 * r + 4.0 * b4 * r ** 3
    return u, du


def _series_radius(lam: float) -> float:
    # keep (lambda r^2)^3 below ~1e-10 so the truncated series stays exact
    return min(1e-3, 0.02 / math.sqrt(max(lam, 1e-30)))


def _eigen_rhs(model: WarpingModel, lam: float):
    n1 = model.dimension - 1

    def rhs(r, y):
        f, fp = model.warping(r)
        return (y[1], -(n1 * fp / f * y[1] + lam * y[0]))

    return rhs


def _sample_count(span: float, lam: float) -> int:
    # ~40 nodes per oscillation wavelength keeps cubic interpolation error
    # far below the norm tolerances
    waves = span * math.sqrt(max(lam, 1.0)) / (2.0 * math.pi)
    return int(min(6000, max(200, 48 * max(waves, 1.0), 12 * span)))


def solve_eigen_ivp(model: WarpingModel, lam: float, r_max: float,
                    tol: float = ODE_RTOL) -> RadialFunction:
    """Regular solution of the radial eigenvalue equation, normalized u(0)=1.

    Integration starts from the series segment [0, r_series] and proceeds
    with an adaptive high-order scheme at local relative tolerance ``tol``.
    """
    if lam <= 0:
        raise DomainError(f"eigenvalue parameter must be positive, got {lam}")
    if r_max <= 0:
        raise DomainError(f"integration radius must be positive, got {r_max}")
    b2, b4 = _series_coefficients(model, lam)
    rs = _series_radius(lam)
    if r_max <= rs:
        grid = np.linspace(0.0, r_max, 16)
        u, du = _series_eval(b2, b4, grid)
        return RadialFunction(model, grid, u, du)
    u0, du0 = _series_eval(b2, b4, rs)
    if model.kind == "jacobi":
        model.warping(r_max)
    sol = solve_ivp(_eigen_rhs(model, lam), (rs, r_max), [u0, du0],
                    method="DOP853", rtol=tol, atol=1e-14, dense_output=True)
    if not sol.success:
        raise NumericError(f"eigen integration failed: {sol.message}")
    m = _sample_count(r_max - rs, lam)
    tail = np.linspace(rs, r_max, m)
    uu, dd = sol.sol(tail)
    head = np.array([0.0, 0.5 * rs])
    hu, hdu = _series_eval(b2, b4, head)
    grid = np.concatenate([head, tail])
    return RadialFunction(model, grid, np.concatenate([hu, uu]),
                          np.concatenate([hdu, dd]))


def _first_zero(model, lam, r_limit, tol):
    """Location of the first zero of the regular solution, or None."""
    b2, b4 = _series_coefficients(model, lam)
    rs = _series_radius(lam)
    if r_limit <= rs:
        return None
    u0, du0 = _series_eval(b2, b4, rs)

    def hit_zero(r, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1
    sol = solve_ivp(_eigen_rhs(model, lam), (rs, r_limit), [u0, du0],
                    method="DOP853", rtol=tol, atol=1e-14, events=hit_zero)
    if not sol.success:
        raise NumericError(f"eigen integration failed: {sol.message}")
    if sol.t_events[0].size:
        return float(sol.t_events[0][0])
    return None


def solve_dirichlet_eigenpair(model: WarpingModel, R: float,
                              tol: float = 1e-8) -> DirichletEigenpair:
    """First Dirichlet eigenvalue of the geodesic ball of radius R.

    Shooting: the predicate "the regular solution vanishes somewhere in
    (0, R]" is monotone in lambda, so bracket doubling plus bisection
    isolates the eigenvalue, after which the boundary value u_lambda(R) is
    a locally monotone smooth function and a guarded root polish brings the
    eigenvalue to near machine accuracy.
    """
    if R <= 0:
        raise DomainError(f"radius must be positive, got {R}")
    ode_tol = min(tol, ODE_RTOL)
    lo = LAMBDA_FLOOR
    if _first_zero(model, lo, R, ode_tol) is not None:
        raise SearchError(f"eigenvalue below the search floor {LAMBDA_FLOOR:g}")
    hi = max(1.0, (math.pi / R) ** 2)
    while _first_zero(model, hi, R, ode_tol) is None:
        lo = hi
        hi *= 2.0
        if hi > LAMBDA_CEILING:
            raise SearchError(
                f"no sign change found below the eigenvalue ceiling {LAMBDA_CEILING:g}")
    while hi - lo > 1e-2 * hi:
        mid = 0.5 * (lo + hi)
        if _first_zero(model, mid, R, ode_tol) is None:
            lo = mid
        else:
            hi = mid

    def boundary_value(lam):
        b2, b4 = _series_coefficients(model, lam)
        rs = _series_radius(lam)
        u0, du0 = _series_eval(b2, b4, rs)
        sol = solve_ivp(_eigen_rhs(model, lam), (rs, R), [u0, du0],
                        method="DOP853", rtol=ode_tol, atol=1e-14)
        if not sol.success:
            raise NumericError(f"eigen integration failed: {sol.message}")
        return float(sol.y[0, -1])

    g_lo, g_hi = boundary_value(lo), boundary_value(hi)
    if g_lo > 0 > g_hi:
        lam1 = brentq(boundary_value, lo, hi, xtol=1e-13 * hi, rtol=8.9e-16,
                      maxiter=200)
    else:
        # boundary value already straddles zero non-strictly; fall back to
        # plain predicate bisection at the requested tolerance
        while hi - lo > tol * hi:
            mid = 0.5 * (lo + hi)
            if _first_zero(model, mid, R, ode_tol) is None:
                lo = mid
            else:
                hi = mid
        lam1 = 0.5 * (lo + hi)
    eigenfunction = solve_eigen_ivp(model, lam1, R, ode_tol)
    interior = eigenfunction.values[:-1]
    if interior.size and float(np.min(interior)) < -1e-8:
        raise NumericError("computed ground state is not positive inside the ball")
    return DirichletEigenpair(eigenvalue=float(lam1), radius=R,
                              eigenfunction=eigenfunction)


def principal_dirichlet_eigenvalue(model: WarpingModel, R: float,
                                   tol: float = 1e-8) -> float:
    return solve_dirichlet_eigenpair(model, R, tol).eigenvalue


def solve_torsion(model: WarpingModel, R: float) -> RadialFunction:
    """Radial solution of the constant-Laplacian problem on the ball B_R.

    Both nested integrals are accumulated in one pass: with F = f^{n-1},
    y1' = F and y2' = y1/F give u(r) = y2(R) - y2(r) and u'(r) = -y1/F,
    so u(R) = 0 holds exactly by construction.
    """
    if R <= 0:
        raise DomainError(f"radius must be positive, got {R}")
    n = model.dimension
    c3 = -model.radial_curvature(0.0) / 6.0
    rs = min(1e-6, 0.25 * R)
    y1_0 = rs ** n / n + (n - 1) * c3 * rs ** (n + 2) / (n + 2)
    y2_0 = rs * rs / (2.0 * n)
    if model.kind == "jacobi":
        model.warping(R)

    def rhs(r, y):
        F = model.warping(r)[0] ** (n - 1)
        return (F, y[0] / F)

    sol = solve_ivp(rhs, (rs, R), [y1_0, y2_0], method="DOP853",
                    rtol=1e-12, atol=1e-30, dense_output=True)
    if not sol.success:
        raise NumericError(f"torsion integration failed: {sol.message}")
    total = float(sol.y[1, -1])
    m = int(min(4000, max(250, 64 * R)))
    tail = np.linspace(rs, R, m)
    y1, y2 = sol.sol(tail)
    F_tail = np.array([model.warping(r)[0] ** (n - 1) for r in tail])
    values = total - y2
    values[-1] = 0.0  # boundary value holds exactly by construction
    derivs = -y1 / F_tail
    grid = np.concatenate([[0.0], tail])
    u = np.concatenate([[total], values])
    du = np.concatenate([[0.0], derivs])
    return RadialFunction(model, grid, u, du)


def _require_decreasing(u: RadialFunction):
    scale = float(np.max(np.abs(u.values))) or 1.0
    diffs = np.diff(u.values)
    if np.any(diffs > 1e-12 * scale) or float(np.min(u.values)) < -1e-10 * scale:
        raise DomainError("radial profile must be positive and strictly decreasing")


def distribution_function(u: RadialFunction, model: WarpingModel, t: float) -> float:
    """Volume of the superlevel set {u > t} for a decreasing radial profile.

    Equals ball_volume(r(t)) with r(t) the unique radius where u crosses t;
    the crossing is located by root bracketing on the interpolant.
    """
    if t < 0:
        raise DomainError(f"level must be nonnegative, got {t}")
    _require_decreasing(u)
    top = float(u.values[0])
    if t >= top:
        return 0.0
    bottom = float(u.values[-1])
    if t < bottom - 1e-12 * max(top, 1.0):
        raise DomainError(
            f"level {t:g} below the sampled range (profile truncated at u = {bottom:g})")
    if t <= bottom:
        return ball_volume(model, u.r_max)
    r_t = brentq(lambda r: u(r) - t, 0.0, u.r_max, xtol=1e-14, rtol=8.9e-16)
    if r_t <= 0.0:
        return 0.0
    return ball_volume(model, r_t)


def level_radius(u: RadialFunction, t: float) -> float:
    """Radius where a decreasing radial profile crosses level t."""
    _require_decreasing(u)
    if t >= float(u.values[0]):
        return 0.0
    if t <= float(u.values[-1]):
        return u.r_max
    return float(brentq(lambda r: u(r) - t, 0.0, u.r_max, xtol=1e-14, rtol=8.9e-16))


def lp_norm(u: RadialFunction, model: WarpingModel, p: float,
            r_max: float | None = None, tol: float = NORM_QUAD_RTOL) -> float:
    """(w_{n-1} integral_0^{r_max} |u|^p f^{n-1} dr)^{1/p} by quadrature."""
    if p < 1:
        raise DomainError(f"norm exponent must be >= 1, got {p}")
    if r_max is None:
        r_max = u.r_max
    if r_max <= 0 or r_max > u.r_max * (1 + 1e-12):
        raise DomainError(f"norm radius {r_max:g} outside the sampled range")
    n = model.dimension

    def integrand(r):
        return abs(u(r)) ** p * model.warping(r)[0] ** (n - 1)

    value = adaptive_quad(integrand, 0.0, min(r_max, u.r_max), tol,
                          what="norm quadrature")
    return (sphere_measure(n) * value) ** (1.0 / p)


def sup_norm(u: RadialFunction) -> float:
    """max |u|: grid maximum refined by dense interpolant evaluation."""
    node_best = float(np.max(np.abs(u.values)))
    if u.radii.size < 2:
        return node_best
    probe = np.linspace(0.0, u.r_max, max(9 * u.radii.size, 512))
    dense_best = float(np.max(np.abs(u._spline(probe))))
    return max(node_best, dense_best)


@dataclass(frozen=True)
class GlobalSolution:
    """Regular eigenfunction integrated over the whole manifold.

    Truncated where the decay exponent sigma(r) = -(log u)'(r) stabilizes;
    the norm integral m(r) = integral |u|^p f^{n-1} dr is accumulated along
    the way so that tails can be added in closed form.
    """
    profile: RadialFunction
    sigma: float
    sigma_vol: float
    tail_exponent: float
    divergent: bool
    norm_value: float        # math.inf when divergent
    tail_fraction: float
    r_truncation: float


def solve_whole_manifold(model: WarpingModel, lam: float, p: float,
                         tol: float = ODE_RTOL) -> GlobalSolution:
    """Integrate the regular eigenfunction until its decay rate settles.

    The L^p mass grows like exp((sigma_vol - p sigma) r) at radius r with
    sigma_vol = (n-1)(log f)'; once sigma is stable the tail is either
    declared divergent (exponent >= -1e-3) or summed as an exponential.
    Integration continues past stabilization until the extrapolated tail is
    a negligible fraction of the accumulated integral.
    """
    if lam <= 0:
        raise DomainError(f"eigenvalue parameter must be positive, got {lam}")
    if p < 1:
        raise DomainError(f"norm exponent must be >= 1, got {p}")
    n = model.dimension
    b2, b4 = _series_coefficients(model, lam)
    rs = _series_radius(lam)
    u0, du0 = _series_eval(b2, b4, rs)
    n1 = n - 1

    def rhs(r, y):
        f, fp = model.warping(r)
        return (y[1], -(n1 * fp / f * y[1] + lam * y[0]),
                abs(y[0]) ** p * f ** n1)

    state = [u0, du0, 0.0]
    r_now = rs
    sigma_prev = None
    sigma = None
    segments = []
    stable_since = None
    while True:
        r_next = min(r_now + 1.0, R_GLOBAL_CAP)
        if model.kind == "jacobi":
            model.warping(r_next)
        sol = solve_ivp(rhs, (r_now, r_next), state, method="DOP853",
                        rtol=tol, atol=1e-60, dense_output=True)
        if not sol.success:
            raise NumericError(f"global integration failed: {sol.message}")
        segments.append(sol)
        state = [float(sol.y[0, -1]), float(sol.y[1, -1]), float(sol.y[2, -1])]
        r_now = r_next
        if state[0] <= 0.0:
            raise NumericError(
                "regular solution crossed zero; the eigenvalue parameter "
                "exceeds the bottom of the spectrum")
        sigma = -state[1] / state[0]
        f, fp = model.warping(r_now)
        sigma_vol = n1 * fp / f
        exponent = sigma_vol - p * sigma
        if sigma_prev is not None and sigma > 0 and \
                abs(sigma - sigma_prev) <= SIGMA_STABLE_REL * abs(sigma):
            if stable_since is None:
                stable_since = r_now
            if exponent >= -DIVERGENCE_MARGIN:
                divergent = True
                break
            mass = state[0] ** p * f ** n1
            tail = mass / (p * sigma - sigma_vol)
            if tail <= TAIL_FRACTION_TARGET * state[2] or r_now >= R_GLOBAL_CAP:
                divergent = False
                break
        else:
            stable_since = None
        if r_now >= R_GLOBAL_CAP:
            raise NumericError(
                f"decay exponent did not stabilize below r = {R_GLOBAL_CAP:g}")
        sigma_prev = sigma

    m = _sample_count(r_now - rs, lam)
    grid_tail = np.linspace(rs, r_now, m)
    uu = np.empty_like(grid_tail)
    dd = np.empty_like(grid_tail)
    mm = np.empty_like(grid_tail)
    bounds = [seg.t[-1] for seg in segments]
    idx = np.searchsorted(bounds, grid_tail, side="left")
    for i, (r, j) in enumerate(zip(grid_tail, idx)):
        vals = segments[min(j, len(segments) - 1)].sol(r)
        uu[i], dd[i], mm[i] = vals
    head = np.array([0.0, 0.5 * rs])
    hu, hdu = _series_eval(b2, b4, head)
    profile = RadialFunction(model, np.concatenate([head, grid_tail]),
                             np.concatenate([hu, uu]),
                             np.concatenate([hdu, dd]))
    f, fp = model.warping(r_now)
    sigma_vol = n1 * fp / f
    exponent = sigma_vol - p * sigma
    if divergent:
        return GlobalSolution(profile, sigma, sigma_vol, exponent, True,
                              math.inf, math.inf, r_now)
    mass = state[0] ** p * f ** n1
    tail = mass / (p * sigma - sigma_vol)
    total = state[2] + tail
    norm = (sphere_measure(n) * total) ** (1.0 / p)
    return GlobalSolution(profile, sigma, sigma_vol, exponent, False,
                          norm, tail / total, r_now)
