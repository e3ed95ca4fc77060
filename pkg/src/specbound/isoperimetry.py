"""Isoperimetric functions H and the associated integral H_a.

An isoperimetric function H gives a lower bound H(|Omega|) <= |boundary of
Omega| for every compactly contained smooth set. Three variants are
implemented:

* power law          H(s) = D s^{1-1/n}         (Croke-type bound)
* model profile      H(v) = area(V^{-1}(v))     (candidate profile of a
                     rotationally symmetric model, V = ball volume)
* tabulated          monotone piecewise-cubic through user samples

From H the associated integral

    H_a(t) = integral_0^t s / H(s)^2 ds

is computed by adaptive quadrature. The integrand behaves like s^{2/n - 1}
near zero for power-law-like profiles, which is integrable but unbounded for
n >= 3; the head [0, eps] is therefore integrated in closed form after
fitting the leading power of H from two samples.
"""

from __future__ import annotations

import csv
import math
import threading
from bisect import bisect_right, insort

from scipy.interpolate import PchipInterpolator

from ._quadrature import adaptive_quad
from .errors import (DomainError, InvalidProfileError, NumericError,
                     RangeError)
from .geometry import WarpingModel, ball_area, ball_volume, inverse_ball_volume

AIF_QUAD_RTOL = 1e-10
_SINGULAR_SPLIT = 1e-4   # head/tail split point for the s=0 singularity


class IsoperimetricFunction:
    """Base class; concrete variants implement ``_eval(s)`` for s > 0."""

    variant = "abstract"
    domain_end = math.inf

    def __call__(self, s: float) -> float:
        if s < 0:
            raise DomainError(f"set volume must be nonnegative, got {s}")
        if s == 0.0:
            return 0.0
        if s > self.domain_end:
            raise DomainError(
                f"volume {s:g} exceeds the profile domain end {self.domain_end:g}")
        return self._eval(s)

    def _eval(self, s: float) -> float:
        raise NotImplementedError

    def describe(self) -> str:
        return self.variant


class PowerLawProfile(IsoperimetricFunction):
    """H(s) = D s^{1-1/n}; concave and strictly increasing for n >= 2.

    Only n = 2 ships a default constant, D = sqrt(4 pi), the sharp planar
    value valid on simply connected surfaces of nonpositive curvature. For
    n >= 3 the dimensional constant must be supplied explicitly.
    """

    variant = "power_law"

    def __init__(self, dimension: int, D: float | None = None):
        if int(dimension) != dimension or dimension < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {dimension}")
        self.dimension = int(dimension)
        if D is None:
            if self.dimension != 2:
                raise DomainError(
                    "no default isoperimetric constant ships for n >= 3; "
                    "supply D explicitly")
            D = math.sqrt(4.0 * math.pi)
        if D <= 0:
            raise DomainError(f"isoperimetric constant must be positive, got {D}")
        self.D = float(D)

    def _eval(self, s):
        return self.D * s ** (1.0 - 1.0 / self.dimension)

    def describe(self):
        return f"power_law(D={self.D:g}, n={self.dimension})"


class ModelProfile(IsoperimetricFunction):
    """Boundary area of the geodesic ball holding a given volume.

    This is the profile *candidate* of the model: whether geodesic balls
    actually minimize boundary measure is asserted by the user, not checked.
    """

    variant = "model"

    def __init__(self, model: WarpingModel):
        self.model = model

    def _eval(self, v):
        return ball_area(self.model, inverse_ball_volume(self.model, v))

    def describe(self):
        return f"model({self.model.label})"


class TabulatedProfile(IsoperimetricFunction):
    """Monotone piecewise-cubic interpolation of (s_i, H_i) samples.

    Queries outside [s_0, s_m] raise; linear or plain-cubic interpolation is
    avoided because derivative overshoot would leak into the a.i.f.
    quadrature.
    """

    variant = "tabulated"

    def __init__(self, s_values, h_values):
        s = [float(v) for v in s_values]
        h = [float(v) for v in h_values]
        if len(s) != len(h) or len(s) < 4:
            raise InvalidProfileError("need at least 4 (s, H) samples")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise InvalidProfileError("sample volumes must be strictly increasing")
        if any(v <= 0 for v in h):
            raise InvalidProfileError("profile values must be positive")
        if s[0] <= 0:
            raise InvalidProfileError("sample volumes must be positive")
        self.s_min = s[0]
        self.domain_end = s[-1]
        self._interp = PchipInterpolator(s, h, extrapolate=False)

    @classmethod
    def from_csv(cls, path) -> "TabulatedProfile":
        """Load a two-column CSV with header ``s,H`` (UTF-8, decimal point)."""
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["s", "H"]:
            raise InvalidProfileError(f"{path}: expected header 's,H'")
        try:
            s = [float(r[0]) for r in rows[1:] if r]
            h = [float(r[1]) for r in rows[1:] if r]
        except (ValueError, IndexError) as exc:
            raise InvalidProfileError(f"{path}: malformed row ({exc})") from exc
        return cls(s, h)

    def _eval(self, s):
        if s < self.s_min:
            raise DomainError(
                f"volume {s:g} below the first sample {self.s_min:g}; "
                "tabulated profiles do not extrapolate")
        return float(self._interp(s))

    def describe(self):
        return f"tabulated([{self.s_min:g}, {self.domain_end:g}])"


def profile_eval(profile: IsoperimetricFunction, s: float) -> float:
    """H(s) for any profile variant."""
    return profile(s)


def _fit_leading_power(profile, eps):
    """Fit H(s) ~ c s^alpha near zero from samples at eps and eps/2."""
    h1 = profile(eps)
    h0 = profile(0.5 * eps)
    if h0 <= 0 or h1 <= 0:
        raise InvalidProfileError("profile vanishes near zero volume")
    alpha = math.log(h1 / h0) / math.log(2.0)
    c = h1 / eps ** alpha
    return c, alpha


class AifEvaluator:
    """Cached monotone evaluator for H_a and its inverse.

    Values are accumulated incrementally: H_a(t) is computed from the largest
    cached point below t, so sweeps and bisections pay for each stretch of
    the integral once. Cache updates are serialized by a lock; evaluation is
    deterministic given the tolerance.
    """

    def __init__(self, profile: IsoperimetricFunction, tolerance: float = AIF_QUAD_RTOL):
        self.profile = profile
        self.tolerance = float(tolerance)
        self._lock = threading.Lock()
        if isinstance(profile, ModelProfile):
            # Radius substitution v = V(rho): the increment of H_a between
            # volumes V(r0) and V(r1) equals integral_{r0}^{r1} V/A drho,
            # which is smooth down to rho = 0 (integrand ~ rho/n). Entries
            # are (t, H_a(t), radius of the ball of volume t).
            self._cache = [(0.0, 0.0, 0.0)]
        else:
            self._cache = [(0.0, 0.0)]

    # -- internals ---------------------------------------------------------

    def _quad(self, fn, a, b):
        return adaptive_quad(fn, a, b, self.tolerance, what="a.i.f. quadrature")

    def _head_integral(self, eps):
        """Closed-form integral of s/H(s)^2 over [0, eps] via the power fit."""
        c, alpha = _fit_leading_power(self.profile, eps)
        power = 2.0 - 2.0 * alpha
        if power <= 0:
            raise InvalidProfileError(
                f"H ~ s^{alpha:.3g} near zero makes the associated integral "
                "divergent at 0")
        return eps ** power / (power * c * c)

    def _density(self, s):
        h = self.profile(s)
        return s / (h * h)

    def _generic_increment(self, t0, t1):
        if t0 == 0.0:
            eps = min(t1, _SINGULAR_SPLIT)
            head = self._head_integral(eps)
            if t1 <= eps:
                return head
            return head + self._quad(self._density, eps, t1)
        return self._quad(self._density, t0, t1)

    def _model_ratio(self, rho):
        if rho <= 0.0:
            return 0.0
        return ball_volume(self.profile.model, rho) / ball_area(self.profile.model, rho)

    def _value_model(self, t):
        with self._lock:
            idx = bisect_right([e[0] for e in self._cache], t) - 1
            t0, ha0, r0 = self._cache[idx]
        if t0 == t:
            return ha0
        r1 = inverse_ball_volume(self.profile.model, t)
        ha = ha0 + self._quad(self._model_ratio, r0, r1)
        with self._lock:
            insort(self._cache, (t, ha, r1))
        return ha

    # -- public surface ------------------------------------------------------

    def value(self, t: float) -> float:
        """H_a(t), incrementally accumulated adaptive quadrature."""
        if t < 0:
            raise DomainError(f"a.i.f. argument must be nonnegative, got {t}")
        if t == 0.0:
            return 0.0
        if t > self.profile.domain_end:
            raise DomainError(
                f"a.i.f. argument {t:g} exceeds the profile domain end "
                f"{self.profile.domain_end:g}")
        if isinstance(self.profile, ModelProfile):
            return self._value_model(t)
        with self._lock:
            idx = bisect_right([e[0] for e in self._cache], t) - 1
            t0, ha0 = self._cache[idx]
        if t0 == t:
            return ha0
        ha = ha0 + self._generic_increment(t0, t)
        with self._lock:
            insort(self._cache, (t, ha))
        return ha

    def inverse(self, y: float) -> float:
        """t with H_a(t) = y, by bracket expansion plus bisection.

        The bisection narrows the bracket to ~1e-11 relative width so that
        downstream powers of the result keep full accuracy.
        """
        if y < 0:
            raise DomainError(f"a.i.f. target must be nonnegative, got {y}")
        if y == 0.0:
            return 0.0
        end = self.profile.domain_end
        if math.isfinite(end) and self.value(end) < y:
            raise RangeError(
                f"target {y:g} exceeds sup H_a = {self.value(end):g} on the "
                "finite profile domain")
        hi = 1.0 if not math.isfinite(end) else min(1.0, end)
        lo = 0.0
        while self.value(hi) < y:
            lo = hi
            hi = hi * 2.0 if not math.isfinite(end) else min(hi * 2.0, end)
            if hi > 1e12:
                raise NumericError(f"a.i.f. target {y:g} unreachable below t = 1e12")
        abs_tol = self.tolerance * max(1.0, y)
        for _ in range(300):
            mid = 0.5 * (lo + hi)
            val = self.value(mid)
            if abs(val - y) <= abs_tol and (hi - lo) <= 1e-11 * max(mid, 1e-30):
                return mid
            if val < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def aif_eval(aif: AifEvaluator, t: float) -> float:
    """H_a(t) = integral_0^t s/H(s)^2 ds."""
    return aif.value(t)


def aif_inverse(aif: AifEvaluator, y: float) -> float:
    """The inverse map of H_a, defined on its monotone range."""
    return aif.inverse(y)
