"""Shared adaptive quadrature wrapper with explicit failure semantics."""

from __future__ import annotations

import math
import warnings

from scipy.integrate import IntegrationWarning, quad

from .errors import NumericError

# Accept results whose reported error stays below this relative level even
# when the requested tolerance was missed (piecewise-cubic integrands trip
# the roundoff detector long before accuracy actually degrades).
_ACCEPT_REL = 1e-6


def adaptive_quad(fn, a: float, b: float, rtol: float, what: str = "integral") -> float:
    """Integrate fn over [a, b]; raise NumericError on non-convergence."""
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        value, abserr = quad(fn, a, b, epsabs=0.0, epsrel=rtol, limit=500)
    if not math.isfinite(value):
        raise NumericError(f"{what} diverged on [{a:g}, {b:g}]")
    if abserr > _ACCEPT_REL * max(abs(value), 1e-300) and abserr > 1e-14:
        raise NumericError(
            f"{what} did not converge on [{a:g}, {b:g}] "
            f"(value {value:g}, error estimate {abserr:g})")
    return value
