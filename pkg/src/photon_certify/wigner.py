"""Wigner functions of Fock mixtures and Wigner-negativity bounds.

All functions take ``|beta|^2`` (written ``u`` below): Fock mixtures have
rotationally symmetric Wigner functions, so one radial variable suffices and
the phase-space measure becomes ``d^2 beta = pi du``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, NumericError
from .photon_states import PhotonNumberDistribution

LAGUERRE_MAX_N = 400

#: F(1) = N_W(|1>), the largest value the bound can take
F_AT_ONE = 9.0 / (4.0 * math.sqrt(math.e)) - 1.0

_HALLEY_TOL = 1e-15
_HALLEY_MAXITER = 50


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function for ``x >= 0``.

    Halley iteration on ``w e^w - x`` started from ``log(1 + x)``.
    """
    x = float(x)
    if not x >= 0.0 or math.isinf(x):
        raise DomainError(f"lambert_w0 is only implemented for finite x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    w = math.log1p(x)
    for _ in range(_HALLEY_MAXITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= _HALLEY_TOL * (1.0 + abs(w)):
            return w
    raise NumericError("Halley iteration for Lambert W did not converge", x=x, w=w)


def scaled_laguerre(n_max: int, x) -> np.ndarray:
    """``exp(-x/2) L_n(x)`` for ``n = 0..n_max``, shape ``(n_max + 1,) + x.shape``.

    Forward three-term recurrence with the exponential folded into the seeds,
    so nothing overflows (``|exp(-x/2) L_n(x)| <= 1`` for ``x >= 0``).
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if n_max > LAGUERRE_MAX_N:
        raise DomainError(f"Laguerre evaluation refused beyond n = {LAGUERRE_MAX_N} (got {n_max})")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.exp(-0.5 * x)
    if n_max >= 1:
        out[1] = (1.0 - x) * out[0]
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def wigner_fock(n: int, beta_abs_sq):
    """Wigner function of ``|n>``: ``(2 (-1)^n / pi) exp(-2u) L_n(4u)``."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    u = np.asarray(beta_abs_sq, dtype=float)
    if np.any(u < 0):
        raise DomainError("|beta|^2 must be non-negative")
    val = (2.0 / math.pi) * (-1.0) ** n * scaled_laguerre(n, 4.0 * u)[n]
    return float(val) if val.ndim == 0 else val


def wigner_mixture(state: PhotonNumberDistribution, beta_abs_sq):
    """Wigner function of the Fock mixture ``sum_n P_n |n><n|`` at ``|beta|^2``."""
    u = np.asarray(beta_abs_sq, dtype=float)
    if np.any(u < 0):
        raise DomainError("|beta|^2 must be non-negative")
    probs = state.probs
    top = _top_index(probs)
    signs = (-1.0) ** np.arange(top + 1)
    lag = scaled_laguerre(top, 4.0 * u)
    val = (2.0 / math.pi) * np.tensordot(signs * probs[: top + 1], lag, axes=1)
    return float(val) if val.ndim == 0 else val


def _top_index(probs) -> int:
    nz = np.flatnonzero(probs > 0.0)
    return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True)
class NegativityBound:
    """Lower bound on the Wigner negativity implied by a single-photon weight.

    ``disk_radius_sq`` is the ``|beta|^2`` radius of the disk around the
    origin on which the Wigner function is guaranteed negative.
    """

    p1: float
    value: float
    disk_radius_sq: float


def negativity_lower_bound(p1: float) -> NegativityBound:
    """Closed-form lower bound ``F(P_1)`` on the Wigner negativity.

    ``F = 3 (1 - P1)(4 w^2 + 3) / (8 w) + P1 - 2`` with
    ``w = W0(sqrt(e)/2 * (1 - P1)/P1)`` for ``P1 > 1/2``; zero otherwise.
    F is convex and non-decreasing on [0, 1].
    """
    p1 = float(p1)
    if not (0.0 <= p1 <= 1.0):
        raise DomainError(f"p1 must lie in [0, 1], got {p1!r}")
    if p1 <= 0.5:
        return NegativityBound(p1, 0.0, 0.0)
    if p1 > 1.0 - 1e-12:
        # the closed form is 0/0 at P1 = 1
        return NegativityBound(p1, F_AT_ONE, 0.25)
    w = lambert_w0(0.5 * math.sqrt(math.e) * (1.0 - p1) / p1)
    value = 3.0 * (1.0 - p1) * (4.0 * w * w + 3.0) / (8.0 * w) + p1 - 2.0
    radius = 0.25 * (1.0 - 2.0 * w)
    return NegativityBound(p1, max(value, 0.0), min(max(radius, 0.0), 0.25))


def negativity_bound_value(p1: float) -> float:
    return negativity_lower_bound(p1).value


#: exact Wigner negativity of |1>, attained by the disk bound at P1 = 1
NW_SINGLE_PHOTON = 2.0 / math.sqrt(math.e) - 1.0


def disk_negativity_bound(p1: float) -> NegativityBound:
    """Negativity lower bound from integrating the worst-case Wigner function over its negative disk.

    On ``|beta|^2 < l(P1)`` any Fock mixture satisfies
    ``-W >= (2/pi)(P1 (1 - 4u) e^{-2u} - (1 - P1))``; integrating that over
    the disk gives ``(1 - P1)(2 w^2 - 3 w + 2)/(2 w) - P1`` with the same ``w``
    as :func:`negativity_lower_bound`. It is tight for ``|1>``
    (``2/sqrt(e) - 1``) and never exceeds the quadrature value.
    """
    p1 = float(p1)
    if not (0.0 <= p1 <= 1.0):
        raise DomainError(f"p1 must lie in [0, 1], got {p1!r}")
    if p1 <= 0.5:
        return NegativityBound(p1, 0.0, 0.0)
    if p1 > 1.0 - 1e-12:
        return NegativityBound(p1, NW_SINGLE_PHOTON, 0.25)
    w = lambert_w0(0.5 * math.sqrt(math.e) * (1.0 - p1) / p1)
    value = (1.0 - p1) * (2.0 * w * w - 3.0 * w + 2.0) / (2.0 * w) - p1
    radius = 0.25 * (1.0 - 2.0 * w)
    return NegativityBound(p1, max(value, 0.0), min(max(radius, 0.0), 0.25))


def negativity_oracle(state: PhotonNumberDistribution, *, abs_tol: float = 1e-8) -> float:
    """Wigner negativity ``N_W = int (|W| - W)/2 d^2 beta`` by adaptive quadrature.

    Sign changes of the radial Wigner function are bracketed on a fine grid
    (uniform in ``|beta|``), refined with Brent's method, and ``-W`` is
    integrated with QUADPACK over each negative interval.

    Beyond the largest zero of ``L_N`` (``N`` the highest occupied Fock
    layer) every term ``(-1)^n L_n`` is positive, so the search stops at
    ``u = 20 + N``, well past that zero (``x = 4u < 4N + 2``).
    """
    probs = state.probs
    top = _top_index(probs)
    if top > LAGUERRE_MAX_N:
        raise DomainError(f"state occupies Fock layers beyond {LAGUERRE_MAX_N}")
    if top == 0:
        return 0.0
    u_max = 20.0 + top

    def w_at(u):
        return wigner_mixture(state, u)

    r = np.linspace(0.0, math.sqrt(u_max), 4000 + 100 * top)
    grid = r * r
    vals = w_at(grid)

    tail = vals[-max(10, grid.size // 50):]
    if np.any(tail < 0.0):
        raise NumericError("Wigner function still negative at the end of the search domain",
                           u_max=u_max, min_tail=float(tail.min()))

    breaks = [0.0]
    for i in np.flatnonzero(np.signbit(vals[:-1]) != np.signbit(vals[1:])):
        a, b = grid[i], grid[i + 1]
        if vals[i] == 0.0:
            root = a
        elif vals[i + 1] == 0.0:
            root = b
        else:
            root = brentq(w_at, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        if root > breaks[-1]:
            breaks.append(root)
    breaks.append(u_max)

    total = 0.0
    err_total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a or w_at(0.5 * (a + b)) >= 0.0:
            continue
        res = quad(lambda u: -w_at(u), a, b, epsabs=1e-13, epsrel=1e-12,
                   limit=200, full_output=True)
        val, err = res[0], res[1]
        # a 4th element (warning message) is only present when QUADPACK flags a problem
        if len(res) > 3 and err > abs_tol:
            raise NumericError("quadrature did not converge", interval=(a, b),
                               estimate=val, error=err, message=res[3])
        total += val
        err_total += err
    if math.pi * err_total > abs_tol:
        raise NumericError("negativity quadrature error above tolerance",
                           error=math.pi * err_total, tolerance=abs_tol)
    return max(math.pi * total, 0.0)
