"""Finite-sample confidence bounds, built on Hoeffding's inequality.

Each benchmark is the mean of a bounded per-trial random variable that takes
one value per outcome:

==========  =====  =====  =====  =====  =========
variable     oo     bo     ob     bb    range
==========  =====  =====  =====  =====  =========
X_T          0     -1      3     -1    [-1, 3]
Y_T        -1/2    -2      4     -2    [-2, 4]
Z_T          0      0     C1    -C2    [-C2, C1]
==========  =====  =====  =====  =====  =========

The R variants swap the ``bo`` and ``ob`` columns. ``Y = (3 X - 1) / 2`` so
that its mean is the multimode benchmark; scoring ``oo`` as 0 instead would
overstate it (by ``(1 + p_bo + p_bb - p_ob) / 2``) and is not sound for
products of lossy single photons. Rounds need not be
identically distributed; the bounds hold for the average over the rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .benchmarks import ApparatusBounds, star_coefficients
from .detection_model import ClickCounts
from .errors import DomainError
from .wigner import disk_negativity_bound, negativity_bound_value

_TINY = np.nextafter(0.0, 1.0)


def parse_alpha(value) -> float:
    """Accept ``0.05``, ``"0.05"`` or ``"1e-10"``; must lie in (0, 1)."""
    try:
        alpha = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"alpha must be a number, got {value!r}") from None
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def hoeffding_penalty(width: float, n: int, alpha: float) -> float:
    """One-sided Hoeffding deviation for the mean of ``n`` variables of range ``width``."""
    return width * math.sqrt(math.log(1.0 / alpha) / (2.0 * n))


# -- per-outcome values ---------------------------------------------------------------
# ordered as (oo, bo, ob, bb)

def x_values(arm: str = "T") -> np.ndarray:
    return _arm(np.array([0.0, -1.0, 3.0, -1.0]), arm)


def y_values(arm: str = "T") -> np.ndarray:
    return _arm(np.array([-0.5, -2.0, 4.0, -2.0]), arm)


def z_values(bounds: ApparatusBounds, arm: str = "T") -> np.ndarray:
    (c1_t, c2_t), (c1_r, c2_r) = star_coefficients(bounds)
    if arm == "T":
        return np.array([0.0, 0.0, c1_t, -c2_t])
    if arm == "R":
        return np.array([0.0, c1_r, 0.0, -c2_r])
    raise DomainError(f"arm must be 'T' or 'R', got {arm!r}")


def _arm(values, arm):
    if arm == "T":
        return values
    if arm == "R":
        return values[[0, 2, 1, 3]]
    raise DomainError(f"arm must be 'T' or 'R', got {arm!r}")


def _mean(values, counts: ClickCounts) -> float:
    counts.require_nonempty()
    return float(values @ counts.as_array()) / counts.n


# -- apparatus independent ------------------------------------------------------------

def xbar_T(counts: ClickCounts) -> float:
    return _mean(x_values("T"), counts)


def xbar_R(counts: ClickCounts) -> float:
    return _mean(x_values("R"), counts)


def min_xbar(counts: ClickCounts) -> float:
    """``min(Xbar_T, Xbar_R)`` computed straight from the counts."""
    counts.require_nonempty()
    c = counts
    return (4 * min(c.n_ob, c.n_bo) - c.n_ob - c.n_bo - c.n_bb) / c.n


def q_alpha(counts: ClickCounts, alpha: float) -> float:
    """One-sided lower confidence bound on the average single-photon weight.

    With probability at least ``1 - alpha`` the value is below the P_1
    averaged over the rounds (of the loss-degraded states).
    """
    alpha = parse_alpha(alpha)
    return min_xbar(counts) - hoeffding_penalty(4.0, counts.n, alpha)


def log_p_value_wigner(counts: ClickCounts) -> float:
    """Natural log of the Wigner-positivity p-value bound (0 when there is no evidence)."""
    m = min_xbar(counts)
    if m <= 0.5:
        return 0.0
    return -2.0 * counts.n * (m - 0.5) ** 2 / 16.0


def p_value_wigner(counts: ClickCounts) -> float:
    """p-value for the null hypothesis "the states are Wigner-positive on average".

    Returns 1 when ``min(Xbar_T, Xbar_R) <= 1/2``. Values below the smallest
    positive double are reported as that double (still a valid upper bound);
    use :func:`log_p_value_wigner` for the exact exponent.
    """
    return max(math.exp(log_p_value_wigner(counts)), _TINY)


def nw_from_q(q: float) -> float:
    """Negativity bound for a lower confidence bound ``q`` on P_1."""
    return negativity_bound_value(min(max(q, 0.0), 1.0))


def nw_disk_from_q(q: float) -> float:
    return disk_negativity_bound(min(max(q, 0.0), 1.0)).value


def nw_alpha(counts: ClickCounts, alpha: float) -> float:
    return nw_from_q(q_alpha(counts, alpha))


# -- apparatus dependent --------------------------------------------------------------

def zbar_T(counts: ClickCounts, bounds: ApparatusBounds) -> float:
    return _mean(z_values(bounds, "T"), counts)


def zbar_R(counts: ClickCounts, bounds: ApparatusBounds) -> float:
    return _mean(z_values(bounds, "R"), counts)


def q_alpha_star(counts: ClickCounts, alpha: float, bounds: ApparatusBounds) -> float:
    """Apparatus-dependent lower confidence bound; the better of the two arms."""
    alpha = parse_alpha(alpha)
    (c1_t, c2_t), (c1_r, c2_r) = star_coefficients(bounds)
    q_t = zbar_T(counts, bounds) - hoeffding_penalty(c1_t + c2_t, counts.n, alpha)
    q_r = zbar_R(counts, bounds) - hoeffding_penalty(c1_r + c2_r, counts.n, alpha)
    return max(q_t, q_r)


def nw_alpha_star(counts: ClickCounts, alpha: float, bounds: ApparatusBounds) -> float:
    return nw_from_q(q_alpha_star(counts, alpha, bounds))


# -- multimode --------------------------------------------------------------------------

def ybar_T(counts: ClickCounts) -> float:
    return _mean(y_values("T"), counts)


def ybar_R(counts: ClickCounts) -> float:
    return _mean(y_values("R"), counts)


def q_alpha_tilde(counts: ClickCounts, alpha: float) -> float:
    """Lower confidence bound on the best-mode single-photon weight of a product source."""
    alpha = parse_alpha(alpha)
    return min(ybar_T(counts), ybar_R(counts)) - hoeffding_penalty(6.0, counts.n, alpha)


# -- bundled report ---------------------------------------------------------------------

@dataclass(frozen=True)
class ConfidenceQuery:
    counts: ClickCounts
    alpha: float
    bounds: ApparatusBounds | None = None

    def __post_init__(self):
        self.counts.require_nonempty()
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))


@dataclass(frozen=True)
class StatReport:
    """All finite-statistics figures for one dataset.

    ``nw_*`` use the closed-form bound of :func:`negativity_lower_bound`;
    ``nw_*_disk`` use :func:`disk_negativity_bound`.
    """

    min_xbar: float
    q_alpha: float
    q_alpha_tilde: float
    p_value: float
    log10_p_value: float
    nw_alpha: float
    nw_alpha_disk: float
    q_alpha_star: float | None = None
    nw_alpha_star: float | None = None
    nw_alpha_star_disk: float | None = None


def stat_report(query: ConfidenceQuery) -> StatReport:
    counts, alpha, bounds = query.counts, query.alpha, query.bounds
    q = q_alpha(counts, alpha)
    star = q_alpha_star(counts, alpha, bounds) if bounds is not None else None
    return StatReport(
        min_xbar=min_xbar(counts),
        q_alpha=q,
        q_alpha_tilde=q_alpha_tilde(counts, alpha),
        p_value=p_value_wigner(counts),
        log10_p_value=log_p_value_wigner(counts) / math.log(10.0),
        nw_alpha=nw_from_q(q),
        nw_alpha_disk=nw_disk_from_q(q),
        q_alpha_star=star,
        nw_alpha_star=nw_from_q(star) if star is not None else None,
        nw_alpha_star_disk=nw_disk_from_q(star) if star is not None else None,
    )
