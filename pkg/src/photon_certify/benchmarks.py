"""Lower bounds on the single-photon weight P_1 from click probabilities.

Three families:

* apparatus independent: ``P1_hat = min(4 p_ob + p_oo - 1, 4 p_bo + p_oo - 1)``,
  valid for any beamsplitter and detector efficiencies (it bounds P_1 of the
  state after the detector loss);
* apparatus dependent: uses upper bounds on the transmittance and the
  efficiencies to bound P_1 of the state before detection;
* multimode: bounds the best single-mode P_1 of a product of modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detection_model import ApparatusParams, ClickProbabilities
from .errors import DataError, DegenerateError, DomainError

_GEOM_TOL = 1e-12


# -- apparatus independent ---------------------------------------------------------

def p1_hat_T(p: ClickProbabilities) -> float:
    return 4.0 * p.p_ob + p.p_oo - 1.0


def p1_hat_R(p: ClickProbabilities) -> float:
    return 4.0 * p.p_bo + p.p_oo - 1.0


def p1_hat(p: ClickProbabilities) -> float:
    """Apparatus-independent lower bound on P_1 (of the loss-degraded state)."""
    return min(p1_hat_T(p), p1_hat_R(p))


# -- polytope geometry --------------------------------------------------------------

@dataclass(frozen=True)
class PolytopePoint:
    """Observable pair ``(min(p_o_, p__o), p_oo)``."""

    x: float
    y: float

    @classmethod
    def from_probabilities(cls, p: ClickProbabilities) -> "PolytopePoint":
        return cls(min(p.p_o_, p.p__o), p.p_oo)

    def is_physical(self) -> bool:
        return polytope_contains(1.0, self)

    def as_tuple(self):
        return (self.x, self.y)


def polytope_vertices(P: float) -> list[PolytopePoint]:
    """Vertices of the region reachable by states with ``P_1 <= P``."""
    if not (0.0 <= P <= 1.0):
        raise DomainError(f"P must lie in [0, 1], got {P!r}")
    return [
        PolytopePoint(0.0, 0.0),
        PolytopePoint((1.0 + P) / 4.0, 0.0),
        PolytopePoint((2.0 - P) / 2.0, 1.0 - P),
        PolytopePoint(1.0, 1.0),
    ]


def polytope_contains(P: float, pt: PolytopePoint) -> bool:
    """Half-space membership test; points on the boundary count as inside."""
    if not (0.0 <= P <= 1.0):
        raise DomainError(f"P must lie in [0, 1], got {P!r}")
    x, y = pt.x, pt.y
    return (
        y >= -_GEOM_TOL
        and y - x <= _GEOM_TOL
        and x - (1.0 + y) / 2.0 <= _GEOM_TOL
        and 4.0 * x - 3.0 * y - 1.0 - P <= _GEOM_TOL
    )


def polytope_export(P_values=(0.25, 0.5, 0.75, 1.0), points=()) -> dict:
    """Plot data: the polytopes for each ``P`` plus optional measured points."""
    return {
        "polytopes": [
            {"P": float(P), "vertices": [[v.x, v.y] for v in polytope_vertices(P)]}
            for P in P_values
        ],
        "points": [[pt.x, pt.y] for pt in points],
    }


# -- apparatus dependent -------------------------------------------------------------

@dataclass(frozen=True)
class ApparatusBounds:
    """Calibration bounds on the apparatus.

    The reflectance is known to lie in ``[1 - t_hat, r_hat]`` (so ``t <= t_hat``,
    ``r <= r_hat``) and the efficiencies satisfy ``eta_T <= eta_T_hat``,
    ``eta_R <= eta_R_hat``.

    ``eta_T_min`` / ``eta_R_min`` are optional lower bounds on the
    efficiencies. Without them the coefficients are the standard ones, which
    are only guaranteed sound when each efficiency sits at its upper bound.
    With them, the penalty coefficient is worst-cased over the full box.
    """

    t_hat: float
    r_hat: float
    eta_T_hat: float
    eta_R_hat: float
    eta_T_min: float | None = None
    eta_R_min: float | None = None

    def __post_init__(self):
        for name in ("t_hat", "r_hat", "eta_T_hat", "eta_R_hat"):
            v = float(getattr(self, name))
            if not (0.0 < v <= 1.0):
                raise DegenerateError(f"{name} must lie in (0, 1], got {v!r}")
            object.__setattr__(self, name, v)
        if 1.0 - self.t_hat > self.r_hat + 1e-12:
            raise DomainError("empty reflectance interval: need 1 - t_hat <= r_hat")
        for name, hat in (("eta_T_min", self.eta_T_hat), ("eta_R_min", self.eta_R_hat)):
            v = getattr(self, name)
            if v is None:
                continue
            v = float(v)
            if not (0.0 < v <= hat):
                raise DegenerateError(f"{name} must lie in (0, {hat}], got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def has_lower_bounds(self) -> bool:
        return self.eta_T_min is not None or self.eta_R_min is not None

    def contains(self, params: ApparatusParams) -> bool:
        eta_T_lo = self.eta_T_min if self.eta_T_min is not None else 0.0
        eta_R_lo = self.eta_R_min if self.eta_R_min is not None else 0.0
        return (
            1.0 - self.t_hat - 1e-12 <= params.r <= self.r_hat + 1e-12
            and eta_T_lo <= params.eta_T <= self.eta_T_hat
            and eta_R_lo <= params.eta_R <= self.eta_R_hat
        )

    def to_json(self) -> dict:
        out = {"t_hat": self.t_hat, "r_hat": self.r_hat,
               "eta_T_hat": self.eta_T_hat, "eta_R_hat": self.eta_R_hat}
        if self.eta_T_min is not None:
            out["eta_T_min"] = self.eta_T_min
        if self.eta_R_min is not None:
            out["eta_R_min"] = self.eta_R_min
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ApparatusBounds":
        try:
            return cls(
                t_hat=float(data["t_hat"]), r_hat=float(data["r_hat"]),
                eta_T_hat=float(data["eta_T_hat"]), eta_R_hat=float(data["eta_R_hat"]),
                eta_T_min=data.get("eta_T_min"), eta_R_min=data.get("eta_R_min"),
            )
        except KeyError as exc:
            raise DataError(f"bounds JSON is missing {exc}") from None
        except (TypeError, ValueError) as exc:
            raise DataError(f"invalid bounds JSON: {exc}") from None


def c1(x: float, eta: float) -> float:
    if x * eta <= 0.0:
        raise DegenerateError(f"C1 undefined for x*eta = {x * eta!r}")
    return 1.0 / (eta * x)


def c2(x: float, eta1: float, eta2: float) -> float:
    if x * eta1 <= 0.0 or (1.0 - x) * eta2 <= 0.0:
        raise DegenerateError(f"C2 undefined for x={x!r}, eta1={eta1!r}, eta2={eta2!r}")
    return (1.0 / (x * eta1)) * ((2.0 - x * eta1) / (2.0 * (1.0 - x) * eta2) - 1.0)


def star_coefficients(bounds: ApparatusBounds):
    """``((C1_T, C2_T), (C1_R, C2_R))`` for the two arms."""
    if not bounds.has_lower_bounds:
        return (
            (c1(bounds.t_hat, bounds.eta_T_hat), c2(bounds.t_hat, bounds.eta_T_hat, bounds.eta_R_hat)),
            (c1(bounds.r_hat, bounds.eta_R_hat), c2(bounds.r_hat, bounds.eta_R_hat, bounds.eta_T_hat)),
        )
    eta_T_lo = bounds.eta_T_min if bounds.eta_T_min is not None else bounds.eta_T_hat
    eta_R_lo = bounds.eta_R_min if bounds.eta_R_min is not None else bounds.eta_R_hat
    t_lo, r_lo = 1.0 - bounds.r_hat, 1.0 - bounds.t_hat

    def arm(x_hi, x_lo, y_lo):
        # need C1 <= 1/x and C2/C1 >= max f_n/g_n = (2 - x)/(2 y) - 1 over the box
        if x_hi <= 0.0 or x_lo <= 0.0 or y_lo <= 0.0:
            raise DegenerateError("bounds allow an arm with zero click probability")
        k1 = 1.0 / x_hi
        return k1, k1 * ((2.0 - x_lo) / (2.0 * y_lo) - 1.0)

    return (
        arm(bounds.t_hat * bounds.eta_T_hat, t_lo * eta_T_lo, r_lo * eta_R_lo),
        arm(bounds.r_hat * bounds.eta_R_hat, r_lo * eta_R_lo, t_lo * eta_T_lo),
    )


def p1_hat_star_T(p: ClickProbabilities, bounds: ApparatusBounds) -> float:
    (k1, k2), _ = star_coefficients(bounds)
    return k1 * p.p_ob - k2 * p.p_bb


def p1_hat_star_R(p: ClickProbabilities, bounds: ApparatusBounds) -> float:
    _, (k1, k2) = star_coefficients(bounds)
    return k1 * p.p_bo - k2 * p.p_bb


def p1_hat_star(p: ClickProbabilities, bounds: ApparatusBounds) -> float:
    """Apparatus-dependent bound on P_1 of the state before detection.

    Unclamped: with ``p_bb = 0`` it can exceed 1. Use :func:`clamp_unit`
    for display.
    """
    return max(p1_hat_star_T(p, bounds), p1_hat_star_R(p, bounds))


def clamp_unit(value: float) -> float:
    return min(value, 1.0)


def fn_hn_gn(n: int, params: ApparatusParams):
    """Click probabilities ``(p_ob, p_bo, p_bb)`` for the Fock state ``|n>``.

    ``n`` may be an integer array; the three results then broadcast with it.
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 1):
        raise DomainError(f"n must be >= 1, got {n}")
    x = params.eta_T * params.t
    y = params.eta_R * params.r
    none = (1.0 - x - y) ** n_arr
    f = (1.0 - y) ** n_arr - none
    h = (1.0 - x) ** n_arr - none
    g = 1.0 + none - (1.0 - y) ** n_arr - (1.0 - x) ** n_arr
    if n_arr.ndim == 0:
        return float(f), float(h), float(g)
    return f, h, g


# -- multimode --------------------------------------------------------------------------

def multimode_p1_tilde_T(p: ClickProbabilities) -> float:
    return 0.5 * (12.0 * p.p_o_ - 9.0 * p.p_oo - 4.0)


def multimode_p1_tilde_R(p: ClickProbabilities) -> float:
    return 0.5 * (12.0 * p.p__o - 9.0 * p.p_oo - 4.0)


def multimode_p1_tilde(p: ClickProbabilities) -> float:
    """Lower bound on ``max_k P_1^[k]`` for a product of modes."""
    return min(multimode_p1_tilde_T(p), multimode_p1_tilde_R(p))


def multimode_vertex_value(n, P: float):
    """``4 X^n - 3 Y^n - 1`` at the n-fold product vertex, ``X = (2-P)/2``, ``Y = 1-P``."""
    X = (2.0 - P) / 2.0
    Y = 1.0 - P
    n = np.asarray(n, dtype=float)
    out = 4.0 * X ** n - 3.0 * Y ** n - 1.0
    return float(out) if out.ndim == 0 else out


def multimode_n_star(P: float) -> float:
    """Stationary point of the vertex value as a function of real ``n``.

    Solves ``4 X^n log X = 3 Y^n log Y``.
    """
    if not (0.0 < P < 1.0):
        raise DomainError(f"n_star needs P in (0, 1), got {P!r}")
    lx = math.log1p(-P / 2.0)
    ly = math.log1p(-P)
    return math.log(3.0 * ly / (4.0 * lx)) / (lx - ly)


def multimode_envelope(P: float) -> float:
    """Largest apparatus-independent value reachable by products of modes with ``P_1 <= P``.

    The endpoints are the limits: 1/3 at ``P = 0`` and 1 at ``P = 1``.
    """
    if not (0.0 <= P <= 1.0):
        raise DomainError(f"P must lie in [0, 1], got {P!r}")
    if P == 0.0:
        return 1.0 / 3.0
    if P == 1.0:
        return 1.0
    n_star = multimode_n_star(P)
    lo = max(1, math.floor(n_star))
    candidates = np.array([1, lo, max(1, math.floor(n_star + 1.0))])
    return float(np.max(multimode_vertex_value(candidates, P)))
