"""Forward model of the auto-correlation setup: beamsplitter plus two click detectors.

Outcome labels follow ``(reflected arm, transmitted arm)`` with ``o`` for no
click and ``b`` for a click, so ``p_bo`` is "R clicked, T did not".

All click probabilities are evaluated in the effective parameterization: a
common loss ``eta = t*eta_T + r*eta_R`` in front of an ideal-detector
beamsplitter with ratios ``t_eff, r_eff``. The raw four-parameter form is
only ever evaluated in the tests, as an oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, DegenerateError, DomainError, NumericError
from .photon_states import MultimodeProductState, PhotonNumberDistribution

_SUM_TOL = 1e-12
_CLAMP_TOL = 1e-15

OUTCOMES = ("oo", "bo", "ob", "bb")


def _in_unit(value, name):
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class ApparatusParams:
    """Beamsplitter ratios and per-arm detector efficiencies.

    ``r`` defaults to ``1 - t``.
    """

    t: float
    eta_T: float = 1.0
    eta_R: float = 1.0
    r: float | None = None

    def __post_init__(self):
        t = float(self.t)
        r = 1.0 - t if self.r is None else float(self.r)
        for name, value in (("t", t), ("r", r), ("eta_T", self.eta_T), ("eta_R", self.eta_R)):
            _in_unit(value, name)
        if abs(t + r - 1.0) > _SUM_TOL:
            raise DomainError(f"t + r must equal 1, got {t} + {r}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "eta_T", float(self.eta_T))
        object.__setattr__(self, "eta_R", float(self.eta_R))

    @classmethod
    def ideal(cls) -> "ApparatusParams":
        return cls(t=0.5, eta_T=1.0, eta_R=1.0)

    def swapped(self) -> "ApparatusParams":
        """Exchange the roles of the two arms."""
        return ApparatusParams(t=self.r, eta_T=self.eta_R, eta_R=self.eta_T, r=self.t)

    def to_json(self) -> dict:
        return {"t": self.t, "eta_T": self.eta_T, "eta_R": self.eta_R}

    @classmethod
    def from_json(cls, data: dict) -> "ApparatusParams":
        try:
            return cls(t=float(data["t"]), eta_T=float(data.get("eta_T", 1.0)),
                       eta_R=float(data.get("eta_R", 1.0)))
        except KeyError as exc:
            raise DataError(f"apparatus JSON is missing {exc}") from None
        except (TypeError, ValueError) as exc:
            raise DataError(f"invalid apparatus JSON: {exc}") from None


@dataclass(frozen=True)
class EffectiveParams:
    """Common loss ``eta`` followed by a beamsplitter ``(t_eff, r_eff)`` and ideal detectors."""

    eta: float
    t_eff: float
    r_eff: float

    def __post_init__(self):
        _in_unit(self.eta, "eta")
        _in_unit(self.t_eff, "t_eff")
        _in_unit(self.r_eff, "r_eff")
        if abs(self.t_eff + self.r_eff - 1.0) > _SUM_TOL:
            raise DomainError("t_eff + r_eff must equal 1")


def effective_params(params: ApparatusParams) -> EffectiveParams:
    eta = params.t * params.eta_T + params.r * params.eta_R
    if eta <= 0.0:
        raise DegenerateError("apparatus never clicks: t*eta_T + r*eta_R = 0")
    t_eff = params.t * params.eta_T / eta
    return EffectiveParams(eta=eta, t_eff=t_eff, r_eff=1.0 - t_eff)


@dataclass(frozen=True)
class ClickProbabilities:
    """Probabilities of the four joint outcomes."""

    p_oo: float
    p_bo: float
    p_ob: float
    p_bb: float

    def __post_init__(self):
        values = [float(getattr(self, f"p_{k}")) for k in OUTCOMES]
        for k, v in zip(OUTCOMES, values):
            if not (-_CLAMP_TOL <= v <= 1.0 + _CLAMP_TOL):
                raise DomainError(f"p_{k} = {v!r} is not a probability")
            object.__setattr__(self, f"p_{k}", min(max(v, 0.0), 1.0))
        if abs(sum(values) - 1.0) > _SUM_TOL:
            raise DomainError(f"click probabilities sum to {sum(values)!r}")

    @property
    def p_o_(self) -> float:
        """Reflected-arm detector does not click."""
        return self.p_oo + self.p_ob

    @property
    def p__o(self) -> float:
        """Transmitted-arm detector does not click."""
        return self.p_oo + self.p_bo

    def as_array(self) -> np.ndarray:
        return np.array([self.p_oo, self.p_bo, self.p_ob, self.p_bb])

    def swapped(self) -> "ClickProbabilities":
        return ClickProbabilities(self.p_oo, self.p_ob, self.p_bo, self.p_bb)

    def to_json(self) -> dict:
        return {f"p_{k}": getattr(self, f"p_{k}") for k in OUTCOMES}

    @classmethod
    def from_json(cls, data: dict) -> "ClickProbabilities":
        try:
            return cls(*(float(data[f"p_{k}"]) for k in OUTCOMES))
        except KeyError as exc:
            raise DataError(f"probability JSON is missing {exc}") from None


@dataclass(frozen=True)
class ClickCounts:
    """Observed tallies of the four outcomes."""

    n_oo: int
    n_bo: int
    n_ob: int
    n_bb: int

    def __post_init__(self):
        for k in OUTCOMES:
            v = getattr(self, f"n_{k}")
            if isinstance(v, float) and not v.is_integer():
                raise DomainError(f"n_{k} must be an integer, got {v!r}")
            v = int(v)
            if v < 0:
                raise DomainError(f"n_{k} must be non-negative, got {v}")
            object.__setattr__(self, f"n_{k}", v)

    @property
    def n(self) -> int:
        return self.n_oo + self.n_bo + self.n_ob + self.n_bb

    def as_array(self) -> np.ndarray:
        return np.array([self.n_oo, self.n_bo, self.n_ob, self.n_bb], dtype=np.int64)

    def require_nonempty(self):
        if self.n < 1:
            raise DomainError("need at least one trial (n >= 1)")

    def frequencies(self) -> ClickProbabilities:
        """Empirical outcome frequencies, as a :class:`ClickProbabilities`."""
        self.require_nonempty()
        n = self.n
        return ClickProbabilities(self.n_oo / n, self.n_bo / n, self.n_ob / n, self.n_bb / n)

    def to_json(self) -> dict:
        return {f"n_{k}": getattr(self, f"n_{k}") for k in OUTCOMES}

    @classmethod
    def from_json(cls, data: dict) -> "ClickCounts":
        try:
            values = [data[f"n_{k}"] for k in OUTCOMES]
        except KeyError as exc:
            raise DataError(f"counts JSON is missing {exc}") from None
        for k, v in zip(OUTCOMES, values):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise DataError(f"n_{k} must be a number, got {v!r}")
        try:
            return cls(*values)
        except DomainError as exc:
            raise DataError(str(exc)) from None


def load_counts(path) -> ClickCounts:
    try:
        with open(Path(path), encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise DataError(f"{path}: counts JSON must be an object")
    return ClickCounts.from_json(data)


def _no_click_marginals(probs: np.ndarray, params: ApparatusParams):
    """Return ``(p_oo, p_o_, p__o)`` for one mode, in effective parameters."""
    if params.t * params.eta_T + params.r * params.eta_R == 0.0:
        return 1.0, 1.0, 1.0
    eff = effective_params(params)
    n = np.arange(probs.size)
    p_oo = probs @ (1.0 - eff.eta) ** n
    p_o_ = probs @ (1.0 - eff.eta * eff.r_eff) ** n
    p__o = probs @ (1.0 - eff.eta * eff.t_eff) ** n
    return float(p_oo), float(p_o_), float(p__o)


def _from_marginals(p_oo, p_o_, p__o) -> ClickProbabilities:
    p_ob = p_o_ - p_oo
    p_bo = p__o - p_oo
    p_bb = 1.0 - p_o_ - p__o + p_oo
    out = []
    for name, v in (("p_bo", p_bo), ("p_ob", p_ob), ("p_bb", p_bb)):
        if v < -_CLAMP_TOL:
            raise NumericError("negative click probability from subtraction", entry=name, value=v)
        out.append(max(v, 0.0))
    p_bo, p_ob, p_bb = out
    return ClickProbabilities(p_oo, p_bo, p_ob, p_bb)


def click_probabilities(state: PhotonNumberDistribution, params: ApparatusParams) -> ClickProbabilities:
    """Exact outcome probabilities for a single-mode state."""
    return _from_marginals(*_no_click_marginals(state.probs, params))


def click_probabilities_multimode(state: MultimodeProductState, params: ApparatusParams) -> ClickProbabilities:
    """Outcome probabilities for a product of independent modes.

    A detector stays silent only if no mode triggers it, so the three
    no-click marginals multiply across modes.
    """
    if isinstance(state, PhotonNumberDistribution):
        return click_probabilities(state, params)
    p_oo = p_o_ = p__o = 1.0
    for mode in state.modes:
        a, b, c = _no_click_marginals(mode.probs, params)
        p_oo *= a
        p_o_ *= b
        p__o *= c
    return _from_marginals(p_oo, p_o_, p__o)


def make_rng(seed) -> np.random.Generator:
    """Seeded PCG64 generator; the seed -> stream mapping is pinned by a golden test."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_counts(p: ClickProbabilities, n: int, seed) -> ClickCounts:
    """Draw ``n`` i.i.d. trials from ``p`` (one multinomial draw)."""
    if int(n) != n or n < 1:
        raise DomainError(f"number of trials must be a positive integer, got {n!r}")
    rng = make_rng(seed)
    probs = p.as_array()
    counts = rng.multinomial(int(n), probs / probs.sum())
    return ClickCounts(*(int(c) for c in counts))
