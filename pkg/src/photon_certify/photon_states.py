"""Photon-number distributions, products of them, and the loss channel.

States are diagonal in the Fock basis: a single mode is described by the
vector ``P_n = <n|rho|n>``. Every bound in this package depends on the
diagonal only, so coherences are never represented.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, DomainError

DEFAULT_N_MAX = 64
NMAX_ENV_VAR = "PHOTON_CERTIFY_NMAX"

_NORM_TOL = 1e-12
_ENTRY_TOL = 1e-15


def default_n_max() -> int:
    """Truncation used when a state is built without an explicit ``n_max``.

    Reads ``PHOTON_CERTIFY_NMAX`` if set, else 64.
    """
    raw = os.environ.get(NMAX_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_N_MAX
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{NMAX_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 0:
        raise DomainError(f"{NMAX_ENV_VAR} must be >= 0, got {value}")
    return value


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Truncated photon-number distribution of a single mode.

    Parameters
    ----------
    probs : array_like
        ``probs[n]`` is the weight of the n-photon Fock component.
    truncation_tail : float
        Probability mass that was dropped beyond the last entry. Informational
        only; ``probs`` itself is normalized.
    """

    probs: np.ndarray
    truncation_tail: float = 0.0

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).ravel()
        if probs.size == 0:
            raise DomainError("a photon-number distribution needs at least one entry")
        if not np.all(np.isfinite(probs)):
            raise DomainError("probabilities must be finite")
        if probs.min() < -_ENTRY_TOL or probs.max() > 1 + _ENTRY_TOL:
            raise DomainError("probabilities must lie in [0, 1]")
        total = probs.sum()
        if abs(total - 1.0) > _NORM_TOL:
            raise DomainError(f"probabilities sum to {total!r}, expected 1")
        probs = np.clip(probs, 0.0, 1.0)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "truncation_tail", float(self.truncation_tail))

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    def __getitem__(self, n: int) -> float:
        """Weight of the n-photon component; zero beyond the truncation."""
        if n < 0:
            raise IndexError(n)
        return float(self.probs[n]) if n < self.probs.size else 0.0

    @property
    def p0(self) -> float:
        return self[0]

    @property
    def p1(self) -> float:
        return self[1]

    def mean_photon_number(self) -> float:
        return float(np.arange(self.probs.size) @ self.probs)

    def padded(self, n_max: int) -> "PhotonNumberDistribution":
        """Same state with the vector zero-padded to length ``n_max + 1``."""
        if n_max < self.n_max:
            return self.truncated(n_max)
        probs = np.zeros(n_max + 1)
        probs[: self.probs.size] = self.probs
        return PhotonNumberDistribution(probs, self.truncation_tail)

    def truncated(self, n_max: int) -> "PhotonNumberDistribution":
        """Drop the components above ``n_max`` and renormalize.

        The dropped mass is added to ``truncation_tail``.
        """
        if n_max >= self.n_max:
            return self
        tail = float(self.probs[n_max + 1:].sum())
        kept = self.probs[: n_max + 1]
        if tail >= 1.0:
            raise DomainError(f"all probability mass lies above n_max={n_max}")
        return PhotonNumberDistribution(kept / kept.sum(), self.truncation_tail + tail)

    def to_json(self) -> dict:
        return {"probs": [float(p) for p in self.probs]}


@dataclass(frozen=True)
class MultimodeProductState:
    """Tensor product of independent single-mode photon-number distributions."""

    modes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise DomainError("a multimode product state needs at least one mode")
        for m in modes:
            if not isinstance(m, PhotonNumberDistribution):
                raise DomainError(f"mode {m!r} is not a PhotonNumberDistribution")
        object.__setattr__(self, "modes", modes)

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def max_single_photon_weight(self) -> float:
        return max(single_photon_weight(m) for m in self.modes)

    def to_json(self) -> dict:
        return {"modes": [m.to_json() for m in self.modes]}


def fock(n: int, n_max: int | None = None) -> PhotonNumberDistribution:
    """Fock state ``|n>``."""
    if n < 0:
        raise DomainError(f"photon number must be >= 0, got {n}")
    size = max(n, n_max if n_max is not None else n) + 1
    probs = np.zeros(size)
    probs[n] = 1.0
    return PhotonNumberDistribution(probs)


def vacuum(n_max: int | None = None) -> PhotonNumberDistribution:
    return fock(0, n_max)


def mixture(states: Sequence[PhotonNumberDistribution], weights: Sequence[float]) -> PhotonNumberDistribution:
    """Convex combination of single-mode distributions."""
    weights = np.asarray(weights, dtype=float)
    if len(states) != weights.size or weights.size == 0:
        raise DomainError("need one weight per state")
    if weights.min() < 0 or abs(weights.sum() - 1) > _NORM_TOL:
        raise DomainError("mixture weights must be a probability vector")
    size = max(s.probs.size for s in states)
    probs = np.zeros(size)
    for s, w in zip(states, weights):
        probs[: s.probs.size] += w * s.probs
    tail = float(sum(w * s.truncation_tail for s, w in zip(states, weights)))
    return PhotonNumberDistribution(probs / probs.sum(), tail)


def lossy_single_photon(eta: float) -> PhotonNumberDistribution:
    """``eta |1><1| + (1 - eta) |0><0|``, a single photon after loss ``eta``."""
    _check_unit_interval(eta, "eta")
    return PhotonNumberDistribution([1.0 - eta, eta])


def single_photon_weight(state: PhotonNumberDistribution) -> float:
    return state.p1


def random_state(seed, n_max: int) -> PhotonNumberDistribution:
    """Uniformly random distribution on the simplex of ``n_max + 1`` Fock weights.

    Deterministic for a fixed seed; no global RNG state is touched.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet(np.ones(n_max + 1))
    return PhotonNumberDistribution(probs / probs.sum())


def apply_loss(state: PhotonNumberDistribution, eta: float) -> PhotonNumberDistribution:
    """Pass the state through a pure-loss channel of transmission ``eta``.

    Each photon survives independently with probability ``eta``, i.e.
    ``P_n(eta) = sum_{m>=n} C(m, n) eta^n (1-eta)^(m-n) P_m``.
    """
    _check_unit_interval(eta, "eta")
    size = state.probs.size
    # kernel[k, m] = Prob(k photons survive | m photons in), one photon at a
    # time: only non-negative sums, so no cancellation or overflow at any eta
    kernel = np.zeros((size, size))
    kernel[0, 0] = 1.0
    for m in range(1, size):
        kernel[: m + 1, m] = (1.0 - eta) * kernel[: m + 1, m - 1]
        kernel[1 : m + 1, m] += eta * kernel[:m, m - 1]
    probs = kernel @ state.probs
    return PhotonNumberDistribution(probs, state.truncation_tail)


def loss_generator_p1_rate(state: PhotonNumberDistribution) -> float:
    """d P_1 / d epsilon at epsilon = 0 for infinitesimal loss ``eta = 1 - epsilon``."""
    return -state[1] + 2.0 * state[2]


def max_loss_boosted_p1(p1: float) -> float:
    """Largest single-photon weight reachable by loss from ``p1|1><1| + (1-p1)|2><2|``.

    Returns ``(2 - p1)^2 / (8 (1 - p1))`` for ``p1 <= 2/3`` and ``p1`` otherwise
    (including the limit ``p1 = 1``).
    """
    _check_unit_interval(p1, "p1")
    if p1 <= 2.0 / 3.0:
        return (2.0 - p1) ** 2 / (8.0 * (1.0 - p1))
    return float(p1)


def _check_unit_interval(value: float, name: str):
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


# -- state specification files --------------------------------------------------

def parse_state_spec(spec, n_max: int | None = None):
    """Build a state from a spec.

    ``spec`` may be a mapping (``{"probs": [...]}`` or ``{"modes": [...]}``), a
    shorthand string ``"fock:n"`` / ``"lossy_single_photon:eta"``, or a JSON
    string encoding either. Returns a :class:`PhotonNumberDistribution` or a
    :class:`MultimodeProductState`. Distributions longer than ``n_max + 1`` are
    truncated (tail recorded).
    """
    if n_max is None:
        n_max = default_n_max()
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{") or text.startswith("["):
            try:
                spec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DataError(f"invalid state JSON: {exc}") from None
        else:
            return _parse_shorthand(text, n_max)
    if isinstance(spec, list):
        spec = {"probs": spec}
    if not isinstance(spec, dict):
        raise DataError(f"unsupported state spec {spec!r}")
    if "modes" in spec:
        modes = spec["modes"]
        if not isinstance(modes, list) or not modes:
            raise DataError("'modes' must be a non-empty list")
        parsed = [parse_state_spec(m, n_max) for m in modes]
        if any(isinstance(m, MultimodeProductState) for m in parsed):
            raise DataError("modes cannot be nested")
        return MultimodeProductState(tuple(parsed))
    if "probs" in spec:
        try:
            state = PhotonNumberDistribution(np.asarray(spec["probs"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise DataError(f"invalid probability vector: {exc}") from None
        return state.truncated(n_max)
    raise DataError("state spec needs a 'probs' or 'modes' entry")


def _parse_shorthand(text: str, n_max: int):
    name, sep, arg = text.partition(":")
    if not sep:
        raise DataError(f"state shorthand must look like 'name:value', got {text!r}")
    name = name.strip().lower()
    try:
        if name == "fock":
            n = int(arg)
            if n > n_max:
                raise DataError(f"fock:{n} exceeds the truncation n_max={n_max}")
            return fock(n)
        if name in ("lossy_single_photon", "lossy"):
            return lossy_single_photon(float(arg))
    except ValueError as exc:
        raise DataError(f"bad argument in state shorthand {text!r}: {exc}") from None
    raise DataError(f"unknown state shorthand {name!r}")


def load_state_spec(source, n_max: int | None = None):
    """Like :func:`parse_state_spec` but ``source`` may also be a path to a JSON file."""
    if isinstance(source, Path) or (isinstance(source, str) and Path(source).is_file()):
        try:
            with open(source, encoding="utf-8") as fh:
                return parse_state_spec(json.load(fh), n_max)
        except FileNotFoundError:
            raise DataError(f"state file not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON in {source}: {exc}") from None
    return parse_state_spec(source, n_max)
