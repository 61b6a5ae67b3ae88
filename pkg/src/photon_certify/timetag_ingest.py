"""Turn detector time-tag streams into per-herald click counts.

File format: UTF-8 text, one event per line, ``<timestamp_ps>\\t<channel>``.
Lines starting with ``#`` and blank lines are ignored. Channels: 0 = herald,
1 = reflected arm (R), 2 = transmitted arm (T). Timestamps are integer
picoseconds, non-decreasing through the file.

Each accepted herald is one trial. An arm "clicked" in that trial if it has
at least one event in ``[t_h + delay - window//2, t_h + delay + window//2]``.
Arm events outside every window are ignored; accidentals are deliberately
not subtracted.
"""

from __future__ import annotations

import io
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .detection_model import OUTCOMES, ClickCounts
from .errors import DataError, DomainError

HERALD, CHANNEL_R, CHANNEL_T = 0, 1, 2
_U64_MAX = 2**64 - 1


class TimeTagEvent(NamedTuple):
    timestamp: int
    channel: int


@dataclass(frozen=True)
class IngestConfig:
    window_ps: int = 1000
    delay_R_ps: int = 0
    delay_T_ps: int = 0
    dead_ps: int = 0

    def __post_init__(self):
        for name in ("window_ps", "delay_R_ps", "delay_T_ps", "dead_ps"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.window_ps <= 0:
            raise DomainError(f"window_ps must be positive, got {self.window_ps}")
        if self.dead_ps < 0:
            raise DomainError(f"dead_ps must be non-negative, got {self.dead_ps}")


def _lines(source) -> Iterable[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_timetags(source) -> list[TimeTagEvent]:
    """Parse time-tag text (a string, bytes, an open file or an iterable of lines)."""
    events = []
    last = -1
    for lineno, raw in enumerate(_lines(source), start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise DataError(f"expected '<timestamp>\\t<channel>', got {line!r}", line=lineno)
        try:
            ts = int(fields[0])
            ch = int(fields[1])
        except ValueError:
            raise DataError(f"non-integer field in {line!r}", line=lineno) from None
        if not 0 <= ts <= _U64_MAX:
            raise DataError(f"timestamp {ts} does not fit in 64 bits", line=lineno)
        if ch not in (HERALD, CHANNEL_R, CHANNEL_T):
            raise DataError(f"unknown channel {ch}", line=lineno)
        if ts < last:
            raise DataError(f"timestamp {ts} is earlier than the previous one ({last})", line=lineno)
        last = ts
        events.append(TimeTagEvent(ts, ch))
    return events


def read_timetags(path) -> list[TimeTagEvent]:
    with open(Path(path), encoding="utf-8") as fh:
        return parse_timetags(fh)


def format_timetags(events: Sequence[TimeTagEvent], header: str | None = None) -> str:
    out = []
    if header:
        out.extend(f"# {h}" for h in header.splitlines())
    out.extend(f"{e.timestamp}\t{e.channel}" for e in events)
    return "\n".join(out) + "\n"


def _hit(times: list, lo: int, hi: int) -> bool:
    i = bisect_left(times, lo)
    return i < len(times) and times[i] <= hi


def trial_outcomes(events: Sequence[TimeTagEvent], config: IngestConfig) -> list[str]:
    """Outcome label (``"oo"``, ``"bo"``, ``"ob"`` or ``"bb"``) of every accepted herald, in order.

    A herald closer than ``dead_ps`` to the previously accepted one is skipped.
    """
    heralds, arm_r, arm_t = [], [], []
    by_channel = {HERALD: heralds, CHANNEL_R: arm_r, CHANNEL_T: arm_t}
    prev = None
    for e in events:
        if prev is not None and e.timestamp < prev:
            raise DataError("events are not ordered by timestamp")
        prev = e.timestamp
        by_channel[e.channel].append(e.timestamp)

    half = config.window_ps // 2
    outcomes = []
    last_accepted = None
    for t_h in heralds:
        if last_accepted is not None and t_h - last_accepted < config.dead_ps:
            continue
        last_accepted = t_h
        c_r = t_h + config.delay_R_ps
        c_t = t_h + config.delay_T_ps
        r = _hit(arm_r, c_r - half, c_r + half)
        t = _hit(arm_t, c_t - half, c_t + half)
        outcomes.append(("b" if r else "o") + ("b" if t else "o"))
    return outcomes


def bin_trials(events: Sequence[TimeTagEvent], config: IngestConfig) -> ClickCounts:
    """Tally the per-herald outcomes into :class:`ClickCounts`."""
    outcomes = trial_outcomes(events, config)
    if not outcomes:
        raise DataError("no accepted heralds in the time-tag stream")
    tally = {k: 0 for k in OUTCOMES}
    for o in outcomes:
        tally[o] += 1
    return ClickCounts(*(tally[k] for k in OUTCOMES))


def synthesize_timetags(outcomes: Sequence[str], config: IngestConfig, *, seed=0,
                        period_ps: int | None = None, start_ps: int | None = None,
                        accidentals: bool = True) -> list[TimeTagEvent]:
    """Build a time-tag stream that encodes the given per-trial outcomes.

    Clicks land at a random offset inside their window. With ``accidentals``
    extra arm events are placed half a period away from every window, where
    :func:`bin_trials` must ignore them.
    """
    for o in outcomes:
        if o not in OUTCOMES:
            raise DomainError(f"unknown outcome {o!r}")
    rng = np.random.default_rng(seed)
    half = config.window_ps // 2
    reach = max(abs(config.delay_R_ps), abs(config.delay_T_ps)) + half
    if period_ps is None:
        period_ps = 4 * reach + config.dead_ps + 1000
    if period_ps <= 2 * reach or period_ps <= config.dead_ps:
        raise DomainError("period too short: windows of neighbouring heralds would overlap")
    start = period_ps if start_ps is None else int(start_ps)

    events = []
    for i, o in enumerate(outcomes):
        t_h = start + i * period_ps
        events.append(TimeTagEvent(t_h, HERALD))
        for clicked, channel, delay in ((o[0] == "b", CHANNEL_R, config.delay_R_ps),
                                        (o[1] == "b", CHANNEL_T, config.delay_T_ps)):
            if clicked:
                events.append(TimeTagEvent(t_h + delay + int(rng.integers(-half, half + 1)), channel))
            if accidentals and rng.random() < 0.25:
                events.append(TimeTagEvent(t_h + delay + period_ps // 2, channel))
    events.sort()
    if events and events[0].timestamp < 0:
        raise DomainError("negative timestamps; increase start_ps")
    return events
