"""Online trend tracking, extrema detection/forecasting and derivative-variance
fault diagnosis."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import kalman
from .model import TvlapConfig, make_tvlap


class ExtremumKind(str, Enum):
    MINIMUM = "min"
    MAXIMUM = "max"


class ExtremaMode(str, Enum):
    THRESHOLD = "threshold"  # |d1| < epsilon at the current sample
    ZEROCROSS = "zerocross"  # d1 changes sign, with an +-epsilon dead band


@dataclass(frozen=True)
class ExtremaEvent:
    n: int
    kind: ExtremumKind
    d1: float
    d2: float

    def __post_init__(self):
        if self.kind is ExtremumKind.MINIMUM and not self.d2 > 0:
            raise ValueError("a minimum needs a positive second derivative")
        if self.kind is ExtremumKind.MAXIMUM and not self.d2 < 0:
            raise ValueError("a maximum needs a negative second derivative")


@dataclass(frozen=True, eq=False)
class TrackOutput:
    n: int
    fhat: float
    derivatives: np.ndarray
    p00: float
    event: Optional[ExtremaEvent] = None


@dataclass(frozen=True)
class VarianceMonitor:
    """Running ``sum(x^2) / n`` for a zero-mean sequence."""

    count: int = 0
    sum_squares: float = 0.0


@dataclass(frozen=True)
class ChannelDiagnosis:
    variance: float
    faulty: bool


def burn_in_length(K):
    """Samples during which events and statistics are suppressed."""
    return max(5 * (K + 1), 50)


def classify_extremum(d1, d2, epsilon=1e-6, mode=ExtremaMode.ZEROCROSS, d1_prev=None):
    """Classify a derivative pair as a minimum, a maximum or nothing (``None``).

    In zero-crossing mode ``d1_prev`` should be the most recent first
    derivative outside ``[-epsilon, epsilon]``, so that dithering around zero
    inside the band never registers as a crossing.
    """
    mode = ExtremaMode(mode)
    if mode is ExtremaMode.THRESHOLD:
        if abs(d1) < epsilon:
            if d2 > 0:
                return ExtremumKind.MINIMUM
            if d2 < 0:
                return ExtremumKind.MAXIMUM
        return None
    if d1_prev is None:
        raise ValueError("zero-crossing mode needs the previous first derivative")
    # a crossing counts once d1 has left the +-epsilon dead band on the other side
    if d1_prev <= -epsilon and d1 >= epsilon and d2 > 0:
        return ExtremumKind.MINIMUM
    if d1_prev >= epsilon and d1 <= -epsilon and d2 < 0:
        return ExtremumKind.MAXIMUM
    return None


class _Debouncer:
    # one event per extremum: a kind never repeats back to back
    def __init__(self):
        self.last = None

    def __call__(self, kind):
        if kind is None or kind is self.last:
            return None
        self.last = kind
        return kind


class Tracker:
    """Online trend tracker and extrema detector.

    Feed samples one at a time with :meth:`update`; memory use is constant.
    The current posterior is available as :attr:`state`, e.g. for forecasting.
    """

    def __init__(self, model, epsilon=1e-6, mode=ExtremaMode.ZEROCROSS, extrema=True,
                 infinity=1e5, burn_in=None):
        K = model.order
        if extrema and K < 2:
            raise ValueError(f"extrema detection needs K >= 2 (second derivative), got K={K}")
        self.model = model
        self.epsilon = epsilon
        self.mode = ExtremaMode(mode)
        self.extrema = extrema
        self.burn_in = burn_in_length(K) if burn_in is None else burn_in
        self.state = kalman.init_state(model.dim, infinity)
        self._debounce = _Debouncer()
        self._d1_prev = None

    def update(self, y):
        self.state, _, _ = kalman.step(self.model, self.state, y)
        n = self.state.n
        x = self.state.xhat[:, 0]
        event = None
        if self.extrema:
            d1, d2 = float(x[1]), float(x[2])
            ready = self.mode is ExtremaMode.THRESHOLD or self._d1_prev is not None
            if n >= self.burn_in and ready:
                kind = classify_extremum(d1, d2, self.epsilon, self.mode, self._d1_prev)
                kind = self._debounce(kind)
                if kind is not None:
                    event = ExtremaEvent(n, kind, d1, d2)
            if abs(d1) >= self.epsilon:
                self._d1_prev = d1
        return TrackOutput(
            n=n,
            fhat=float(x[0]),
            derivatives=x[1:].copy(),
            p00=float(self.state.p[0, 0]),
            event=event,
        )


def track(model, stream, **kwargs):
    """Yield one :class:`TrackOutput` per sample of ``stream``.

    Keyword arguments go to :class:`Tracker`. Events are suppressed during
    the burn-in (see :func:`burn_in_length`).
    """
    tracker = Tracker(model, **kwargs)
    for y in stream:
        yield tracker.update(y)


def forecast_extrema(model, state, steps, epsilon=1e-6, mode=ExtremaMode.ZEROCROSS):
    """Extrema along the mean forecast trajectory from ``state``.

    Events carry future time indices ``state.n + k``.
    """
    if model.order < 2:
        raise ValueError("extrema forecasting needs K >= 2")
    points = kalman.forecast(model, state, steps)
    debounce = _Debouncer()
    d1_prev = float(state.xhat[1, 0])
    events = []
    for pt in points:
        d1, d2 = float(pt.xhat[1, 0]), float(pt.xhat[2, 0])
        kind = debounce(classify_extremum(d1, d2, epsilon, mode, d1_prev))
        if kind is not None:
            events.append(ExtremaEvent(state.n + pt.k, kind, d1, d2))
        if abs(d1) >= epsilon:
            d1_prev = d1
    return events


def monitor_update(m, value):
    """Fold ``value`` into the monitor; returns ``(monitor, variance)``."""
    value = float(value)
    if not np.isfinite(value):
        raise ValueError("value must be finite")
    m = VarianceMonitor(m.count + 1, m.sum_squares + value * value)
    return m, m.sum_squares / m.count


def derivative_variance(model, stream, infinity=1e5, burn_in=None):
    """Zero-mean variance of the first-derivative estimate after burn-in."""
    burn = burn_in_length(model.order) if burn_in is None else burn_in
    mon, var = VarianceMonitor(), 0.0
    for out in track(model, stream, extrema=False, infinity=infinity):
        if out.n >= burn:
            mon, var = monitor_update(mon, out.derivatives[0])
    return var


def diagnose(channels, model, ratio=3.0, infinity=1e5, burn_in=None):
    """Flag channels whose derivative variance exceeds ``ratio`` x the median.

    Parameters
    ----------
    channels : mapping of name -> sequence
        At least two equally long series.
    model : StateSpaceModel or TvlapConfig
        Filter model with ``K >= 1``.
    ratio : float
        Threshold factor, > 1.

    Returns
    -------
    dict of name -> ChannelDiagnosis
    """
    if isinstance(model, TvlapConfig):
        infinity = model.infinity
        model = make_tvlap(model, check=False)
    if len(channels) < 2:
        raise ValueError("diagnosis needs at least two channels")
    if not ratio > 1:
        raise ValueError("ratio must exceed 1")
    if model.order < 1:
        raise ValueError("diagnosis needs a first-derivative state (K >= 1)")
    lengths = {len(v) for v in channels.values()}
    if len(lengths) != 1:
        raise ValueError(f"channels have unequal lengths {sorted(lengths)}")
    variances = {
        name: derivative_variance(model, values, infinity, burn_in)
        for name, values in channels.items()
    }
    median = float(np.median(list(variances.values())))
    return {
        name: ChannelDiagnosis(v, bool(v > ratio * median)) for name, v in variances.items()
    }


def extrema_sets(outputs: Sequence[TrackOutput]):
    """Split events into ``(minima, maxima)`` index lists."""
    minima = [o.event.n for o in outputs if o.event and o.event.kind is ExtremumKind.MINIMUM]
    maxima = [o.event.n for o in outputs if o.event and o.event.kind is ExtremumKind.MAXIMUM]
    return minima, maxima
