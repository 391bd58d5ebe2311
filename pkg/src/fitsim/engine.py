"""Discrete-time stock-flow simulation kernel.

The engine advances a set of named stocks with explicit Euler steps: each
step evaluates a model-supplied derivative function once, records every
stock, flow, and auxiliary value, then applies ``stock += rate * dt``.
Besides the integrator it provides the three primitive building blocks the
models here are assembled from:

* an inverted sigmoid response ``y = y_max / (1 + (x / x_50) ** p)``, used
  for saturating social and institutional effects,
* a linear trend for exogenous drivers,
* a lagged series with a nearest-step lookup, used for annual information
  delays on a sub-annual grid.

Runs are deterministic and pure with respect to their inputs: integrating
the same model twice yields bit-identical trajectories.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

__all__ = [
    "ConfigurationError",
    "SimulationError",
    "SimulationClock",
    "SigmoidEffect",
    "LinearTrend",
    "LaggedSeries",
    "ClampEvent",
    "RunResult",
    "eval_inverted_sigmoid",
    "eval_linear_trend",
    "lag_lookup",
    "integrate_step",
    "run_simulation",
]


class ConfigurationError(ValueError):
    """A parameter, trend, or config document is not usable as given."""


class SimulationError(RuntimeError):
    """A run had to abort; carries the offending variable and time."""

    def __init__(self, message: str, variable: str | None = None,
                 time: float | None = None):
        if variable is not None or time is not None:
            message = f"{message} (variable={variable!r}, t={time})"
        super().__init__(message)
        self.variable = variable
        self.time = time


@dataclass(frozen=True)
class SimulationClock:
    """Integration window and step size, in calendar years."""

    start_year: float
    end_year: float
    dt: float = 0.25

    def __post_init__(self):
        if not (self.end_year > self.start_year):
            raise ConfigurationError(
                f"end_year must exceed start_year, got "
                f"[{self.start_year}, {self.end_year}]")
        if not (self.dt > 0.0):
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        span = self.end_year - self.start_year
        steps = span / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ConfigurationError(
                f"horizon of {span} years is not a whole number of "
                f"steps at dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return round((self.end_year - self.start_year) / self.dt)

    def times(self) -> np.ndarray:
        """All record times, start through end inclusive (n_steps + 1)."""
        return self.start_year + self.dt * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class SigmoidEffect:
    """Inverted sigmoid ``y = y_max / (1 + (x / x_50) ** p)``.

    Hits ``y_max`` at x = 0, half of it at x = x_50, and decays toward 0
    as x grows; larger ``p`` sharpens the transition.
    """

    y_max: float
    x_50: float
    p: float

    def __post_init__(self):
        for name in ("y_max", "x_50", "p"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ConfigurationError(
                    f"SigmoidEffect.{name} must be positive and finite, "
                    f"got {value}")

    def __call__(self, x: float) -> float:
        return eval_inverted_sigmoid(self, x)


def eval_inverted_sigmoid(effect: SigmoidEffect, x: float) -> float:
    """Evaluate an inverted sigmoid at ``x >= 0``."""
    if not math.isfinite(x):
        raise ValueError(f"sigmoid input must be finite, got {x}")
    if x < 0.0:
        raise ValueError(f"sigmoid input must be non-negative, got {x}")
    try:
        grown = (x / effect.x_50) ** effect.p
    except OverflowError:
        return 0.0  # far tail; the true value underflows anyway
    return effect.y_max / (1.0 + grown)


@dataclass(frozen=True)
class LinearTrend:
    """Exogenous driver ``value = intercept + slope * (t - reference_year)``."""

    intercept: float
    slope: float
    reference_year: float = 2015.0


def eval_linear_trend(trend: LinearTrend, t: float) -> float:
    """Evaluate a trend at time ``t``; the result must stay positive."""
    value = trend.intercept + trend.slope * (t - trend.reference_year)
    if value <= 0.0:
        raise ConfigurationError(
            f"linear trend evaluates to {value} at t={t}; exogenous drivers "
            f"must stay positive over the horizon")
    return value


@dataclass
class LaggedSeries:
    """Recorded history with a fixed information delay.

    ``record`` appends one value per step; ``lag_lookup`` reads the value
    nearest to ``t - lag`` (ties resolve toward the earlier step) and falls
    back to ``initial_value`` for targets before the first record.
    """

    lag: float
    initial_value: float
    _times: list[float] = field(default_factory=list, repr=False)
    _values: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not (self.lag > 0.0):
            raise ConfigurationError(f"lag must be positive, got {self.lag}")

    def record(self, t: float, value: float) -> None:
        if self._times:
            last = self._times[-1]
            if t == last:
                # re-evaluation at the same step overwrites, never duplicates
                self._values[-1] = value
                return
            if t < last:
                raise RuntimeError(
                    f"record at t={t} after t={last}; history must be "
                    f"appended in time order")
        self._times.append(t)
        self._values.append(value)

    def lookup(self, t: float) -> float:
        target = t - self.lag
        if not self._times or target < self._times[0]:
            return self.initial_value
        spacing = (self._times[-1] - self._times[-2]
                   if len(self._times) > 1 else self.lag)
        if target > self._times[-1] + 0.5 * spacing:
            raise RuntimeError(
                f"lag lookup at t={t} needs history up to {target}, but "
                f"recording stops at {self._times[-1]}")
        i = bisect_left(self._times, target)
        if i == len(self._times):
            return self._values[-1]
        if i == 0:
            return self._values[0]
        before, after = self._times[i - 1], self._times[i]
        # ties toward the earlier step: strictly-closer wins, equality keeps i-1
        if (target - before) <= (after - target):
            return self._values[i - 1]
        return self._values[i]


def lag_lookup(series: LaggedSeries, t: float) -> float:
    """Value of ``series`` as seen from time ``t``, i.e. at ``t - lag``."""
    return series.lookup(t)


@dataclass(frozen=True)
class ClampEvent:
    """A non-negative stock was about to go below zero and was clamped."""

    time: float
    variable: str
    attempted: float


def integrate_step(stocks, rates, dt, non_negative=(), names=(), time=None):
    """One explicit Euler step: ``stock + rate * dt`` per stock.

    ``stocks`` and ``rates`` are parallel sequences. Stocks whose name (or
    index, when no names are given) appears in ``non_negative`` are clamped
    at zero, and each clamp is reported as a :class:`ClampEvent`.

    Returns ``(new_stocks, events)``.
    """
    if len(stocks) != len(rates):
        raise ValueError(
            f"{len(stocks)} stocks but {len(rates)} rates")
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ValueError(f"dt must be positive and finite, got {dt}")
    labels = list(names) if names else list(range(len(stocks)))
    new = []
    events = []
    for stock, rate, label in zip(stocks, rates, labels):
        if not math.isfinite(rate):
            raise SimulationError(
                "non-finite rate", variable=str(label), time=time)
        value = stock + rate * dt
        if label in non_negative and value < 0.0:
            events.append(ClampEvent(time=time, variable=str(label),
                                     attempted=value))
            value = 0.0
        new.append(value)
    return new, events


@dataclass(frozen=True)
class RunResult:
    """Full trajectory of one run: every stock, flow, and auxiliary.

    ``variables`` maps each name to an array aligned with ``times``
    (n_steps + 1 records; the final record carries a diagnostic derivative
    evaluation so auxiliaries are defined there too). Arrays are read-only.
    """

    times: np.ndarray
    variables: dict[str, np.ndarray]
    stock_names: tuple[str, ...]
    flow_names: tuple[str, ...]
    aux_names: tuple[str, ...]
    clamp_events: tuple[ClampEvent, ...] = ()

    def __getitem__(self, name: str) -> np.ndarray:
        return self.variables[name]

    def final(self, name: str) -> float:
        return float(self.variables[name][-1])

    def at_year(self, name: str, year: float) -> float:
        """Value of a variable at the record closest to ``year``."""
        i = int(np.argmin(np.abs(self.times - year)))
        return float(self.variables[name][i])

    @property
    def n_records(self) -> int:
        return len(self.times)

    def column_order(self) -> list[str]:
        """Canonical emission order: time, stocks, flows, auxiliaries."""
        return (["time"] + sorted(self.stock_names)
                + sorted(self.flow_names) + sorted(self.aux_names))


def run_simulation(model, clock: SimulationClock) -> RunResult:
    """Integrate ``model`` over ``clock`` and record the full trajectory.

    The model must provide ``initial_state() -> dict[str, float]`` and
    ``derivatives(state, t) -> (rates, aux)`` where ``rates`` has one entry
    per stock and ``aux`` holds every flow and auxiliary to record. It may
    also provide ``begin_run(clock)`` (reset of per-run memory such as
    lagged series), ``non_negative`` (names clamped at zero), and
    ``flow_names`` (aux entries to report as flows).
    """
    begin = getattr(model, "begin_run", None)
    if begin is not None:
        begin(clock)
    state = dict(model.initial_state())
    stock_names = tuple(state)
    non_negative = frozenset(getattr(model, "non_negative", ()))
    flow_names = tuple(getattr(model, "flow_names", ()))
    times = clock.times()

    columns: dict[str, list[float]] = {name: [] for name in stock_names}
    aux_keys: tuple[str, ...] | None = None
    events: list[ClampEvent] = []

    for k, t in enumerate(times):
        t = float(t)
        for name in stock_names:
            if not math.isfinite(state[name]):
                raise SimulationError("non-finite stock", variable=name,
                                      time=t)
        rates, aux = model.derivatives(state, t)
        if set(rates) != set(stock_names):
            missing = set(stock_names) ^ set(rates)
            raise SimulationError(
                f"derivative rates do not match stocks: {sorted(missing)}",
                time=t)
        if aux_keys is None:
            aux_keys = tuple(aux)
            for name in aux_keys:
                if name in columns:
                    raise SimulationError(
                        f"auxiliary {name!r} collides with a stock name",
                        time=t)
                columns[name] = []
        elif set(aux) != set(aux_keys):
            changed = set(aux) ^ set(aux_keys)
            raise SimulationError(
                f"auxiliary set changed mid-run: {sorted(changed)}", time=t)

        for name in stock_names:
            columns[name].append(state[name])
        for name in aux_keys:
            value = aux[name]
            if not math.isfinite(value):
                raise SimulationError("non-finite auxiliary", variable=name,
                                      time=t)
            columns[name].append(value)

        if k < clock.n_steps:
            new_values, step_events = integrate_step(
                [state[name] for name in stock_names],
                [rates[name] for name in stock_names],
                clock.dt, non_negative=non_negative, names=stock_names,
                time=t)
            events.extend(step_events)
            state = dict(zip(stock_names, new_values))

    assert aux_keys is not None
    variables = {}
    for name, column in columns.items():
        array = np.asarray(column, dtype=float)
        array.setflags(write=False)
        variables[name] = array
    times = np.asarray(times, dtype=float)
    times.setflags(write=False)
    aux_only = tuple(name for name in aux_keys if name not in flow_names)
    return RunResult(times=times, variables=variables,
                     stock_names=stock_names, flow_names=flow_names,
                     aux_names=aux_only, clamp_events=tuple(events))
