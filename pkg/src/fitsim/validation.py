"""Validation toolkit: error metrics, behavior classification, stress suites.

Three layers of confidence checks:

* point metrics against a historical series (MSE, RMSPE, R squared) plus
  the Theil inequality decomposition of MSE into bias, variance, and
  covariance shares;
* a behavior-mode classifier that reduces a trajectory to a small
  signature (shape class, emergence, timing), used to ask whether
  parameter changes alter the *kind* of behavior rather than its exact
  numbers;
* extreme-condition and sensitivity suites that run the model under
  deliberately broken or perturbed parameters and check the structural
  expectations hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .engine import SimulationClock
from .model import FitModel, ModelParameters, apply_overrides, get_parameter

__all__ = [
    "Finding",
    "ErrorReport",
    "error_metrics",
    "theil_decomposition",
    "BehaviorSignature",
    "behavior_signature",
    "signatures_match",
    "PerturbationSet",
    "TABLE_PERTURBATIONS",
    "extreme_condition_suite",
    "sensitivity_suite",
]

DEFAULT_CLOCK = SimulationClock(2015.0, 2035.0, 0.25)


@dataclass(frozen=True)
class Finding:
    """Outcome of one structural check."""

    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}"


# === point metrics ===

@dataclass(frozen=True)
class ErrorReport:
    """Fit of a simulated series against a historical one.

    ``theil_um/us/uc`` are the bias, variance, and covariance shares of the
    MSE; they sum to one whenever ``mse > 0`` and are reported as zero for
    a perfect fit.
    """

    r_squared: float
    mse: float
    rmspe: float
    theil_um: float
    theil_us: float
    theil_uc: float


def _as_series(simulated, historical) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(simulated, dtype=float)
    h = np.asarray(historical, dtype=float)
    if s.ndim != 1 or h.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if s.shape != h.shape:
        raise ValueError(
            f"length mismatch: simulated has {s.size}, historical {h.size}")
    if s.size < 2:
        raise ValueError(f"need at least 2 points, got {s.size}")
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(h))):
        raise ValueError("series must be finite")
    return s, h


def theil_decomposition(simulated, historical,
                        sample_moments: bool = False
                        ) -> tuple[float, float, float]:
    """Theil shares ``(um, us, uc)`` of the mean squared error.

    Bias share ``um = (mean_s - mean_h)^2 / MSE``, variance share
    ``us = (sigma_s - sigma_h)^2 / MSE``, covariance share
    ``uc = 2 (1 - r) sigma_s sigma_h / MSE``. With population moments
    (the default) the three shares sum to one exactly; ``sample_moments``
    switches to the n-1 normalization, under which the identity is only
    approximate.

    Raises ``ValueError`` when MSE is zero: a perfect fit has nothing to
    decompose.
    """
    s, h = _as_series(simulated, historical)
    mse = float(np.mean((s - h) ** 2))
    if mse == 0.0:
        raise ValueError("MSE is zero; decomposition undefined on a "
                         "perfect fit")
    ddof = 1 if sample_moments else 0
    sigma_s = float(np.std(s, ddof=ddof))
    sigma_h = float(np.std(h, ddof=ddof))
    um = (float(np.mean(s)) - float(np.mean(h))) ** 2 / mse
    us = (sigma_s - sigma_h) ** 2 / mse
    if sigma_s == 0.0 or sigma_h == 0.0:
        uc = 0.0  # no co-movement to attribute
    else:
        r = float(np.corrcoef(s, h)[0, 1])
        uc = 2.0 * (1.0 - r) * sigma_s * sigma_h / mse
    return um, us, uc


def error_metrics(simulated, historical) -> ErrorReport:
    """Standard fit metrics of a simulated series against history.

    RMSPE is the root mean square percentage error,
    ``100 * sqrt(mean(((s - h) / h)^2))``; a zero historical value is only
    tolerated where the simulated value matches it exactly. R squared is
    ``1 - SSE / SST`` with SST taken around the historical mean.
    """
    s, h = _as_series(simulated, historical)
    diff = s - h
    mse = float(np.mean(diff ** 2))
    if mse == 0.0:
        return ErrorReport(r_squared=1.0, mse=0.0, rmspe=0.0,
                           theil_um=0.0, theil_us=0.0, theil_uc=0.0)

    zero_h = h == 0.0
    if np.any(zero_h & (diff != 0.0)):
        raise ValueError("historical series has zero values where the "
                         "simulation differs; RMSPE undefined")
    relative = np.zeros_like(h)
    nonzero = ~zero_h
    relative[nonzero] = diff[nonzero] / h[nonzero]
    rmspe = 100.0 * float(np.sqrt(np.mean(relative ** 2)))

    sst = float(np.sum((h - np.mean(h)) ** 2))
    if sst == 0.0:
        raise ValueError("historical series is constant; R squared undefined")
    r_squared = 1.0 - float(np.sum(diff ** 2)) / sst

    um, us, uc = theil_decomposition(s, h)
    return ErrorReport(r_squared=r_squared, mse=mse, rmspe=rmspe,
                       theil_um=um, theil_us=us, theil_uc=uc)


def load_series_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column (year, value) CSV, header optional."""
    years: list[float] = []
    values: list[float] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [part.strip() for part in line.split(",")]
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                year, value = float(parts[0]), float(parts[1])
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise ValueError(
                    f"{path}:{lineno}: non-numeric row {line!r}") from None
            years.append(year)
            values.append(value)
    if len(years) < 2:
        raise ValueError(f"{path}: need at least 2 data rows")
    return np.asarray(years), np.asarray(values)


# === behavior-mode classification ===

GROWTH_PEAK_DECLINE = "growth-peak-decline"
MONOTONE_GROWTH = "monotone-growth"
MONOTONE_DECLINE = "monotone-decline"
FLAT = "flat"

# relative rise/fall below this fraction of the series range is noise
_SHAPE_MARGIN = 0.02


@dataclass(frozen=True)
class BehaviorSignature:
    """Coarse mode of a trajectory, invariant to positive rescaling."""

    shape: str
    emerged: bool                      # ever meaningfully above zero
    first_positive_year: float | None  # None when never meaningfully positive
    peak_year: float | None            # argmax, None for flat series


def behavior_signature(times, values) -> BehaviorSignature:
    """Classify a trajectory into one of four coarse shapes.

    A series that rises to an interior maximum and gives a meaningful part
    of it back is growth-peak-decline; otherwise it is monotone growth,
    monotone decline, or flat. "Meaningful" is a fixed fraction of the
    series scale, so uniform positive scaling leaves the result unchanged.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1 or t.size < 3:
        raise ValueError("need matching 1-d series of at least 3 points")

    smooth = v.copy()
    smooth[1:-1] = (v[:-2] + v[1:-1] + v[2:]) / 3.0
    scale = float(np.max(np.abs(smooth)))
    margin = _SHAPE_MARGIN * scale if scale > 0.0 else 0.0

    peak_index = int(np.argmax(smooth))
    rise = float(smooth[peak_index] - smooth[0])
    fall = float(smooth[peak_index] - smooth[-1])
    if rise > margin and fall > margin:
        shape = GROWTH_PEAK_DECLINE
    elif float(smooth[-1] - smooth[0]) > margin:
        shape = MONOTONE_GROWTH
    elif float(smooth[0] - smooth[-1]) > margin:
        shape = MONOTONE_DECLINE
    else:
        shape = FLAT
    peak_year = float(t[peak_index]) if scale > 0.0 else None

    first_positive_year: float | None = None
    top = float(np.max(v))
    if top > 0.0:
        floor = 1e-9 * top
        for ti, vi in zip(t, v):
            if vi > floor:
                first_positive_year = float(ti)
                break
    return BehaviorSignature(shape, first_positive_year is not None,
                             first_positive_year, peak_year)


def signatures_match(a: BehaviorSignature, b: BehaviorSignature,
                     year_tolerance: float | None = None) -> bool:
    """Same behavior mode: equal shape class and emergence.

    Timing and amplitude are deliberately not compared by default:
    parameter changes are allowed to delay or advance the take-off and to
    move the peak without changing the mode. Pass ``year_tolerance`` to
    additionally require the first positive years to lie within that many
    years of each other.
    """
    if a.shape != b.shape or a.emerged != b.emerged:
        return False
    if year_tolerance is None:
        return True
    if (a.first_positive_year is None) != (b.first_positive_year is None):
        return False
    if a.first_positive_year is None:
        return True
    return abs(a.first_positive_year - b.first_positive_year) <= year_tolerance


# === stress suites ===

@dataclass(frozen=True)
class PerturbationSet:
    """Named relative parameter changes applied together."""

    changes: tuple[tuple[str, float], ...]

    def resolve(self, params: ModelParameters) -> ModelParameters:
        overrides = {}
        for name, relative in self.changes:
            overrides[name] = get_parameter(params, name) * (1.0 + relative)
        return apply_overrides(params, overrides)


# the committed robustness battery: build time +70%, lifetime +30%,
# remuneration +20%, launch tariff -10%, learning strength halved
TABLE_PERTURBATIONS = PerturbationSet((
    ("time_to_build", 0.70),
    ("normal_equipment_lifetime", 0.30),
    ("remuneration_period", 0.20),
    ("initial_fit_price", -0.10),
    ("learning_exponent", -0.50),
))

# variables whose behavior mode the sensitivity suite must preserve
SIGNATURE_VARIABLES = ("installed_capacity", "suna_debt")


def _base_run(params: ModelParameters, clock: SimulationClock):
    return FitModel(params, policy=None).simulate(clock)


def extreme_condition_suite(params: ModelParameters,
                            clock: SimulationClock = DEFAULT_CLOCK
                            ) -> list[Finding]:
    """Run the model under deliberately broken conditions.

    (a) one-year remuneration: projects cannot pay back, so capacity must
        decline, the tendency to invest must die out, and the fund must
        grow monotonically once past the first year;
    (b) a large inherited debt (1e8 dollars): the tendency must fall from
        its launch value toward zero and the fund must drain steeply as
        everything goes to debt service.
    """
    findings = []

    crippled = replace(params.econ, remuneration_period=1.0)
    run = _base_run(ModelParameters(crippled, params.effects,
                                    params.exogenous), clock)
    installed = run["installed_capacity"]
    tendency = run["tendency_to_invest"]
    budget = run["budget"]
    findings.append(Finding(
        "remuneration_1yr_capacity_declines",
        float(installed[-1]) < float(installed[0]),
        f"installed {float(installed[0]):.1f} -> {float(installed[-1]):.1f} MW"))
    findings.append(Finding(
        "remuneration_1yr_no_tendency",
        float(tendency[-1]) < 0.01,
        f"final tendency {float(tendency[-1]):.3g}"))
    steps_per_year = max(1, round(1.0 / clock.dt))
    later = budget[steps_per_year:]
    grows = bool(np.all(np.diff(later) >= -1e-9 * max(1.0, float(later.max()))))
    findings.append(Finding(
        "remuneration_1yr_budget_grows",
        grows and float(budget[-1]) > float(budget[0]),
        f"budget {float(budget[0]):.3g} -> {float(budget[-1]):.3g}, "
        f"monotone after year 1: {grows}"))

    indebted = replace(params.econ, initial_suna_debt=1.0e8)
    run = _base_run(ModelParameters(indebted, params.effects,
                                    params.exogenous), clock)
    tendency = run["tendency_to_invest"]
    budget = run["budget"]
    t0 = float(tendency[0])
    t3 = run.at_year("tendency_to_invest", clock.start_year + 3.0)
    # The debt eventually clears out of levy income, so trust (and with it
    # the tendency) is allowed to recover late; the assertion is about the
    # collapse right after the start.
    findings.append(Finding(
        "inherited_debt_kills_tendency",
        t0 < 0.1 and t3 < 0.01,
        f"tendency {t0:.3g} at start -> {t3:.3g} (year 3)"))
    b0 = float(budget[0])
    b1 = run.at_year("budget", clock.start_year + 1.0)
    findings.append(Finding(
        "inherited_debt_drains_budget",
        b1 < 0.8 * b0,
        f"budget {b0:.3g} -> {b1:.3g} within the first year"))
    return findings


def sensitivity_suite(params: ModelParameters,
                      perturbations: PerturbationSet = TABLE_PERTURBATIONS,
                      clock: SimulationClock = DEFAULT_CLOCK) -> list[Finding]:
    """Check that parameter perturbations keep the behavior modes.

    The base and perturbed runs are classified on the signature variables.
    Capacity must keep its shape class (growth-peak-decline vs monotone)
    and debt must keep its emergence verdict; timing and amplitude may
    shift. A perturbation that pushes the model into a different regime
    entirely (no growth at all where the base takes off) is flagged as
    out-of-band rather than failed, since signature comparison is not
    meaningful across regimes.
    """
    base = _base_run(params, clock)
    perturbed = _base_run(perturbations.resolve(params), clock)
    findings = []

    base_ic = base["installed_capacity"]
    pert_ic = perturbed["installed_capacity"]
    base_took_off = float(base_ic.max()) >= 3.0 * float(base_ic[0])
    pert_took_off = float(pert_ic.max()) >= 1.5 * float(pert_ic[0])
    if base_took_off and not pert_took_off:
        findings.append(Finding(
            "sensitivity_out_of_band", True,
            "perturbation suppresses growth entirely; regime change, "
            "signatures not comparable"))
        return findings

    sig_base = behavior_signature(base.times, base["installed_capacity"])
    sig_pert = behavior_signature(perturbed.times,
                                  perturbed["installed_capacity"])
    findings.append(Finding(
        "sensitivity_installed_capacity",
        sig_base.shape == sig_pert.shape,
        f"base {sig_base.shape} (peak {sig_base.peak_year}), perturbed "
        f"{sig_pert.shape} (peak {sig_pert.peak_year})"))

    debt_base = behavior_signature(base.times, base["suna_debt"])
    debt_pert = behavior_signature(perturbed.times, perturbed["suna_debt"])
    findings.append(Finding(
        "sensitivity_suna_debt",
        debt_base.emerged == debt_pert.emerged,
        f"base debt emerges {debt_base.first_positive_year}, perturbed "
        f"{debt_pert.first_positive_year}"))
    return findings
