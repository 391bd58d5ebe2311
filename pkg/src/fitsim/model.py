"""Stock-flow model of feed-in-tariff driven renewable capacity growth.

The model tracks a national renewable-energy support program: investors file
requests for guaranteed-price contracts, approved projects become installed
capacity, production is paid out of a dedicated fund fed by an electricity
levy, and unpaid obligations accumulate as agency debt. Four feedback loops
shape the trajectories:

* reinforcing adoption: more capacity raises penetration and social
  acceptance, which raises the tendency to invest and future requests;
* reinforcing learning: cumulative construction lowers capital cost, which
  raises project ROI and the tendency to invest;
* balancing price control: as installed capacity approaches the program
  target, the offered tariff is ratcheted down toward a floor;
* balancing budget stress: payments outgrow the levy, the fund runs short,
  debt and the delay in settling it grow, and investor trust together with
  maintenance activity collapse, choking further growth.

Stocks (explicit Euler, see :mod:`fitsim.engine`):

==============================  =======  ====================================
installed_capacity              MW       operating plants
depreciated_capacity            MW       retired plants (keeps the learning
                                         curve's cumulative-build ledger)
suna_debt                       dollars  unpaid production obligations
budget                          dollars  the support fund
total_electricity_production    MWh      lifetime renewable output
total_fit_payment               dollars  lifetime tariff payout
perceived_shortage              dollars  first-order perception of the
                                         budget shortfall (policy input)
==============================  =======  ====================================

Except where noted, prices and costs are in dollars per MWh; the levy
(``res_tax``) is in dollars per kWh and is converted at the budget boundary.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields, replace
from typing import Callable, NamedTuple

from .engine import (
    ConfigurationError,
    LaggedSeries,
    LinearTrend,
    RunResult,
    SigmoidEffect,
    SimulationClock,
    eval_inverted_sigmoid,
    eval_linear_trend,
    lag_lookup,
    run_simulation,
)

logger = logging.getLogger(__name__)

ANNUAL_HOURS = 8760.0
KWH_PER_MWH = 1000.0
# guards the delay ratio when obligations vanish while debt remains
DELAY_PAYMENT_EPSILON = 1.0  # dollars/year
# retirement can accelerate when maintenance stalls, but never below this
MINIMUM_LIFETIME = 1.0  # years


@dataclass(frozen=True)
class EconomicParameters:
    """Scalar constants of the program: economics, pipeline, initial state."""

    capacity_factor: float = 0.25          # fraction of nameplate output
    initial_fit_price: float = 20.0        # $/MWh, tariff offered at launch
    om_cost: float = 2.5                   # $/MWh, operation and maintenance
    interest_rate: float = 0.10            # per year, investor discount rate
    remuneration_period: float = 20.0      # years of guaranteed purchase
    initial_capital_cost: float = 1.4e5    # $/MW at the initial build level
    learning_exponent: float = 0.15        # capital-cost learning strength
    time_to_build: float = 2.0             # years from approval to operation
    normal_equipment_lifetime: float = 20.0  # years, with healthy maintenance
    rejection_fraction: float = 0.5        # share of requests turned down
    capacity_target: float = 5000.0        # MW, program goal
    res_tax_base: float = 0.001            # $/kWh, electricity levy
    initial_annual_requests: float = 400.0  # MW/year filed before launch
    fit_price_floor: float = 0.25          # minimum multiplier of the launch tariff
    shortage_smoothing_time: float = 1.0   # years, shortfall perception delay
    initial_installed_capacity: float = 120.0  # MW
    initial_budget: float = 1.8e8          # dollars
    initial_suna_debt: float = 0.0         # dollars
    average_price_literal_form: bool = False  # see average_fit_price

    def __post_init__(self):
        positive = (
            "capacity_factor", "initial_fit_price", "interest_rate",
            "remuneration_period", "initial_capital_cost", "time_to_build",
            "normal_equipment_lifetime", "capacity_target",
            "initial_annual_requests", "shortage_smoothing_time",
            "initial_installed_capacity",
        )
        for name in positive:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)
                    and value > 0.0):
                raise ConfigurationError(
                    f"{name} must be positive and finite, got {value}")
        non_negative = ("om_cost", "learning_exponent", "res_tax_base",
                        "initial_budget", "initial_suna_debt")
        for name in non_negative:
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ConfigurationError(
                    f"{name} must be non-negative and finite, got {value}")
        if self.remuneration_period < 1.0:
            raise ConfigurationError(
                f"remuneration_period must be at least one year, "
                f"got {self.remuneration_period}")
        if not 0.0 <= self.rejection_fraction <= 1.0:
            raise ConfigurationError(
                f"rejection_fraction must lie in [0, 1], "
                f"got {self.rejection_fraction}")
        if not 0.0 < self.fit_price_floor <= 1.0:
            raise ConfigurationError(
                f"fit_price_floor must lie in (0, 1], "
                f"got {self.fit_price_floor}")


@dataclass(frozen=True)
class SocialEffectSet:
    """Saturating responses of the social and institutional environment.

    Each response is an inverted sigmoid in one pressure variable: the levy
    erodes public tolerance, the payment delay erodes investor trust, and
    the same delay stalls operation-and-maintenance activity.
    """

    social_tolerance: SigmoidEffect = SigmoidEffect(1.0, 0.05, 7.0)  # x: $/kWh
    investor_trust: SigmoidEffect = SigmoidEffect(1.0, 5.0, 4.0)     # x: years
    om_activity: SigmoidEffect = SigmoidEffect(1.0, 5.0, 6.0)        # x: years
    penetration_gain: float = 5.0  # slope of acceptance in penetration

    def __post_init__(self):
        if not (math.isfinite(self.penetration_gain)
                and self.penetration_gain >= 0.0):
            raise ConfigurationError(
                f"penetration_gain must be non-negative, "
                f"got {self.penetration_gain}")


@dataclass(frozen=True)
class ExogenousInputs:
    """Drivers outside the model's feedback structure."""

    total_generation_capacity: LinearTrend = LinearTrend(74000.0, 1700.0)  # MW
    electricity_consumption: LinearTrend = LinearTrend(1.0e7, 3.0e6)     # MWh/yr


@dataclass(frozen=True)
class ModelParameters:
    """Everything a run needs besides the clock and the policy."""

    econ: EconomicParameters = EconomicParameters()
    effects: SocialEffectSet = SocialEffectSet()
    exogenous: ExogenousInputs = ExogenousInputs()


@dataclass(frozen=True)
class PriceTaxOverrides:
    """Policy-side adjustments applied on top of the base price and levy.

    The neutral instance (multiplier 1, delta 0, no levy override) leaves
    the base run bit-exactly unchanged.
    """

    fit_price_delta: float = 0.0       # $/MWh, added after the base rule
    fit_price_multiplier: float = 1.0  # in (0, 1], scales the base rule
    res_tax: float | None = None       # $/kWh, replaces the base levy

    def __post_init__(self):
        if not 0.0 < self.fit_price_multiplier <= 1.0:
            raise ConfigurationError(
                f"fit_price_multiplier must lie in (0, 1], "
                f"got {self.fit_price_multiplier}")


PolicyFn = Callable[[float, float, float], PriceTaxOverrides]


# === economic operations ===

def annuity_factor(interest_rate: float, n_years: float) -> float:
    """Present value of one dollar per year for ``n_years``.

    ``((1+i)^n - 1) / (i (1+i)^n)``; the zero-interest limit is ``n_years``.
    """
    if n_years < 1.0:
        raise ValueError(f"n_years must be at least 1, got {n_years}")
    if interest_rate < 0.0:
        raise ValueError(
            f"interest_rate must be non-negative, got {interest_rate}")
    if interest_rate == 0.0:
        return n_years
    compound = (1.0 + interest_rate) ** n_years
    return (compound - 1.0) / (interest_rate * compound)


def compute_roi(econ: EconomicParameters, fit_price: float,
                capital_cost: float) -> float:
    """Return on investment of a one-MW project at the offered tariff.

    Annual margin per MW is ``capacity_factor * 8760 * (price - om_cost)``;
    its present value over the remuneration period is set against the
    capital cost: ``(margin * annuity - capital) / capital``.
    """
    if capital_cost <= 0.0:
        raise ValueError(f"capital_cost must be positive, got {capital_cost}")
    annual_margin = econ.capacity_factor * ANNUAL_HOURS * (fit_price
                                                           - econ.om_cost)
    discounted = annual_margin * annuity_factor(econ.interest_rate,
                                                econ.remuneration_period)
    return (discounted - capital_cost) / capital_cost


def compute_capital_cost(cumulative_capacity: float,
                         econ: EconomicParameters) -> float:
    """Learning curve: capital cost falls as cumulative build grows.

    ``initial_capital_cost * (cumulative / initial_build) ** (-exponent)``,
    normalized to the installed base at launch.
    """
    if cumulative_capacity <= 0.0:
        raise ValueError(
            f"cumulative_capacity must be positive, got {cumulative_capacity}")
    ratio = cumulative_capacity / econ.initial_installed_capacity
    return econ.initial_capital_cost * ratio ** (-econ.learning_exponent)


def compute_fit_price(installed_capacity: float, econ: EconomicParameters,
                      overrides: PriceTaxOverrides | None = None) -> float:
    """Offered tariff under the goal-gap rule, with policy adjustments.

    The launch tariff is scaled by the remaining fraction of the capacity
    target, never below ``fit_price_floor`` of its launch value. Policy
    overrides then scale (multiplier) and shift (delta) the result.
    """
    gap_fraction = (econ.capacity_target - installed_capacity) / econ.capacity_target
    multiplier = min(1.0, max(econ.fit_price_floor, gap_fraction))
    price = econ.initial_fit_price * multiplier
    if overrides is not None:
        price = price * overrides.fit_price_multiplier + overrides.fit_price_delta
    return price


def compute_social_acceptance(penetration: float, res_tax: float,
                              effects: SocialEffectSet) -> float:
    """Social acceptance of the program.

    A linear base term grows with renewable penetration; the levy burden
    discounts it through the tolerance sigmoid.
    """
    if not 0.0 <= penetration <= 1.0:
        raise ValueError(
            f"penetration must lie in [0, 1], got {penetration}")
    base = 1.0 + effects.penetration_gain * penetration
    return base * eval_inverted_sigmoid(effects.social_tolerance, res_tax)


def compute_delay_in_debt_payment(suna_debt: float,
                                  desired_payment: float) -> float:
    """Years the current debt would take to settle at the desired pace."""
    if suna_debt <= 0.0:
        return 0.0
    return suna_debt / max(desired_payment, DELAY_PAYMENT_EPSILON)


def compute_tendency_to_invest(roi: float, acceptance: float,
                               trust: float) -> float:
    """Annual multiplier on investment requests; negative ROI contributes 0."""
    return max(0.0, roi) * acceptance * trust


class RequestPipeline(NamedTuple):
    annual_requests: float     # MW/year filed this year
    approved_requests: float   # MW/year surviving review
    construction_rate: float   # MW/year entering operation


def compute_request_pipeline(previous_requests: float, tendency: float,
                             econ: EconomicParameters) -> RequestPipeline:
    """Requests compound on last year's level; approvals spread over the build time."""
    annual = previous_requests * tendency
    approved = annual * (1.0 - econ.rejection_fraction)
    construction = approved / econ.time_to_build
    return RequestPipeline(annual, approved, construction)


def effective_lifetime(delay_in_debt_payment: float, econ: EconomicParameters,
                       effects: SocialEffectSet) -> float:
    """Equipment lifetime shortened by stalled maintenance, floored at one year."""
    activity = eval_inverted_sigmoid(effects.om_activity,
                                     delay_in_debt_payment)
    return max(MINIMUM_LIFETIME, econ.normal_equipment_lifetime * activity)


def compute_depreciation(installed_capacity: float,
                         delay_in_debt_payment: float,
                         econ: EconomicParameters,
                         effects: SocialEffectSet) -> float:
    """Retirement flow, MW/year."""
    return installed_capacity / effective_lifetime(delay_in_debt_payment,
                                                   econ, effects)


# === fund accounting ===

@dataclass(frozen=True)
class PaymentAllocation:
    """One year's split of the fund between old debt and new obligations."""

    available_whole_payment: float      # $/yr the fund can release
    debt_payment: float                 # $/yr settling old debt first
    actual_production_payment: float    # $/yr paid for current production
    debt_creation: float                # $/yr of new unpaid obligations


def allocate_payments(budget: float, suna_debt: float,
                      desired_payment: float) -> PaymentAllocation:
    """Allocate the fund with debt priority.

    The fund releases at most the whole desired payment (old debt plus the
    desired production payment). Debt is settled first; whatever remains
    goes to production, and the unpaid remainder becomes new debt.
    """
    if budget < 0.0 or suna_debt < 0.0 or desired_payment < 0.0:
        raise ValueError(
            f"allocation inputs must be non-negative, got budget={budget}, "
            f"suna_debt={suna_debt}, desired_payment={desired_payment}")
    whole_desired = suna_debt + desired_payment
    available = min(budget, whole_desired)
    debt_payment = min(available, suna_debt)
    actual = min(max(available - suna_debt, 0.0), desired_payment)
    return PaymentAllocation(
        available_whole_payment=available,
        debt_payment=debt_payment,
        actual_production_payment=actual,
        debt_creation=desired_payment - actual,
    )


def average_fit_price(total_fit_payment: float,
                      total_electricity_production: float,
                      fallback_price: float,
                      literal_form: bool = False) -> float:
    """Average tariff actually contracted so far, $/MWh.

    Lifetime payout divided by lifetime production; before any production
    exists the current tariff stands in. ``literal_form`` keeps the inverse
    ratio (production over payout) for inspection of the uncorrected
    bookkeeping; it is not dimensionally a price.
    """
    if total_electricity_production <= 0.0 or total_fit_payment <= 0.0:
        return fallback_price
    if literal_form:
        return total_electricity_production / total_fit_payment
    return total_fit_payment / total_electricity_production


class ProductionPayment(NamedTuple):
    electricity_production: float       # MWh/year
    average_price: float                # $/MWh
    desired_payment: float              # $/year owed for this production
    payment_inflow: float               # $/year added to the payout ledger


def compute_production_and_price(installed_capacity: float,
                                 total_electricity_production: float,
                                 total_fit_payment: float,
                                 fit_price: float,
                                 econ: EconomicParameters) -> ProductionPayment:
    """Production of the installed base and the payment it entitles."""
    production = installed_capacity * econ.capacity_factor * ANNUAL_HOURS
    average = average_fit_price(total_fit_payment,
                                total_electricity_production, fit_price,
                                econ.average_price_literal_form)
    desired = production * average
    inflow = production * fit_price
    return ProductionPayment(production, average, desired, inflow)


# === parameter registry (config keys and sensitivity targets) ===

def _registry() -> dict[str, tuple[str, ...]]:
    names: dict[str, tuple[str, ...]] = {}
    for f in fields(EconomicParameters):
        names[f.name] = ("econ", f.name)
    for effect in ("social_tolerance", "investor_trust", "om_activity"):
        for part in ("y_max", "x_50", "p"):
            names[f"{effect}_{part}"] = ("effects", effect, part)
    names["penetration_gain"] = ("effects", "penetration_gain")
    for trend in ("total_generation_capacity", "electricity_consumption"):
        for part in ("intercept", "slope", "reference_year"):
            names[f"{trend}_{part}"] = ("exogenous", trend, part)
    return names


PARAMETER_NAMES: tuple[str, ...] = tuple(sorted(_registry()))


def get_parameter(params: ModelParameters, name: str) -> float:
    """Current value of a named parameter (see ``PARAMETER_NAMES``)."""
    path = _registry().get(name)
    if path is None:
        raise ConfigurationError(f"unknown parameter {name!r}")
    obj = params
    for attr in path:
        obj = getattr(obj, attr)
    return obj


def apply_overrides(params: ModelParameters,
                    overrides: dict[str, float]) -> ModelParameters:
    """Functional update of named parameters; unknown names are rejected."""
    registry = _registry()
    econ_updates: dict[str, float] = {}
    effect_updates: dict[str, dict[str, float]] = {}
    effect_scalars: dict[str, float] = {}
    trend_updates: dict[str, dict[str, float]] = {}
    for name, value in overrides.items():
        path = registry.get(name)
        if path is None:
            raise ConfigurationError(f"unknown parameter {name!r}")
        if path[0] == "econ":
            econ_updates[path[1]] = value
        elif path[0] == "effects" and len(path) == 2:
            effect_scalars[path[1]] = value
        elif path[0] == "effects":
            effect_updates.setdefault(path[1], {})[path[2]] = value
        else:
            trend_updates.setdefault(path[1], {})[path[2]] = value

    econ = replace(params.econ, **econ_updates) if econ_updates else params.econ
    effects = params.effects
    if effect_updates or effect_scalars:
        parts = {}
        for effect_name, changes in effect_updates.items():
            current = getattr(effects, effect_name)
            parts[effect_name] = replace(current, **changes)
        effects = replace(effects, **parts, **effect_scalars)
    exogenous = params.exogenous
    if trend_updates:
        parts = {}
        for trend_name, changes in trend_updates.items():
            current = getattr(exogenous, trend_name)
            parts[trend_name] = replace(current, **changes)
        exogenous = replace(exogenous, **parts)
    return ModelParameters(econ=econ, effects=effects, exogenous=exogenous)


# === the wired model ===

class FitModel:
    """Wires the operations above into a derivative function over the stocks.

    A policy hook may be attached: ``policy(budget, perceived_shortage, t)``
    returning :class:`PriceTaxOverrides`. Without one the base rules apply
    unchanged. Instances are reusable; per-run memory (the request lag and
    the penetration warning latch) is reset by ``begin_run``.
    """

    STOCKS = (
        "installed_capacity",
        "depreciated_capacity",
        "suna_debt",
        "budget",
        "total_electricity_production",
        "total_fit_payment",
        "perceived_shortage",
    )
    non_negative = frozenset(STOCKS)
    flow_names = (
        "construction_rate",
        "depreciation",
        "debt_creation",
        "debt_payment",
        "budget_increase",
        "budget_decrease",
        "electricity_production",
        "fit_payment_inflow",
    )

    def __init__(self, params: ModelParameters,
                 policy: PolicyFn | None = None):
        self.params = params
        self.policy = policy
        self._requests: LaggedSeries | None = None
        self._penetration_warned = False

    def initial_state(self) -> dict[str, float]:
        econ = self.params.econ
        return {
            "installed_capacity": econ.initial_installed_capacity,
            "depreciated_capacity": 0.0,
            "suna_debt": econ.initial_suna_debt,
            "budget": econ.initial_budget,
            "total_electricity_production": 0.0,
            "total_fit_payment": 0.0,
            "perceived_shortage": 0.0,
        }

    def begin_run(self, clock: SimulationClock) -> None:
        self._requests = LaggedSeries(
            lag=1.0, initial_value=self.params.econ.initial_annual_requests)
        self._penetration_warned = False

    def simulate(self, clock: SimulationClock) -> RunResult:
        return run_simulation(self, clock)

    def derivatives(self, state: dict[str, float],
                    t: float) -> tuple[dict[str, float], dict[str, float]]:
        econ = self.params.econ
        effects = self.params.effects
        exog = self.params.exogenous
        if self._requests is None:
            self.begin_run(SimulationClock(t, t + 1.0))

        installed = state["installed_capacity"]
        depreciated = state["depreciated_capacity"]
        debt = state["suna_debt"]
        budget = state["budget"]
        total_production = state["total_electricity_production"]
        total_payment = state["total_fit_payment"]
        perceived = state["perceived_shortage"]

        # --- exogenous drivers ---
        generation_capacity = eval_linear_trend(
            exog.total_generation_capacity, t)
        consumption = eval_linear_trend(exog.electricity_consumption, t)

        # --- capacity ledger and learning ---
        cumulative = installed + depreciated
        capital_cost = compute_capital_cost(
            max(cumulative, econ.initial_installed_capacity), econ)

        # --- policy overrides, price, levy ---
        overrides = (self.policy(budget, perceived, t)
                     if self.policy is not None else None)
        fit_price = compute_fit_price(installed, econ, overrides)
        res_tax = econ.res_tax_base
        if overrides is not None and overrides.res_tax is not None:
            res_tax = overrides.res_tax

        # --- investment climate ---
        roi = compute_roi(econ, fit_price, capital_cost)
        penetration = installed / generation_capacity
        if penetration > 1.0:
            if not self._penetration_warned:
                logger.warning(
                    "installed capacity %.1f MW exceeds total generation "
                    "capacity %.1f MW at t=%.2f; penetration clamped",
                    installed, generation_capacity, t)
                self._penetration_warned = True
            penetration = 1.0

        # --- production and the payment it entitles ---
        production = compute_production_and_price(
            installed, total_production, total_payment, fit_price, econ)
        delay = compute_delay_in_debt_payment(debt,
                                              production.desired_payment)

        acceptance = compute_social_acceptance(penetration, res_tax, effects)
        trust = eval_inverted_sigmoid(effects.investor_trust, delay)
        tendency = compute_tendency_to_invest(roi, acceptance, trust)

        # --- request pipeline (annual information delay) ---
        previous_requests = lag_lookup(self._requests, t)
        pipeline = compute_request_pipeline(previous_requests, tendency, econ)
        self._requests.record(t, pipeline.annual_requests)

        lifetime = effective_lifetime(delay, econ, effects)
        depreciation = installed / lifetime

        # --- fund allocation with debt priority ---
        allocation = allocate_payments(budget, debt,
                                       production.desired_payment)
        budget_increase = consumption * res_tax * KWH_PER_MWH
        budget_decrease = (allocation.debt_payment
                           + allocation.actual_production_payment)
        whole_desired = debt + production.desired_payment
        shortage = whole_desired - allocation.available_whole_payment

        rates = {
            "installed_capacity": pipeline.construction_rate - depreciation,
            "depreciated_capacity": depreciation,
            "suna_debt": allocation.debt_creation - allocation.debt_payment,
            "budget": budget_increase - budget_decrease,
            "total_electricity_production": production.electricity_production,
            "total_fit_payment": production.payment_inflow,
            "perceived_shortage": ((shortage - perceived)
                                   / econ.shortage_smoothing_time),
        }
        aux = {
            "construction_rate": pipeline.construction_rate,
            "depreciation": depreciation,
            "debt_creation": allocation.debt_creation,
            "debt_payment": allocation.debt_payment,
            "budget_increase": budget_increase,
            "budget_decrease": budget_decrease,
            "electricity_production": production.electricity_production,
            "fit_payment_inflow": production.payment_inflow,
            "cumulative_installed_capacity": cumulative,
            "capital_cost": capital_cost,
            "fit_price": fit_price,
            "res_tax": res_tax,
            "roi": roi,
            "penetration_rate": penetration,
            "social_acceptance": acceptance,
            "investor_trust": trust,
            "om_activity": eval_inverted_sigmoid(effects.om_activity, delay),
            "effective_lifetime": lifetime,
            "tendency_to_invest": tendency,
            "annual_fit_requests": pipeline.annual_requests,
            "approved_fit_requests": pipeline.approved_requests,
            "average_fit_price": production.average_price,
            "desired_production_payment": production.desired_payment,
            "whole_desired_payment": whole_desired,
            "available_whole_payment": allocation.available_whole_payment,
            "actual_production_payment": allocation.actual_production_payment,
            "delay_in_debt_payment": delay,
            "budget_shortage": shortage,
            "electricity_consumption": consumption,
            "total_generation_capacity": generation_capacity,
        }
        return rates, aux
