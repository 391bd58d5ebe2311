"""Economics oracles and full-run ledger identities.

The fixed-point fixtures are frozen from independent brute-force
computations (term-by-term discounted cash flows, hand-traced allocation
ledgers) rather than from the implementation itself.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from fitsim import (
    ConfigurationError,
    EconomicParameters,
    ModelParameters,
    PARAMETER_NAMES,
    SimulationClock,
    FitModel,
    annuity_factor,
    apply_overrides,
    compute_fit_price,
    compute_roi,
    get_parameter,
)
from fitsim.model import (
    PriceTaxOverrides,
    RequestPipeline,
    allocate_payments,
    average_fit_price,
    compute_capital_cost,
    compute_delay_in_debt_payment,
    compute_depreciation,
    compute_production_and_price,
    compute_request_pipeline,
    compute_social_acceptance,
    compute_tendency_to_invest,
    effective_lifetime,
)


def dcf_annuity(rate, years):
    """Brute-force present value of 1/year: the oracle for annuity_factor."""
    return sum((1.0 + rate) ** -k for k in range(1, years + 1))


# === annuity and ROI ===

def test_annuity_matches_term_by_term_discounting():
    assert annuity_factor(0.10, 20.0) == pytest.approx(dcf_annuity(0.10, 20),
                                                       rel=1e-9)
    assert annuity_factor(0.10, 24.0) == pytest.approx(dcf_annuity(0.10, 24),
                                                       rel=1e-9)
    assert annuity_factor(0.05, 10.0) == pytest.approx(dcf_annuity(0.05, 10),
                                                       rel=1e-9)


def test_annuity_reference_values():
    assert annuity_factor(0.10, 20.0) == pytest.approx(8.513564, abs=5e-7)
    assert annuity_factor(0.10, 24.0) == pytest.approx(8.984744, abs=5e-7)


def test_annuity_zero_interest_limit_is_the_horizon():
    assert annuity_factor(0.0, 20.0) == 20.0
    # the closed form converges to that limit as the rate vanishes;
    # cancellation caps the usable precision well above float epsilon
    assert annuity_factor(1e-7, 20.0) == pytest.approx(20.0, rel=1e-5)


def test_annuity_rejects_bad_arguments():
    with pytest.raises(ValueError):
        annuity_factor(0.1, 0.5)
    with pytest.raises(ValueError):
        annuity_factor(-0.1, 20.0)


def test_roi_matches_discounted_cash_flow_oracle():
    econ = EconomicParameters(capacity_factor=0.25, om_cost=10.0,
                              interest_rate=0.10, remuneration_period=20.0)
    price, capital = 100.0, 1.5e6
    margin = 0.25 * 8760.0 * (price - 10.0)
    oracle = (margin * dcf_annuity(0.10, 20) - capital) / capital
    assert compute_roi(econ, price, capital) == pytest.approx(oracle, rel=1e-9)
    assert oracle == pytest.approx(0.118682, abs=5e-7)


def test_roi_is_linear_in_price_above_om():
    econ = EconomicParameters()
    capital = 1.4e5
    r1 = compute_roi(econ, 10.0, capital)
    r2 = compute_roi(econ, 11.0, capital)
    # one extra dollar per MWh adds cf * 8760 * annuity / capital
    slope = 0.25 * 8760.0 * annuity_factor(0.10, 20.0) / capital
    assert r2 - r1 == pytest.approx(slope, rel=1e-9)


def test_roi_rejects_non_positive_capital():
    with pytest.raises(ValueError):
        compute_roi(EconomicParameters(), 20.0, 0.0)


# === learning curve ===

def test_capital_cost_learning_fixture():
    econ = EconomicParameters(initial_capital_cost=1.5e6,
                              learning_exponent=0.15)
    # doubling cumulative build from the launch base
    assert compute_capital_cost(240.0, econ) == pytest.approx(
        1.5e6 * 2.0 ** -0.15, rel=1e-12)
    assert compute_capital_cost(120.0, econ) == pytest.approx(1.5e6)


def test_capital_cost_is_monotone_decreasing():
    econ = EconomicParameters()
    costs = [compute_capital_cost(c, econ)
             for c in (120.0, 240.0, 1000.0, 5000.0)]
    assert all(a > b for a, b in zip(costs, costs[1:]))


def test_capital_cost_flat_when_learning_disabled():
    econ = EconomicParameters(learning_exponent=0.0)
    assert compute_capital_cost(5000.0, econ) == econ.initial_capital_cost


def test_capital_cost_rejects_non_positive_build():
    with pytest.raises(ValueError):
        compute_capital_cost(0.0, EconomicParameters())


# === tariff rule ===

def test_fit_price_tracks_remaining_target_gap():
    econ = EconomicParameters()
    assert compute_fit_price(0.0, econ) == pytest.approx(20.0)
    assert compute_fit_price(2500.0, econ) == pytest.approx(10.0)
    # floor: a quarter of the launch tariff, even past the target
    assert compute_fit_price(5000.0, econ) == pytest.approx(5.0)
    assert compute_fit_price(20000.0, econ) == pytest.approx(5.0)


def test_fit_price_policy_overrides_scale_then_shift():
    econ = EconomicParameters()
    overrides = PriceTaxOverrides(fit_price_delta=4.0,
                                  fit_price_multiplier=0.5)
    assert compute_fit_price(0.0, econ, overrides) == pytest.approx(14.0)
    with pytest.raises(ConfigurationError):
        PriceTaxOverrides(fit_price_multiplier=0.0)
    with pytest.raises(ConfigurationError):
        PriceTaxOverrides(fit_price_multiplier=1.5)


# === social responses ===

def test_social_acceptance_fixture():
    effects = ModelParameters().effects
    # tax-free levy keeps full tolerance; penetration adds its linear bonus
    assert compute_social_acceptance(0.1, 0.0, effects) == pytest.approx(1.5)
    assert compute_social_acceptance(0.0, 0.05, effects) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        compute_social_acceptance(1.2, 0.0, effects)
    with pytest.raises(ValueError):
        compute_social_acceptance(-0.1, 0.0, effects)


def test_delay_in_debt_payment():
    assert compute_delay_in_debt_payment(0.0, 100.0) == 0.0
    assert compute_delay_in_debt_payment(50.0, 100.0) == pytest.approx(0.5)
    # obligations below the epsilon guard cannot blow the ratio up
    assert compute_delay_in_debt_payment(50.0, 0.0) == pytest.approx(50.0)


def test_tendency_floors_negative_roi_at_zero():
    assert compute_tendency_to_invest(-0.5, 2.0, 1.0) == 0.0
    assert compute_tendency_to_invest(0.5, 2.0, 0.5) == pytest.approx(0.5)


# === request pipeline and retirement ===

def test_request_pipeline_trace():
    econ = EconomicParameters(rejection_fraction=0.5, time_to_build=2.0)
    pipeline = compute_request_pipeline(100.0, 1.0, econ)
    assert pipeline == RequestPipeline(100.0, 50.0, 25.0)


def test_effective_lifetime_halves_at_the_sigmoid_midpoint():
    params = ModelParameters()
    assert effective_lifetime(0.0, params.econ, params.effects) == 20.0
    assert effective_lifetime(5.0, params.econ,
                              params.effects) == pytest.approx(10.0)
    # the floor stops retirement from becoming instantaneous
    assert effective_lifetime(50.0, params.econ, params.effects) == 1.0


def test_depreciation_flow():
    params = ModelParameters()
    assert compute_depreciation(120.0, 5.0, params.econ,
                                params.effects) == pytest.approx(12.0)


# === fund allocation ===

@pytest.mark.parametrize("budget,debt,desired,expected", [
    (100.0, 30.0, 50.0, (80.0, 30.0, 50.0, 0.0)),
    (40.0, 30.0, 50.0, (40.0, 30.0, 10.0, 40.0)),
    (20.0, 30.0, 50.0, (20.0, 20.0, 0.0, 50.0)),
])
def test_allocation_ledger_traces(budget, debt, desired, expected):
    allocation = allocate_payments(budget, debt, desired)
    assert (allocation.available_whole_payment,
            allocation.debt_payment,
            allocation.actual_production_payment,
            allocation.debt_creation) == pytest.approx(expected)


def test_allocation_invariants_hold_on_random_ledgers():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        budget, debt, desired = rng.uniform(0.0, 1e8, size=3)
        a = allocate_payments(budget, debt, desired)
        assert a.available_whole_payment <= budget + 1e-9
        assert a.available_whole_payment <= debt + desired + 1e-9
        assert 0.0 <= a.debt_payment <= debt + 1e-9
        assert 0.0 <= a.actual_production_payment <= desired + 1e-9
        # debt is settled before any production dollar flows
        if a.actual_production_payment > 0.0:
            assert a.debt_payment == pytest.approx(debt)
        assert a.debt_payment + a.actual_production_payment == pytest.approx(
            a.available_whole_payment)
        assert a.actual_production_payment + a.debt_creation == pytest.approx(
            desired)


def test_allocation_rejects_negative_inputs():
    with pytest.raises(ValueError):
        allocate_payments(-1.0, 0.0, 0.0)


# === vintage-average price and production ===

def test_average_fit_price_forms():
    assert average_fit_price(0.0, 0.0, fallback_price=20.0) == 20.0
    assert average_fit_price(200.0, 10.0, 20.0) == pytest.approx(20.0)
    assert average_fit_price(150.0, 10.0, 20.0) == pytest.approx(15.0)
    # the literal bookkeeping ratio is exposed but inverted
    assert average_fit_price(150.0, 10.0, 20.0,
                             literal_form=True) == pytest.approx(10.0 / 150.0)


def test_production_and_payment_entitlement():
    econ = EconomicParameters()
    out = compute_production_and_price(
        installed_capacity=100.0, total_electricity_production=0.0,
        total_fit_payment=0.0, fit_price=20.0, econ=econ)
    assert out.electricity_production == pytest.approx(100.0 * 0.25 * 8760.0)
    assert out.average_price == 20.0  # no history yet, tariff stands in
    assert out.desired_payment == pytest.approx(out.electricity_production
                                                * 20.0)
    assert out.payment_inflow == pytest.approx(out.desired_payment)


def test_desired_payment_uses_contracted_average_not_current_price():
    econ = EconomicParameters()
    out = compute_production_and_price(
        installed_capacity=100.0, total_electricity_production=1000.0,
        total_fit_payment=18000.0, fit_price=5.0, econ=econ)
    assert out.average_price == pytest.approx(18.0)
    assert out.desired_payment == pytest.approx(out.electricity_production
                                                * 18.0)
    assert out.payment_inflow == pytest.approx(out.electricity_production
                                               * 5.0)


# === parameter registry ===

def test_registry_round_trip():
    params = ModelParameters()
    assert "initial_fit_price" in PARAMETER_NAMES
    assert "investor_trust_x_50" in PARAMETER_NAMES
    assert "electricity_consumption_slope" in PARAMETER_NAMES
    updated = apply_overrides(params, {
        "initial_fit_price": 25.0,
        "investor_trust_x_50": 4.0,
        "electricity_consumption_slope": 1e6,
        "penetration_gain": 3.0,
    })
    assert get_parameter(updated, "initial_fit_price") == 25.0
    assert get_parameter(updated, "investor_trust_x_50") == 4.0
    assert get_parameter(updated, "electricity_consumption_slope") == 1e6
    assert get_parameter(updated, "penetration_gain") == 3.0
    # the original is untouched
    assert get_parameter(params, "initial_fit_price") == 20.0


def test_registry_rejects_unknown_names():
    with pytest.raises(ConfigurationError):
        get_parameter(ModelParameters(), "not_a_parameter")
    with pytest.raises(ConfigurationError):
        apply_overrides(ModelParameters(), {"not_a_parameter": 1.0})


def test_parameter_validation_catches_bad_values():
    with pytest.raises(ConfigurationError):
        EconomicParameters(rejection_fraction=1.5)
    with pytest.raises(ConfigurationError):
        EconomicParameters(initial_fit_price=-1.0)
    with pytest.raises(ConfigurationError):
        EconomicParameters(remuneration_period=0.5)
    with pytest.raises(ConfigurationError):
        EconomicParameters(fit_price_floor=0.0)
    with pytest.raises(ConfigurationError):
        EconomicParameters(initial_budget=-1.0)


# === full-run ledger identities ===

def stock_ledger_residual(run, stock, inflow, outflow, dt):
    """Worst relative gap between a stock and its integrated flows."""
    integrated = np.cumsum((run[inflow][:-1] - run[outflow][:-1]) * dt)
    reconstructed = run[stock][0] + np.concatenate(([0.0], integrated))
    scale = max(1.0, float(np.max(np.abs(run[stock]))))
    return float(np.max(np.abs(reconstructed - run[stock]))) / scale


def test_base_run_conserves_money_and_capacity(base_run):
    dt = 0.25
    assert stock_ledger_residual(base_run, "budget", "budget_increase",
                                 "budget_decrease", dt) < 1e-9
    assert stock_ledger_residual(base_run, "suna_debt", "debt_creation",
                                 "debt_payment", dt) < 1e-9
    cumulative = (base_run["installed_capacity"]
                  + base_run["depreciated_capacity"])
    assert np.array_equal(base_run["cumulative_installed_capacity"],
                          cumulative)
    # retirements never outrun the ledger: no clamp ever fires in the base run
    assert base_run.clamp_events == ()


def test_base_run_stocks_stay_non_negative(base_run):
    for name in ("installed_capacity", "depreciated_capacity", "suna_debt",
                 "budget", "total_electricity_production",
                 "total_fit_payment", "perceived_shortage"):
        assert float(np.min(base_run[name])) >= 0.0


def test_base_run_has_expected_record_count(base_run):
    assert base_run.n_records == 81
    assert base_run.times[0] == 2015.0
    assert base_run.times[-1] == 2035.0


def test_runs_are_bit_reproducible(default_params):
    clock = SimulationClock(2015.0, 2020.0, 0.25)
    a = FitModel(default_params).simulate(clock)
    b = FitModel(default_params).simulate(clock)
    for name in a.variables:
        assert np.array_equal(a[name], b[name])


def test_model_instance_is_reusable(default_params):
    clock = SimulationClock(2015.0, 2020.0, 0.25)
    model = FitModel(default_params)
    a = model.simulate(clock)
    b = model.simulate(clock)
    assert np.array_equal(a["installed_capacity"], b["installed_capacity"])


def test_total_payment_ledger_matches_price_times_production(base_run):
    # payment inflow is production priced at the current tariff
    inflow = base_run["fit_payment_inflow"]
    production = base_run["electricity_production"]
    price = base_run["fit_price"]
    assert np.allclose(inflow, production * price, rtol=1e-12)


def test_literal_average_price_form_runs(default_params):
    econ = replace(default_params.econ, average_price_literal_form=True)
    params = ModelParameters(econ, default_params.effects,
                             default_params.exogenous)
    clock = SimulationClock(2015.0, 2018.0, 0.25)
    run = FitModel(params).simulate(clock)
    assert run.n_records == 13
    assert math.isfinite(run.final("installed_capacity"))
