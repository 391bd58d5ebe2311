"""The committed acceptance battery: ten numbered criteria.

Each test prints one ``ACCEPTANCE <n> PASS/FAIL`` line before asserting,
so the log always carries an explicit verdict per criterion, timing
budgets included.
"""

import time
from dataclasses import replace

import numpy as np

from fitsim import (
    FitModel,
    GROWTH_PEAK_DECLINE,
    SimulationClock,
    SocialEffectSet,
    annuity_factor,
    behavior_signature,
    extreme_condition_suite,
    run_scenario_suite,
    sensitivity_suite,
    theil_decomposition,
)
from fitsim.cli import main
from fitsim.model import (
    allocate_payments,
    compute_capital_cost,
    compute_fit_price,
    compute_roi,
    compute_social_acceptance,
)

REL_TOL = 1e-9


def _verdict(number: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:02d} {status}: {detail}")
    assert ok, f"criterion {number}: {detail}"


def _close(a: float, b: float, rel: float = REL_TOL) -> bool:
    if b == 0.0:
        return a == 0.0
    return abs(a - b) <= rel * abs(b)


def _discounted_dollar_stream(rate: float, years: int) -> float:
    # one dollar a year, brute force, no closed form
    return sum((1.0 + rate) ** -k for k in range(1, years + 1))


def test_criterion_01_equation_oracles(default_params):
    start = time.perf_counter()
    econ = default_params.econ
    ok = True
    details = []

    for rate, years in ((0.10, 20), (0.10, 24), (0.07, 15), (0.0, 10)):
        oracle = _discounted_dollar_stream(rate, years)
        if not _close(annuity_factor(rate, float(years)), oracle):
            ok, details = False, details + [f"annuity({rate},{years})"]

    project = replace(econ, capacity_factor=0.25, om_cost=10.0,
                      interest_rate=0.10, remuneration_period=20.0)
    capital = 1.5e6
    margin = 0.25 * 8760.0 * (100.0 - 10.0)
    roi_oracle = (margin * _discounted_dollar_stream(0.10, 20)
                  - capital) / capital
    if not _close(compute_roi(project, 100.0, capital), roi_oracle):
        ok, details = False, details + ["roi"]

    cost_oracle = econ.initial_capital_cost * 2.0 ** (-econ.learning_exponent)
    if not _close(compute_capital_cost(240.0, econ), cost_oracle):
        ok, details = False, details + ["learning curve"]
    if not _close(compute_capital_cost(econ.initial_installed_capacity, econ),
                  econ.initial_capital_cost):
        ok, details = False, details + ["learning curve at launch"]

    for installed, expected in ((0.0, 20.0), (2500.0, 10.0),
                                (4000.0, 5.0), (20000.0, 5.0)):
        if not _close(compute_fit_price(installed, econ), expected):
            ok, details = False, details + [f"fit price @ {installed}"]

    effects = SocialEffectSet()
    if not _close(compute_social_acceptance(0.1, 0.0, effects), 1.5):
        ok, details = False, details + ["acceptance vs penetration"]
    if not _close(compute_social_acceptance(0.0, 0.05, effects), 0.5):
        ok, details = False, details + ["acceptance vs levy"]

    for budget, debt, desired, expected in (
            (100.0, 30.0, 50.0, (80.0, 30.0, 50.0, 0.0)),
            (40.0, 30.0, 50.0, (40.0, 30.0, 10.0, 40.0)),
            (20.0, 30.0, 50.0, (20.0, 20.0, 0.0, 50.0))):
        got = allocate_payments(budget, debt, desired)
        tuple_got = (got.available_whole_payment, got.debt_payment,
                     got.actual_production_payment, got.debt_creation)
        if not all(_close(g, e) for g, e in zip(tuple_got, expected)):
            ok, details = False, details + [f"allocation {budget}"]

    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1.0
    _verdict(1, ok, "closed forms match brute-force oracles at 1e-9 "
             f"({elapsed * 1000:.0f} ms)"
             + (f"; mismatches: {details}" if details else ""))


def test_criterion_02_sigmoid_battery():
    start = time.perf_counter()
    effects = SocialEffectSet()
    rng = np.random.default_rng(20150101)
    ok = True
    for effect in (effects.social_tolerance, effects.investor_trust,
                   effects.om_activity):
        ok = ok and _close(effect(0.0), effect.y_max)
        ok = ok and _close(effect(effect.x_50), effect.y_max / 2.0)
        x = np.sort(rng.uniform(0.0, 10.0 * effect.x_50, size=1200))
        y = np.array([effect(float(v)) for v in x])
        ok = ok and bool(np.all(np.diff(y) <= 0.0))
        ok = ok and bool(np.all((y >= 0.0) & (y <= effect.y_max)))
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1.0
    _verdict(2, ok, "all three response curves anchor at y_max and "
             f"y_max/2 and decrease monotonically ({elapsed * 1000:.0f} ms)")


def test_criterion_03_conservation_ledgers(base_run):
    start = time.perf_counter()
    dt = float(base_run.times[1] - base_run.times[0])

    def ledger_residual(stock, inflow, outflow):
        values = base_run[stock]
        net = base_run[inflow] - (base_run[outflow]
                                  if outflow else 0.0)
        rebuilt = values[0] + dt * np.concatenate(
            ([0.0], np.cumsum(net[:-1])))
        scale = max(float(np.max(np.abs(values))), 1.0)
        return float(np.max(np.abs(rebuilt - values))) / scale

    budget_residual = ledger_residual("budget", "budget_increase",
                                      "budget_decrease")
    debt_residual = ledger_residual("suna_debt", "debt_creation",
                                    "debt_payment")
    production_residual = ledger_residual("total_electricity_production",
                                          "electricity_production", None)
    cumulative_exact = bool(np.array_equal(
        base_run["cumulative_installed_capacity"],
        base_run["installed_capacity"] + base_run["depreciated_capacity"]))
    unclamped = base_run.clamp_events == ()

    elapsed = time.perf_counter() - start
    ok = (budget_residual <= REL_TOL and debt_residual <= REL_TOL
          and production_residual <= REL_TOL and cumulative_exact
          and unclamped and elapsed < 1.0)
    _verdict(3, ok, "fund, debt, and production ledgers reconstruct the "
             f"stocks (worst residual {max(budget_residual, debt_residual, production_residual):.2e}), "
             f"cumulative build exact: {cumulative_exact} "
             f"({elapsed * 1000:.0f} ms)")


def test_criterion_04_theil_identity():
    start = time.perf_counter()
    rng = np.random.default_rng(4242)
    ok = True
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(3, 30))
        h = rng.normal(0.0, 5.0, size=n)
        s = h + rng.normal(0.0, 2.0, size=n)
        um, us, uc = theil_decomposition(s, h)
        worst = max(worst, abs(um + us + uc - 1.0))
        ok = ok and abs(um + us + uc - 1.0) <= 1e-9

    h = np.arange(1.0, 9.0)
    um, us, uc = theil_decomposition(h + 3.0, h)
    ok = ok and abs(um - 1.0) <= 1e-9 and abs(us) <= 1e-9 and abs(uc) <= 1e-9
    s = h.mean() + 3.0 * (h - h.mean())
    um, us, uc = theil_decomposition(s, h)
    ok = ok and abs(um) <= 1e-9 and abs(us - 1.0) <= 1e-9 and abs(uc) <= 1e-9

    elapsed = time.perf_counter() - start
    _verdict(4, ok, "bias/variance/covariance shares sum to one on 1000 "
             f"random pairs (worst gap {worst:.2e}) and isolate pure bias "
             f"and pure variance ({elapsed * 1000:.0f} ms)")


def test_criterion_05_committed_calibration_story(base_run):
    budget_sig = behavior_signature(base_run.times, base_run["budget"])
    debt_sig = behavior_signature(base_run.times, base_run["suna_debt"])
    capacity_sig = behavior_signature(base_run.times,
                                      base_run["installed_capacity"])

    budget_ok = budget_sig.shape == GROWTH_PEAK_DECLINE
    debt_ok = (debt_sig.emerged
               and debt_sig.first_positive_year is not None
               and debt_sig.first_positive_year >= 2018.0
               and base_run.final("suna_debt") > base_run.final("budget"))
    capacity_ok = (capacity_sig.shape == GROWTH_PEAK_DECLINE
                   and capacity_sig.peak_year is not None
                   and 2018.0 <= capacity_sig.peak_year <= 2033.0
                   and base_run.at_year("installed_capacity", 2021.0)
                   > base_run.at_year("installed_capacity", 2015.0))

    ok = budget_ok and debt_ok and capacity_ok
    _verdict(5, ok, f"fund {budget_sig.shape}; debt emerges "
             f"{debt_sig.first_positive_year} and ends above the fund; "
             f"capacity peaks {capacity_sig.peak_year} then declines")


def test_criterion_06_policy_orderings(default_doc):
    start = time.perf_counter()
    report = run_scenario_suite(default_doc.params,
                                list(default_doc.scenarios))
    ic = {name: report.runs[name].final("installed_capacity")
          for name in report.runs}
    debt = {name: report.runs[name].final("suna_debt")
            for name in report.runs}
    p3_debt_peak = float(np.max(report.runs["p3_budget_adjusted_tax"]
                                ["suna_debt"]))
    p3_tendency = report.runs["p3_budget_adjusted_tax"]["tendency_to_invest"]
    p1_tendency = report.runs["p1_higher_fit"]["tendency_to_invest"]

    capacity_ok = (ic["p3_budget_adjusted_tax"] > ic["base"]
                   > ic["p2_budget_adjusted_fit"] > ic["p1_higher_fit"])
    debt_ok = (debt["p1_higher_fit"] > debt["base"]
               > debt["p2_budget_adjusted_fit"]
               >= debt["p3_budget_adjusted_tax"])
    p3_ok = p3_debt_peak == 0.0 and float(p3_tendency[-1]) > float(
        p3_tendency[0])
    p1_ok = float(p1_tendency[-1]) < 0.1 * float(p1_tendency[0])

    elapsed = time.perf_counter() - start
    ok = capacity_ok and debt_ok and p3_ok and p1_ok and elapsed < 10.0
    _verdict(6, ok, "2035 capacity p3>base>p2>p1 and debt p1>base>p2>=p3 "
             f"with p3 debt-free throughout; p3 tendency rises, p1 "
             f"tendency collapses ({elapsed:.1f} s)")


def test_criterion_07_extreme_conditions(default_params):
    start = time.perf_counter()
    findings = extreme_condition_suite(default_params)
    elapsed = time.perf_counter() - start
    failed = [finding.name for finding in findings if not finding.passed]
    ok = not failed and elapsed < 5.0
    _verdict(7, ok, f"{len(findings)} extreme-condition checks "
             + ("all hold" if not failed else f"failed: {failed}")
             + f" ({elapsed:.1f} s)")


def test_criterion_08_perturbation_keeps_behavior_modes(default_params):
    start = time.perf_counter()
    findings = sensitivity_suite(default_params)
    elapsed = time.perf_counter() - start
    failed = [str(finding) for finding in findings if not finding.passed]
    ok = not failed and elapsed < 10.0
    _verdict(8, ok, "five-parameter perturbation keeps capacity and debt "
             "behavior modes"
             + (f"; failed: {failed}" if failed else "")
             + f" ({elapsed:.1f} s)")


def test_criterion_09_step_halving(default_params):
    coarse = FitModel(default_params).simulate(
        SimulationClock(2015.0, 2035.0, 0.25))
    fine = FitModel(default_params).simulate(
        SimulationClock(2015.0, 2035.0, 0.125))
    stocks = ("installed_capacity", "depreciated_capacity", "suna_debt",
              "budget", "total_electricity_production", "total_fit_payment")
    worst = 0.0
    for stock in stocks:
        c = coarse[stock]
        f = fine[stock][::2]
        scale = float(np.max(np.abs(fine[stock])))
        if scale == 0.0:
            continue
        worst = max(worst, float(np.max(np.abs(c - f))) / scale)
    ok = worst < 0.05
    _verdict(9, ok, "halving the step moves no accounted stock by 5% "
             f"of its range (worst {100.0 * worst:.2f}%)")


def test_criterion_10_byte_deterministic_cli(tmp_path, capsys):
    first = tmp_path / "first"
    second = tmp_path / "second"
    code_a = main(["compare", "--out", str(first)])
    code_b = main(["compare", "--out", str(second)])
    capsys.readouterr()
    files = sorted(path.name for path in first.iterdir())
    identical = files == sorted(path.name for path in second.iterdir())
    for name in files:
        identical = identical and ((first / name).read_bytes()
                                   == (second / name).read_bytes())
    ok = identical and code_a == code_b == 0
    _verdict(10, ok, f"two compare invocations emit identical bytes "
             f"across {len(files)} files")
