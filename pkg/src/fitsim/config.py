"""Run configuration: an INI dialect with per-value provenance.

Every value line carries a marker saying where the number comes from::

    key = value ; provenance[: note]

with provenance one of ``paper`` (taken from the source study), ``derived``
(computed from other values), or ``assumed`` (an engineering choice of this
implementation). Sections:

* ``[clock]`` start_year, end_year, dt;
* ``[parameters]`` the scalar economics (fields of
  :class:`~fitsim.model.EconomicParameters`);
* ``[effects]`` sigmoid shapes ``<effect>_{y_max,x_50,p}`` plus
  ``penetration_gain``;
* ``[trends]`` exogenous drivers ``<trend>_{intercept,slope,reference_year}``;
* ``[policy]`` default policy knobs shared by all scenarios;
* ``[scenario:NAME]`` one named run: a required ``policy`` id, optional
  knob overrides, and optional parameter overrides by registry name.

Unknown sections or keys are rejected. Keys left out fall back to the
package defaults, and every fallback is recorded in the parse log. Full
line comments start with ``#``; the ``;`` is reserved for provenance.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields as dataclass_fields
from importlib import resources

from .engine import ConfigurationError, SimulationClock
from .model import (
    EconomicParameters,
    ModelParameters,
    PARAMETER_NAMES,
    apply_overrides,
    get_parameter,
)
from .policies import MAX_RES_TAX, POLICY_IDS, PolicyControl, Scenario

__all__ = [
    "PROVENANCE_SOURCES",
    "ConfigEntry",
    "ConfigDocument",
    "parse_config",
    "load_config",
    "serialize_config",
    "default_config_text",
    "load_default_config",
]

PROVENANCE_SOURCES = ("paper", "derived", "assumed")

DEFAULT_CLOCK = SimulationClock(2015.0, 2035.0, 0.25)

_CLOCK_KEYS = ("start_year", "end_year", "dt")
_PARAMETER_KEYS = tuple(f.name for f in dataclass_fields(EconomicParameters))
_EFFECT_KEYS = tuple(
    f"{effect}_{part}"
    for effect in ("social_tolerance", "investor_trust", "om_activity")
    for part in ("y_max", "x_50", "p")
) + ("penetration_gain",)
_TREND_KEYS = tuple(
    f"{trend}_{part}"
    for trend in ("total_generation_capacity", "electricity_consumption")
    for part in ("intercept", "slope", "reference_year")
)
_POLICY_KEYS = ("fit_price_delta", "fit_controller_gain",
                "tax_controller_gain", "tax_floor", "tax_cap")
_BOOL_KEYS = frozenset({"average_price_literal_form"})

_SCALAR_SECTIONS = {
    "clock": _CLOCK_KEYS,
    "parameters": _PARAMETER_KEYS,
    "effects": _EFFECT_KEYS,
    "trends": _TREND_KEYS,
    "policy": _POLICY_KEYS,
}

_KNOB_DEFAULTS = {
    "fit_price_delta": 0.0,
    "fit_controller_gain": 0.0,
    "tax_controller_gain": 0.0,
    "tax_floor": 0.0,
    "tax_cap": MAX_RES_TAX,
}


@dataclass(frozen=True)
class ConfigEntry:
    """One parsed value line: the value plus its provenance."""

    value: float | bool | str
    source: str
    note: str = ""


@dataclass(frozen=True)
class ConfigDocument:
    """A fully validated configuration.

    ``entries`` holds exactly what the file said (per section, in file
    order); ``log`` records every key that fell back to a package default.
    """

    clock: SimulationClock
    params: ModelParameters
    scenarios: tuple[Scenario, ...]
    entries: dict[str, dict[str, ConfigEntry]]
    log: tuple[str, ...]

    @property
    def scenario_names(self) -> tuple[str, ...]:
        return tuple(scenario.name for scenario in self.scenarios)

    def scenario(self, name: str) -> Scenario:
        for scenario in self.scenarios:
            if scenario.name == name:
                return scenario
        raise ConfigurationError(
            f"unknown scenario {name!r}; have {list(self.scenario_names)}")


def _split_value(section: str, key: str, raw: str) -> tuple[str, str, str]:
    where = f"[{section}] {key}"
    if ";" not in raw:
        raise ConfigurationError(
            f"{where}: missing provenance; expected "
            f"'value ; {{paper|derived|assumed}}[: note]'")
    token, annotation = raw.split(";", 1)
    token = token.strip()
    annotation = annotation.strip()
    if ":" in annotation:
        source, note = (part.strip() for part in annotation.split(":", 1))
    else:
        source, note = annotation, ""
    if source not in PROVENANCE_SOURCES:
        raise ConfigurationError(
            f"{where}: provenance must be one of {PROVENANCE_SOURCES}, "
            f"got {source!r}")
    if not token:
        raise ConfigurationError(f"{where}: empty value")
    return token, source, note


def _parse_scalar(section: str, key: str, token: str) -> float | bool:
    where = f"[{section}] {key}"
    if key in _BOOL_KEYS:
        lowered = token.lower()
        if lowered not in ("true", "false"):
            raise ConfigurationError(
                f"{where}: expected true or false, got {token!r}")
        return lowered == "true"
    try:
        return float(token)
    except ValueError:
        raise ConfigurationError(
            f"{where}: not a number: {token!r}") from None


def parse_config(text: str) -> ConfigDocument:
    """Parse and validate a configuration document."""
    parser = configparser.ConfigParser(
        interpolation=None, delimiters=("=",),
        comment_prefixes=("#",), inline_comment_prefixes=None)
    parser.optionxform = str  # keys are case-sensitive as written
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"config syntax error: {exc}") from exc

    for section in parser.sections():
        if section in _SCALAR_SECTIONS:
            continue
        if section.startswith("scenario:") and section != "scenario:":
            continue
        raise ConfigurationError(
            f"unknown section [{section}]; expected one of "
            f"{sorted(_SCALAR_SECTIONS)} or [scenario:NAME]")

    log: list[str] = []
    entries: dict[str, dict[str, ConfigEntry]] = {}

    def read_section(name: str, allowed: tuple[str, ...],
                     parse=_parse_scalar) -> dict:
        values: dict = {}
        if not parser.has_section(name):
            return values
        section_entries = entries.setdefault(name, {})
        for key, raw in parser.items(name):
            if key not in allowed:
                raise ConfigurationError(
                    f"unknown key {key!r} in [{name}]; "
                    f"expected one of {sorted(allowed)}")
            token, source, note = _split_value(name, key, raw)
            value = parse(name, key, token)
            values[key] = value
            section_entries[key] = ConfigEntry(value, source, note)
        return values

    clock_values = read_section("clock", _CLOCK_KEYS)
    clock_defaults = {"start_year": DEFAULT_CLOCK.start_year,
                      "end_year": DEFAULT_CLOCK.end_year,
                      "dt": DEFAULT_CLOCK.dt}
    for key, fallback in clock_defaults.items():
        if key not in clock_values:
            log.append(f"clock.{key} defaulted to {fallback!r}")
    clock = SimulationClock(**{**clock_defaults, **clock_values})

    parameter_overrides: dict[str, float] = {}
    for section in ("parameters", "effects", "trends"):
        parameter_overrides.update(
            read_section(section, _SCALAR_SECTIONS[section]))
    defaults = ModelParameters()
    for section in ("parameters", "effects", "trends"):
        for key in _SCALAR_SECTIONS[section]:
            if key not in parameter_overrides:
                log.append(f"{section}.{key} defaulted to "
                           f"{get_parameter(defaults, key)!r}")
    params = apply_overrides(defaults, parameter_overrides)

    knob_defaults = dict(_KNOB_DEFAULTS)
    knob_defaults.update(read_section("policy", _POLICY_KEYS))

    def parse_scenario_value(name: str, key: str, token: str):
        if key == "policy":
            if token not in POLICY_IDS:
                raise ConfigurationError(
                    f"[{name}] policy must be one of {POLICY_IDS}, "
                    f"got {token!r}")
            return token
        return _parse_scalar(name, key, token)

    scenario_allowed = ("policy",) + _POLICY_KEYS + PARAMETER_NAMES
    scenarios: list[Scenario] = []
    for section in parser.sections():
        if not section.startswith("scenario:"):
            continue
        name = section[len("scenario:"):]
        values = read_section(section, scenario_allowed,
                              parse=parse_scenario_value)
        if "policy" not in values:
            raise ConfigurationError(f"[{section}] must declare a policy "
                                     f"(one of {POLICY_IDS})")
        knobs = dict(knob_defaults)
        overrides: dict[str, float] = {}
        for key, value in values.items():
            if key == "policy":
                continue
            if key in _POLICY_KEYS:
                knobs[key] = value
            else:
                overrides[key] = value
        control = PolicyControl(policy_id=values["policy"], **knobs)
        scenarios.append(Scenario(name=name, clock=clock,
                                  overrides=overrides, policy=control))

    if not scenarios:
        log.append("no [scenario:NAME] sections; synthesized neutral 'base'")
        scenarios.append(Scenario(name="base", clock=clock,
                                  policy=PolicyControl(**_KNOB_DEFAULTS)))

    return ConfigDocument(clock=clock, params=params,
                          scenarios=tuple(scenarios), entries=entries,
                          log=tuple(log))


def load_config(path) -> ConfigDocument:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(doc: ConfigDocument) -> str:
    """Write the document back out; parsing the result reproduces it.

    Only keys that were present in the original file are emitted, in file
    order, with values normalized to ``repr`` so the round trip is exact.
    """
    lines: list[str] = []
    for section, section_entries in doc.entries.items():
        lines.append(f"[{section}]")
        for key, entry in section_entries.items():
            annotation = entry.source
            if entry.note:
                annotation += f": {entry.note}"
            lines.append(f"{key} = {_format_value(entry.value)} ; {annotation}")
        lines.append("")
    return "\n".join(lines)


def default_config_text() -> str:
    """The configuration shipped with the package."""
    return (resources.files("fitsim") / "data" / "default.cfg").read_text(
        encoding="utf-8")


def load_default_config() -> ConfigDocument:
    return parse_config(default_config_text())
