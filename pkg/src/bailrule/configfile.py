"""Sectioned key-value config files, with line-precise diagnostics.

Format: ``[section]`` headers, ``key = value`` entries, ``#``/``;`` comments,
blank lines ignored.  Section names may carry an argument after the first
space (``[municipality north]``).  The parser keeps the line number of every
entry so validation errors can point at the offending line, which stdlib
configparser cannot do once parsing has succeeded.

The loader functions at the bottom turn parsed sections into domain objects:
mechanism parameters (with the cap and political cost optionally derived
from a legislature block), shock distributions, threshold profiles, floors,
sweep plans, and allocation problems.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

from .allocation import AllocationProblem
from .distributions import BetaShock, ShockDistribution, TruncatedExponentialShock, UniformShock
from .errors import ConfigError, ParameterError
from .floors import CustomFloor, EquityFloor, ParallelFloor
from .policy import MechanismParams
from .voting import (
    DiscreteThreshold,
    PoliticalCostSpec,
    UniformThreshold,
    WeightProfile,
    consent_cap_analytic,
    political_cost,
)

__all__ = [
    "Section",
    "ConfigFile",
    "parse_config",
    "load_config",
    "build_mechanism",
    "build_distribution",
    "build_weight_profile",
    "build_floor",
    "build_sweep",
    "build_allocation_problem",
]


@dataclass
class Section:
    name: str
    line: int
    entries: dict = field(default_factory=dict)  # key -> (raw value, line)

    def get(self, key: str, default: str | None = None) -> str | None:
        if key in self.entries:
            return self.entries[key][0]
        return default

    def line_of(self, key: str) -> int:
        return self.entries[key][1] if key in self.entries else self.line


@dataclass
class ConfigFile:
    path: str
    sections: list
    sha256: str

    def find(self, name: str) -> Section | None:
        for s in self.sections:
            if s.name == name:
                return s
        return None

    def require(self, name: str) -> Section:
        sec = self.find(name)
        if sec is None:
            raise ConfigError(f"{self.path}: missing required [{name}] section")
        return sec

    def _err(self, line: int, msg: str) -> ConfigError:
        return ConfigError(f"{self.path}:{line}: {msg}")

    def get_float(self, sec: Section, key: str, default: float | None = None) -> float:
        raw = sec.get(key)
        if raw is None:
            if default is not None:
                return default
            raise self._err(sec.line, f"[{sec.name}] is missing required key '{key}'")
        try:
            if raw.strip().lower() in ("inf", "+inf", "infinity"):
                return math.inf
            return float(raw)
        except ValueError:
            raise self._err(sec.line_of(key), f"'{key}' must be a number, got '{raw}'") from None

    def get_int(self, sec: Section, key: str, default: int | None = None) -> int:
        raw = sec.get(key)
        if raw is None:
            if default is not None:
                return default
            raise self._err(sec.line, f"[{sec.name}] is missing required key '{key}'")
        try:
            return int(raw)
        except ValueError:
            raise self._err(sec.line_of(key), f"'{key}' must be an integer, got '{raw}'") from None

    def get_floats(self, sec: Section, key: str) -> list:
        raw = sec.get(key)
        if raw is None:
            raise self._err(sec.line, f"[{sec.name}] is missing required key '{key}'")
        try:
            return [float(part) for part in raw.split(",") if part.strip()]
        except ValueError:
            raise self._err(
                sec.line_of(key), f"'{key}' must be comma-separated numbers, got '{raw}'"
            ) from None


def parse_config(text: str, path: str = "<config>") -> ConfigFile:
    """Parse config text; raises ConfigError with file:line on bad syntax."""
    sections: list = []
    current: Section | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{path}:{lineno}: unterminated section header '{raw}'")
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"{path}:{lineno}: empty section name")
            current = Section(name=name, line=lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got '{raw}'")
        if current is None:
            raise ConfigError(f"{path}:{lineno}: entry before any [section] header")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in current.entries:
            raise ConfigError(
                f"{path}:{lineno}: duplicate key '{key}' in [{current.name}] "
                f"(first at line {current.entries[key][1]})"
            )
        current.entries[key] = (value.strip(), lineno)
    sha = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return ConfigFile(path=path, sections=sections, sha256=sha)


def load_config(path) -> ConfigFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from None
    return parse_config(text, path=str(path))


def _wrap_param_error(cfg: ConfigFile, sec: Section, exc: ParameterError) -> ConfigError:
    return ConfigError(f"{cfg.path}:{sec.line}: invalid [{sec.name}]: {exc}")


def build_weight_profile(cfg: ConfigFile, T: float) -> WeightProfile | None:
    """WeightProfile from [legislature], or None when the section is absent."""
    sec = cfg.find("legislature")
    if sec is None:
        return None
    family = (sec.get("h_family") or "uniform").lower()
    try:
        if family == "uniform":
            dist = UniformThreshold(
                cfg.get_float(sec, "h_lo", 0.0), cfg.get_float(sec, "h_hi")
            )
        elif family == "discrete":
            dist = DiscreteThreshold(
                cfg.get_floats(sec, "h_atoms"), cfg.get_floats(sec, "h_masses")
            )
        else:
            raise ConfigError(
                f"{cfg.path}:{sec.line_of('h_family')}: unknown h_family '{family}' "
                "(expected uniform or discrete)"
            )
        return WeightProfile(
            w_beneficiary=cfg.get_float(sec, "w_beneficiary"),
            tau=cfg.get_float(sec, "tau"),
            threshold_dist=dist,
            T=T,
        )
    except ParameterError as exc:
        raise _wrap_param_error(cfg, sec, exc) from None


def _derived_omega_T(cfg: ConfigFile) -> float | None:
    sec = cfg.find("legislature")
    if sec is None or sec.get("lambda0") is None:
        return None
    try:
        spec = PoliticalCostSpec(
            lambda0=cfg.get_float(sec, "lambda0"),
            lambda1=cfg.get_float(sec, "lambda1", 0.0),
        )
        return political_cost(spec, cfg.get_float(sec, "salience", 0.0))
    except ParameterError as exc:
        raise _wrap_param_error(cfg, cfg.find("legislature"), exc) from None


def build_mechanism(cfg: ConfigFile) -> MechanismParams:
    """MechanismParams from [mechanism], deriving omega_T and b_bar from the
    legislature block when they are not stated directly."""
    sec = cfg.require("mechanism")
    T = cfg.get_float(sec, "T")
    omega_T = (
        cfg.get_float(sec, "omega_T")
        if sec.get("omega_T") is not None
        else _derived_omega_T(cfg)
    )
    if omega_T is None:
        raise ConfigError(
            f"{cfg.path}:{sec.line}: omega_T missing and no [legislature] "
            "lambda0/lambda1 to derive it from"
        )
    if sec.get("b_bar") is not None:
        b_bar = cfg.get_float(sec, "b_bar")
    else:
        profile = build_weight_profile(cfg, T)
        if profile is None:
            raise ConfigError(
                f"{cfg.path}:{sec.line}: b_bar missing and no [legislature] "
                "section to derive the consent cap from"
            )
        b_bar = consent_cap_analytic(profile)
    try:
        return MechanismParams(
            omega_b=cfg.get_float(sec, "omega_b"),
            c=cfg.get_float(sec, "c"),
            omega_T=omega_T,
            T=T,
            b_bar=b_bar,
            theta_bar=cfg.get_float(sec, "theta_bar"),
        )
    except ParameterError as exc:
        raise _wrap_param_error(cfg, sec, exc) from None


def build_distribution(cfg: ConfigFile, params: MechanismParams) -> ShockDistribution:
    """ShockDistribution from [distribution]; defaults to uniform on the support."""
    sec = cfg.find("distribution")
    family = (sec.get("family") or "uniform").lower() if sec else "uniform"
    try:
        if family == "uniform":
            return UniformShock(params.theta_bar)
        if family == "truncexpon":
            return TruncatedExponentialShock(cfg.get_float(sec, "rate"), params.theta_bar)
        if family == "beta":
            return BetaShock(
                cfg.get_float(sec, "a"), cfg.get_float(sec, "b"), params.theta_bar
            )
    except ParameterError as exc:
        raise _wrap_param_error(cfg, sec, exc) from None
    raise ConfigError(
        f"{cfg.path}:{sec.line_of('family')}: unknown distribution family '{family}' "
        "(expected uniform, truncexpon, or beta)"
    )


def build_floor(cfg: ConfigFile) -> EquityFloor | None:
    """Equity floor from [floor], or None when absent."""
    sec = cfg.find("floor")
    if sec is None:
        return None
    kind = (sec.get("type") or "").lower()
    try:
        if kind == "parallel":
            return ParallelFloor(cfg.get_float(sec, "a"))
        if kind == "custom":
            return CustomFloor(
                tuple(cfg.get_floats(sec, "theta_knots")),
                tuple(cfg.get_floats(sec, "b_values")),
            )
    except ParameterError as exc:
        raise _wrap_param_error(cfg, sec, exc) from None
    raise ConfigError(
        f"{cfg.path}:{sec.line}: [floor] type must be 'parallel' or 'custom', got '{kind}'"
    )


SWEEPABLE = ("omega_T", "b_bar", "T", "tau", "w_B")


@dataclass(frozen=True)
class SweepPlan:
    parameter: str
    values: tuple
    coupled_b_bar: tuple | None = None  # only with parameter == omega_T


def build_sweep(cfg: ConfigFile) -> SweepPlan:
    """Sweep plan from [sweep]: parameter, start/stop/steps, optional coupled cap."""
    sec = cfg.require("sweep")
    parameter = sec.get("parameter")
    if parameter not in SWEEPABLE:
        raise ConfigError(
            f"{cfg.path}:{sec.line_of('parameter')}: parameter must be one of "
            f"{', '.join(SWEEPABLE)}, got '{parameter}'"
        )
    start = cfg.get_float(sec, "start")
    stop = cfg.get_float(sec, "stop")
    steps = cfg.get_int(sec, "steps")
    if steps < 2:
        raise ConfigError(f"{cfg.path}:{sec.line_of('steps')}: steps must be >= 2")
    values = tuple(start + (stop - start) * i / (steps - 1) for i in range(steps))
    coupled = None
    if sec.get("b_bar_start") is not None or sec.get("b_bar_stop") is not None:
        if parameter != "omega_T":
            raise ConfigError(
                f"{cfg.path}:{sec.line}: a coupled b_bar schedule is only valid "
                "when sweeping omega_T"
            )
        c_start = cfg.get_float(sec, "b_bar_start")
        c_stop = cfg.get_float(sec, "b_bar_stop")
        coupled = tuple(
            c_start + (c_stop - c_start) * i / (steps - 1) for i in range(steps)
        )
    return SweepPlan(parameter=parameter, values=values, coupled_b_bar=coupled)


def build_allocation_problem(cfg: ConfigFile) -> tuple[AllocationProblem, list]:
    """AllocationProblem from [treasury] + [municipality NAME] sections.

    Returns the problem plus the municipality names in section order.
    """
    treasury = cfg.require("treasury")
    budget = cfg.get_float(treasury, "budget")
    names = []
    munis = []
    for sec in cfg.sections:
        if not sec.name.startswith("municipality"):
            continue
        name = sec.name[len("municipality"):].strip() or f"#{len(names) + 1}"
        try:
            p = MechanismParams(
                omega_b=cfg.get_float(sec, "omega_b"),
                c=cfg.get_float(sec, "c"),
                omega_T=cfg.get_float(sec, "omega_T"),
                T=cfg.get_float(sec, "T"),
                b_bar=cfg.get_float(sec, "b_bar"),
                theta_bar=cfg.get_float(sec, "theta_bar"),
            )
        except ParameterError as exc:
            raise _wrap_param_error(cfg, sec, exc) from None
        theta = cfg.get_float(sec, "theta")
        names.append(name)
        munis.append((p, theta))
    if not munis:
        raise ConfigError(f"{cfg.path}: no [municipality ...] sections found")
    try:
        return AllocationProblem(tuple(munis), budget), names
    except ParameterError as exc:
        raise _wrap_param_error(cfg, treasury, exc) from None
