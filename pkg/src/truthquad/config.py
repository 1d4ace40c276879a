"""JSON scenario configuration: schema validation and scenario construction.

A config file carries a schema version, an identifier, a tagged scenario
block, and a method block (quadrature level/decomposition plus Monte Carlo
sample size, repetitions and seed).  Unknown fields are rejected with their
full path so typos cannot silently change a study.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distributions import MVNormal, Normal, dist_from_json
from .errors import ValidationError
from .grids import Decomposition
from .scenarios import (
    CDEScenario,
    ConfoundingScenario,
    HRScenario,
    LModel,
    RMSTScenario,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class MethodSpec:
    level: int = 20
    decomposition: Decomposition = Decomposition.SPECTRAL
    n_samples: int | None = None
    n_reps: int | None = None
    seed: int | None = None
    hr_t_subset: int = 5

    def require_mc(self) -> tuple[int, int, int]:
        missing = [name for name, v in (("n_samples", self.n_samples),
                                        ("n_reps", self.n_reps),
                                        ("seed", self.seed)) if v is None]
        if missing:
            raise ValidationError(
                f"method block is missing {', '.join(missing)}: Monte Carlo runs must be fully "
                "specified (no silent nondeterminism)"
            )
        return self.n_samples, self.n_reps, self.seed


@dataclass(frozen=True)
class ScenarioConfig:
    config_id: str
    kind: str
    scenario: ConfoundingScenario | CDEScenario | RMSTScenario | HRScenario
    method: MethodSpec


def _check_keys(obj: dict, allowed: set[str], required: set[str], path: str) -> None:
    if not isinstance(obj, dict):
        raise ValidationError(f"{path}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise ValidationError(f"{path}.{sorted(extra)[0]}: unexpected field")
    missing = required - set(obj)
    if missing:
        raise ValidationError(f"{path}.{sorted(missing)[0]}: missing required field")


def _parse_confounding(obj: dict, path: str) -> ConfoundingScenario:
    _check_keys(obj, {"kind", "beta0", "beta1", "beta2", "confounders"},
                {"beta0", "beta1", "beta2", "confounders"}, path)
    conf = obj["confounders"]
    if isinstance(conf, dict):
        confounders = dist_from_json(conf, f"{path}.confounders")
        if not isinstance(confounders, MVNormal):
            confounders = (confounders,)
    elif isinstance(conf, list):
        confounders = tuple(dist_from_json(c, f"{path}.confounders[{i}]")
                            for i, c in enumerate(conf))
    else:
        raise ValidationError(f"{path}.confounders: expected an object or a list of objects")
    return ConfoundingScenario(beta0=float(obj["beta0"]), beta1=float(obj["beta1"]),
                               beta2=np.asarray(obj["beta2"], dtype=float),
                               confounders=confounders)


def _parse_normal_block(obj: dict, path: str, default: Normal) -> Normal:
    if obj is None:
        return default
    _check_keys(obj, {"mu", "sigma2"}, set(), path)
    return Normal(float(obj.get("mu", default.mu)), float(obj.get("sigma2", default.sigma2)))


def _parse_cde(obj: dict, path: str) -> CDEScenario:
    _check_keys(obj, {"kind", "link", "beta", "a", "a_star", "m", "c", "u", "l"}, {"beta"}, path)
    defaults = CDEScenario()
    l_obj = obj.get("l")
    if l_obj is None:
        l_model = defaults.l_model
    else:
        _check_keys(l_obj, {"intercept", "a_coef", "u_coef", "sigma2"}, set(), f"{path}.l")
        l_model = LModel(
            intercept=float(l_obj.get("intercept", 15.0)),
            a_coef=float(l_obj.get("a_coef", 1.0)),
            u_coef=float(l_obj.get("u_coef", 0.1)),
            sigma2=float(l_obj.get("sigma2", 1.0)),
        )
    return CDEScenario(
        link=obj.get("link", defaults.link),
        beta=tuple(float(b) for b in obj["beta"]),
        a=int(obj.get("a", defaults.a)),
        a_star=int(obj.get("a_star", defaults.a_star)),
        m=float(obj.get("m", defaults.m)),
        c_dist=_parse_normal_block(obj.get("c"), f"{path}.c", defaults.c_dist),
        u_dist=_parse_normal_block(obj.get("u"), f"{path}.u", defaults.u_dist),
        l_model=l_model,
    )


def _parse_rmst(obj: dict, path: str) -> RMSTScenario:
    _check_keys(obj, {"kind", "mu0", "mu1", "beta0", "beta_a", "beta_m", "tau"}, set(), path)
    d = RMSTScenario()
    return RMSTScenario(
        mu0=float(obj.get("mu0", d.mu0)),
        mu1=float(obj.get("mu1", d.mu1)),
        beta0=float(obj.get("beta0", d.beta0)),
        beta_a=float(obj.get("beta_a", d.beta_a)),
        beta_m=float(obj.get("beta_m", d.beta_m)),
        tau=float(obj.get("tau", d.tau)),
    )


def _parse_hr(obj: dict, path: str) -> HRScenario:
    _check_keys(obj, {"kind", "alpha0", "alpha_a", "gamma", "lambda", "beta_a", "beta_m", "t_grid"},
                set(), path)
    d = HRScenario()
    t_obj = obj.get("t_grid")
    if t_obj is None:
        t_grid = d.t_grid
    elif isinstance(t_obj, dict):
        _check_keys(t_obj, {"start", "stop", "num"}, {"start", "stop", "num"}, f"{path}.t_grid")
        t_grid = np.linspace(float(t_obj["start"]), float(t_obj["stop"]), int(t_obj["num"]))
    else:
        t_grid = np.asarray(t_obj, dtype=float)
    return HRScenario(
        alpha0=float(obj.get("alpha0", d.alpha0)),
        alpha_a=float(obj.get("alpha_a", d.alpha_a)),
        gamma=float(obj.get("gamma", d.gamma)),
        lam=float(obj.get("lambda", d.lam)),
        beta_a=float(obj.get("beta_a", d.beta_a)),
        beta_m=float(obj.get("beta_m", d.beta_m)),
        t_grid=t_grid,
    )


_PARSERS = {
    "confounding": _parse_confounding,
    "cde": _parse_cde,
    "rmst": _parse_rmst,
    "hr": _parse_hr,
}


def parse_config(obj: dict) -> ScenarioConfig:
    _check_keys(obj, {"schema_version", "id", "scenario", "method"},
                {"schema_version", "id", "scenario"}, "config")
    if obj["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(
            f"config.schema_version: expected {SCHEMA_VERSION}, got {obj['schema_version']!r}"
        )
    scen_obj = obj["scenario"]
    if not isinstance(scen_obj, dict) or "kind" not in scen_obj:
        raise ValidationError("config.scenario.kind: missing required field")
    kind = scen_obj["kind"]
    if kind not in _PARSERS:
        raise ValidationError(
            f"config.scenario.kind: unknown kind {kind!r}; expected one of {sorted(_PARSERS)}"
        )
    scenario = _PARSERS[kind](scen_obj, "config.scenario")

    method_obj = obj.get("method", {})
    _check_keys(method_obj, {"level", "decomposition", "n_samples", "n_reps", "seed", "hr_t_subset"},
                set(), "config.method")
    try:
        decomposition = Decomposition(method_obj.get("decomposition", "spectral"))
    except ValueError as exc:
        raise ValidationError(f"config.method.decomposition: {exc}") from None
    method = MethodSpec(
        level=int(method_obj.get("level", 20)),
        decomposition=decomposition,
        n_samples=None if method_obj.get("n_samples") is None else int(method_obj["n_samples"]),
        n_reps=None if method_obj.get("n_reps") is None else int(method_obj["n_reps"]),
        seed=None if method_obj.get("seed") is None else int(method_obj["seed"]),
        hr_t_subset=int(method_obj.get("hr_t_subset", 5)),
    )
    return ScenarioConfig(config_id=str(obj["id"]), kind=kind, scenario=scenario, method=method)


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(obj)
