"""Flat ``key = value`` experiment configuration.

Keys mirror the ScenarioConfig and DetectorParams field names, plus the
experiment-level keys ``trials``, ``base_seed``, ``areas``, ``detectors``
and ``poisson_sweep``. Example::

    n_aps = 40
    n_users = 32
    area = 10
    detectors = mp:random_async, cg, gamp, admm
    trials = 50
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field

from ..detectors import DetectorParams
from ..geometry import ScenarioConfig

_SECTION = "experiment"
_EXPERIMENT_KEYS = {"trials", "base_seed", "tol", "areas", "detectors", "poisson_sweep", "workers"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    detectors: list = field(default_factory=lambda: [DetectorParams()])
    trials: int = 1
    base_seed: int = 0
    tol: float = 1e-4
    areas: list = field(default_factory=list)
    poisson_sweep: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        # the experiment tolerance is also every detector's stop rule
        self.detectors = [dataclasses.replace(d, tol=self.tol) for d in self.detectors]


def _convert(raw: str, like, key: str):
    try:
        if isinstance(like, bool):
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
        return raw.strip().strip('"')
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from exc


def parse_areas(text: str) -> list[float]:
    try:
        areas = [float(a) for a in text.split(",") if a.strip()]
    except ValueError as exc:
        raise ConfigError(f"areas: cannot parse {text!r}") from exc
    if not areas or any(a <= 0 for a in areas):
        raise ConfigError("areas must be a nonempty list of positive numbers")
    return areas


def parse_detectors(text: str, base: DetectorParams) -> list[DetectorParams]:
    """``mp:random_async, cg`` -> one DetectorParams per entry."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        algo, _, schedule = item.partition(":")
        try:
            out.append(dataclasses.replace(base, algo=algo, schedule=schedule or base.schedule))
        except ValueError as exc:
            raise ConfigError(f"detectors: {exc}") from exc
    if not out:
        raise ConfigError("detectors list is empty")
    return out


def parse_config_text(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    if not text.lstrip().startswith("["):
        text = f"[{_SECTION}]\n" + text
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    items = {}
    for section in cp.sections():
        items.update(cp.items(section))

    scen_fields = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
    det_fields = {f.name: f for f in dataclasses.fields(DetectorParams)}
    scen_defaults, det_defaults = ScenarioConfig(), DetectorParams()
    scen_kw, det_kw, exp_kw = {}, {}, {}
    for key, raw in items.items():
        if key in scen_fields:
            scen_kw[key] = _convert(raw, getattr(scen_defaults, key), key)
        elif key in det_fields:
            det_kw[key] = _convert(raw, getattr(det_defaults, key), key)
        elif key in _EXPERIMENT_KEYS:
            exp_kw[key] = raw
        else:
            raise ConfigError(f"unknown config key {key!r}")

    try:
        scenario = ScenarioConfig(**scen_kw)
        base = DetectorParams(**det_kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    detectors = parse_detectors(exp_kw["detectors"], base) if "detectors" in exp_kw else [base]
    kw = {}
    for key, like in (("trials", 1), ("base_seed", 0), ("workers", 1), ("tol", base.tol)):
        if key in exp_kw:
            kw[key] = _convert(exp_kw[key], like, key)
    if "tol" not in kw:
        kw["tol"] = base.tol
    if "poisson_sweep" in exp_kw:
        kw["poisson_sweep"] = _convert(exp_kw["poisson_sweep"], True, "poisson_sweep")
    if "areas" in exp_kw:
        kw["areas"] = parse_areas(exp_kw["areas"])
    return ExperimentConfig(scenario=scenario, detectors=detectors, **kw)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)
