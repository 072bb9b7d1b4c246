"""INI-style run configuration and CLI override plumbing.

Sections: ``[grid]`` (n, period), ``[solve]`` (one key per SolveConfig
field), ``[scenario]`` (name, seed, plus free-form scenario parameters),
``[output]`` (root). Every solve key has a CLI flag of the same name.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .solvers import SolveConfig
from .spectral import Grid, make_grid

SCENARIO_NAMES = (
    "energy-bound",
    "picard-convergence",
    "epsilon-cauchy",
    "mollifier-lemma",
    "inequality-suite",
    "vanishing-elevation",
    "continuous-dependence",
    "dispersion-check",
    "model-compare",
)

_SOLVE_KEYS = ("T", "dt", "N", "epsilon", "eta_bar", "dealias", "tol", "max_iter")


@dataclass(frozen=True)
class Settings:
    """Parsed configuration for one run."""

    scenario: str
    grid_n: int = 128
    grid_period: float = 2.0 * math.pi
    solve: SolveConfig = field(default_factory=lambda: SolveConfig(T=1.0, dt=0.005))
    seed: int = 0
    params: dict = field(default_factory=dict)
    out_root: str | None = None

    def grid(self) -> Grid:
        return make_grid(self.grid_n, self.grid_period)


def _parse_bool(text: str, key: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} expects a boolean, got {text!r}")


def _typed(key: str, text: str):
    text = text.strip()
    try:
        if key in ("N", "max_iter"):
            return int(text)
        if key == "dealias":
            return _parse_bool(text, key)
        if key == "eta_bar":
            return None if text == "" or text.lower() == "none" else float(text)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def load_settings(path, scenario: str | None = None) -> Settings:
    """Read an INI file; `scenario` overrides the [scenario] name."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    grid_n, grid_period = 128, 2.0 * math.pi
    if parser.has_section("grid"):
        g = parser["grid"]
        if "n" in g:
            grid_n = int(_typed("T", g["n"]))
        if "period" in g:
            grid_period = float(_typed("T", g["period"]))

    solve_kwargs = {"T": 1.0, "dt": 0.005}
    if parser.has_section("solve"):
        for key, text in parser["solve"].items():
            # configparser lowercases keys; map back to field names
            actual = {k.lower(): k for k in _SOLVE_KEYS}.get(key)
            if actual is None:
                raise ConfigError(f"unknown [solve] key {key!r}")
            solve_kwargs[actual] = _typed(actual, text)
    solve = SolveConfig(**solve_kwargs)

    name = scenario
    seed = 0
    params: dict = {}
    if parser.has_section("scenario"):
        for key, text in parser["scenario"].items():
            if key == "name":
                name = name or text.strip()
            elif key == "seed":
                seed = int(_typed("N", text))
            else:
                params[key] = text.strip()
    if name is None:
        raise ConfigError("no scenario name: pass one or set [scenario] name")
    if name not in SCENARIO_NAMES:
        raise ConfigError(f"unknown scenario {name!r}; choices: "
                          + ", ".join(SCENARIO_NAMES))

    out_root = None
    if parser.has_section("output") and "root" in parser["output"]:
        out_root = parser["output"]["root"].strip()

    return Settings(scenario=name, grid_n=grid_n, grid_period=grid_period,
                    solve=solve, seed=seed, params=params, out_root=out_root)


def default_settings(scenario: str) -> Settings:
    if scenario not in SCENARIO_NAMES:
        raise ConfigError(f"unknown scenario {scenario!r}; choices: "
                          + ", ".join(SCENARIO_NAMES))
    return Settings(scenario=scenario)


def apply_overrides(settings: Settings, grid_n=None, grid_period=None,
                    seed=None, out_root=None, solve_overrides=None,
                    param_overrides=None) -> Settings:
    """Fold CLI flags into parsed settings; flags win over the file."""
    solve = settings.solve
    if solve_overrides:
        bad = set(solve_overrides) - set(_SOLVE_KEYS)
        if bad:
            raise ConfigError(f"unknown solve override(s): {', '.join(sorted(bad))}")
        solve = solve.with_(**solve_overrides)
    params = dict(settings.params)
    if param_overrides:
        for item in param_overrides:
            if "=" not in item:
                raise ConfigError(f"--param expects key=value, got {item!r}")
            key, _, value = item.partition("=")
            # config files go through configparser, which lowercases
            # keys; do the same here so both spellings address one knob
            params[key.strip().lower()] = value.strip()
    return replace(
        settings,
        grid_n=settings.grid_n if grid_n is None else int(grid_n),
        grid_period=settings.grid_period if grid_period is None else float(grid_period),
        seed=settings.seed if seed is None else int(seed),
        out_root=out_root if out_root is not None else settings.out_root,
        solve=solve,
        params=params,
    )


def param_float(params: dict, key: str, default: float) -> float:
    if key not in params:
        return default
    try:
        return float(params[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"scenario parameter {key} expects a float, "
                          f"got {params[key]!r}") from exc


def param_int(params: dict, key: str, default: int) -> int:
    if key not in params:
        return default
    try:
        return int(params[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"scenario parameter {key} expects an int, "
                          f"got {params[key]!r}") from exc


def param_floats(params: dict, key: str, default) -> tuple:
    """Comma-separated float list parameter."""
    if key not in params:
        return tuple(default)
    items = [s for s in str(params[key]).split(",") if s.strip()]
    if not items:
        raise ConfigError(f"scenario parameter {key} is an empty list")
    try:
        return tuple(float(s) for s in items)
    except ValueError as exc:
        raise ConfigError(f"scenario parameter {key} expects floats, "
                          f"got {params[key]!r}") from exc
