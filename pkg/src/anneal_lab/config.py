"""Run configuration: validation, canonical form, and built-in presets.

A run config is a JSON object with five blocks: instance, catalyst, study,
numerics, output.  Validation fills defaults and produces a canonical nested
dict, so a config that round-trips through a manifest reproduces the exact
same resolved settings.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

from .io import load_json
from .mwis import InstanceError, build_instance
from .operators import FULL_SPACE_CAP

__all__ = ["ConfigError", "RunConfig", "validate_config", "load_config",
           "preset_config", "list_presets", "PRESETS"]

STUDY_KINDS = ("spectrum", "sweep", "scaling", "intermediate", "dynamics",
               "perturbation")
MODES = ("auto", "full", "sector")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated, default-filled run description."""

    instance: dict
    catalyst: dict
    study: dict
    numerics: dict
    output: dict

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(self.instance["sizes"])

    @property
    def n(self) -> int:
        return sum(self.instance["sizes"])

    @property
    def study_kind(self) -> str:
        return self.study["kind"]

    def to_dict(self) -> dict:
        return copy.deepcopy({
            "instance": self.instance,
            "catalyst": self.catalyst,
            "study": self.study,
            "numerics": self.numerics,
            "output": self.output,
        })


def _require(block: dict, name: str, key: str):
    if key not in block or block[key] is None:
        raise ConfigError(f"{name} block requires {key!r}")
    return block[key]


def _reject_unknown(block: dict, name: str, allowed: tuple[str, ...]) -> None:
    extra = set(block) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {name} block: {sorted(extra)}")


def _validate_instance(raw: dict) -> dict:
    _reject_unknown(raw, "instance",
                    ("sizes", "delta_w", "jzz_raw", "calibrate", "e_scale",
                     "weights"))
    sizes = _require(raw, "instance", "sizes")
    if not isinstance(sizes, (list, tuple)) or len(sizes) < 2:
        raise ConfigError("sizes must list at least two sub-graph sizes")
    if not all(isinstance(v, int) and v >= 1 for v in sizes):
        raise ConfigError("sizes must be positive integers")
    delta_w = float(_require(raw, "instance", "delta_w"))
    e_scale = float(raw.get("e_scale", 15.0))
    jzz_raw = raw.get("jzz_raw")
    calibrate = raw.get("calibrate")
    if (jzz_raw is None) == (calibrate is None):
        raise ConfigError("instance needs exactly one of jzz_raw or calibrate")
    if calibrate is not None:
        _reject_unknown(calibrate, "calibrate", ("target_sx",))
        calibrate = {"target_sx": float(_require(calibrate, "calibrate", "target_sx"))}
    weights = raw.get("weights")
    if weights is not None:
        weights = [float(w) for w in weights]
    out = {
        "sizes": [int(v) for v in sizes],
        "delta_w": delta_w,
        "jzz_raw": None if jzz_raw is None else float(jzz_raw),
        "calibrate": calibrate,
        "e_scale": e_scale,
        "weights": weights,
    }
    if jzz_raw is not None:
        try:
            build_instance(tuple(out["sizes"]), delta_w, float(jzz_raw), e_scale,
                           weights=None if weights is None else tuple(weights))
        except InstanceError as exc:
            raise ConfigError(f"invalid instance parameters: {exc}") from exc
    return out


def _validate_catalyst(raw: dict | None, sizes: list[int]) -> dict:
    raw = raw or {}
    _reject_unknown(raw, "catalyst", ("sub_graph", "jxx", "jxx_grid"))
    sub = int(raw.get("sub_graph", 1))
    if not 0 <= sub < len(sizes):
        raise ConfigError(f"catalyst sub_graph {sub} out of range")
    jxx = raw.get("jxx")
    grid = raw.get("jxx_grid")
    if jxx is not None and grid is not None:
        raise ConfigError("catalyst block takes jxx or jxx_grid, not both")
    if (jxx is not None and jxx > 0) or grid is not None:
        if sizes[sub] < 2:
            raise ConfigError(f"catalyst sub_graph {sub} has fewer than two vertices")
    if grid is not None:
        grid = [float(v) for v in grid]
        if len(grid) != 3 or grid[2] <= 0 or grid[1] < grid[0]:
            raise ConfigError("jxx_grid must be [start, stop, step] with step > 0")
    return {
        "sub_graph": sub,
        "jxx": None if jxx is None else float(jxx),
        "jxx_grid": grid,
    }


_STUDY_DEFAULTS: dict[str, dict] = {
    "spectrum": {},
    "sweep": {"grid": [0.0, 3.0, 0.02], "optimize": False, "closings": False},
    "scaling": {"setting": None, "n_list": [5, 7, 9, 11, 13], "policy": "none",
                "jxx_fixed": None, "compare_none": False},
    "intermediate": {"delta_w_list": None, "target_sx": 0.9},
    "dynamics": {"T": None, "checkpoints": 500, "rtol": 1e-10, "atol": 1e-12,
                 "k_levels": 4, "compare_free": False},
    "perturbation": {"lambda_max": 1.0, "lambda_points": 101,
                     "s_window": [0.85, 0.95, 41]},
}


def _validate_study(raw: dict) -> dict:
    kind = _require(raw, "study", "kind")
    if kind not in STUDY_KINDS:
        raise ConfigError(f"unknown study kind {kind!r}; one of {STUDY_KINDS}")
    defaults = _STUDY_DEFAULTS[kind]
    _reject_unknown(raw, "study", ("kind",) + tuple(defaults))
    out = {"kind": kind}
    for key, default in defaults.items():
        out[key] = copy.deepcopy(raw.get(key, default))
    if kind == "scaling":
        if out["setting"] is None:
            raise ConfigError("scaling study requires 'setting'")
        if out["policy"] not in ("none", "fixed", "optimized"):
            raise ConfigError(f"unknown scaling policy {out['policy']!r}")
        if out["policy"] == "fixed" and out["jxx_fixed"] is None:
            raise ConfigError("scaling policy 'fixed' requires jxx_fixed")
        bad = [n for n in out["n_list"] if not isinstance(n, int) or n % 2 == 0]
        if bad:
            raise ConfigError(f"scaling n_list must hold odd integers, got {bad}")
    if kind == "intermediate" and not out["delta_w_list"]:
        raise ConfigError("intermediate study requires a non-empty delta_w_list")
    if kind == "dynamics":
        if out["T"] is None or float(out["T"]) <= 0:
            raise ConfigError("dynamics study requires T > 0")
        out["T"] = float(out["T"])
    return out


def _validate_numerics(raw: dict | None, n: int) -> dict:
    raw = raw or {}
    _reject_unknown(raw, "numerics", ("k_levels", "refine_tol", "mode", "s_points"))
    mode = raw.get("mode", "auto")
    if mode not in MODES:
        raise ConfigError(f"numerics mode must be one of {MODES}, got {mode!r}")
    if mode == "full" and n > FULL_SPACE_CAP:
        raise ConfigError(
            f"full-space mode capped at {FULL_SPACE_CAP} vertices, instance has {n}"
        )
    s_points = int(raw.get("s_points", 201))
    if s_points < 2:
        raise ConfigError("s_points must be at least 2")
    return {
        "k_levels": int(raw.get("k_levels", 4)),
        "refine_tol": float(raw.get("refine_tol", 1e-6)),
        "mode": mode,
        "s_points": s_points,
    }


def _validate_output(raw: dict | None) -> dict:
    raw = raw or {}
    _reject_unknown(raw, "output", ("directory", "formats"))
    formats = raw.get("formats", ["csv", "json"])
    bad = set(formats) - {"csv", "json"}
    if bad:
        raise ConfigError(f"unknown output formats: {sorted(bad)}")
    return {"directory": raw.get("directory"), "formats": list(formats)}


def validate_config(raw: dict) -> RunConfig:
    """Check a raw config dict and fill defaults; idempotent on its output."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(raw, "config",
                    ("instance", "catalyst", "study", "numerics", "output"))
    if "instance" not in raw:
        raise ConfigError("config requires an instance block")
    if "study" not in raw:
        raise ConfigError("config requires a study block")
    instance = _validate_instance(raw["instance"])
    catalyst = _validate_catalyst(raw.get("catalyst"), instance["sizes"])
    study = _validate_study(raw["study"])
    numerics = _validate_numerics(raw.get("numerics"), sum(instance["sizes"]))
    output = _validate_output(raw.get("output"))
    return RunConfig(instance=instance, catalyst=catalyst, study=study,
                     numerics=numerics, output=output)


def load_config(path: str) -> RunConfig:
    """Read a config file; a manifest with an embedded config also works."""
    try:
        raw = load_json(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if isinstance(raw, dict) and "config" in raw and "instance" not in raw:
        raw = raw["config"]
    return validate_config(raw)


# ---------------------------------------------------------------------------
# presets

PRESETS: dict[str, dict] = {
    "sgs5": {
        "instance": {"sizes": [2, 3], "delta_w": 0.01,
                     "calibrate": {"target_sx": 0.9}, "e_scale": 15.0},
        "catalyst": {"sub_graph": 1, "jxx": 0.0},
        "study": {"kind": "spectrum"},
    },
    "wgs5": {
        "instance": {"sizes": [2, 3], "delta_w": 0.37,
                     "calibrate": {"target_sx": 0.9}, "e_scale": 15.0},
        "catalyst": {"sub_graph": 1},
        "study": {"kind": "sweep", "optimize": True, "closings": False},
    },
    "sgs-scaling": {
        "instance": {"sizes": [2, 3], "delta_w": 0.01, "jzz_raw": 5.33,
                     "e_scale": 15.0},
        "study": {"kind": "scaling", "setting": "sgs",
                  "n_list": [5, 7, 9, 11, 13], "policy": "none"},
    },
    "wgs-scaling": {
        "instance": {"sizes": [2, 3], "delta_w": 0.37, "jzz_raw": 37.5,
                     "e_scale": 15.0},
        "study": {"kind": "scaling", "setting": "wgs",
                  "n_list": [5, 7, 9, 11, 13], "policy": "optimized",
                  "compare_none": True},
    },
    "no-ac": {
        "instance": {"sizes": [3, 2], "delta_w": 0.01, "jzz_raw": 5.33,
                     "e_scale": 15.0},
        "catalyst": {"sub_graph": 0, "jxx": 1.5},
        "study": {"kind": "spectrum"},
    },
    "tripartite-243": {
        "instance": {"sizes": [2, 4, 3], "delta_w": 0.01, "jzz_raw": 5.33,
                     "e_scale": 15.0},
        "catalyst": {"sub_graph": 1, "jxx": 1.0},
        "study": {"kind": "spectrum"},
    },
    "diabatic-1000": {
        "instance": {"sizes": [2, 3], "delta_w": 0.01, "jzz_raw": 5.33,
                     "e_scale": 15.0},
        "catalyst": {"sub_graph": 1, "jxx": 1.92},
        "study": {"kind": "dynamics", "T": 1000.0, "compare_free": True},
    },
    "intermediate-regime": {
        "instance": {"sizes": [2, 3], "delta_w": 0.01, "jzz_raw": 5.33,
                     "e_scale": 15.0},
        "study": {"kind": "intermediate",
                  "delta_w_list": [0.01, 0.10, 0.12, 0.16, 0.20],
                  "target_sx": 0.9},
    },
}


def list_presets() -> tuple[str, ...]:
    return tuple(PRESETS)


def preset_config(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(PRESETS)}"
        )
    return validate_config(copy.deepcopy(PRESETS[name]))
