"""Command-line front end: one validated config in, one study's files out.

Every study writes CSV tables plus a manifest JSON holding the resolved
config, tool version, and derived scalars.  Feeding the manifest back in as a
config reproduces the run bit for bit.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .config import (ConfigError, RunConfig, list_presets, load_config,
                     preset_config)
from .dynamics import DynamicsError, evolve, write_dynamics_csv
from .io import OUT_DIR_ENV, dump_json
from .mwis import InstanceError, build_instance, encode
from .operators import CatalystSpec, FullSystem, OperatorError, catalyst_pair
from .perturbation import (PerturbationError, driver_pt_energies,
                           ext_set_overlaps, write_ext_mass_csv, write_pt_csv)
from .sector import SectorError, SectorSystem
from .spectrum import (ScanError, find_gap_minima, locate_sign_change,
                       scan_spectrum, write_spectrum_csv)
from .sweeps import (SweepError, calibrate_jzz, catalyst_sweep,
                     find_closing_jxx, intermediate_regime_study, make_system,
                     optimize_jxx, scaling_study, write_intermediate_csv,
                     write_scaling_csv, write_sweep_csv)

__all__ = ["main", "execute", "run"]

NUMERIC_ERRORS = (ScanError, SweepError, DynamicsError, PerturbationError,
                  OperatorError, SectorError, InstanceError,
                  np.linalg.LinAlgError, FloatingPointError)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _build_encoding(cfg: RunConfig, derived: dict):
    icfg = cfg.instance
    if icfg["calibrate"] is not None:
        jzz = calibrate_jzz(
            sizes=tuple(icfg["sizes"]),
            delta_w=icfg["delta_w"],
            target_sx=icfg["calibrate"]["target_sx"],
            e_scale=icfg["e_scale"],
        )
        derived["jzz_calibrated"] = jzz
    else:
        jzz = icfg["jzz_raw"]
    weights = icfg["weights"]
    inst = build_instance(
        tuple(icfg["sizes"]), icfg["delta_w"], jzz, icfg["e_scale"],
        weights=None if weights is None else tuple(weights),
    )
    enc = encode(inst)
    derived["jzz_raw_used"] = jzz
    derived["normalization_k"] = enc.normalization_k
    return enc


def _catalyst_spec(cfg: RunConfig, enc) -> CatalystSpec | None:
    jxx = cfg.catalyst["jxx"]
    if jxx is None or jxx == 0.0:
        return None
    pair = catalyst_pair(enc.instance, cfg.catalyst["sub_graph"])
    return CatalystSpec(pairs=(pair,), jxx=jxx)


def _system_for(cfg: RunConfig, enc, spec):
    mode = cfg.numerics["mode"]
    if mode == "full":
        return FullSystem(enc, spec)
    if mode == "sector":
        return SectorSystem(enc, spec)
    return make_system(enc, spec)


def _run_spectrum(cfg, out_dir, derived, files, threads):
    enc = _build_encoding(cfg, derived)
    spec = _catalyst_spec(cfg, enc)
    system = _system_for(cfg, enc, spec)
    nums = cfg.numerics
    s_grid = np.linspace(0.0, 1.0, nums["s_points"])
    scan = scan_spectrum(system, s_grid=s_grid, k_levels=nums["k_levels"])

    if spec is None:
        ref = -1.0
        ref_feats = None
    else:
        free = system.catalyst_free()
        free_scan = scan_spectrum(free, s_grid=s_grid, k_levels=2)
        ref_feats = find_gap_minima(free, free_scan, refine_tol=nums["refine_tol"],
                                    reference_sx=-1.0)
        ref = ref_feats[0].location if ref_feats else -1.0
        primaries = [f for f in ref_feats if f.kind == "primary_crossing"]
        if primaries:
            ref = primaries[0].location
    feats = find_gap_minima(system, scan, refine_tol=nums["refine_tol"],
                            reference_sx=ref)
    hit = locate_sign_change(system, scan)

    if "csv" in cfg.output["formats"]:
        write_spectrum_csv(scan, os.path.join(out_dir, "spectrum.csv"))
        files.append("spectrum.csv")
    derived["features"] = [asdict(f) for f in feats]
    derived["reference_features"] = (
        [asdict(f) for f in ref_feats] if ref_feats is not None
        else [asdict(f) for f in feats]
    )
    derived["sign_change"] = (
        None if hit is None else {"s": hit[0], "component": hit[1]}
    )
    if "json" in cfg.output["formats"]:
        dump_json(os.path.join(out_dir, "features.json"), _jsonable({
            "features": derived["features"],
            "reference_features": derived["reference_features"],
            "sign_change": derived["sign_change"],
        }))
        files.append("features.json")


def _run_sweep(cfg, out_dir, derived, files, threads):
    enc = _build_encoding(cfg, derived)
    pair = catalyst_pair(enc.instance, cfg.catalyst["sub_graph"])
    grid_spec = cfg.catalyst["jxx_grid"] or cfg.study["grid"]
    start, stop, step = grid_spec
    grid = np.arange(start, stop + 0.5 * step, step)
    records = catalyst_sweep(enc, pair, grid, threads=threads)
    if "csv" in cfg.output["formats"]:
        write_sweep_csv(records, os.path.join(out_dir, "sweep.csv"))
        files.append("sweep.csv")
    derived["reference_sx"] = records[0].sx if records and records[0].jxx == 0.0 else None
    if cfg.study["optimize"]:
        res = optimize_jxx(enc, pair, bounds=(float(start), float(stop)),
                           coarse_step=float(step))
        derived["jxx_opt"] = res.jxx
        derived["gap_opt"] = res.gap
        derived["jxx_opt_boundary"] = res.boundary
    if cfg.study["closings"]:
        out = {}
        for kind in ("primary_crossing", "secondary_minimum"):
            c = find_closing_jxx(enc, pair, kind, bounds=(float(start), float(stop)),
                                 coarse_step=float(step))
            out[kind] = {"jxx": c.jxx, "gap": c.gap, "s_feature": c.s_feature,
                         "closed": c.closed, "threshold": c.threshold}
        derived["closings"] = out


def _run_scaling(cfg, out_dir, derived, files, threads):
    icfg = cfg.instance
    if icfg["calibrate"] is not None:
        jzz = calibrate_jzz(sizes=tuple(icfg["sizes"]), delta_w=icfg["delta_w"],
                            target_sx=icfg["calibrate"]["target_sx"],
                            e_scale=icfg["e_scale"])
        derived["jzz_calibrated"] = jzz
    else:
        jzz = icfg["jzz_raw"]
    st = cfg.study
    records = scaling_study(
        st["setting"], tuple(st["n_list"]), jxx_policy=st["policy"],
        jxx_fixed=st["jxx_fixed"], delta_w=icfg["delta_w"], jzz_raw=jzz,
        e_scale=icfg["e_scale"],
    )
    if "csv" in cfg.output["formats"]:
        write_scaling_csv(records, os.path.join(out_dir, "scaling.csv"))
        files.append("scaling.csv")
    derived["scaling"] = [asdict(r) for r in records]
    if st["compare_none"] and st["policy"] != "none":
        base = scaling_study(
            st["setting"], tuple(st["n_list"]), jxx_policy="none",
            delta_w=icfg["delta_w"], jzz_raw=jzz, e_scale=icfg["e_scale"],
        )
        if "csv" in cfg.output["formats"]:
            write_scaling_csv(base, os.path.join(out_dir, "scaling_none.csv"))
            files.append("scaling_none.csv")
        derived["scaling_none"] = [asdict(r) for r in base]


def _run_intermediate(cfg, out_dir, derived, files, threads):
    st = cfg.study
    records = intermediate_regime_study(
        tuple(float(x) for x in st["delta_w_list"]),
        sizes=cfg.sizes,
        target_sx=st["target_sx"],
        e_scale=cfg.instance["e_scale"],
    )
    if "csv" in cfg.output["formats"]:
        write_intermediate_csv(records, os.path.join(out_dir, "intermediate.csv"))
        files.append("intermediate.csv")
    derived["intermediate"] = [asdict(r) for r in records]


def _run_dynamics(cfg, out_dir, derived, files, threads):
    enc = _build_encoding(cfg, derived)
    spec = _catalyst_spec(cfg, enc)
    st = cfg.study
    sector = cfg.numerics["mode"] == "sector"
    trace = evolve(enc, spec, st["T"], rtol=st["rtol"], atol=st["atol"],
                   checkpoints=st["checkpoints"], k_levels=st["k_levels"],
                   sector=sector)
    if "csv" in cfg.output["formats"]:
        write_dynamics_csv(trace, os.path.join(out_dir, "dynamics.csv"))
        files.append("dynamics.csv")
    derived["final_populations"] = list(trace.final_populations)
    derived["final_ground_population"] = float(trace.final_populations[0])
    if st["compare_free"] and spec is not None:
        free = evolve(enc, None, st["T"], rtol=st["rtol"], atol=st["atol"],
                      checkpoints=st["checkpoints"], k_levels=st["k_levels"],
                      sector=sector)
        if "csv" in cfg.output["formats"]:
            write_dynamics_csv(free, os.path.join(out_dir, "dynamics_free.csv"))
            files.append("dynamics_free.csv")
        derived["final_populations_free"] = list(free.final_populations)
        derived["final_ground_population_free"] = float(free.final_populations[0])


def _run_perturbation(cfg, out_dir, derived, files, threads):
    enc = _build_encoding(cfg, derived)
    spec = _catalyst_spec(cfg, enc)
    st = cfg.study
    lam = np.linspace(0.0, st["lambda_max"], st["lambda_points"])
    pt = driver_pt_energies(enc, lam)
    if "csv" in cfg.output["formats"]:
        write_pt_csv(pt, os.path.join(out_dir, "pt_energies.csv"))
        files.append("pt_energies.csv")
    derived["crossing_lambda"] = pt.crossing_lambda
    derived["pt_slopes"] = list(pt.slopes)
    lo, hi, npts = st["s_window"]
    window = np.linspace(float(lo), float(hi), int(npts))
    dec = ext_set_overlaps(enc, spec, window)
    if "csv" in cfg.output["formats"]:
        write_ext_mass_csv(dec, os.path.join(out_dir, "ext_mass.csv"))
        files.append("ext_mass.csv")
    derived["p0_ext_size"] = len(dec.p0_ext)
    derived["p1_ext_size"] = len(dec.p1_ext)


_RUNNERS = {
    "spectrum": _run_spectrum,
    "sweep": _run_sweep,
    "scaling": _run_scaling,
    "intermediate": _run_intermediate,
    "dynamics": _run_dynamics,
    "perturbation": _run_perturbation,
}


def execute(cfg: RunConfig, out_dir: str, threads: int = 1) -> dict:
    """Run one study and write its outputs plus manifest.json."""
    os.makedirs(out_dir, exist_ok=True)
    derived: dict = {}
    files: list[str] = []
    _RUNNERS[cfg.study_kind](cfg, out_dir, derived, files, threads)
    manifest = {
        "tool": "anneal-lab",
        "version": __version__,
        "config": cfg.to_dict(),
        "derived": _jsonable(derived),
        "outputs": sorted(files),
    }
    dump_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


def run(config_path: str, out_dir: str | None = None, threads: int = 1) -> int:
    """Programmatic equivalent of ``anneal-lab run <config>``."""
    return main(["run", config_path]
                + (["--out", out_dir] if out_dir else [])
                + ["--threads", str(threads)])


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="anneal-lab",
        description="Annealing-spectrum laboratory for weighted independent-set "
                    "instances on complete multipartite graphs.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute one study from a config or preset")
    runp.add_argument("config", nargs="?",
                      help="JSON run config (a manifest.json also works)")
    runp.add_argument("--preset", choices=list_presets(),
                      help="use a built-in configuration")
    runp.add_argument("--out", help="output directory (default: "
                      f"${OUT_DIR_ENV} or the working directory)")
    runp.add_argument("--threads", type=int, default=1,
                      help="worker cap for sweep points")
    runp.add_argument("--seed", type=int, default=None,
                      help="reserved; all computations are deterministic")
    sub.add_parser("list-presets", help="print built-in preset names")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-presets":
        for name in list_presets():
            print(name)
        return 0

    if (args.config is None) == (args.preset is None):
        print("config error: give exactly one of a config path or --preset",
              file=sys.stderr)
        return 1
    try:
        cfg = preset_config(args.preset) if args.preset else load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out_dir = (args.out or os.environ.get(OUT_DIR_ENV)
               or cfg.output["directory"] or os.getcwd())
    try:
        manifest = execute(cfg, out_dir, threads=max(args.threads, 1))
    except NUMERIC_ERRORS as exc:
        os.makedirs(out_dir, exist_ok=True)
        dump_json(os.path.join(out_dir, "diagnostics.json"), {
            "error": type(exc).__name__,
            "message": str(exc),
            "config": cfg.to_dict(),
        })
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(manifest['outputs']) + 1} files to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
