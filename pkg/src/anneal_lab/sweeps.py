"""Parameter studies built on top of the spectrum scanner.

Covers catalyst-strength sweeps, search for gap-maximizing and gap-closing
couplings, calibration of the raw penalty coupling to a target crossing
location, system-size scaling runs, and the weight-splitting study that maps
out where the two gap-closing branches merge and disappear.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import eigsh

from .io import write_csv
from .mwis import E_SCALE_DEFAULT, IsingEncoding, build_instance, encode, problem_energies
from .operators import FULL_SPACE_CAP, CatalystSpec, FullSystem, catalyst_pair
from .optimize import golden_max, golden_min
from .sector import SectorSystem
from .spectrum import find_gap_minima, gap01, locate_sign_change, min_gap_over, scan_spectrum

__all__ = [
    "SweepError",
    "SweepRecord",
    "ScalingRecord",
    "IntermediateRecord",
    "JxxOptimum",
    "ClosingSearch",
    "STRONG_SCALING_PARAMS",
    "WEAK_SCALING_PARAMS",
    "make_system",
    "catalyst_sweep",
    "optimize_jxx",
    "find_closing_jxx",
    "calibrate_jzz",
    "scaling_study",
    "intermediate_regime_study",
    "write_sweep_csv",
    "write_scaling_csv",
    "write_intermediate_csv",
]

# (delta_w, jzz_raw) pairs that put the catalyst-free crossing at s = 0.9
# on the 5-vertex reference instance.  "Strong" and "weak" refer to how
# severely the minimum gap shrinks with system size.
STRONG_SCALING_PARAMS = (0.01, 5.33)
WEAK_SCALING_PARAMS = (0.37, 37.5)

COARSE_JXX_STEP = 0.02
CLOSING_GAP_FACTOR = 1e-8
DENSE_DIM_LIMIT = 1024


class SweepError(RuntimeError):
    pass


def make_system(encoding: IsingEncoding, spec: CatalystSpec | None = None,
                force_sector: bool = False):
    """Full-space operators up to the dense cap, symmetric sector beyond."""
    if force_sector or encoding.instance.n > FULL_SPACE_CAP:
        return SectorSystem(encoding, spec)
    return FullSystem(encoding, spec)


# ---------------------------------------------------------------------------
# catalyst sweep


@dataclass(frozen=True)
class SweepRecord:
    """One row of a catalyst-strength sweep.

    ``sx`` tracks the crossing inherited from the catalyst-free problem and
    ``sn`` the earlier catalyst-induced minimum when one exists.  ``s_minus``
    is where a tracked ground-vector component first turns negative, with
    ``crossed_component`` naming the component (or "none").
    """

    jxx: float
    sx: float
    gap_at_sx: float
    sn: float | None
    gap_at_sn: float | None
    s_minus: float | None
    crossed_component: str


def _reference_sx(encoding: IsingEncoding, force_sector: bool = False) -> float:
    free = make_system(encoding, None, force_sector)
    scan = scan_spectrum(free, k_levels=2)
    feats = find_gap_minima(free, scan, reference_sx=-1.0)
    for f in feats:
        if f.kind == "primary_crossing":
            return f.location
    return -1.0


def _split_features(feats):
    """Pick the primary feature and the deepest earlier secondary minimum."""
    primary = None
    for f in feats:
        if f.kind == "primary_crossing":
            primary = f
            break
    cut = primary.location if primary is not None else np.inf
    secondaries = [f for f in feats if f.kind == "secondary_minimum" and f.location < cut]
    secondary = min(secondaries, key=lambda f: f.value) if secondaries else None
    return primary, secondary


def _sweep_point(encoding, pair, jxx, ref, force_sector):
    spec = CatalystSpec(pairs=(pair,), jxx=float(jxx))
    system = make_system(encoding, spec, force_sector)
    scan = scan_spectrum(system)
    feats = find_gap_minima(system, scan, reference_sx=ref)
    primary, secondary = _split_features(feats)
    if primary is not None:
        sx, gap_sx = primary.location, primary.value
    else:
        i = int(np.argmin(scan.gap01))
        sx, gap_sx = float(scan.s_grid[i]), float(scan.gap01[i])
    hit = locate_sign_change(system, scan)
    s_minus, crossed = (hit[0], hit[1]) if hit is not None else (None, "none")
    return SweepRecord(
        jxx=float(jxx),
        sx=sx,
        gap_at_sx=gap_sx,
        sn=None if secondary is None else secondary.location,
        gap_at_sn=None if secondary is None else secondary.value,
        s_minus=s_minus,
        crossed_component=crossed,
    )


def catalyst_sweep(
    encoding: IsingEncoding,
    pair: tuple[int, int] | None = None,
    jxx_grid: np.ndarray | None = None,
    threads: int = 1,
    force_sector: bool = False,
) -> list[SweepRecord]:
    """Scan, locate features, and test for sign changes at each coupling.

    Sweep points are independent; with threads > 1 they run on a thread pool
    and the records come back in grid order either way.
    """
    if pair is None:
        pair = catalyst_pair(encoding.instance)
    if jxx_grid is None:
        jxx_grid = np.arange(0.0, 3.0 + 1e-9, COARSE_JXX_STEP)
    ref = _reference_sx(encoding, force_sector)
    if threads <= 1:
        return [_sweep_point(encoding, pair, j, ref, force_sector) for j in jxx_grid]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(_sweep_point, encoding, pair, j, ref, force_sector)
                for j in jxx_grid]
        return [f.result() for f in futs]


# ---------------------------------------------------------------------------
# coupling optimization and closing search


@dataclass(frozen=True)
class JxxOptimum:
    jxx: float
    gap: float
    boundary: bool


def _primary_gap_fn(encoding, pair, ref, force_sector):
    def f(jxx: float) -> float:
        spec = CatalystSpec(pairs=(pair,), jxx=float(jxx))
        system = make_system(encoding, spec, force_sector)
        scan = scan_spectrum(system, k_levels=2)
        feats = find_gap_minima(system, scan, reference_sx=ref)
        primary, _ = _split_features(feats)
        if primary is not None:
            return primary.value
        return float(np.min(scan.gap01))
    return f


def optimize_jxx(
    encoding: IsingEncoding,
    pair: tuple[int, int] | None = None,
    bounds: tuple[float, float] = (0.0, 3.0),
    coarse_step: float = COARSE_JXX_STEP,
    tol: float = 1e-4,
    force_sector: bool = False,
) -> JxxOptimum:
    """Coupling that maximizes the gap at the primary crossing.

    A coarse grid over ``bounds`` brackets the maximum, golden-section search
    then refines it to ``tol``.  If the coarse maximum sits on a bound the
    grid value is returned with the boundary flag set.
    """
    if pair is None:
        pair = catalyst_pair(encoding.instance)
    ref = _reference_sx(encoding, force_sector)
    f = _primary_gap_fn(encoding, pair, ref, force_sector)
    grid = np.arange(bounds[0], bounds[1] + 1e-9, coarse_step)
    vals = np.array([f(j) for j in grid])
    i = int(np.argmax(vals))
    if i == 0 or i == grid.size - 1:
        return JxxOptimum(jxx=float(grid[i]), gap=float(vals[i]), boundary=True)
    x, fx = golden_max(f, float(grid[i - 1]), float(grid[i + 1]), tol=tol)
    if fx < vals[i]:
        x, fx = float(grid[i]), float(vals[i])
    return JxxOptimum(jxx=x, gap=fx, boundary=False)


@dataclass(frozen=True)
class ClosingSearch:
    """Outcome of a gap-closing search over the coupling strength.

    ``closed`` is True only when the refined minimum gap falls below
    ``threshold``; ``jxx`` and ``s_feature`` then give the closing coupling
    and the schedule location of the (near-)degeneracy.
    """

    kind: str
    jxx: float | None
    gap: float | None
    s_feature: float | None
    closed: bool
    threshold: float


def _feature_gap_fn(encoding, pair, kind, ref, deep):
    """Objective: gap at the requested feature kind, or inf when absent.

    With ``deep`` the bottom of the dip is re-resolved far below the feature
    location tolerance, which matters within a razor-thin closing.
    """
    def f(jxx: float):
        spec = CatalystSpec(pairs=(pair,), jxx=float(jxx))
        system = make_system(encoding, spec)
        scan = scan_spectrum(system, k_levels=2)
        feats = find_gap_minima(system, scan, reference_sx=ref)
        primary, secondary = _split_features(feats)
        feat = primary if kind == "primary_crossing" else secondary
        if feat is None:
            return np.inf, None
        if not deep:
            return feat.value, feat.location
        lo = max(feat.location - 2e-3, 0.0)
        hi = min(feat.location + 2e-3, 1.0)
        s_min, g_min = min_gap_over(system, lo, hi, coarse=40, tol=1e-13)
        return g_min, s_min
    return f


def find_closing_jxx(
    encoding: IsingEncoding,
    pair: tuple[int, int] | None = None,
    which: str = "primary_crossing",
    bounds: tuple[float, float] = (0.0, 3.0),
    coarse_step: float = COARSE_JXX_STEP,
    jxx_tol: float = 1e-4,
) -> ClosingSearch:
    """Coupling that minimizes the gap at a feature, tested for closure.

    The closing is declared only if the refined gap drops below
    1e-8 * n * e_scale.  A coarse profile with no interior dip (the
    weak-scaling setting, or a feature that never appears) yields
    ``jxx=None``.
    """
    if which not in ("primary_crossing", "secondary_minimum"):
        raise SweepError(f"unknown feature kind {which!r}")
    if pair is None:
        pair = catalyst_pair(encoding.instance)
    inst = encoding.instance
    threshold = CLOSING_GAP_FACTOR * inst.n * inst.e_scale
    ref = _reference_sx(encoding)
    shallow = _feature_gap_fn(encoding, pair, which, ref, deep=False)
    grid = np.arange(bounds[0], bounds[1] + 1e-9, coarse_step)
    vals = np.array([shallow(j)[0] for j in grid])
    finite = np.isfinite(vals)
    if not finite.any():
        return ClosingSearch(which, None, None, None, False, threshold)
    i = int(np.argmin(np.where(finite, vals, np.inf)))
    interior = 0 < i < grid.size - 1 and finite[i - 1] and finite[i + 1]
    if not interior:
        return ClosingSearch(which, None, None, None, False, threshold)
    deep = _feature_gap_fn(encoding, pair, which, ref, deep=True)
    jxx_min, gap_min = golden_min(
        lambda j: deep(j)[0], float(grid[i - 1]), float(grid[i + 1]), tol=jxx_tol * 1e-2
    )
    _, s_feat = deep(jxx_min)
    closed = bool(gap_min < threshold)
    return ClosingSearch(which, float(jxx_min), float(gap_min), s_feat, closed, threshold)


# ---------------------------------------------------------------------------
# penalty calibration


def calibrate_jzz(
    sizes: tuple[int, ...] = (2, 3),
    delta_w: float = 0.01,
    target_sx: float = 0.9,
    jzz_bracket: tuple[float, float] = (1.0, 200.0),
    tol: float = 1e-3,
    e_scale: float = E_SCALE_DEFAULT,
    max_iter: int = 80,
) -> float:
    """Raw penalty coupling placing the catalyst-free crossing at target_sx.

    The crossing location increases monotonically with the raw coupling
    (checked on the bracket ends), so a plain bisection on the response
    suffices.
    """
    def sx_of(jzz: float) -> float:
        enc = encode(build_instance(sizes, delta_w, jzz, e_scale))
        system = FullSystem(enc)
        scan = scan_spectrum(system, k_levels=2)
        feats = find_gap_minima(system, scan, reference_sx=-1.0)
        for f in feats:
            if f.kind == "primary_crossing":
                return f.location
        raise SweepError(
            f"no interior crossing at jzz_raw={jzz:.6g} (delta_w={delta_w}); "
            "widen or shift the calibration bracket"
        )

    lo, hi = jzz_bracket
    s_lo, s_hi = sx_of(lo), sx_of(hi)
    if not (s_lo < target_sx < s_hi):
        raise SweepError(
            f"target s_x={target_sx} not bracketed: s_x({lo})={s_lo:.4f}, "
            f"s_x({hi})={s_hi:.4f}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        s_mid = sx_of(mid)
        if abs(s_mid - target_sx) <= tol:
            return mid
        if s_mid > target_sx:
            hi = mid
        else:
            lo = mid
    raise SweepError(f"calibration did not converge within {max_iter} bisections")


# ---------------------------------------------------------------------------
# scaling study


@dataclass(frozen=True)
class ScalingRecord:
    n: int
    n0: int
    n1: int
    jxx_used: float
    min_gap: float


_SETTINGS = {
    "sgs": (STRONG_SCALING_PARAMS, False),
    "wgs": (WEAK_SCALING_PARAMS, False),
    "no-ac": (STRONG_SCALING_PARAMS, True),
}


class _SparseFull:
    """Sparse full-space gap evaluator for dimensions past the dense limit."""

    def __init__(self, encoding: IsingEncoding, spec: CatalystSpec | None = None):
        n = encoding.instance.n
        dim = 1 << n
        idx = np.arange(dim)
        rows = np.repeat(idx, n)
        cols = (idx[:, None] ^ (1 << np.arange(n))[None, :]).ravel()
        self._hd = sparse.csr_matrix(
            (np.full(rows.size, -1.0), (rows, cols)), shape=(dim, dim)
        )
        self._hc = None
        if spec is not None and spec.jxx != 0.0:
            j, k = spec.pairs[0]
            flip = (1 << j) | (1 << k)
            self._hc = sparse.csr_matrix(
                (np.full(dim, spec.jxx), (idx, idx ^ flip)), shape=(dim, dim)
            )
        self._diag = problem_energies(encoding)
        self._v0 = np.full(dim, 1.0 / np.sqrt(dim))
        self.dim = dim

    def gap01(self, s: float) -> float:
        h = (1.0 - s) * self._hd + sparse.diags(s * self._diag)
        if self._hc is not None:
            h = h + (s * (1.0 - s)) * self._hc
        vals = eigsh(
            h, k=2, which="SA", v0=self._v0, ncv=min(self.dim, 64),
            maxiter=20000, return_eigenvectors=False,
        )
        vals = np.sort(vals)
        return float(vals[1] - vals[0])


def _min_over_window(f, lo: float, hi: float, coarse: int = 40, tol: float = 1e-12):
    xs = np.linspace(lo, hi, coarse)
    ys = np.array([f(x) for x in xs])
    k = int(np.argmin(ys))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, coarse - 1)]
    return golden_min(f, float(a), float(b), tol=tol)


def _scaling_min_gap(encoding: IsingEncoding, spec: CatalystSpec | None) -> float:
    """Minimum gap over the schedule: sector scan locates, full space refines.

    The sector carries the relevant low levels exactly, so its scan supplies
    candidate locations; up to the full-space cap each candidate window is
    then re-minimized against the full operator (dense below 2^10, sparse
    Lanczos beyond).
    """
    inst = encoding.instance
    sector = SectorSystem(encoding, spec)
    scan = scan_spectrum(sector, k_levels=2)
    feats = find_gap_minima(sector, scan, reference_sx=-1.0)
    cands = [f.location for f in feats]
    cands.append(float(scan.s_grid[int(np.argmin(scan.gap01))]))
    cands.sort()
    merged: list[float] = []
    for c in cands:
        if not merged or c - merged[-1] > 2e-3:
            merged.append(c)

    if inst.n <= FULL_SPACE_CAP:
        dim = 1 << inst.n
        if dim <= DENSE_DIM_LIMIT:
            full = FullSystem(encoding, spec)
            f = lambda s: gap01(full, s)
        else:
            f = _SparseFull(encoding, spec).gap01
    else:
        f = lambda s: gap01(sector, s)

    best = np.inf
    for c in merged:
        lo = max(c - 5e-3, 0.0)
        hi = min(c + 5e-3, 1.0)
        _, g = _min_over_window(f, lo, hi, coarse=40, tol=1e-12)
        best = min(best, g)
    return float(best)


def scaling_study(
    setting: str,
    n_list: tuple[int, ...] = (5, 7, 9, 11, 13),
    jxx_policy: str = "none",
    jxx_fixed: float | None = None,
    delta_w: float | None = None,
    jzz_raw: float | None = None,
    e_scale: float = E_SCALE_DEFAULT,
) -> list[ScalingRecord]:
    """Minimum gap versus system size at fixed 5-vertex-calibrated weights.

    ``setting`` picks the parameter family: "sgs" and "wgs" grow the
    crossing-producing geometry (smaller sub-graph holds the heavier
    vertices), "no-ac" reverses the sizes as a control.  ``jxx_policy`` is
    "none" (catalyst off), "fixed" (jxx_fixed everywhere), or "optimized"
    (per-n gap-maximizing coupling, warm-started from the previous size).
    """
    key = setting.strip().lower().replace("_", "-")
    if key not in _SETTINGS:
        raise SweepError(f"unknown scaling setting {setting!r}")
    (dw_default, jzz_default), reverse = _SETTINGS[key]
    dw = dw_default if delta_w is None else delta_w
    jzz = jzz_default if jzz_raw is None else jzz_raw
    if jxx_policy not in ("none", "fixed", "optimized"):
        raise SweepError(f"unknown jxx policy {jxx_policy!r}")
    if jxx_policy == "fixed" and jxx_fixed is None:
        raise SweepError("jxx_policy 'fixed' requires jxx_fixed")

    records = []
    prev_opt: float | None = None
    for n in n_list:
        if n % 2 == 0 or n < 3:
            raise SweepError(f"system size must be odd and at least 3, got {n}")
        small, large = (n - 1) // 2, (n + 1) // 2
        sizes = (large, small) if reverse else (small, large)
        enc = encode(build_instance(sizes, dw, jzz, e_scale))
        pair_sub = 0 if reverse else 1
        pair = catalyst_pair(enc.instance, pair_sub)

        if jxx_policy == "none":
            jxx_used = 0.0
        elif jxx_policy == "fixed":
            jxx_used = float(jxx_fixed)
        else:
            if prev_opt is None:
                bounds = (0.0, 3.0)
                step = COARSE_JXX_STEP
            else:
                bounds = (max(prev_opt - 0.4, 0.0), min(prev_opt + 0.4, 3.0))
                step = 0.05
            res = optimize_jxx(enc, pair, bounds=bounds, coarse_step=step,
                               force_sector=True)
            if res.boundary and bounds != (0.0, 3.0):
                res = optimize_jxx(enc, pair, bounds=(0.0, 3.0),
                                   coarse_step=COARSE_JXX_STEP, force_sector=True)
            jxx_used = res.jxx
            prev_opt = res.jxx

        spec = CatalystSpec(pairs=(pair,), jxx=jxx_used) if jxx_used > 0 else None
        min_gap = _scaling_min_gap(enc, spec)
        records.append(ScalingRecord(n=n, n0=sizes[0], n1=sizes[1],
                                     jxx_used=jxx_used, min_gap=min_gap))
    return records


# ---------------------------------------------------------------------------
# intermediate-regime study


@dataclass(frozen=True)
class IntermediateRecord:
    delta_w: float
    jzz_calibrated: float
    jxx_close_primary: float | None
    jxx_close_secondary: float | None


def intermediate_regime_study(
    delta_w_list: tuple[float, ...],
    sizes: tuple[int, ...] = (2, 3),
    target_sx: float = 0.9,
    e_scale: float = E_SCALE_DEFAULT,
) -> list[IntermediateRecord]:
    """Both closing couplings per weight splitting, after recalibration.

    As the splitting grows the two closings approach each other and then
    stop existing altogether; entries are None where no closing survives.
    """
    records = []
    for dw in delta_w_list:
        jzz = calibrate_jzz(sizes=sizes, delta_w=dw, target_sx=target_sx,
                            e_scale=e_scale)
        enc = encode(build_instance(sizes, dw, jzz, e_scale))
        pair = catalyst_pair(enc.instance)
        prim = find_closing_jxx(enc, pair, "primary_crossing")
        sec = find_closing_jxx(enc, pair, "secondary_minimum")
        records.append(IntermediateRecord(
            delta_w=dw,
            jzz_calibrated=jzz,
            jxx_close_primary=prim.jxx if prim.closed else None,
            jxx_close_secondary=sec.jxx if sec.closed else None,
        ))
    return records


# ---------------------------------------------------------------------------
# CSV emitters


def _blank(v):
    return "" if v is None else v


def write_sweep_csv(records, path: str) -> None:
    header = ["jxx", "sx", "gap_at_sx", "sn", "gap_at_sn", "s_minus",
              "crossed_component"]
    rows = (
        [r.jxx, r.sx, r.gap_at_sx, _blank(r.sn), _blank(r.gap_at_sn),
         _blank(r.s_minus), r.crossed_component]
        for r in records
    )
    write_csv(path, header, rows)


def write_scaling_csv(records, path: str) -> None:
    header = ["n", "n0", "n1", "jxx_used", "min_gap"]
    rows = ([r.n, r.n0, r.n1, r.jxx_used, r.min_gap] for r in records)
    write_csv(path, header, rows)


def write_intermediate_csv(records, path: str) -> None:
    header = ["delta_w", "jzz_calibrated", "jxx_close_primary",
              "jxx_close_secondary"]
    rows = (
        [r.delta_w, r.jzz_calibrated, _blank(r.jxx_close_primary),
         _blank(r.jxx_close_secondary)]
        for r in records
    )
    write_csv(path, header, rows)
