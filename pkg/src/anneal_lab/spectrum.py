"""Schedule scans: eigenvalues, gauge-fixed overlaps, gap features.

A scan walks H(s) over an s grid, diagonalizing at every point and
sign-fixing the ground vector so consecutive vectors overlap positively,
seeded by the all-positive uniform state at s=0.  The grid self-refines
where the ground vector turns quickly or the gap dips, so narrow avoided
crossings are neither missed nor crossed with an ambiguous gauge.

Gap features are interior local minima of the gap curve that are
prominent relative to their flanking maxima.  A dedicated relative
prominence threshold (default 2%) screens out sub-percent undulations of
the gap curve near the end of the schedule, which are not level
crossings; genuine crossings narrow the gap by far more than that.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .optimize import golden_min

BASE_GRID_POINTS = 201
OVERLAP_REFINE_THRESHOLD = 0.5
DIP_REFINE_FACTOR = 10.0
MIN_PROMINENCE_DEFAULT = 0.02
DEGENERATE_GAP = 1e-12


class ScanError(ValueError):
    pass


def eigensolve(H, k=None):
    """Ascending eigenvalues and orthonormal vectors of a symmetric matrix."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ScanError("eigensolve needs a square matrix")
    if not np.allclose(H, H.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(H).max())):
        raise ScanError("eigensolve needs a symmetric matrix")
    vals, vecs = np.linalg.eigh(H)
    if k is not None:
        vals = vals[:k]
        vecs = vecs[:, :k]
    return vals, vecs


def gap01(system, s):
    """E_1(s) - E_0(s) by dense diagonalization."""
    vals = np.linalg.eigvalsh(system.h_of_s(s))
    return vals[1] - vals[0]


@dataclass(frozen=True)
class GapFeature:
    location: float
    value: float
    kind: str  # "primary_crossing" | "secondary_minimum" | "boundary"
    degenerate: bool = False


@dataclass
class SpectrumScan:
    s_grid: np.ndarray
    levels: np.ndarray          # (npoints, k_levels)
    gap01: np.ndarray
    overlaps: np.ndarray        # (npoints, n_tracked), signed, gauge-fixed
    tracked_names: tuple
    ground_vectors: list = field(repr=False, default_factory=list)

    @property
    def npoints(self):
        return len(self.s_grid)


class _Node:
    __slots__ = ("s", "vals", "gvec")

    def __init__(self, s, vals, gvec):
        self.s = s
        self.vals = vals
        self.gvec = gvec


def _solve_node(system, s, k_levels):
    vals, vecs = eigensolve(system.h_of_s(s), k=k_levels)
    return _Node(s, vals, vecs[:, 0].copy())


def scan_spectrum(system, s_grid=None, k_levels=4, min_ds=1e-12,
                  dip_min_ds=1e-7, max_points=20000):
    """Scan H(s) over a self-refining grid; returns a SpectrumScan.

    Refinement inserts midpoints wherever consecutive ground vectors
    overlap below 0.5 in magnitude (down to min_ds) or the gap dips below
    10x its grid-neighborhood median (down to dip_min_ds, enough to
    bracket features for later golden refinement).
    """
    if s_grid is None:
        s_grid = np.linspace(0.0, 1.0, BASE_GRID_POINTS)
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.min() < 0.0 or s_grid.max() > 1.0:
        raise ScanError("scan grid must lie within [0, 1]")
    if np.any(np.diff(s_grid) <= 0):
        raise ScanError("scan grid must be strictly increasing")
    k_levels = min(int(k_levels), system.dim)
    if k_levels < 2:
        raise ScanError("need at least two levels for a gap curve")

    nodes = [_solve_node(system, s, k_levels) for s in s_grid]

    for _ in range(120):
        if len(nodes) >= max_points:
            break
        gaps = np.array([nd.vals[1] - nd.vals[0] for nd in nodes])
        inserts = []
        for i in range(len(nodes) - 1):
            a, b = nodes[i], nodes[i + 1]
            ds = b.s - a.s
            if ds <= min_ds:
                continue
            if abs(np.dot(a.gvec, b.gvec)) < OVERLAP_REFINE_THRESHOLD:
                inserts.append(i)
                continue
            if ds > dip_min_ds:
                lo = max(0, i - 5)
                hi = min(len(nodes), i + 7)
                med = np.median(gaps[lo:hi])
                if min(gaps[i], gaps[i + 1]) < med / DIP_REFINE_FACTOR:
                    inserts.append(i)
        if not inserts:
            break
        for i in reversed(inserts):
            mid = 0.5 * (nodes[i].s + nodes[i + 1].s)
            nodes.insert(i + 1, _solve_node(system, mid, k_levels))

    # one sequential sign-fix pass in increasing s
    prev = system.uniform_state()
    for nd in nodes:
        if np.dot(nd.gvec, prev) < 0.0:
            nd.gvec = -nd.gvec
        prev = nd.gvec

    tracked = system.tracked_indices()
    names = tuple("E%d" % a for a in range(len(tracked)))
    s_arr = np.array([nd.s for nd in nodes])
    levels = np.array([nd.vals for nd in nodes])
    gaps = levels[:, 1] - levels[:, 0]
    overlaps = np.array([[nd.gvec[i] for i in tracked] for nd in nodes])
    return SpectrumScan(s_arr, levels, gaps, overlaps, names,
                        [nd.gvec for nd in nodes])


def _raw_minima_indices(gap):
    out = []
    for k in range(1, len(gap) - 1):
        if gap[k] <= gap[k - 1] and gap[k] <= gap[k + 1] \
                and (gap[k] < gap[k - 1] or gap[k] < gap[k + 1]):
            out.append(k)
    return out


def _prominence(gap, minima, which):
    k = minima[which]
    left_stop = minima[which - 1] if which > 0 else 0
    right_stop = minima[which + 1] if which + 1 < len(minima) else len(gap) - 1
    left_peak = gap[left_stop:k + 1].max()
    right_peak = gap[k:right_stop + 1].max()
    shoulder = min(left_peak, right_peak)
    if shoulder <= 0.0:
        return 0.0
    return 1.0 - gap[k] / shoulder


def reference_crossing_location(system):
    """Location of the catalyst-free gap minimum, or None if featureless."""
    base = system if system.jxx == 0.0 else system.catalyst_free()
    scan = scan_spectrum(base, k_levels=2)
    feats = find_gap_minima(base, scan, reference_sx=-1.0)
    if not feats:
        return None
    deepest = min(feats, key=lambda f: f.value)
    return deepest.location


def find_gap_minima(system, scan, refine_tol=1e-6,
                    min_prominence=MIN_PROMINENCE_DEFAULT, reference_sx=None):
    """Detect and refine interior gap minima; label them against s_x.

    The feature nearest the catalyst-free crossing location is the
    primary crossing; every other feature is a secondary minimum.  With
    reference_sx=None the reference is computed from a catalyst-free scan
    of the same instance (pass it explicitly in sweeps to avoid repeated
    work; pass any negative value to force deepest-is-primary labeling).
    Returns features sorted by location.
    """
    gap = scan.gap01
    if scan.npoints < 3:
        warnings.warn("scan grid too coarse to bracket gap features")
        return []
    minima = _raw_minima_indices(gap)
    kept = []
    for which, k in enumerate(minima):
        if min_prominence > 0.0 and _prominence(gap, minima, which) < min_prominence:
            continue
        kept.append(k)
    if not kept:
        return []

    refined = []
    for k in kept:
        a = scan.s_grid[k - 1]
        b = scan.s_grid[k + 1]
        loc, val = golden_min(lambda s: gap01(system, s), a, b, tol=refine_tol)
        refined.append((loc, val))

    if reference_sx is None:
        if system.jxx == 0.0:
            reference_sx = -1.0
        else:
            reference_sx = reference_crossing_location(system)
    if reference_sx is None or reference_sx < 0.0:
        primary_idx = int(np.argmin([v for _, v in refined]))
    else:
        primary_idx = int(np.argmin([abs(loc - reference_sx) for loc, _ in refined]))

    feats = []
    for i, (loc, val) in enumerate(refined):
        kind = "primary_crossing" if i == primary_idx else "secondary_minimum"
        feats.append(GapFeature(float(loc), float(val), kind,
                                degenerate=bool(val < DEGENERATE_GAP)))
    feats.sort(key=lambda f: f.location)
    return feats


def _regauge(system, s, anchor):
    _, vecs = eigensolve(system.h_of_s(s), k=1)
    g = vecs[:, 0]
    if np.dot(g, anchor) < 0.0:
        g = -g
    return g


def locate_sign_change(system, scan, tol=1e-6):
    """Smallest s where a tracked ground-overlap crosses zero from above.

    Returns (s_minus, component_name) or None.  Only the two lowest
    problem states are watched, matching the diagnostic's definition.
    """
    best = None
    ncols = min(2, scan.overlaps.shape[1])
    for j in range(ncols):
        ov = scan.overlaps[:, j]
        for k in range(1, scan.npoints):
            if ov[k - 1] > 0.0 >= ov[k]:
                if best is None or scan.s_grid[k - 1] < best[0]:
                    best = (scan.s_grid[k - 1], scan.s_grid[k], k, j)
                break
    if best is None:
        return None
    a, b, k, j = best
    tracked = system.tracked_indices()
    anchor = scan.ground_vectors[k - 1]
    while b - a > tol:
        m = 0.5 * (a + b)
        g = _regauge(system, m, anchor)
        if g[tracked[j]] > 0.0:
            a, anchor = m, g
        else:
            b = m
    return 0.5 * (a + b), scan.tracked_names[j]


def min_gap_over(system, s_lo=0.0, s_hi=1.0, coarse=400, tol=1e-13):
    """Global minimum of the gap curve over [s_lo, s_hi], deeply refined.

    Used for closing searches, where the bottom of the near-degenerate V
    must be resolved far below the feature-location tolerance.
    """
    sg = np.linspace(s_lo, s_hi, coarse)
    g = np.array([gap01(system, s) for s in sg])
    k = int(np.argmin(g))
    a = sg[max(k - 1, 0)]
    b = sg[min(k + 1, coarse - 1)]
    return golden_min(lambda s: gap01(system, s), a, b, tol=tol)


def write_spectrum_csv(scan, path):
    from .io import write_csv, fmt
    k = scan.levels.shape[1]
    header = ["s"] + ["E%d" % a for a in range(k)] + ["gap01"] \
        + ["ov_%s" % nm for nm in scan.tracked_names]
    rows = []
    for i in range(scan.npoints):
        row = [fmt(scan.s_grid[i])]
        row += [fmt(x) for x in scan.levels[i]]
        row.append(fmt(scan.gap01[i]))
        row += [fmt(x) for x in scan.overlaps[i]]
        rows.append(row)
    write_csv(path, header, rows)
