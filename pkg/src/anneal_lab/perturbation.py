"""Analytic estimates for crossing formation and catalyst-induced level shifts.

Two complementary oracles live here.  The first treats the transverse-field
driver as a weak perturbation on the classical problem spectrum and predicts
where the two lowest levels would cross; the second treats the catalyst as a
weak perturbation on the catalyst-free annealing Hamiltonian and returns the
first-order slope of any instantaneous level.  Both are heuristics meant to be
checked against exact scans, never substitutes for them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .io import write_csv
from .mwis import IsingEncoding, enumerate_problem_states, neighbourhood
from .operators import CatalystSpec, FullSystem

__all__ = [
    "PerturbationError",
    "PerturbedEnergies",
    "ExtSetDecomposition",
    "driver_pt_energies",
    "first_order_catalyst_shift",
    "ext_set_overlaps",
    "write_pt_csv",
    "write_ext_mass_csv",
]

NEAR_DEGENERATE_GAP = 1e-8


class PerturbationError(ValueError):
    pass


@dataclass(frozen=True)
class PerturbedEnergies:
    """Second-order energies for a set of levels on a lambda ladder.

    ``energies[i]`` is the curve for ``level_names[i]``; at lambda = 0 each
    curve starts from the exact classical energy.  ``crossing_lambda`` is the
    coupling at which the first two curves meet, when the curvatures allow it.
    """

    lambda_grid: np.ndarray
    level_names: tuple[str, ...]
    energies: np.ndarray
    slopes: tuple[float, ...]
    crossing_lambda: float | None


def _pt_sum(encoding: IsingEncoding, mask: int, e_a: float) -> float:
    """S_a = sum over single-flip neighbours b of 1 / (E_b - E_a)."""
    total = 0.0
    for nb in neighbourhood(encoding, mask):
        de = nb.energy - e_a
        if abs(de) < 1e-12:
            raise PerturbationError(
                f"degenerate neighbour pair ({mask:#x}, {nb.bitmask:#x}); "
                "second-order expansion undefined"
            )
        total += 1.0 / de
    return total


def driver_pt_energies(
    encoding: IsingEncoding,
    lambda_grid: np.ndarray | None = None,
    levels: tuple[int, ...] = (0, 1),
) -> PerturbedEnergies:
    """Second-order driver expansion around the classical spectrum.

    The driver has zero diagonal, so the first order vanishes and each level
    bends downward quadratically, E_a(lam) = E_a - lam^2 * S_a with S_a summed
    over the single-flip neighbourhood of state a.  The two lowest levels meet
    at lam*^2 = (E_1 - E_0) / (S_1 - S_0) provided the excited level bends
    faster (S_1 > S_0); otherwise no crossing is predicted and
    ``crossing_lambda`` is None.
    """
    if lambda_grid is None:
        lambda_grid = np.linspace(0.0, 1.0, 101)
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    states = enumerate_problem_states(encoding)
    if max(levels) >= len(states):
        raise PerturbationError(f"level index out of range for {len(states)} states")

    names = []
    curves = []
    slopes = []
    for a in levels:
        bs = states[a]
        s_a = _pt_sum(encoding, bs.bitmask, bs.energy)
        names.append(f"E{a}")
        slopes.append(s_a)
        curves.append(bs.energy - lambda_grid**2 * s_a)

    crossing = None
    if len(levels) >= 2:
        e0, e1 = states[levels[0]].energy, states[levels[1]].energy
        if abs(e1 - e0) < 1e-12:
            raise PerturbationError("target levels degenerate; crossing undefined")
        s0, s1 = slopes[0], slopes[1]
        if s1 > s0:
            crossing = float(np.sqrt((e1 - e0) / (s1 - s0)))
    return PerturbedEnergies(
        lambda_grid=lambda_grid,
        level_names=tuple(names),
        energies=np.array(curves),
        slopes=tuple(slopes),
        crossing_lambda=crossing,
    )


def first_order_catalyst_shift(
    encoding: IsingEncoding,
    spec: CatalystSpec,
    s: float,
    level: int = 0,
) -> float:
    """Slope of E_level(s, mu) at mu = 0 for a catalyst scaled by mu.

    The unperturbed operator is the catalyst-free annealing Hamiltonian at
    schedule point s; the perturbation is the bare catalyst term (no schedule
    envelope).  The slope reduces to a sum over the basis-state pairs the
    double flip connects: 2 J_xx * sum c_j c_k over unordered pairs (j, k).
    """
    system = FullSystem(encoding)
    vals, vecs = np.linalg.eigh(system.h_of_s(s))
    gaps = np.abs(vals - vals[level])
    gaps[level] = np.inf
    if gaps.min() < NEAR_DEGENERATE_GAP:
        warnings.warn(
            f"level {level} nearly degenerate at s={s:.6f} "
            f"(gap {gaps.min():.3e}); first-order slope unreliable",
            stacklevel=2,
        )
    vec = vecs[:, level]
    (j, k) = spec.pairs[0]
    flip = (1 << j) | (1 << k)
    total = 0.0
    for idx in range(system.dim):
        other = idx ^ flip
        if idx < other:
            total += vec[idx] * vec[other]
    return 2.0 * spec.jxx * total


@dataclass(frozen=True)
class ExtSetDecomposition:
    """Overlap bookkeeping for the two lowest levels across a schedule window.

    ``p0_ext`` and ``p1_ext`` hold the bitmasks of the non-empty independent
    sets contained entirely in sub-graph 0, respectively sub-graph 1.  The
    mass arrays have one row per tracked level (ground first) and one column
    per point of ``s_grid``; the three masses sum to one at every point.
    """

    s_grid: np.ndarray
    p0_ext: tuple[int, ...]
    p1_ext: tuple[int, ...]
    mass_p0: np.ndarray
    mass_p1: np.ndarray
    mass_rest: np.ndarray


def _ext_masks(encoding: IsingEncoding, sub_graph: int) -> tuple[int, ...]:
    verts = encoding.instance.vertices_of(sub_graph)
    cover = 0
    for v in verts:
        cover |= 1 << v
    states = []
    for bs in enumerate_problem_states(encoding):
        m = bs.bitmask
        if m != 0 and bs.independent and (m & ~cover) == 0:
            states.append(m)
    return tuple(states)


def ext_set_overlaps(
    encoding: IsingEncoding,
    spec: CatalystSpec | None,
    s_window: np.ndarray,
) -> ExtSetDecomposition:
    """Mass of the two lowest instantaneous states on each exterior set."""
    if encoding.instance.k != 2:
        raise PerturbationError("exterior-set decomposition requires a bipartite instance")
    p0 = _ext_masks(encoding, 0)
    p1 = _ext_masks(encoding, 1)
    s_window = np.atleast_1d(np.asarray(s_window, dtype=float))
    system = FullSystem(encoding, spec)
    m0 = np.empty((2, s_window.size))
    m1 = np.empty((2, s_window.size))
    rest = np.empty((2, s_window.size))
    idx0 = np.array(p0, dtype=int)
    idx1 = np.array(p1, dtype=int)
    for col, s in enumerate(s_window):
        _, vecs = np.linalg.eigh(system.h_of_s(float(s)))
        for row in range(2):
            prob = vecs[:, row] ** 2
            a = float(prob[idx0].sum())
            b = float(prob[idx1].sum())
            m0[row, col] = a
            m1[row, col] = b
            rest[row, col] = 1.0 - a - b
    return ExtSetDecomposition(
        s_grid=s_window, p0_ext=p0, p1_ext=p1, mass_p0=m0, mass_p1=m1, mass_rest=rest
    )


def write_pt_csv(pt: PerturbedEnergies, path: str) -> None:
    header = ["lambda"] + [f"{name}_pt" for name in pt.level_names]
    rows = (
        [pt.lambda_grid[i]] + [pt.energies[j, i] for j in range(len(pt.level_names))]
        for i in range(pt.lambda_grid.size)
    )
    write_csv(path, header, rows)


def write_ext_mass_csv(dec: ExtSetDecomposition, path: str) -> None:
    header = [
        "s",
        "e0_mass_sub0", "e0_mass_sub1", "e0_mass_rest",
        "e1_mass_sub0", "e1_mass_sub1", "e1_mass_rest",
    ]
    rows = (
        [
            dec.s_grid[i],
            dec.mass_p0[0, i], dec.mass_p1[0, i], dec.mass_rest[0, i],
            dec.mass_p0[1, i], dec.mass_p1[1, i], dec.mass_rest[1, i],
        ]
        for i in range(dec.s_grid.size)
    )
    write_csv(path, header, rows)
