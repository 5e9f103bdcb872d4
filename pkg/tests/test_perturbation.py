"""Second-order driver expansion and first-order catalyst response.

The quadratic slopes and the level-crossing point are checked against
frozen values from an independent hand evaluation of the neighbourhood
sums; the catalyst slope is checked against a finite difference of the
exact eigenvalue.
"""

import numpy as np
import pytest

from anneal_lab import (
    CatalystSpec,
    FullSystem,
    PerturbationError,
    catalyst_matrix,
    catalyst_pair,
    driver_matrix,
    driver_pt_energies,
    ext_set_overlaps,
    first_order_catalyst_shift,
    problem_energies,
)
from anneal_lab.perturbation import write_ext_mass_csv, write_pt_csv

# frozen neighbourhood sums for (2, 3), delta_w = 0.01, jzz_raw = 5.33
S0_SGS = 1.7559075907590773
S1_SGS = 3.770950554299848
LAMBDA_STAR_SGS = 0.10960939227126489
# and for (2, 3), delta_w = 0.37, jzz_raw = 37.5
LAMBDA_STAR_WGS = 0.08274646882121955
# and for (2, 4, 3), delta_w = 0.01, jzz_raw = 5.33
LAMBDA_STAR_TRI = 0.029169410572264298


def test_driver_pt_slopes(sgs_enc):
    pt = driver_pt_energies(sgs_enc)
    assert pt.level_names == ("E0", "E1")
    assert pt.slopes[0] == pytest.approx(S0_SGS, abs=1e-12)
    assert pt.slopes[1] == pytest.approx(S1_SGS, abs=1e-12)
    assert pt.crossing_lambda == pytest.approx(LAMBDA_STAR_SGS, abs=1e-12)


def test_driver_pt_curves(sgs_enc):
    lam = np.linspace(0.0, 0.5, 11)
    pt = driver_pt_energies(sgs_enc, lam)
    np.testing.assert_allclose(pt.lambda_grid, lam)
    # every curve is E_a - lambda^2 S_a
    for row, s in zip(pt.energies, pt.slopes):
        np.testing.assert_allclose(row, row[0] - lam**2 * s, atol=1e-12)
    # the two curves actually meet at the crossing
    e0 = pt.energies[0][0] - pt.crossing_lambda**2 * pt.slopes[0]
    e1 = pt.energies[1][0] - pt.crossing_lambda**2 * pt.slopes[1]
    assert e0 == pytest.approx(e1, abs=1e-12)


def test_driver_pt_no_crossing(noac_enc):
    """Swapped geometry: the optimum sinks faster, so no crossing exists."""
    pt = driver_pt_energies(noac_enc)
    assert pt.slopes[0] > pt.slopes[1]
    assert pt.crossing_lambda is None


def test_driver_pt_other_settings(wgs_enc, tri_enc):
    assert driver_pt_energies(wgs_enc).crossing_lambda == pytest.approx(
        LAMBDA_STAR_WGS, abs=1e-12)
    assert driver_pt_energies(tri_enc).crossing_lambda == pytest.approx(
        LAMBDA_STAR_TRI, abs=1e-12)


def test_driver_pt_level_range(sgs_enc):
    with pytest.raises(PerturbationError):
        driver_pt_energies(sgs_enc, levels=(0, 99))


def test_pt_residual_fourth_order(sgs_enc):
    """The expansion truncation error shrinks faster than lambda^3.

    Odd orders vanish by flip parity, so the true residual against exact
    diagonalization of H_p - lambda * sum sigma^x is O(lambda^4).
    """
    pt = driver_pt_energies(sgs_enc, np.array([0.0]))
    diag = problem_energies(sgs_enc)
    hd = driver_matrix(sgs_enc.n)

    ladder = np.array([0.04, 0.02, 0.01, 0.005, 0.0025])
    resid = []
    for lam in ladder:
        exact = np.linalg.eigvalsh(np.diag(diag) + lam * hd)[0]
        approx = pt.energies[0][0] - lam**2 * pt.slopes[0]
        resid.append(abs(exact - approx))
    resid = np.array(resid)
    slope = np.polyfit(np.log(ladder), np.log(resid), 1)[0]
    assert slope > 2.9


def test_catalyst_shift_matches_finite_difference(sgs_enc):
    spec = CatalystSpec(pairs=(catalyst_pair(sgs_enc.instance),), jxx=1.3)
    s = 0.5
    slope = first_order_catalyst_shift(sgs_enc, spec, s, level=0)
    h0 = FullSystem(sgs_enc).h_of_s(s)
    hc = catalyst_matrix(sgs_enc.n, spec)
    mu = 1e-5
    e_plus = np.linalg.eigvalsh(h0 + mu * hc)[0]
    e_minus = np.linalg.eigvalsh(h0 - mu * hc)[0]
    fd = (e_plus - e_minus) / (2.0 * mu)
    assert slope == pytest.approx(fd, rel=1e-5)


def test_ext_set_masks(sgs_enc):
    spec = CatalystSpec(pairs=(catalyst_pair(sgs_enc.instance),), jxx=1.0)
    dec = ext_set_overlaps(sgs_enc, spec, np.linspace(0.88, 0.92, 5))
    assert set(dec.p0_ext) == {0b01, 0b10, 0b11}
    assert len(dec.p1_ext) == 7  # non-empty subsets of the 3-vertex sub-graph
    total = dec.mass_p0 + dec.mass_p1 + dec.mass_rest
    np.testing.assert_allclose(total, 1.0, atol=1e-12)


def test_ext_set_mass_swaps_across_crossing(sgs_enc):
    """The ground state hands its weight from one sub-graph to the other."""
    dec = ext_set_overlaps(sgs_enc, None, np.array([0.88, 0.92]))
    before_p1 = dec.mass_p1[0, 0]
    after_p0 = dec.mass_p0[0, 1]
    assert before_p1 > 0.5
    assert after_p0 > 0.5


def test_ext_set_bipartite_only(tri_enc):
    with pytest.raises(PerturbationError):
        ext_set_overlaps(tri_enc, None, np.array([0.9]))


def test_pt_csv_writers(sgs_enc, tmp_path):
    pt = driver_pt_energies(sgs_enc, np.linspace(0.0, 0.2, 5))
    p1 = tmp_path / "pt.csv"
    write_pt_csv(pt, str(p1))
    lines = p1.read_text().splitlines()
    assert lines[0] == "lambda,E0_pt,E1_pt"
    assert len(lines) == 6

    dec = ext_set_overlaps(sgs_enc, None, np.linspace(0.85, 0.95, 3))
    p2 = tmp_path / "mass.csv"
    write_ext_mass_csv(dec, str(p2))
    lines = p2.read_text().splitlines()
    assert lines[0].startswith("s,e0_mass_sub0")
    assert len(lines) == 4
