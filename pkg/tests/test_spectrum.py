"""Schedule scans, gap-feature detection, and sign-change tracking."""

import os

import numpy as np
import pytest

from anneal_lab import (
    CatalystSpec,
    FullSystem,
    ScanError,
    catalyst_pair,
    eigensolve,
    find_gap_minima,
    gap01,
    locate_sign_change,
    min_gap_over,
    reference_crossing_location,
    scan_spectrum,
    write_spectrum_csv,
)

# frozen catalyst-free crossing of the (2, 3), delta_w = 0.01, jzz = 5.33
# instance: location and gap value from an independent scan
SX_FREE = 0.899977
GAP_FREE = 1.04119885556e-04


@pytest.fixture(scope="module")
def free_scan(sgs_enc):
    system = FullSystem(sgs_enc)
    return system, scan_spectrum(system)


@pytest.fixture(scope="module")
def cat192_scan(sgs_enc):
    spec = CatalystSpec(pairs=(catalyst_pair(sgs_enc.instance),), jxx=1.92)
    system = FullSystem(sgs_enc, spec)
    return system, scan_spectrum(system)


def test_eigensolve_basics():
    H = np.array([[0.0, 1.0], [1.0, 0.0]])
    vals, vecs = eigensolve(H)
    np.testing.assert_allclose(vals, [-1.0, 1.0], atol=1e-14)
    assert vecs.shape == (2, 2)
    vals1, vecs1 = eigensolve(H, k=1)
    assert vals1.shape == (1,) and vecs1.shape == (2, 1)
    with pytest.raises(ScanError):
        eigensolve(np.zeros((2, 3)))
    with pytest.raises(ScanError):
        eigensolve(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_scan_grid_validation(sgs_enc):
    system = FullSystem(sgs_enc)
    with pytest.raises(ScanError):
        scan_spectrum(system, s_grid=np.array([0.0, 0.5, 0.4, 1.0]))
    with pytest.raises(ScanError):
        scan_spectrum(system, s_grid=np.array([-0.1, 0.5, 1.0]))
    with pytest.raises(ScanError):
        scan_spectrum(system, k_levels=1)


def test_scan_output_shape(free_scan):
    _, scan = free_scan
    assert scan.npoints >= 201
    assert scan.levels.shape == (scan.npoints, 4)
    assert scan.gap01.shape == (scan.npoints,)
    assert scan.overlaps.shape == (scan.npoints, 2)
    assert scan.tracked_names == ("E0", "E1")
    assert np.all(np.diff(scan.s_grid) > 0)
    np.testing.assert_allclose(scan.gap01, scan.levels[:, 1] - scan.levels[:, 0],
                               atol=1e-12)


def test_free_crossing_location(free_scan):
    """The catalyst-free crossing sits where the frozen reference puts it."""
    system, scan = free_scan
    feats = find_gap_minima(system, scan)
    assert len(feats) == 1
    f = feats[0]
    assert f.kind == "primary_crossing"
    assert f.location == pytest.approx(SX_FREE, abs=5e-5)
    assert f.value == pytest.approx(GAP_FREE, rel=1e-5)
    assert not f.degenerate


def test_catalyst_two_minima(cat192_scan):
    system, scan = cat192_scan
    feats = find_gap_minima(system, scan, min_prominence=0.0)
    assert len(feats) == 2
    early, late = feats
    assert early.kind == "secondary_minimum"
    assert late.kind == "primary_crossing"
    assert early.location == pytest.approx(0.4603, abs=2e-3)
    assert late.location == pytest.approx(0.91786, abs=2e-3)
    assert early.value < late.value


def test_reference_labeling(cat192_scan, sgs_enc):
    """Primary label follows the catalyst-free crossing, not the deepest dip."""
    system, scan = cat192_scan
    ref = reference_crossing_location(system)
    assert ref == pytest.approx(SX_FREE, abs=5e-5)
    feats = find_gap_minima(system, scan, min_prominence=0.0, reference_sx=ref)
    deepest = min(feats, key=lambda f: f.value)
    primary = [f for f in feats if f.kind == "primary_crossing"][0]
    assert deepest.kind == "secondary_minimum"
    assert primary.location > deepest.location


def test_sign_change_with_catalyst(cat192_scan):
    system, scan = cat192_scan
    hit = locate_sign_change(system, scan)
    assert hit is not None
    s_minus, component = hit
    assert component == "E0"
    assert s_minus == pytest.approx(0.46092, abs=5e-4)


def test_no_sign_change_without_catalyst(free_scan):
    system, scan = free_scan
    assert locate_sign_change(system, scan) is None


def test_min_gap_over(free_scan):
    system, _ = free_scan
    s_min, g_min = min_gap_over(system, 0.85, 0.95)
    assert s_min == pytest.approx(SX_FREE, abs=1e-4)
    assert g_min == pytest.approx(GAP_FREE, rel=1e-5)
    assert g_min <= gap01(system, 0.89) and g_min <= gap01(system, 0.91)


def test_spectrum_csv(free_scan, tmp_path):
    _, scan = free_scan
    path = os.path.join(tmp_path, "spectrum.csv")
    write_spectrum_csv(scan, path)
    lines = open(path).read().splitlines()
    assert lines[0] == "s,E0,E1,E2,E3,gap01,ov_E0,ov_E1"
    assert len(lines) == scan.npoints + 1
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == 0.0
    np.testing.assert_allclose(first[1:5], scan.levels[0], rtol=1e-9)
