"""Study-level operations: sweeps, searches, calibration, and CSV output.

The expensive full-ladder studies are exercised by the end-to-end tests;
here each operation runs once on the 5-vertex instances with anchors frozen
from reference runs.
"""

import numpy as np
import pytest

from anneal_lab import (
    FullSystem,
    SectorSystem,
    SweepError,
    calibrate_jzz,
    catalyst_sweep,
    catalyst_pair,
    find_closing_jxx,
    make_system,
    optimize_jxx,
    scaling_study,
)
from anneal_lab.sweeps import (
    IntermediateRecord,
    ScalingRecord,
    SweepRecord,
    write_intermediate_csv,
    write_scaling_csv,
    write_sweep_csv,
)

PRIMARY_CLOSING_JXX = 0.313860
SECONDARY_CLOSING_JXX = 1.928191
WGS_OPT_JXX = 1.2797
WGS_OPT_GAP = 0.0526
WGS_FREE_GAP = 2.26909166360e-02


def test_make_system_dispatch(sgs_enc):
    assert isinstance(make_system(sgs_enc), FullSystem)
    assert isinstance(make_system(sgs_enc, force_sector=True), SectorSystem)


@pytest.fixture(scope="module")
def small_sweep(sgs_enc):
    grid = np.array([0.0, 1.0, 1.92])
    return catalyst_sweep(sgs_enc, jxx_grid=grid)


def test_sweep_records(small_sweep):
    free, mid, strong = small_sweep
    assert free.jxx == 0.0
    assert free.sx == pytest.approx(0.899977, abs=5e-5)
    assert free.sn is None and free.gap_at_sn is None
    assert free.s_minus is None and free.crossed_component == "none"

    # past the secondary closing the early minimum exists and the ground
    # vector has turned negative on the optimum component
    assert strong.sn == pytest.approx(0.4603, abs=2e-3)
    assert strong.sn < strong.sx
    assert strong.s_minus == pytest.approx(0.46092, abs=5e-4)
    assert strong.crossed_component == "E0"
    # between the closings the late crossing is still the labeled primary
    assert mid.sx > 0.8


def test_sweep_threads_agree(sgs_enc, small_sweep):
    grid = np.array([0.0, 1.0, 1.92])
    threaded = catalyst_sweep(sgs_enc, jxx_grid=grid, threads=2)
    for a, b in zip(small_sweep, threaded):
        assert a == b


def test_optimize_jxx_weak_setting(wgs_enc):
    res = optimize_jxx(wgs_enc)
    assert not res.boundary
    assert res.jxx == pytest.approx(WGS_OPT_JXX, abs=2e-3)
    assert res.gap == pytest.approx(WGS_OPT_GAP, abs=1e-3)
    assert res.gap > WGS_FREE_GAP


def test_primary_closing(sgs_enc):
    c = find_closing_jxx(sgs_enc, which="primary_crossing")
    assert c.closed
    assert c.jxx == pytest.approx(PRIMARY_CLOSING_JXX, abs=1e-3)
    assert c.gap < c.threshold
    assert c.s_feature == pytest.approx(0.8967, abs=1e-3)


def test_secondary_closing(sgs_enc):
    c = find_closing_jxx(sgs_enc, which="secondary_minimum")
    assert c.closed
    assert c.jxx == pytest.approx(SECONDARY_CLOSING_JXX, abs=1e-3)
    assert c.gap < c.threshold
    assert c.s_feature == pytest.approx(0.4594, abs=1e-3)


def test_no_closing_in_weak_setting(wgs_enc):
    """The weak-scaling gap never closes; the search reports that honestly."""
    c = find_closing_jxx(wgs_enc, which="primary_crossing")
    assert not c.closed
    assert c.jxx is None and c.gap is None


def test_closing_kind_validation(sgs_enc):
    with pytest.raises(SweepError):
        find_closing_jxx(sgs_enc, which="tertiary")


def test_calibration_recovers_quoted_penalty():
    jzz = calibrate_jzz(sizes=(2, 3), delta_w=0.01, target_sx=0.9)
    assert abs(jzz - 5.33) / 5.33 < 0.02


def test_calibration_bracket_error():
    with pytest.raises(SweepError):
        calibrate_jzz(sizes=(2, 3), delta_w=0.01, target_sx=0.2,
                      jzz_bracket=(4.0, 8.0))


def test_scaling_small_sizes():
    records = scaling_study("sgs", n_list=(5, 7))
    assert [r.n for r in records] == [5, 7]
    assert records[0].n0 == 2 and records[0].n1 == 3
    assert records[0].jxx_used == 0.0
    assert records[0].min_gap == pytest.approx(1.04119885556e-04, rel=1e-4)
    assert records[1].min_gap == pytest.approx(2.70486592768e-06, rel=1e-4)
    assert records[1].min_gap < records[0].min_gap


def test_scaling_reversed_geometry():
    records = scaling_study("no-ac", n_list=(5,))
    assert records[0].n0 == 3 and records[0].n1 == 2


def test_scaling_validation():
    with pytest.raises(SweepError):
        scaling_study("sgs", n_list=(4,))
    with pytest.raises(SweepError):
        scaling_study("mystery")
    with pytest.raises(SweepError):
        scaling_study("sgs", n_list=(5,), jxx_policy="fixed")
    with pytest.raises(SweepError):
        scaling_study("sgs", n_list=(5,), jxx_policy="sometimes")


def test_csv_writers(tmp_path):
    sweep = [SweepRecord(0.0, 0.9, 1e-4, None, None, None, "none")]
    p = tmp_path / "sweep.csv"
    write_sweep_csv(sweep, str(p))
    lines = p.read_text().splitlines()
    assert lines[0] == "jxx,sx,gap_at_sx,sn,gap_at_sn,s_minus,crossed_component"
    assert lines[1].split(",")[3] == ""  # absent feature stays blank

    scaling = [ScalingRecord(5, 2, 3, 0.0, 1e-4)]
    p2 = tmp_path / "scaling.csv"
    write_scaling_csv(scaling, str(p2))
    assert p2.read_text().splitlines()[0] == "n,n0,n1,jxx_used,min_gap"

    inter = [IntermediateRecord(0.2, 25.9, None, None)]
    p3 = tmp_path / "inter.csv"
    write_intermediate_csv(inter, str(p3))
    lines = p3.read_text().splitlines()
    assert lines[0] == "delta_w,jzz_calibrated,jxx_close_primary,jxx_close_secondary"
    assert lines[1].endswith(",,")
