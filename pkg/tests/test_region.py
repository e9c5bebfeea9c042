import csv
import io
import math

import numpy as np
import pytest

from vlcsecrecy.avg_bounds import AvgConstraints, upper_bound_avg
from vlcsecrecy.peak_bounds import PeakConstraints
from vlcsecrecy.region import (
    FloorGrid,
    disc_predicate,
    export_region_csv,
    insecure_region,
    write_region_rows,
)
from vlcsecrecy.scenario import LinkGains, PdParams, Position, channel_gain

ALICE = Position(5.0, 5.0, 3.0)
PD = PdParams()
AVG = AvgConstraints(0.2, 1e6)


def test_grid_cell_centres():
    g = FloorGrid((0.0, 10.0), (0.0, 5.0), 4, 2)
    assert g.dx == 2.5 and g.dy == 2.5
    np.testing.assert_allclose(g.xs, [1.25, 3.75, 6.25, 8.75])
    np.testing.assert_allclose(g.ys, [1.25, 3.75])


@pytest.mark.parametrize("kw", [dict(nx=0), dict(x_range=(1.0, 1.0)), dict(ny=-3)])
def test_grid_validation(kw):
    args = dict(x_range=(0.0, 1.0), y_range=(0.0, 1.0), nx=2, ny=2)
    args.update(kw)
    with pytest.raises(ValueError):
        FloorGrid(**args)


def test_nadir_bob_empty_mask():
    m = insecure_region(ALICE, Position(5, 5, 0), PD, 1, 1, FloorGrid((0, 10), (0, 10), 50, 50), "avg_upper", AVG)
    assert not m.insecure_mask.any()


def test_corner_bob_full_mask():
    m = insecure_region(ALICE, Position(0, 0, 0), PD, 1, 1, FloorGrid((0, 10), (0, 10), 50, 50), "avg_upper", AVG)
    assert m.insecure_mask.all()
    assert not m.values.any()


def test_disc_matches_mask_off_boundary():
    grid = FloorGrid((0, 10), (0, 10), 60, 60)
    bob = Position(6.3, 2.2, 0)
    m = insecure_region(ALICE, bob, PD, 1, 1, grid, "avg_upper", AVG)
    disc = disc_predicate(ALICE, bob, grid.xs, grid.ys)
    r = np.hypot(grid.xs[:, None] - 5, grid.ys[None, :] - 5)
    interior = np.abs(r - math.hypot(1.3, 2.8)) > math.hypot(grid.dx, grid.dy)
    assert np.array_equal(m.insecure_mask[interior], disc[interior])


def test_values_match_scalar_bound():
    grid = FloorGrid((0, 10), (0, 10), 5, 5)
    bob = Position(5, 4.5, 0)
    m = insecure_region(ALICE, bob, PD, 1, 1, grid, "avg_upper", AVG)
    hb = channel_gain(ALICE, bob, PD)
    for i, x in enumerate(grid.xs):
        for j, y in enumerate(grid.ys):
            he = channel_gain(ALICE, Position(x, y, 0), PD)
            if m.insecure_mask[i, j]:
                assert m.values[i, j] == 0.0
            else:
                assert m.values[i, j] == pytest.approx(max(0.0, upper_bound_avg(LinkGains(hb, he), AVG, 1, 1)), rel=1e-14)


def test_threads_deterministic():
    grid = FloorGrid((0, 10), (0, 10), 30, 20)
    pc = PeakConstraints(0.3, 1e5, 1e5)
    a = insecure_region(ALICE, Position(3, 4, 0), PD, 1, 1.2, grid, "peak_upper", pc, threads=1)
    b = insecure_region(ALICE, Position(3, 4, 0), PD, 1, 1.2, grid, "peak_upper", pc, threads=4)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.insecure_mask, b.insecure_mask)


def test_rejects_bad_arguments():
    grid = FloorGrid((0, 1), (0, 1), 2, 2)
    with pytest.raises(ValueError):
        insecure_region(ALICE, Position(5, 5, 0), PD, 1, 1, grid, "lower", AVG)
    with pytest.raises(TypeError):
        insecure_region(ALICE, Position(5, 5, 0), PD, 1, 1, grid, "peak_upper", AVG)
    with pytest.raises(ValueError):
        insecure_region(ALICE, Position(5, 5, 0), PD, 0, 1, grid, "avg_upper", AVG)


def test_bob_outside_fov_all_insecure():
    m = insecure_region(ALICE, Position(30, 30, 0), PD, 1, 1, FloorGrid((0, 10), (0, 10), 4, 4), "avg_upper", AVG)
    assert m.insecure_mask.all()


def test_csv_rows_and_round_trip(tmp_path):
    grid = FloorGrid((0, 10), (0, 10), 2, 2)
    m = insecure_region(ALICE, Position(5, 4.5, 0), PD, 1, 1, grid, "avg_upper", AVG)
    path = tmp_path / "region.csv"
    export_region_csv(m, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["x", "y", "bound_nats", "insecure"]
    assert len(rows) == 5
    for (x, y, v, bad), (i, j) in zip(rows[1:], [(0, 0), (0, 1), (1, 0), (1, 1)]):
        assert float(x) == grid.xs[i] and float(y) == grid.ys[j]
        assert float(v) == pytest.approx(m.values[i, j], rel=1e-8)
        assert int(bad) == int(m.insecure_mask[i, j])


def test_corner_csv_all_insecure():
    grid = FloorGrid((0, 10), (0, 10), 3, 3)
    m = insecure_region(ALICE, Position(0, 0, 0), PD, 1, 1, grid, "avg_upper", AVG)
    buf = io.StringIO()
    write_region_rows(m, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))[1:]
    assert len(rows) == 9 and all(r[3] == "1" for r in rows)


def test_export_error_names_path(tmp_path):
    m = insecure_region(ALICE, Position(5, 5, 0), PD, 1, 1, FloorGrid((0, 1), (0, 1), 2, 2), "avg_upper", AVG)
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        export_region_csv(m, bad)
