import csv
import io
import math

import pytest

from vlcsecrecy.cli import TABLE_DB, TABLE_RATIOS, main, table_gaps
from vlcsecrecy.config import db_to_linear

SCEN = """\
[scenario]
alice = 5, 5, 3
bob = 5, 4.5, 0
ratio = {ratio}

[pd]
area_m2 = 1

[constraints]
mode = {mode}
xi = {xi}
"""


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def avg_cfg(tmp_path, ratio=300, xi=0.2, extra="p_db = 60\n"):
    return write(tmp_path, SCEN.format(ratio=ratio, mode="avg", xi=xi) + extra)


def peak_cfg(tmp_path, ratio=300, xi=1.0, extra="p_db = 57\na_db = 60\n"):
    return write(tmp_path, SCEN.format(ratio=ratio, mode="peak", xi=xi) + extra)


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_bounds_avg_labels(tmp_path, capsys):
    code, out, _ = run(capsys, "bounds", "--config", avg_cfg(tmp_path))
    assert code == 0
    assert "lower_1" in out and "lower_2" in out and "upper" in out
    assert "capacity-difference" in out and "exponential input" in out


def test_bounds_peak_uniform_label(tmp_path, capsys):
    # xi P / A = 0.5 with A = 2 P
    cfg = peak_cfg(tmp_path, xi=1.0, extra=f"p = {db_to_linear(57.0)!r}\na = {2 * db_to_linear(57.0)!r}\n")
    code, out, _ = run(capsys, "bounds", "--config", cfg)
    assert code == 0
    assert "EPI bound, uniform input" in out


def test_bounds_degraded(tmp_path, capsys):
    code, out, _ = run(capsys, "bounds", "--config", avg_cfg(tmp_path, ratio=0.5))
    assert code == 0
    assert "degraded        : yes" in out and "zero" in out


def test_bounds_csv_and_shannon(tmp_path, capsys):
    dest = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bounds", "--config", avg_cfg(tmp_path), "--out", str(dest), "--shannon")
    assert code == 0 and "convention" in out
    header, rows = read_csv(dest.read_text())
    assert header[-1] == "shannon_limit" and len(rows) == 1


def test_validation_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, "bounds", "--config", avg_cfg(tmp_path, xi=1.5))
    assert code == 1 and "line" in err
    code, _, err = run(capsys, "bounds", "--config", str(tmp_path / "missing.ini"))
    assert code == 1


def test_sweep_rows_and_determinism(tmp_path, capsys):
    cfg = avg_cfg(tmp_path, extra="p_db = 60\n[sweep]\nvariable = P\nstart = 25\nstop = 85\nnum = 13\n")
    code1, out1, _ = run(capsys, "sweep", "--config", cfg)
    code2, out2, _ = run(capsys, "sweep", "--config", cfg, "--threads", "4")
    assert code1 == code2 == 0 and out1 == out2
    header, rows = read_csv(out1)
    assert header[:2] == ["P_dB", "P"] and len(rows) == 13
    clamped = [float(r[header.index("clamped_upper")]) for r in rows]
    assert clamped == sorted(clamped)


def test_sweep_db_linear_equivalence(tmp_path, capsys):
    a = avg_cfg(tmp_path, extra="p_db = 60\n[sweep]\nvariable = xi\nstart = 0.1\nstop = 1\nnum = 4\n")
    b = write(tmp_path, SCEN.format(ratio=300, mode="avg", xi=0.2)
              + f"p = {db_to_linear(60.0)!r}\n[sweep]\nvariable = xi\nstart = 0.1\nstop = 1\nnum = 4\n", "b.ini")
    assert run(capsys, "sweep", "--config", a)[1] == run(capsys, "sweep", "--config", b)[1]


def test_ratio_sweep_zero_below_one(tmp_path, capsys):
    cfg = avg_cfg(tmp_path, extra="p_db = 60\n[sweep]\nvariable = ratio\nstart = 0.1\nstop = 10\nnum = 21\nspacing = log\n")
    _, out, _ = run(capsys, "sweep", "--config", cfg)
    header, rows = read_csv(out)
    for r in rows:
        if float(r[0]) < 1.0:
            assert all(float(r[header.index(k)]) == 0.0 for k in ("lower_1", "lower_2", "upper"))
        if float(r[0]) > 1.01:
            assert float(r[header.index("clamped_upper")]) > 0.0


def test_xi_sweep_symmetric_in_peak_mode(tmp_path, capsys):
    cfg = peak_cfg(tmp_path, extra="a_db = 40\np_equals_a = true\n[sweep]\nvariable = xi\nstart = 0.1\nstop = 0.9\nnum = 9\n")
    _, out, _ = run(capsys, "sweep", "--config", cfg)
    header, rows = read_csv(out)
    vals = [float(r[header.index("lower_2")]) for r in rows]
    for a, b in zip(vals, reversed(vals)):
        assert a == pytest.approx(b, abs=1e-7)


def test_tables_stdout_and_files(tmp_path, capsys):
    code, out, _ = run(capsys, "tables")
    assert code == 0 and "avg_gaps.csv" in out and "peak_gaps.csv" in out
    code, _, _ = run(capsys, "tables", "--out", str(tmp_path / "t"))
    assert code == 0
    header, rows = read_csv((tmp_path / "t" / "avg_gaps.csv").read_text())
    assert header == ["P_dB", "gap_ratio_3000", "gap_ratio_300", "gap_ratio_30"]
    assert len(rows) == 5
    assert float(rows[-1][3]) == pytest.approx(0.04844, abs=2e-3)
    header, rows = read_csv((tmp_path / "t" / "peak_gaps.csv").read_text())
    assert header[0] == "A_dB"
    assert 2.12e-5 / 2 <= float(rows[-1][3]) <= 2 * 2.12e-5


def test_table_gaps_shape():
    t = table_gaps("peak")
    assert len(t) == len(TABLE_DB) and all(len(r) == len(TABLE_RATIOS) for r in t)
    for col in range(3):
        assert all(t[i + 1][col] < t[i][col] for i in range(4))


def test_region_command(tmp_path, capsys):
    cfg = avg_cfg(tmp_path, extra="p_db = 60\n[region]\nnx = 4\nny = 5\n")
    dest = tmp_path / "r.csv"
    code, _, err = run(capsys, "region", "--config", cfg, "--out", str(dest))
    assert code == 0 and "insecure cells" in err
    header, rows = read_csv(dest.read_text())
    assert header == ["x", "y", "bound_nats", "insecure"] and len(rows) == 20
    assert dest.read_bytes().count(b"\r") == 0


def test_region_needs_section(tmp_path, capsys):
    code, _, _ = run(capsys, "region", "--config", avg_cfg(tmp_path))
    assert code == 1


def test_oracle_ok(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", "--config", avg_cfg(tmp_path, extra="p_db = 85\n"))
    assert code == 0 and "SANDWICH OK" in out and "(stable)" in out


def test_oracle_peak_ok(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", "--config", peak_cfg(tmp_path, xi=0.2, extra="a_db = 70\np_equals_a = true\n"))
    assert code == 0 and "SANDWICH OK" in out and "truncexp" in out


def test_oracle_degraded_skips_quadrature(tmp_path, capsys):
    code, out, _ = run(capsys, "oracle", "--config", avg_cfg(tmp_path, ratio=0.5))
    assert code == 0 and "no quadrature" in out


def test_oracle_low_snr_violation_exits_2(tmp_path, capsys):
    # below the operating regime the dual-expression bound can undercut the rate
    cfg = write(tmp_path, """\
[scenario]
alice = 5, 5, 3
bob = 5, 4.5, 0
ratio = 1.5645
[pd]
area_m2 = 1
[constraints]
mode = peak
xi = 1
p = 0.8389790958
a = 1.748983
""")
    code, out, _ = run(capsys, "oracle", "--config", cfg)
    assert code == 2 and "SANDWICH VIOLATED" in out


def test_oracle_bad_tolerance(tmp_path, capsys):
    code, _, _ = run(capsys, "oracle", "--config", avg_cfg(tmp_path), "--quad-tol", "0")
    assert code == 1
