"""Command-line front end: ``vlcsecrecy {bounds,sweep,tables,region,oracle}``.

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .avg_bounds import AvgConstraints, BoundReport, avg_report, shannon_limit
from .config import ConfigError, RunConfig, db_to_linear, linear_to_db, parse_config
from .oracle import InputDistribution, QuadratureError, QuadratureSpec, oracle_secrecy_rate
from .peak_bounds import UNIFORM_TIE_TOL, PeakConstraints, peak_report
from .region import FloorGrid, export_region_csv, insecure_region, write_region_rows
from .scenario import LinkGains, PdParams, Position, channel_gain

log = logging.getLogger("vlcsecrecy")

# Published tables: transmitter on the ceiling centre, Bob 0.5 m off the
# nadir.  Their gain scale corresponds to the detector area entered as the
# bare number 1 in the gain formula (not 1e-4 m^2).
REF_ALICE = Position(5.0, 5.0, 3.0)
REF_BOB = Position(5.0, 4.5, 0.0)
REF_PD = PdParams(area=1.0)
TABLE_RATIOS = (3000.0, 300.0, 30.0)
TABLE_DB = (65.0, 70.0, 75.0, 80.0, 85.0)
TABLE_XI = 0.2

SANDWICH_LOWER_TOL = 1e-4
SANDWICH_UPPER_TOL = 2e-4

SHANNON_NOTE = (
    "shannon_limit is the convention 0.5*ln(1 + (H_B*xi*P/sigma_B)^2), "
    "a reference curve rather than a bound for this channel"
)


def fmt(x: float) -> str:
    return f"{x:.9g}"


@dataclass(frozen=True)
class Point:
    gains: LinkGains
    constraints: AvgConstraints | PeakConstraints


def base_gains(cfg: RunConfig, ratio: float | None = None) -> LinkGains:
    h_b = channel_gain(cfg.alice, cfg.bob, cfg.pd)
    ratio = cfg.ratio if ratio is None else ratio
    if ratio is not None:
        return LinkGains(h_b, h_b / ratio)
    return LinkGains(h_b, channel_gain(cfg.alice, cfg.eve, cfg.pd))


def make_constraints(mode: str, xi: float, P: float, A: float | None) -> AvgConstraints | PeakConstraints:
    if mode == "avg":
        return AvgConstraints(xi, P)
    return PeakConstraints(xi, P, A)


def report_for(point: Point, sigma_b: float, sigma_e: float) -> BoundReport:
    if isinstance(point.constraints, PeakConstraints):
        return peak_report(point.gains, point.constraints, sigma_b, sigma_e)
    return avg_report(point.gains, point.constraints, sigma_b, sigma_e)


def config_point(cfg: RunConfig) -> Point:
    c = cfg.constraints
    return Point(base_gains(cfg), make_constraints(c.mode, c.xi, c.P, c.A))


def sweep_points(cfg: RunConfig) -> list[tuple[dict, Point]]:
    """Grid points of the configured sweep with their leading CSV columns."""
    s, c = cfg.sweep, cfg.constraints
    out = []
    for v in s.grid():
        xi, P, A, ratio = c.xi, c.P, c.A, None
        if s.variable == "P":
            P = db_to_linear(v)
            if c.mode == "peak" and c.p_equals_a:
                A = P
            cols = {"P_dB": v, "P": P}
        elif s.variable == "A":
            A = db_to_linear(v)
            if c.p_equals_a:
                P = A
            cols = {"A_dB": v, "A": A}
        elif s.variable == "xi":
            xi = v
            cols = {"xi": v}
        elif s.variable == "ratio":
            ratio = v
            cols = {"ratio": v}
        else:
            xi = v * A / P
            cols = {"alpha": v, "xi": xi}
        try:
            point = Point(base_gains(cfg, ratio), make_constraints(c.mode, xi, P, A))
        except ValueError as exc:
            raise ConfigError(f"sweep point {s.variable}={v}: {exc}", field="sweep") from None
        out.append((cols, point))
    return out


def parallel_map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def shannon_for(point: Point, sigma_b: float) -> float:
    c = point.constraints
    return shannon_limit(point.gains, AvgConstraints(c.xi, c.P), sigma_b)


def _lower2_label(point: Point) -> str:
    c = point.constraints
    if isinstance(c, PeakConstraints):
        if abs(c.alpha - 0.5) < UNIFORM_TIE_TOL:
            return "EPI bound, uniform input"
        return "EPI bound, truncated-exponential input"
    return "EPI bound, exponential input"


def _lower1_label(point: Point) -> str:
    c = point.constraints
    if isinstance(c, PeakConstraints):
        branch = "truncated-exponential" if c.alpha < 0.5 else "uniform"
        return f"capacity-difference bound, {branch} branch"
    return "capacity-difference bound"


def format_report(cfg: RunConfig, point: Point, rep: BoundReport, shannon: bool) -> str:
    c = point.constraints
    g = point.gains
    lines = [f"mode            : {cfg.constraints.mode}"]
    lines.append(f"xi              : {fmt(c.xi)}")
    lines.append(f"P               : {fmt(c.P)} ({fmt(linear_to_db(c.P))} dB)")
    if isinstance(c, PeakConstraints):
        lines.append(f"A               : {fmt(c.A)} ({fmt(linear_to_db(c.A))} dB)")
        lines.append(f"alpha           : {fmt(c.alpha)}")
    lines.append(f"H_B, H_E        : {fmt(g.h_b)}, {fmt(g.h_e)}")
    lines.append(f"degraded        : {'yes' if rep.degraded else 'no'}")
    if rep.degraded:
        lines.append(
            "note            : Eve's normalized gain H_E/sigma_E is not below Bob's "
            "H_B/sigma_B; the secrecy capacity is zero and all bounds are reported as 0"
        )
    lines.append(f"lower_1         : {fmt(rep.lower_1)}  [{_lower1_label(point)}]")
    lines.append(f"lower_2         : {fmt(rep.lower_2)}  [{_lower2_label(point)}]")
    lines.append(f"upper           : {fmt(rep.upper)}  [dual-expression bound]")
    lines.append(f"clamped lower   : {fmt(rep.clamped_lower)}")
    lines.append(f"clamped upper   : {fmt(rep.clamped_upper)}")
    if rep.asymptote_lower is not None:
        lines.append(f"asymptote       : [{fmt(rep.asymptote_lower)}, {fmt(rep.asymptote_upper)}]  [high-SNR limits]")
    if shannon:
        lines.append(f"shannon_limit   : {fmt(shannon_for(point, cfg.sigma_b))}  (convention: {SHANNON_NOTE})")
    return "\n".join(lines)


REPORT_COLUMNS = ["lower_1", "lower_2", "upper", "clamped_lower", "clamped_upper", "degraded"]


def report_row(rep: BoundReport) -> list[str]:
    return [
        fmt(rep.lower_1),
        fmt(rep.lower_2),
        fmt(rep.upper),
        fmt(rep.clamped_lower),
        fmt(rep.clamped_upper),
        "1" if rep.degraded else "0",
    ]


def write_csv(header: list[str], rows: list[list[str]], path: str | None, stream=None) -> None:
    if path is None:
        stream = stream or sys.stdout
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def cmd_bounds(cfg: RunConfig, out: str | None, shannon: bool) -> int:
    point = config_point(cfg)
    rep = report_for(point, cfg.sigma_b, cfg.sigma_e)
    print(format_report(cfg, point, rep, shannon))
    if out:
        header = REPORT_COLUMNS + (["shannon_limit"] if shannon else [])
        row = report_row(rep) + ([fmt(shannon_for(point, cfg.sigma_b))] if shannon else [])
        write_csv(header, [row], out)
    return 0


def sweep_table(cfg: RunConfig, shannon: bool, threads: int = 1) -> tuple[list[str], list[list[str]]]:
    points = sweep_points(cfg)
    reps = parallel_map(lambda cp: report_for(cp[1], cfg.sigma_b, cfg.sigma_e), points, threads)
    header = list(points[0][0].keys()) + REPORT_COLUMNS + (["shannon_limit"] if shannon else [])
    rows = []
    for (cols, point), rep in zip(points, reps):
        row = [fmt(v) for v in cols.values()] + report_row(rep)
        if shannon:
            row.append(fmt(shannon_for(point, cfg.sigma_b)))
        rows.append(row)
    return header, rows


def cmd_sweep(cfg: RunConfig, out: str | None, shannon: bool, threads: int) -> int:
    if cfg.sweep is None:
        raise ConfigError("the sweep command needs a [sweep] section")
    header, rows = sweep_table(cfg, shannon, threads)
    write_csv(header, rows, out)
    if shannon:
        print(f"note: {SHANNON_NOTE}", file=sys.stderr)
    return 0


def table_gaps(kind: str, xi: float = TABLE_XI, pd: PdParams = REF_PD,
               alice: Position = REF_ALICE, bob: Position = REF_BOB) -> list[list[float]]:
    """Upper-minus-lower gaps on the published grid, rows by dB level, columns by ratio.

    ``kind`` is ``"avg"`` (capacity-difference lower bound against the dual
    bound, nominal intensity in dB) or ``"peak"`` (same pair with ``A = P``,
    peak intensity in dB).
    """
    h_b = channel_gain(alice, bob, pd)
    table = []
    for level in TABLE_DB:
        x = db_to_linear(level)
        row = []
        for ratio in TABLE_RATIOS:
            g = LinkGains(h_b, h_b / ratio)
            if kind == "avg":
                rep = avg_report(g, AvgConstraints(xi, x), 1.0, 1.0)
            else:
                rep = peak_report(g, PeakConstraints(xi, x, x), 1.0, 1.0)
            row.append(rep.upper - rep.lower_1)
        table.append(row)
    return table


def _table_rows(table: list[list[float]]) -> list[list[str]]:
    return [[fmt(level)] + [fmt(v) for v in row] for level, row in zip(TABLE_DB, table)]


def cmd_tables(cfg: RunConfig | None, out: str | None) -> int:
    kwargs = {}
    if cfg is not None:
        kwargs = dict(xi=cfg.constraints.xi, pd=cfg.pd, alice=cfg.alice, bob=cfg.bob)
    ratio_cols = [f"gap_ratio_{int(r)}" for r in TABLE_RATIOS]
    outdir = Path(out) if out else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    for kind, level, name in (("avg", "P_dB", "avg_gaps.csv"), ("peak", "A_dB", "peak_gaps.csv")):
        rows = _table_rows(table_gaps(kind, **kwargs))
        header = [level] + ratio_cols
        if outdir is None:
            print(f"# {name}")
            write_csv(header, rows, None)
        else:
            write_csv(header, rows, str(outdir / name))
            print(f"wrote {outdir / name}")
    return 0


def cmd_region(cfg: RunConfig, out: str | None, threads: int) -> int:
    if cfg.region is None:
        raise ConfigError("the region command needs a [region] section")
    spec = cfg.region
    grid = FloorGrid(spec.x_range, spec.y_range, spec.nx, spec.ny, cfg.bob.z if spec.z is None else spec.z)
    c = cfg.constraints
    constraints = make_constraints(c.mode, c.xi, c.P, c.A)
    bound = "avg_upper" if c.mode == "avg" else "peak_upper"
    m = insecure_region(cfg.alice, cfg.bob, cfg.pd, cfg.sigma_b, cfg.sigma_e, grid, bound, constraints, threads)
    if out:
        export_region_csv(m, out)
    else:
        write_region_rows(m, sys.stdout)
    n_bad = int(m.insecure_mask.sum())
    print(f"insecure cells: {n_bad} of {m.insecure_mask.size}", file=sys.stderr)
    return 0


def oracle_input(point: Point) -> InputDistribution | None:
    """Max-entropy input for the point's constraints; ``None`` for a point mass."""
    c = point.constraints
    if isinstance(c, PeakConstraints):
        if c.alpha >= 1.0:
            return None
        return InputDistribution.max_entropy(c.mean, c.A)
    return InputDistribution.exponential(c.mean)


def cmd_oracle(cfg: RunConfig, quad_tol: float) -> int:
    point = config_point(cfg)
    rep = report_for(point, cfg.sigma_b, cfg.sigma_e)
    print(format_report(cfg, point, rep, shannon=False))
    if rep.degraded:
        print("oracle rate     : 0  (degraded; no quadrature run)")
        print("SANDWICH OK")
        return 0
    d = oracle_input(point)
    if d is None:
        print("oracle rate     : 0  (deterministic input)")
        rate = fine = 0.0
    else:
        rate = oracle_secrecy_rate(d, point.gains, cfg.sigma_b, cfg.sigma_e, QuadratureSpec(tol=quad_tol))
        fine = oracle_secrecy_rate(d, point.gains, cfg.sigma_b, cfg.sigma_e, QuadratureSpec(tol=quad_tol / 2))
        print(f"oracle rate     : {fmt(rate)}  [{d.kind} input, quadrature]")
        change = abs(fine - rate)
        print(f"stability       : |rate(tol/2) - rate(tol)| = {change:.3g}"
              + (" (stable)" if change < 1e-6 else " (UNSTABLE)"))
    low_ok = rep.lower_2 <= rate + SANDWICH_LOWER_TOL
    up_ok = rate <= rep.upper + SANDWICH_UPPER_TOL
    print(f"lower_2 <= rate : {'yes' if low_ok else 'NO'}")
    print(f"rate <= upper   : {'yes' if up_ok else 'NO'}")
    if low_ok and up_ok:
        print("SANDWICH OK")
        return 0
    print("SANDWICH VIOLATED")
    return 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vlcsecrecy",
        description="Secrecy-capacity bounds for indoor visible-light wiretap channels.",
        epilog="exit codes: 0 success, 1 validation error, 2 numerical failure",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="INI run configuration")
        sp.add_argument("--out", help="output path (directory for 'tables')")
        sp.add_argument("--format", default="csv", choices=["csv"])

    sp = sub.add_parser("bounds", help="evaluate all bounds at one operating point")
    common(sp)
    sp.add_argument("--shannon", action="store_true", help="also report the Shannon-limit convention")
    sp = sub.add_parser("sweep", help="sweep one variable and write a CSV")
    common(sp)
    sp.add_argument("--shannon", action="store_true")
    sp.add_argument("--threads", type=int, default=1)
    sp = sub.add_parser("tables", help="upper-lower gap tables on the published grid")
    common(sp, config_required=False)
    sp = sub.add_parser("region", help="insecure-region map over the receiver plane")
    common(sp)
    sp.add_argument("--threads", type=int, default=1)
    sp = sub.add_parser("oracle", help="compare bounds with a quadrature secrecy rate")
    common(sp)
    sp.add_argument("--quad-tol", type=float, default=1e-8)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = None
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc}") from None
            cfg = parse_config(text)
        out = args.out or (cfg.output.path if cfg is not None else None)
        shannon = getattr(args, "shannon", False) or (cfg is not None and cfg.output.shannon)
        threads = max(1, getattr(args, "threads", 1))
        if args.cmd == "bounds":
            return cmd_bounds(cfg, out, shannon)
        if args.cmd == "sweep":
            return cmd_sweep(cfg, out, shannon, threads)
        if args.cmd == "tables":
            return cmd_tables(cfg, args.out)
        if args.cmd == "region":
            return cmd_region(cfg, out, threads)
        if not args.quad_tol > 0.0:
            raise ConfigError("--quad-tol must be positive")
        return cmd_oracle(cfg, args.quad_tol)
    except (QuadratureError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
