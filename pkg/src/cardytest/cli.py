"""Command-line entry point: ``cardytest <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import closedforms, fekete, iesum, qseries, slitmap
from .cache import RhoCache, default_cache_path, parse_record, solve_key
from .errors import DomainError, ResourceError, SolverError

log = logging.getLogger("cardytest")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_RESOURCE = 4

IESUM_HEADER = ["n", "num_classes", "num_solves", "S_n", "gap_to_limit", "wall_time_s"]
CARDY_HEADER = ["rho", "q", "F0", "asymptote", "gap", "tail_bound", "lower_ok", "upper_ok"]


@dataclass
class RunConfig:
    command: str
    tol: float = slitmap.DEFAULT_TOL
    eps: float = 1e-12
    n: int | None = None
    rho: list = field(default_factory=list)
    out: str | None = None
    format: str = "csv"
    cache: str | None = None
    threads: int = 1
    route: str = "compositions"
    timing: bool = False

    def __post_init__(self):
        if not self.tol > 0 or not self.eps > 0:
            raise DomainError("tolerances must be positive")
        if self.format not in ("csv", "json"):
            raise DomainError(f"unknown format {self.format!r}")


def fmt(x):
    """12 significant digits, shared by the CSV and JSON writers."""
    if isinstance(x, bool) or isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


class TableWriter:
    """Row-at-a-time CSV or JSON output; CSV rows are flushed as they arrive."""

    def __init__(self, header, fmt_name="csv", path=None):
        self.header = header
        self.format = fmt_name
        self.rows = []
        self._fh = open(path, "w", newline="") if path else sys.stdout
        self._owns = path is not None
        if self.format == "csv":
            self._csv = csv.writer(self._fh, lineterminator="\n")
            self._csv.writerow(header)
            self._fh.flush()

    def write(self, values):
        cells = ["" if v is None else fmt(v) for v in values]
        if self.format == "csv":
            self._csv.writerow(cells)
            self._fh.flush()
        else:
            self.rows.append({h: _json_value(c) for h, c in zip(self.header, cells)})

    def close(self):
        if self.format == "json":
            json.dump(self.rows, self._fh, indent=1)
            self._fh.write("\n")
        if self._owns:
            self._fh.close()
        else:
            self._fh.flush()


def _json_value(cell):
    if cell == "":
        return None
    if cell in ("True", "False"):
        return cell == "True"
    try:
        return int(cell)
    except ValueError:
        return float(cell)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_cardy(cfg):
    writer = TableWriter(CARDY_HEADER, cfg.format, cfg.out)
    try:
        for rho in cfg.rho:
            ev = qseries.cardy_F0(rho, cfg.eps)
            writer.write([
                rho, ev.q, ev.value, qseries.asymptotic_F0(rho), ev.gap_to_asymptote,
                ev.tail_bound, ev.value >= rho - qseries.LN16, ev.value <= rho,
            ])
    finally:
        writer.close()
    return EXIT_OK


def cmd_slitmap(cfg, parts=None, gammas=None):
    if parts is not None:
        gaps = slitmap.GapVector.from_parts(parts)
    else:
        gaps = slitmap.GapVector.from_gammas(gammas)
    sol = slitmap.solve_prevertices(slitmap.SlitConfiguration(gaps), cfg.tol)
    gm = slitmap.geometric_mean_identity(sol)
    record = {
        "gammas": list(gaps.gammas),
        "rho0": sol.rho0,
        "rho_inf": 1.0 / sol.rho0,
        "prevertex_angles": sol.prevertex_angles.tolist(),
        "critical_angles": sol.critical_angles.tolist(),
        "a": gm["a"].tolist(),
        "rho0_check": gm["rho0_check"],
        "residual": sol.residual,
        "iterations": sol.iterations,
    }
    _emit_record(record, cfg)
    return EXIT_OK


def cmd_closedform(cfg, kind, value):
    if kind == "single":
        rho0 = closedforms.rho0_single()
    elif kind == "two":
        rho0 = closedforms.rho0_two(value)
    elif kind == "equal":
        if value != int(value):
            raise DomainError("equal needs an integer slit count")
        rho0 = closedforms.rho0_equal(int(value))
    else:
        rho0 = closedforms.rho0_sym3(value)
    _emit_record({"kind": kind, "value": value, "rho0": rho0, "log_rho0": math.log(rho0)}, cfg)
    return EXIT_OK


def cmd_fekete(cfg, parts, N, fekete_n, restarts):
    gaps = slitmap.GapVector.from_parts(parts)
    E = fekete.SegmentSet.from_gaps(gaps.gammas)
    est = fekete.equilibrium_energy(E, N)
    deltas = [(n, fekete.fekete_delta(E, n, restarts)) for n in fekete_n]
    rho0 = slitmap.solve_prevertices(slitmap.SlitConfiguration(gaps), cfg.tol).rho0
    record = {
        "parts": list(parts),
        "rho_inf_energy": est.rho_inf,
        "energy": est.energy_estimate,
        "delta": {str(n): d for n, d in deltas},
        "rho0_solver": rho0,
        "product": est.rho_inf * rho0,
    }
    _emit_record(record, cfg)
    return EXIT_OK


def _emit_record(record, cfg):
    text = json.dumps(record, indent=1) if cfg.format == "json" else "\n".join(
        f"{k}: {_fmt_any(v)}" for k, v in record.items()
    )
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
    else:
        print(text)


def _fmt_any(v):
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, list):
        return ", ".join(_fmt_any(x) for x in v)
    if isinstance(v, dict):
        return ", ".join(f"{k}={_fmt_any(x)}" for k, x in v.items())
    return str(v)


def _open_cache(cfg):
    if cfg.cache == "none":
        return RhoCache(None, cfg.tol, cfg.threads)
    path = Path(cfg.cache) if cfg.cache else default_cache_path()
    return RhoCache(path, cfg.tol, cfg.threads)


def cmd_iesum(cfg):
    cache = _open_cache(cfg)
    writer = TableWriter(IESUM_HEADER, cfg.format, cfg.out)
    status = EXIT_OK
    try:
        for n in range(1, cfg.n + 1):
            fn = iesum.partial_sum_compositions if cfg.route == "compositions" else iesum.partial_sum_subsets
            try:
                row = fn(n, cache)
            except SolverError as exc:
                log.error("n=%d failed: %s", n, exc)
                writer.write([n, None, None, None, None, None])
                status = EXIT_SOLVER
                continue
            log.info(
                "n=%d classes=%d solves=%d S=%.12g (%.2fs)",
                n, row.distinct_classes, row.num_solves, row.S_n, row.wall_time,
            )
            writer.write([
                n, row.distinct_classes, row.num_solves, row.S_n, row.gap_to_limit,
                row.wall_time if cfg.timing else None,
            ])
    finally:
        writer.close()
    return status


def cmd_verify(cfg, n_max=8, table=None, fekete_configs=3):
    """Cross-module checks; returns EXIT_OK iff every check passes."""
    failures = []
    lines = []

    def check(name, ok, detail):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        if not ok:
            failures.append(name)

    tol = 1e-8
    for m in range(1, 9):
        got = slitmap.rho0_from_gaps(slitmap.GapVector.from_parts([1] * m))
        want = closedforms.rho0_equal(m)
        check(f"equal slits m={m}", abs(got - want) < tol, f"solver {got:.15g} closed form {want:.15g}")
    for n in range(2, 13):
        worst = 0.0
        for a in range(1, n):
            got = slitmap.rho0_from_gaps(slitmap.GapVector.from_parts([a, n - a]))
            worst = max(worst, abs(got - closedforms.rho0_two(2 * a / n)))
        check(f"two slits n={n}", worst < tol, f"max deviation {worst:.2e}")
    for g in (0.2, 0.4, 0.5, 2 / 3, 0.8):
        got = slitmap.rho0_from_gaps((g, g, 2 - 2 * g))
        want = closedforms.rho0_sym3(g)
        check(f"three slits gamma={g:.4g}", abs(got - want) < 1e-6, f"solver {got:.12g} closed form {want:.12g}")
    for base in ((2.0,), (1.0, 1.0), (0.8, 1.2)):
        for k in range(2, 6):
            r = slitmap.symmetrize_check(slitmap.GapVector.from_gammas(base), k)
            dev = abs(r["predicted_rho0"] - r["solved_rho0"])
            check(f"symmetrization {base} k={k}", dev < tol, f"deviation {dev:.2e}")

    cache = RhoCache(None, cfg.tol)
    for n in range(1, n_max + 1):
        a = iesum.partial_sum_subsets(n, cache).S_n
        b = iesum.partial_sum_compositions(n, cache).S_n
        check(f"route equivalence n={n}", abs(a - b) <= 1e-12, f"subsets {a:.15g} compositions {b:.15g}")

    configs = [(1, 1, 2), (1, 2, 3), (2, 1, 1, 4)][:fekete_configs]
    for parts in configs:
        gaps = slitmap.GapVector.from_parts(parts)
        rho0 = slitmap.rho0_from_gaps(gaps)
        est = fekete.equilibrium_energy(fekete.SegmentSet.from_gaps(gaps.gammas), 256)
        prod = rho0 * est.rho_inf
        check(f"energy oracle {parts}", abs(prod - 1) < 0.02, f"rho0 * rho_inf = {prod:.6f}")

    if cfg.cache and cfg.cache != "none" and Path(cfg.cache).exists():
        bad = []
        count = 0
        with open(cfg.cache) as fh:
            for line in fh:
                if not line.strip():
                    continue
                key, rho0, _, _ = parse_record(line)
                fresh = solve_key(key, cfg.tol)[0]
                count += 1
                if abs(fresh - rho0) > 10 * cfg.tol * rho0:
                    bad.append((key, rho0, fresh))
        detail = f"{count} entries re-solved"
        for key, got, want in bad[:10]:
            detail += f"; class {','.join(map(str, key))}: cached {got!r} vs solved {want!r}"
        check("cache soundness", not bad, detail)

    if table and Path(table).exists():
        with open(table) as fh:
            rows = [r for r in csv.DictReader(fh) if r["S_n"]]
        last = rows[-1]
        lines.append(f"INFO  2pi/sqrt(3) - S({last['n']}) = {float(last['gap_to_limit']):.12g}")
    else:
        s = iesum.partial_sum_compositions(n_max, cache).S_n
        lines.append(f"INFO  2pi/sqrt(3) - S({n_max}) = {iesum.CARDY_LIMIT - s:.12g}")

    out = "\n".join(lines)
    if cfg.out:
        Path(cfg.out).write_text(out + "\n")
    print(out)
    print(f"{len(lines) - 1 - len(failures)} passed, {len(failures)} failed")
    return EXIT_OK if not failures else 1


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=slitmap.DEFAULT_TOL, help="solver tolerance")
    common.add_argument("--eps", type=float, default=1e-12, help="series truncation bound")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache", help="cache file, or 'none' (default: $%s or ~/.cache)" % "CARDYTEST_CACHE_DIR")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="cardytest", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cardy", parents=[common], help="evaluate Cardy's series F0(rho)")
    c.add_argument("--rho", type=_float_list, required=True, help="comma-separated rho values")

    s = sub.add_parser("slitmap", parents=[common], help="solve one slit configuration")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--parts", type=_int_list, help="integer gap parts, e.g. 1,2,3")
    g.add_argument("--gammas", type=_float_list, help="real gaps summing to 2")

    cf = sub.add_parser("closedform", parents=[common], help="closed-form rho0")
    cf.add_argument("kind", choices=("single", "two", "equal", "sym3"))
    cf.add_argument("value", type=float, nargs="?", default=0.0, help="gamma, or m for 'equal'")

    f = sub.add_parser("fekete", parents=[common], help="capacity oracle for one configuration")
    f.add_argument("--parts", type=_int_list, required=True)
    f.add_argument("--N", type=int, default=512, help="panels per segment")
    f.add_argument("--fekete-n", type=_int_list, default=[8, 16, 32])
    f.add_argument("--restarts", type=int, default=2)

    i = sub.add_parser("iesum", parents=[common], help="inclusion/exclusion partial sums S(1..n)")
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--route", choices=("subsets", "compositions"), default="compositions")
    i.add_argument("--timing", action="store_true", help="record wall times (breaks byte-identical output)")

    v = sub.add_parser("verify", parents=[common], help="run the cross-module check suite")
    v.add_argument("--n", type=int, default=8, help="largest n for route equivalence")
    v.add_argument("--table", help="iesum CSV whose last row is reported")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = RunConfig(
            command=args.command,
            tol=args.tol,
            eps=args.eps,
            n=getattr(args, "n", None),
            rho=getattr(args, "rho", []),
            out=args.out,
            format=args.format,
            cache=args.cache,
            threads=args.threads,
            route=getattr(args, "route", "compositions"),
            timing=getattr(args, "timing", False),
        )
        if args.command == "cardy":
            return cmd_cardy(cfg)
        if args.command == "slitmap":
            return cmd_slitmap(cfg, args.parts, args.gammas)
        if args.command == "closedform":
            return cmd_closedform(cfg, args.kind, args.value)
        if args.command == "fekete":
            return cmd_fekete(cfg, args.parts, args.N, args.fekete_n, args.restarts)
        if args.command == "iesum":
            if not 1 <= cfg.n <= iesum.DEFAULT_CAP:
                raise DomainError(f"--n must lie in 1..{iesum.DEFAULT_CAP}")
            return cmd_iesum(cfg)
        return cmd_verify(cfg, args.n, args.table)
    except DomainError as exc:
        print(f"cardytest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"cardytest: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ResourceError as exc:
        print(f"cardytest: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
