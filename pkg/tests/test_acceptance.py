"""Acceptance criteria, one test and one PASS/FAIL line each."""

import csv
import math
import time

import numpy as np
import pytest

from cardytest import cli
from cardytest.closedforms import rho0_equal, rho0_single, rho0_sym3, rho0_two
from cardytest.fekete import SegmentSet, equilibrium_energy
from cardytest.iesum import partial_sum_compositions, partial_sum_subsets
from cardytest.qseries import CARDY_CONSTANT, LN16, cardy_F0, evaluate_truncated
from cardytest.slitmap import GapVector, rho0_from_gaps, symmetrize_check

TABLE_N = 22
REFERENCE = {18: 3.0140, 19: 3.0236, 20: 3.0318, 21: 3.0390, 22: 3.0451}
LIMIT = 3.6276


def test_closed_form_regression(report):
    t = time.perf_counter()
    worst = abs(rho0_from_gaps(GapVector.from_parts((1,))) - rho0_single())
    for n in range(2, 21):
        for a in range(1, n):
            worst = max(worst, abs(rho0_from_gaps(GapVector.from_parts((a, n - a))) - rho0_two(2 * a / n)))
    for m in range(1, 9):
        worst = max(worst, abs(rho0_from_gaps(GapVector.from_parts([1] * m)) - rho0_equal(m)))
    dt = time.perf_counter() - t
    ok = worst < 1e-8 and dt < 10
    report("1 closed-form regression", ok, f"max deviation {worst:.1e}, {dt:.2f}s")
    assert ok


def test_symmetric_three_slit(report):
    t = time.perf_counter()
    worst = max(abs(rho0_from_gaps((g, g, 2 - 2 * g)) - rho0_sym3(g)) for g in (0.2, 0.4, 0.5, 2 / 3, 0.8))
    dt = time.perf_counter() - t
    ok = worst < 1e-6 and dt < 5
    report("2 symmetric three-slit", ok, f"max deviation {worst:.1e}, {dt:.2f}s")
    assert ok


def test_symmetrization_law(report):
    t = time.perf_counter()
    worst = 0.0
    for base in ((2.0,), (1.0, 1.0), (0.8, 1.2)):
        for k in range(1, 6):
            r = symmetrize_check(GapVector.from_gammas(base), k)
            worst = max(worst, abs(r["predicted_rho0"] - r["solved_rho0"]))
    dt = time.perf_counter() - t
    ok = worst < 1e-8 and dt < 10
    report("3 symmetrization law", ok, f"max deviation {worst:.1e}, {dt:.2f}s")
    assert ok


def test_route_equivalence(report):
    from cardytest.cache import RhoCache

    t = time.perf_counter()
    cache = RhoCache()
    worst = max(
        abs(partial_sum_subsets(n, cache).S_n - partial_sum_compositions(n, cache).S_n) for n in range(1, 11)
    )
    dt = time.perf_counter() - t
    ok = worst <= 1e-12 and dt < 120
    report("4 route equivalence", ok, f"max difference {worst:.1e}, {dt:.2f}s")
    assert ok


def test_hand_derived_sums(report):
    from cardytest.cache import RhoCache

    t = time.perf_counter()
    cache = RhoCache()
    want = {
        1: math.log(4),
        2: 3 * math.log(2),
        # three singletons, three pairs (gaps 2/3, 4/3), one equal triple
        3: 3 * math.log(4) - 3 * math.log(rho0_two(2 / 3)) + (2 / 3) * math.log(2),
    }
    got = {n: partial_sum_subsets(n, cache).S_n for n in want}
    worst = max(abs(got[n] - want[n]) for n in want)
    dt = time.perf_counter() - t
    ok = worst < 1e-6 and abs(got[3] - 2.3716) < 1e-4 and dt < 5
    report("5 hand-derived sums", ok, f"S(3) = {got[3]:.6f}, max deviation {worst:.1e}, {dt:.2f}s")
    assert ok


@pytest.fixture(scope="module")
def table_runs(tmp_path_factory):
    """Two full table runs with fresh caches and different thread counts."""
    root = tmp_path_factory.mktemp("table")
    runs = []
    for threads in (1, 2):
        out = root / f"table_t{threads}.csv"
        t = time.perf_counter()
        code = cli.main([
            "iesum", "--n", str(TABLE_N), "--cache", str(root / f"cache_t{threads}.txt"),
            "--threads", str(threads), "--out", str(out),
        ])
        runs.append((code, out, time.perf_counter() - t))
    return runs


@pytest.mark.slow
def test_table_reproduction(table_runs, report):
    code, out, dt = table_runs[0]
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    s = {int(r["n"]): float(r["S_n"]) for r in rows}
    dev = max(abs(s[n] - v) for n, v in REFERENCE.items())
    increasing = all(s[n + 1] > s[n] for n in range(1, TABLE_N))
    ok = code == 0 and dev <= 0.005 and increasing and max(s.values()) < LIMIT and dt < 3600
    report(
        "6 S(n) table n=18..22",
        ok,
        f"S(22) = {s[TABLE_N]:.6f}, max deviation {dev:.4f}, increasing={increasing}, {dt:.0f}s",
    )
    assert ok


def _random_parts(rng):
    m = int(rng.integers(2, 5))
    n = int(rng.integers(m + 1, 13))
    cuts = np.sort(rng.choice(np.arange(1, n), m - 1, replace=False))
    return tuple(int(x) for x in np.diff(np.concatenate(([0], cuts, [n]))))


def test_energy_oracle(report):
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    configs = [_random_parts(rng) for _ in range(10)]
    for parts in configs:
        gaps = GapVector.from_parts(parts)
        est = equilibrium_energy(SegmentSet.from_gaps(gaps.gammas), 512)
        worst = max(worst, abs(rho0_from_gaps(gaps) * est.rho_inf - 1))
    single = equilibrium_energy(SegmentSet((0.0,)), 512).rho_inf
    dt = time.perf_counter() - t
    ok = worst < 0.02 and abs(single / 0.25 - 1) < 0.01 and dt < 300
    report(
        "7 energy oracle",
        ok,
        f"max |rho0 rho_inf - 1| = {worst:.2e} over {len(configs)} configs, "
        f"single segment {single:.6f}, {dt:.1f}s",
    )
    assert ok


def test_cardy_series(report):
    t = time.perf_counter()
    rhos = (10, 20, 50, 100, 200)
    lower, upper, stable = [], [], []
    gaps = []
    for rho in rhos:
        ev = cardy_F0(rho, 1e-12)
        lower.append(rho - LN16 <= ev.value)
        upper.append(ev.value <= rho)
        doubled = evaluate_truncated(rho, 2 * ev.truncation_k, 2 * ev.truncation_prod)
        stable.append(abs(doubled.value - ev.value) <= 1e-10)
        # the remainder itself needs a much finer truncation than the value
        gaps.append(abs(cardy_F0(rho, 1e-80).gap_to_asymptote))
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    dt = time.perf_counter() - t
    ok = all(lower) and all(upper) and all(stable) and decreasing and gaps[2] < 1e-2 and dt < 5
    fails = [r for r, lo in zip(rhos, lower) if not lo]
    report(
        "8 Cardy series",
        ok,
        f"lower bound fails at rho={fails} (F0(10) = {cardy_F0(10).value:.4f} vs "
        f"rho - ln16 = {10 - LN16:.4f}; F0 tends to rho - {CARDY_CONSTANT:.4f}), "
        f"upper {all(upper)}, decreasing {decreasing}, gap(50) = {gaps[2]:.1e}, "
        f"stable {all(stable)}, {dt:.2f}s",
    )
    assert ok


@pytest.mark.slow
def test_determinism_across_threads(table_runs, report):
    (c1, a, _), (c2, b, _) = table_runs
    same = c1 == 0 and c2 == 0 and a.read_bytes() == b.read_bytes()
    report("9 byte-identical table across --threads 1 and 2", same, f"{a.stat().st_size} bytes")
    assert same
