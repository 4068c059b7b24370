import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cardytest.closedforms import rho0_equal, rho0_single, rho0_two
from cardytest.errors import DomainError
from cardytest.iesum import (
    CARDY_LIMIT,
    canonical_masks,
    canonicalize,
    enumerate_compositions,
    enumerate_subsets,
    mask_to_parts,
    partial_sum_compositions,
    partial_sum_subsets,
    series_table,
)
from cardytest.slitmap import GapVector, rho0_from_gaps

S3 = 3 * math.log(4) - 3 * math.log(rho0_two(2 / 3)) + (2 / 3) * math.log(2)


def gaps_of(subset, n):
    s = sorted(subset)
    return tuple(s[i + 1] - s[i] for i in range(len(s) - 1)) + (n - s[-1] + s[0],)


def naive_sum(n):
    """Every nonempty subset solved from scratch, no classes, no cache."""
    terms = []
    for m in range(1, n + 1):
        for subset in combinations(range(n), m):
            rho = rho0_from_gaps(GapVector.from_parts(gaps_of(subset, n)))
            terms.append((-1) ** (m - 1) * math.log(rho))
    return math.fsum(terms)


@pytest.mark.parametrize(
    "parts,canon",
    [((1, 2, 1, 2), (1, 2, 1, 2)), ((2, 1), (1, 2)), ((1, 3, 2), (1, 2, 3)), ((5,), (5,))],
)
def test_canonicalize_examples(parts, canon):
    assert canonicalize(parts).parts == canon


@settings(max_examples=100)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=8), st.integers(0, 7), st.booleans())
def test_canonicalize_invariance(parts, k, flip):
    c = canonicalize(parts)
    assert canonicalize(c.parts).parts == c.parts
    k %= len(parts)
    moved = parts[k:] + parts[:k]
    if flip:
        moved = moved[::-1]
    assert canonicalize(moved) == c


def test_canonicalize_rejects():
    with pytest.raises(DomainError):
        canonicalize((0, 1))


def test_orbit_sizes():
    assert canonicalize((1, 1, 1)).orbit_size == 1
    assert canonicalize((1, 2)).orbit_size == 2
    assert canonicalize((1, 2, 3)).orbit_size == 6
    assert canonicalize((1, 2)).subset_count == 3
    assert canonicalize((1, 1)).subset_count == 1


def test_mask_classes_match_parts_classes():
    n = 9
    masks = np.arange(1, 1 << n, dtype=np.uint32)
    canon = canonical_masks(masks, n)
    for mask, cm in zip(masks[::7], canon[::7]):
        assert canonicalize(mask_to_parts(int(mask), n)) == canonicalize(mask_to_parts(int(cm), n))


@pytest.mark.parametrize("n", range(1, 11))
def test_subset_counts(n):
    classes, counts, total = enumerate_subsets(n)
    assert total == 2**n - 1
    assert counts.sum() == total
    assert all(c.subset_count == k for c, k in zip(classes, counts))


@pytest.mark.parametrize("n", range(1, 11))
def test_composition_weights_equal_subset_counts(n):
    c1, w1, _ = enumerate_subsets(n)
    c2, w2, total = enumerate_compositions(n)
    assert total == 2 ** (n - 1)
    assert dict(zip([c.parts for c in c1], w1)) == dict(zip([c.parts for c in c2], w2))


def test_first_sums(cache):
    assert partial_sum_subsets(1, cache).S_n == pytest.approx(math.log(4), abs=1e-12)
    assert partial_sum_subsets(2, cache).S_n == pytest.approx(3 * math.log(2), abs=1e-12)
    assert partial_sum_subsets(3, cache).S_n == pytest.approx(S3, abs=1e-12)
    assert S3 == pytest.approx(2.3716, abs=1e-4)


def test_two_by_hand(cache):
    row = partial_sum_compositions(2, cache)
    # (2) with weight 2, (1, 1) with weight 1
    assert row.S_n == pytest.approx(2 * math.log(rho0_single()) - math.log(rho0_equal(2)), abs=1e-14)


@pytest.mark.parametrize("n", range(1, 9))
def test_against_naive_enumeration(n, cache):
    assert partial_sum_compositions(n, cache).S_n == pytest.approx(naive_sum(n), abs=1e-10)


@pytest.mark.parametrize("n", range(1, 11))
def test_route_equivalence(n, cache):
    a = partial_sum_subsets(n, cache)
    b = partial_sum_compositions(n, cache)
    assert abs(a.S_n - b.S_n) <= 1e-12
    assert a.subsets_evaluated == 2**n - 1
    assert a.distinct_classes == b.distinct_classes


def test_series_monotone_and_below_limit(cache):
    rows = list(series_table(14, cache))
    s = [r.S_n for r in rows]
    assert [r.n for r in rows] == list(range(1, 15))
    assert all(b > a for a, b in zip(s, s[1:]))
    assert all(r.gap_to_limit == pytest.approx(CARDY_LIMIT - r.S_n) for r in rows)
    assert all(r.gap_to_limit > 0 for r in rows)


def test_cache_shared_across_rows():
    from cardytest.cache import RhoCache

    c = RhoCache()
    first = partial_sum_compositions(4, c)
    again = partial_sum_compositions(4, c)
    assert first.num_solves > 0 and again.num_solves == 0
    # (2, 2) at n=4 is the same configuration as (1, 1) at n=2
    assert (1, 1) in c


def test_order_independent_sum(cache):
    a = partial_sum_compositions(9, cache).S_n
    from cardytest.cache import RhoCache

    fresh = RhoCache(threads=3)
    assert partial_sum_compositions(9, fresh).S_n == a


def test_cache_soundness(cache):
    partial_sum_compositions(8, cache)
    for key in sorted(cache.entries)[:60]:
        assert rho0_from_gaps(GapVector.from_parts(key)) == pytest.approx(cache.rho0(key), abs=1e-10)


def test_range_check():
    with pytest.raises(DomainError):
        partial_sum_subsets(0)
    with pytest.raises(DomainError):
        partial_sum_compositions(25)
