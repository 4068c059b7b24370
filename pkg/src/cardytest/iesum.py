"""Inclusion/exclusion sums over slit configurations on roots of unity.

For ``n`` equally spaced directions, every nonempty subset ``T`` of ``Z_n``
gives a slit domain whose conformal radius depends only on the cyclic gap
pattern of ``T`` up to rotation and reversal.  The partial sum is

    S(n) = sum_{T != {}} (-1)^(|T|-1) log rho0(gaps of T).

Two enumerations are provided.  ``partial_sum_subsets`` walks all ``2^n - 1``
subsets.  ``partial_sum_compositions`` walks compositions ``(a_1..a_m)`` of
``n`` with the first slit on angle 0 and weights each by ``a_m``, the number
of admissible base angles.  Both group terms by dihedral class so each
class is solved once.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .cache import RhoCache
from .errors import DomainError, SolverError

log = logging.getLogger(__name__)

CARDY_LIMIT = 2.0 * math.pi / math.sqrt(3.0)
DEFAULT_CAP = 24


@dataclass(frozen=True)
class CanonicalClass:
    n: int
    parts: tuple
    orbit_size: int

    @property
    def m(self):
        return len(self.parts)

    @property
    def subset_count(self):
        """Number of subsets of Z_n with this gap pattern."""
        return self.orbit_size * self.n // self.m

    @property
    def key(self):
        g = reduce(math.gcd, self.parts)
        return tuple(a // g for a in self.parts)


@dataclass
class PartialSumRow:
    n: int
    subsets_evaluated: int
    distinct_classes: int
    S_n: float
    gap_to_limit: float
    wall_time: float
    num_solves: int = 0


def _dihedral_images(parts):
    m = len(parts)
    rev = parts[::-1]
    for k in range(m):
        yield parts[k:] + parts[:k]
        yield rev[k:] + rev[:k]


def canonicalize(parts):
    """Lexicographically least rotation or reversed rotation of ``parts``."""
    parts = tuple(int(a) for a in parts)
    if not parts or any(a <= 0 for a in parts):
        raise DomainError(f"parts must be positive integers: {parts}")
    images = set(_dihedral_images(parts))
    return CanonicalClass(sum(parts), min(images), len(images))


# --------------------------------------------------------------------------
# bitmask enumeration
# --------------------------------------------------------------------------


def _dtype(n):
    return np.uint32 if n <= 31 else np.uint64


def _bit_reverse(x, n):
    out = np.zeros_like(x)
    one = x.dtype.type(1)
    for i in range(n):
        out |= ((x >> x.dtype.type(i)) & one) << x.dtype.type(n - 1 - i)
    return out


def canonical_masks(masks, n):
    """Minimal mask over the dihedral orbit of each subset of Z_n."""
    dt = masks.dtype.type
    full = dt((1 << n) - 1)
    best = masks.copy()
    for base in (masks, _bit_reverse(masks, n)):
        for k in range(n):
            if k == 0:
                rot = base
            else:
                rot = ((base << dt(k)) | (base >> dt(n - k))) & full
            np.minimum(best, rot, out=best)
    return best


def mask_to_parts(mask, n):
    pos = [i for i in range(n) if (mask >> i) & 1]
    parts = [pos[j + 1] - pos[j] for j in range(len(pos) - 1)]
    parts.append(n - pos[-1] + pos[0])
    return tuple(parts)


def _classes_from_masks(uniq, n):
    return [canonicalize(mask_to_parts(int(u), n)) for u in uniq]


def enumerate_subsets(n):
    """Dihedral classes of nonempty subsets of Z_n with their subset counts.

    Returns ``(classes, counts, total_subsets)``.
    """
    dt = _dtype(n)
    masks = np.arange(1, 1 << n, dtype=dt)
    canon = canonical_masks(masks, n)
    uniq, counts = np.unique(canon, return_counts=True)
    return _classes_from_masks(uniq, n), counts.astype(np.int64), int(masks.size)


def enumerate_compositions(n):
    """Dihedral classes of compositions of n, with the weight sum of a_m.

    A composition is encoded by a subset containing 0; its last part is
    ``n`` minus the largest element.
    """
    dt = _dtype(n)
    masks = (np.arange(0, 1 << (n - 1), dtype=dt) << dt(1)) | dt(1)
    top = np.floor(np.log2(masks.astype(np.float64))).astype(np.int64)
    last = n - top
    canon = canonical_masks(masks, n)
    uniq, inverse = np.unique(canon, return_inverse=True)
    weights = np.bincount(inverse.ravel(), weights=last, minlength=uniq.size)
    return _classes_from_masks(uniq, n), np.rint(weights).astype(np.int64), int(masks.size)


# --------------------------------------------------------------------------
# sums
# --------------------------------------------------------------------------


def _check_n(n, cap):
    if not 1 <= n <= cap:
        raise DomainError(f"n must lie in 1..{cap}, got {n}")


def _signed_sum(classes, weights, cache):
    # canonical order, exact integer weights, compensated accumulation
    order = sorted(range(len(classes)), key=lambda i: (classes[i].m, classes[i].parts))
    terms = []
    for i in order:
        c = classes[i]
        sign = 1 if c.m % 2 == 1 else -1
        terms.append(sign * int(weights[i]) * math.log(cache.rho0(c.key)))
    return math.fsum(terms)


def _row(n, classes, weights, evaluated, cache, t0):
    before = cache.solves
    try:
        cache.ensure([c.key for c in classes])
    except SolverError as exc:
        raise SolverError(f"n={n}: {exc}", exc.best_iterate, exc.residual, exc.key) from exc
    s = _signed_sum(classes, weights, cache)
    if s >= CARDY_LIMIT:
        log.warning("S(%d) = %.12g exceeds 2pi/sqrt(3); this contradicts Cardy's formula", n, s)
    return PartialSumRow(
        n=n,
        subsets_evaluated=evaluated,
        distinct_classes=len(classes),
        S_n=s,
        gap_to_limit=CARDY_LIMIT - s,
        wall_time=time.perf_counter() - t0,
        num_solves=cache.solves - before,
    )


def partial_sum_subsets(n, cache=None, cap=DEFAULT_CAP):
    _check_n(n, cap)
    cache = cache if cache is not None else RhoCache()
    t0 = time.perf_counter()
    classes, counts, evaluated = enumerate_subsets(n)
    return _row(n, classes, counts, evaluated, cache, t0)


def partial_sum_compositions(n, cache=None, cap=DEFAULT_CAP):
    _check_n(n, cap)
    cache = cache if cache is not None else RhoCache()
    t0 = time.perf_counter()
    classes, weights, evaluated = enumerate_compositions(n)
    return _row(n, classes, weights, evaluated, cache, t0)


def series_table(n_max, cache=None, cap=DEFAULT_CAP, route="compositions", start=1):
    """Yield rows for n = start..n_max, sharing one cache."""
    _check_n(n_max, cap)
    cache = cache if cache is not None else RhoCache()
    fn = partial_sum_compositions if route == "compositions" else partial_sum_subsets
    for n in range(start, n_max + 1):
        row = fn(n, cache, cap)
        log.info(
            "n=%d classes=%d solves=%d S=%.12g (%.1fs)",
            n, row.distinct_classes, row.num_solves, row.S_n, row.wall_time,
        )
        yield row
