"""Cardy's annulus formula for the loop measure and its consistency checks.

    F0(rho) = 6 pi * N(q) / D(q),   q = exp(-2 pi^2 / rho),
    N(q) = sum_{k in Z} (-1)^(k-1) k q^(3k^2/2 - k + 1/8),
    D(q) = prod_{k >= 1} (1 - q^k).

For large ``rho`` the nome approaches 1, ``D`` is about ``exp(-rho/12)`` and
``N`` is an alternating sum that cancels down to the same size, so the
evaluation runs in a private mpmath context whose precision grows with
``rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import DomainError, ResourceError

CARDY_CONSTANT = 2.0 * math.pi / math.sqrt(3.0)
LN16 = math.log(16.0)

MAX_K = 100_000
MAX_PROD = 200_000
BOUNDS_ASSERT_RHO = 10.0


@dataclass(frozen=True)
class CardyEvaluation:
    rho: float
    q: float
    truncation_k: int
    truncation_prod: int
    value: float
    tail_bound: float
    gap_to_asymptote: float = math.nan


@dataclass(frozen=True)
class BoundsReport:
    rho: float
    value: float
    lower_ok: bool
    upper_ok: bool
    gap_to_asymptote: float
    asserted: bool


def _check_rho(rho):
    if not (rho > 0 and math.isfinite(rho)):
        raise DomainError(f"rho must be positive and finite, got {rho!r}")


def nome(rho):
    _check_rho(rho)
    return math.exp(-2.0 * math.pi**2 / rho)


def asymptotic_F0(rho):
    """Large-rho asymptote ``rho - 2 pi / sqrt(3)``."""
    _check_rho(rho)
    return rho - CARDY_CONSTANT


def _context(rho, eps=1e-16):
    ctx = mpmath.MPContext()
    # D ~ exp(-rho/12): the numerator loses about rho / (12 ln 10) digits
    lost = rho / (12.0 * math.log(10.0))
    wanted = max(16.0, -math.log10(eps) + math.log10(max(rho, 1.0)))
    ctx.dps = 20 + int(math.ceil(lost + wanted))
    return ctx


def _prod_tail(ctx, q, P):
    """Upper bound on sum_{k>P} q^k, which bounds 1 - prod_{k>P}(1 - q^k)."""
    return q ** (P + 1) / (1 - q)


def _num_tail(ctx, q, K):
    """Bound on sum_{|k|>K} |k| q^e(k).

    Negative ``k`` have the larger exponent, so twice the positive tail
    dominates; the positive tail is bounded by a geometric series.
    """
    k = K + 1
    t = k * q ** (ctx.mpf(3) * k * k / 2 - k + ctx.mpf(1) / 8)
    r = ctx.mpf(k + 1) / k * q ** (3 * k + ctx.mpf(1) / 2)
    if r >= 1:
        return ctx.inf
    return 2 * t / (1 - r)


def _numerator(ctx, q, K):
    acc = ctx.mpf(0)
    eighth = ctx.mpf(1) / 8
    for k in range(1, K + 1):
        base = ctx.mpf(3) * k * k / 2 + eighth
        term = k * (q ** (base - k) - q ** (base + k))
        acc += term if k % 2 == 1 else -term
    return acc


def _denominator(ctx, q, P):
    acc = ctx.mpf(1)
    qk = ctx.mpf(1)
    for _ in range(P):
        qk *= q
        acc *= 1 - qk
    return acc


def evaluate_truncated(rho, K, P, eps=1e-16):
    """F0 with fixed cutoffs ``|k| <= K`` and ``P`` product factors.

    ``eps`` only sets the working precision.
    """
    _check_rho(rho)
    ctx = _context(rho, eps)
    q = ctx.exp(-2 * ctx.pi**2 / ctx.mpf(rho))
    num = _numerator(ctx, q, K)
    den = _denominator(ctx, q, P)
    value = 6 * ctx.pi * num / den
    delta = _prod_tail(ctx, q, P)
    if delta >= 1:
        tail = ctx.inf
    else:
        den_lo = den * (1 - delta)
        tail = 6 * ctx.pi * _num_tail(ctx, q, K) / den_lo + abs(value) * delta / (1 - delta)
    # the remainder is far below double rounding for moderate rho
    gap = value - (ctx.mpf(rho) - 2 * ctx.pi / ctx.sqrt(3))
    return CardyEvaluation(
        rho=float(rho),
        q=nome(rho),
        truncation_k=K,
        truncation_prod=P,
        value=float(value),
        tail_bound=float(tail),
        gap_to_asymptote=float(gap),
    )


def _required_prod(q, target):
    # smallest P with q^(P+1) / (1 - q) <= target
    if q <= 0.0:
        return 1
    lq = math.log(q)
    need = (math.log(target) + math.log1p(-q)) / lq - 1.0
    return max(1, int(math.ceil(need)))


def _required_k(q, log_target):
    # smallest K with 2 (K+1) q^e(K+1) <= exp(log_target), ignoring the ratio factor
    if q <= 0.0:
        return 1
    lq = math.log(q)
    # 1.5 k^2 log q <= log_target gives a starting point just below the answer
    K = max(1, int(math.sqrt(max(log_target / (1.5 * lq), 0.0))) - 2)
    while True:
        k = K + 1
        if math.log(2 * k) + (1.5 * k * k - k + 0.125) * lq <= log_target:
            return K
        K += 1


def cardy_F0(rho, eps=1e-12, max_k=MAX_K, max_prod=MAX_PROD):
    """Evaluate Cardy's formula with a rigorous truncation bound ``<= eps``."""
    _check_rho(rho)
    if not eps > 0:
        raise DomainError("eps must be positive")
    q = nome(rho)
    scale = max(float(rho), 1.0) + 10.0
    P = _required_prod(q, eps / (4.0 * scale))
    # denominator is about exp(-rho/12); the numerator tail must sit below eps * D
    log_den = -rho / 12.0 if q > 0.5 else math.log1p(-q) - 1.0
    K = _required_k(q, log_den + math.log(eps / (8.0 * 6.0 * math.pi)))
    for _ in range(8):
        if K > max_k or P > max_prod:
            raise ResourceError(
                f"rho={rho} needs K={K} numerator terms and P={P} product factors "
                f"(caps {max_k}, {max_prod})"
            )
        ev = evaluate_truncated(rho, K, P, eps)
        if ev.tail_bound <= eps:
            return ev
        K = K + max(1, K // 2)
        P = 2 * P
    raise ResourceError(f"rho={rho}: could not reach eps={eps} (K={K}, P={P})")


def check_cardy_bounds(rho, eps=1e-12):
    """Compare F0 with ``rho - ln 16 <= F0 <= rho`` and the asymptote.

    The inequality is only claimed for large ``rho``; ``asserted`` marks
    rows with ``rho >= 10``, where callers should treat a failure as real.
    """
    _check_rho(rho)
    if rho < 1.0:
        raise DomainError("bounds check requires rho >= 1")
    ev = cardy_F0(rho, eps)
    return BoundsReport(
        rho=float(rho),
        value=ev.value,
        lower_ok=ev.value >= rho - LN16,
        upper_ok=ev.value <= rho,
        gap_to_asymptote=ev.gap_to_asymptote,
        asserted=rho >= BOUNDS_ASSERT_RHO,
    )
