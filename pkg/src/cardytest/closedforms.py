"""Closed-form conformal radii for the slit configurations that admit them."""

import math

from .errors import DomainError


def rho0_single():
    """One slit ``[1, inf)``: the Koebe map 4z/(1+z)^2."""
    return 4.0


def rho0_two(gamma):
    """Two slits with gaps ``(gamma, 2 - gamma)``.

    ``4 (g/2)^(g/2) (1 - g/2)^(1 - g/2)``, an exponentiated entropy.
    """
    if not 0.0 < gamma < 2.0:
        raise DomainError("gamma must lie strictly between 0 and 2")
    p = 0.5 * gamma
    return 4.0 * p**p * (1.0 - p) ** (1.0 - p)


def rho0_equal(m):
    """``m`` equally spaced slits; the Koebe map symmetrized by ``z -> z^m``."""
    if m < 1 or int(m) != m:
        raise DomainError("m must be a positive integer")
    return 2.0 ** (2.0 / m)


def _sym3_target(gamma):
    return 2.0 ** (gamma - 1.0) * gamma**gamma * (1.0 - gamma) ** (1.0 - gamma)


def rho0_sym3(gamma, xtol=1e-14):
    """Three slits with gaps ``(gamma, gamma, 2 - 2 gamma)``.

    Here ``x = cos t`` with ``exp(it)`` the off-axis prevertex; it solves
    ``(1 - x)^gamma / (1 + x) = 2^(gamma-1) gamma^gamma (1-gamma)^(1-gamma)``.
    The left side is monotone on [0, 1] so bisection finds the unique root.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError("gamma must lie strictly between 0 and 1")
    target = _sym3_target(gamma)
    if not 0.0 < target <= 1.0:
        raise DomainError(f"right-hand side {target} outside (0, 1]")

    def f(x):
        return (1.0 - x) ** gamma / (1.0 + x) - target

    lo, hi = 0.0, 1.0 - 1e-15
    if f(hi) > 0.0:
        raise DomainError(f"no root in [0, 1) for gamma={gamma}")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return 2.0 * (1.0 + x) * gamma**gamma * (1.0 - gamma) ** (1.0 - gamma)
