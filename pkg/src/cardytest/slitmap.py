"""Disk maps onto the complement of radial slits.

The map from the unit disk onto ``C minus the union of rays [1, inf) e^{i phi_j}``
has the product form

    phi_+(z) = rho0 * z * prod_j (1 - z/z_j) ** (-gamma_j),   sum(gamma_j) = 2,

with prevertices ``z_j = exp(i theta_j)`` on the unit circle.  Between two
consecutive prevertices the argument of ``phi_+`` is constant, so every arc
of the circle is sent onto one slit, traversed out to the tip and back.  The
tip is the image of the unique critical point ``c_i = exp(i tau_i)`` on that
arc.  Only the tip radii are unknown: the prevertices have to be placed so
that every tip lies on the unit circle.

On the circle the critical-point equation ``1 = sum gamma_j z / (z - z_j)``
becomes the real equation

    g(tau) = sum_j gamma_j cot((tau - theta_j) / 2) = 0,

whose left side falls monotonically from +inf to -inf on every open arc
between prevertices.  The log tip radius is

    T_i = sum_j gamma_j log(2 |sin((tau_i - theta_j) / 2)|),

and the tip condition ``|phi_+(c_i)| = 1`` reads ``rho0 = exp(T_i)`` for all
``i``.  Because ``dT_i/dtau_i = g(tau_i)/2 = 0`` the Jacobian of ``T`` with
respect to the prevertices is explicit:

    dT_i/dtheta_k = -(gamma_k / 2) cot((tau_i - theta_k) / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from numba import njit

from .errors import DegenerateInputError, DomainError, PoleError, SolverError

TWO_PI = 2.0 * math.pi

DEFAULT_TOL = 1e-10
MAX_ITER = 200
MIN_GAP = 1e-6

# status codes returned by the compiled Newton loop
_CONVERGED = 0
_MAXITER = 1
_STALLED = 2


# --------------------------------------------------------------------------
# Domain types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GapVector:
    """Angular gaps between consecutive slits, in units of pi.

    In exact mode ``parts`` are positive integers summing to ``n`` and
    ``gamma_j = 2 * parts[j] / n``.  In real mode only ``gammas`` is set.
    """

    gammas: tuple
    parts: tuple | None = None
    n: int | None = None

    def __post_init__(self):
        if len(self.gammas) < 1:
            raise DomainError("a gap vector needs at least one entry")
        if any(not g > 0 for g in self.gammas):
            raise DomainError(f"gap entries must be positive: {self.gammas}")
        if self.parts is None and abs(math.fsum(self.gammas) - 2.0) > 1e-14:
            raise DomainError(f"gaps must sum to 2, got {math.fsum(self.gammas)!r}")

    @classmethod
    def from_parts(cls, parts, n=None):
        parts = tuple(int(a) for a in parts)
        if not parts or any(a <= 0 for a in parts):
            raise DomainError(f"parts must be positive integers: {parts}")
        total = sum(parts)
        if n is not None and n != total:
            raise DomainError(f"parts {parts} do not sum to n={n}")
        return cls(tuple(2.0 * a / total for a in parts), parts, total)

    @classmethod
    def from_gammas(cls, gammas):
        gammas = tuple(float(g) for g in gammas)
        # tolerate representation error from callers that build gaps as floats
        s = math.fsum(gammas)
        if abs(s - 2.0) <= 1e-14 * len(gammas):
            gammas = tuple(g * (2.0 / s) for g in gammas)
        return cls(gammas)

    @property
    def m(self):
        return len(self.gammas)

    @property
    def exact(self):
        return self.parts is not None

    def as_array(self):
        return np.asarray(self.gammas, dtype=float)

    def reduced(self):
        """Exact gaps divided by their gcd (the same gamma vector)."""
        if not self.exact:
            return self
        g = reduce(math.gcd, self.parts)
        return GapVector.from_parts([a // g for a in self.parts])

    def refine(self, k):
        """The k-fold configuration: every gap divided by k, repeated k times."""
        if k < 1:
            raise DomainError("k must be a positive integer")
        if self.exact:
            return GapVector.from_parts(self.parts * k)
        return GapVector.from_gammas(tuple(g / k for g in self.gammas) * k)


@dataclass(frozen=True)
class SlitConfiguration:
    """Slit directions ``phi_j = base_angle + pi * (gamma_1 + ... + gamma_{j-1})``."""

    gaps: GapVector
    base_angle: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.base_angle < TWO_PI:
            raise DomainError("base_angle must lie in [0, 2 pi)")

    @property
    def angles(self):
        offsets = np.concatenate(([0.0], np.cumsum(self.gaps.as_array()[:-1])))
        if self.gaps.exact:
            # exact partial sums keep equally spaced slits bit-identical
            acc = np.cumsum((0,) + self.gaps.parts[:-1])
            offsets = 2.0 * acc / self.gaps.n
        return self.base_angle + math.pi * offsets


@dataclass(frozen=True)
class SlitMapSolution:
    config: SlitConfiguration
    prevertex_angles: np.ndarray
    critical_angles: np.ndarray
    rho0: float
    residual: float
    iterations: int
    log_tip_radii: np.ndarray = field(repr=False, default=None)

    @property
    def gammas(self):
        return self.config.gaps.as_array()

    @property
    def m(self):
        return self.config.gaps.m


# --------------------------------------------------------------------------
# Compiled kernels
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _arc_bounds(theta, i):
    m = theta.size
    if i == 0:
        return theta[m - 1] - TWO_PI, theta[0]
    return theta[i - 1], theta[i]


@njit(cache=True, nogil=True)
def _cot_sum(tau, theta, gamma):
    g = 0.0
    dg = 0.0
    for j in range(theta.size):
        h = 0.5 * (tau - theta[j])
        s = math.sin(h)
        g += gamma[j] * math.cos(h) / s
        dg -= 0.5 * gamma[j] / (s * s)
    return g, dg


@njit(cache=True, nogil=True)
def _critical_kernel(theta, gamma, tau):
    """Root of the cot sum on every arc (theta[i-1], theta[i]).

    Newton safeguarded by the bracket; falls back to bisection whenever a
    Newton step leaves the current bracket.
    """
    m = theta.size
    for i in range(m):
        lo, hi = _arc_bounds(theta, i)
        t = 0.5 * (lo + hi)
        for _ in range(200):
            g, dg = _cot_sum(t, theta, gamma)
            if g > 0.0:
                lo = t
            elif g < 0.0:
                hi = t
            else:
                break
            tn = t - g / dg
            if not (lo < tn < hi):
                tn = 0.5 * (lo + hi)
            if abs(tn - t) <= 2e-16 * (1.0 + abs(t)) or hi - lo <= 4e-16 * (1.0 + abs(t)):
                t = tn
                break
            t = tn
        tau[i] = t


@njit(cache=True, nogil=True)
def _log_tips(theta, gamma, tau, out):
    m = theta.size
    for i in range(m):
        acc = 0.0
        for j in range(m):
            acc += gamma[j] * math.log(2.0 * abs(math.sin(0.5 * (tau[i] - theta[j]))))
        out[i] = acc


@njit(cache=True, nogil=True)
def _residual(theta, gamma, tau, T, F):
    _critical_kernel(theta, gamma, tau)
    _log_tips(theta, gamma, tau, T)
    r = 0.0
    for i in range(F.size):
        F[i] = T[i + 1] - T[i]
        r = max(r, abs(F[i]))
    return r


@njit(cache=True, nogil=True)
def _newton_kernel(theta, gamma, tol, maxit):
    """Damped Newton on the equal-tip-radius conditions; theta[m-1] is the gauge.

    ``theta`` is updated in place.  Returns (status, iterations, residual).
    """
    m = theta.size
    tau = np.empty(m)
    T = np.empty(m)
    if m == 1:
        _critical_kernel(theta, gamma, tau)
        return _CONVERGED, 0, 0.0
    F = np.empty(m - 1)
    J = np.empty((m - 1, m - 1))
    trial = np.empty(m)
    ttau = np.empty(m)
    tT = np.empty(m)
    tF = np.empty(m - 1)
    d = np.zeros(m)

    r = _residual(theta, gamma, tau, T, F)
    it = 0
    while it < maxit:
        if r <= tol:
            return _CONVERGED, it, r
        it += 1
        # dT_i/dtheta_k for k < m-1 (gauge fixed)
        for i in range(m - 1):
            for k in range(m - 1):
                a = -0.5 * gamma[k] / math.tan(0.5 * (tau[i + 1] - theta[k]))
                b = -0.5 * gamma[k] / math.tan(0.5 * (tau[i] - theta[k]))
                J[i, k] = a - b
        step = np.linalg.solve(J, -F)
        for k in range(m - 1):
            d[k] = step[k]
        d[m - 1] = 0.0
        # keep every prevertex arc at least 5% of its current length
        alpha = 1.0
        for i in range(m):
            if i == 0:
                arc = theta[0] - (theta[m - 1] - TWO_PI)
                darc = d[0] - d[m - 1]
            else:
                arc = theta[i] - theta[i - 1]
                darc = d[i] - d[i - 1]
            if darc < 0.0:
                alpha = min(alpha, -0.95 * arc / darc)
        norm0 = 0.0
        for i in range(m - 1):
            norm0 += F[i] * F[i]
        accepted = False
        for _ in range(40):
            for k in range(m):
                trial[k] = theta[k] + alpha * d[k]
            rt = _residual(trial, gamma, ttau, tT, tF)
            norm1 = 0.0
            for i in range(m - 1):
                norm1 += tF[i] * tF[i]
            if norm1 < (1.0 - 1e-4 * alpha) * norm0 or (rt <= tol and norm1 <= norm0):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            return _STALLED, it, r
        for k in range(m):
            theta[k] = trial[k]
            tau[k] = ttau[k]
            T[k] = tT[k]
        for i in range(m - 1):
            F[i] = tF[i]
        r = rt
    if r <= tol:
        return _CONVERGED, it, r
    return _MAXITER, it, r


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.size < 1:
        raise DomainError("need at least one prevertex")
    arcs = np.diff(np.concatenate((theta, [theta[0] + TWO_PI])))
    if np.any(arcs <= 0.0):
        raise DegenerateInputError("prevertices must be strictly ordered and distinct on the circle")
    return theta


def critical_points(theta, gaps):
    """Critical angles ``tau``: one root of the cot sum per prevertex arc.

    ``tau[i]`` lies on the open arc ``(theta[i-1], theta[i])``, taken
    cyclically, so the returned angles interleave with ``theta``.
    """
    theta = _check_theta(theta)
    gamma = gaps.as_array() if isinstance(gaps, GapVector) else np.asarray(gaps, dtype=float)
    if gamma.size != theta.size:
        raise DomainError("theta and gaps differ in length")
    tau = np.empty_like(theta)
    _critical_kernel(theta, gamma, tau)
    return tau


def cot_sum(tau, theta, gaps):
    """Left side of the reduced critical-point equation at ``tau``."""
    gamma = gaps.as_array() if isinstance(gaps, GapVector) else np.asarray(gaps, dtype=float)
    return float(np.sum(gamma / np.tan(0.5 * (tau - np.asarray(theta)))))


def initial_prevertices(gammas):
    """Midpoints between consecutive slit directions, gauge at the last one.

    Exact when all gaps are equal.
    """
    gammas = np.asarray(gammas, dtype=float)
    offsets = np.concatenate(([0.0], np.cumsum(gammas[:-1])))
    theta = math.pi * (offsets + 0.5 * gammas)
    return theta - theta[-1] + 0.0


def _continuation_path(gammas, steps):
    start = np.full(gammas.size, 2.0 / gammas.size)
    for s in np.linspace(0.0, 1.0, steps + 1)[1:]:
        yield (1.0 - s) * start + s * gammas


def _newton(theta, gammas, ftol, maxit):
    status, its, r = _newton_kernel(theta, gammas, ftol, maxit)
    return status == _CONVERGED, its, r


def _solve_theta(gammas, ftol, maxit, direct=True):
    best = (None, math.inf)
    total = 0
    if direct:
        theta = initial_prevertices(gammas)
        ok, its, r = _newton(theta, gammas, ftol, maxit)
        if ok:
            return theta, its, r
        best = (theta.copy(), r)
        total = its
    # continuation from the equal-gap configuration, refining on failure
    for steps in (4, 16, 64):
        theta = initial_prevertices(np.full(gammas.size, 2.0 / gammas.size))
        ok = True
        for g in _continuation_path(gammas, steps):
            ok, its, r = _newton(theta, g, ftol, maxit)
            total += its
            if not ok:
                break
        if ok:
            return theta, total, r
        if r < best[1]:
            best = (theta.copy(), r)
    raise SolverError(
        f"prevertex solve did not converge for gaps {tuple(gammas)} (residual {best[1]:.3e})",
        best_iterate=best[0],
        residual=best[1],
    )


def solve_prevertices(config, tol=DEFAULT_TOL, maxit=MAX_ITER):
    """Place the prevertices so every slit tip lies on the unit circle.

    Returns a :class:`SlitMapSolution` rotated so that the first critical
    point maps onto the tip of the slit at ``config.angles[0]``.
    """
    if isinstance(config, GapVector):
        config = SlitConfiguration(config)
    gaps = config.gaps
    if not 0.0 < tol <= 1e-4:
        raise DomainError("tol must lie in (0, 1e-4]")
    gammas = gaps.as_array()
    if gammas.min() < MIN_GAP:
        raise DegenerateInputError(f"gap below {MIN_GAP} is too close to touching slits")
    # Newton converges quadratically; drive well below the requested tolerance
    ftol = min(tol, 1e-14) if gammas.size > 1 else tol
    try:
        theta, its, _ = _solve_theta(gammas, ftol, maxit)
    except SolverError:
        # settle for the requested tolerance when the tight target stalls
        theta, its, _ = _solve_theta(gammas, tol, maxit)

    tau = np.empty_like(theta)
    T = np.empty_like(theta)
    _critical_kernel(theta, gammas, tau)
    _log_tips(theta, gammas, tau, T)
    log_rho0 = math.fsum(T) / T.size
    rho0 = math.exp(log_rho0)

    # rigid rotation aligning the first tip with the first slit direction
    arg1 = _arg_phi(np.exp(1j * tau[0]), theta, gammas)
    shift = config.angles[0] - arg1
    theta = theta + shift
    tau = tau + shift
    # normalize to [0, 2pi) while preserving cyclic order
    theta = np.mod(theta, TWO_PI)
    tau = np.mod(tau, TWO_PI)

    sol = SlitMapSolution(config, theta, tau, rho0, 0.0, its, T)
    return _with_residual(sol)


def _arg_phi(z, theta, gammas):
    zj = np.exp(1j * theta)
    return float(np.angle(z) - np.sum(gammas * np.angle(1.0 - z / zj)))


def _with_residual(sol):
    gammas = sol.gammas
    tips = np.exp(1j * sol.critical_angles)
    mod_err = np.abs(sol.rho0 * np.exp(-sol.log_tip_radii) - 1.0)
    angles = sol.config.angles
    arg_err = []
    for i, c in enumerate(tips):
        a = _arg_phi(c, sol.prevertex_angles, gammas)
        arg_err.append(abs(math.remainder(a - angles[i], TWO_PI)))
    residual = float(max(mod_err.max(), max(arg_err)))
    return SlitMapSolution(
        sol.config,
        sol.prevertex_angles,
        sol.critical_angles,
        sol.rho0,
        residual,
        sol.iterations,
        sol.log_tip_radii,
    )


def rho0_of(solution, i):
    """Conformal radius recomputed from the ``i``-th critical point (1-based)."""
    m = solution.m
    if not 1 <= i <= m:
        raise DomainError(f"index {i} outside 1..{m}")
    d = 2.0 * np.abs(np.sin(0.5 * (solution.critical_angles[i - 1] - solution.prevertex_angles)))
    return float(np.prod(d ** solution.gammas))


def map_eval(solution, z):
    """Evaluate phi_+ at ``z`` with principal branches (|z| <= 1)."""
    z = complex(z)
    if abs(z) > 1.0 + 1e-12:
        raise DomainError("map_eval is defined on the closed unit disk")
    zj = np.exp(1j * solution.prevertex_angles)
    w = 1.0 - z / zj
    if np.any(np.abs(w) < 1e-15):
        raise PoleError(f"z={z} is a prevertex")
    return complex(solution.rho0 * z * np.prod(np.exp(-solution.gammas * np.log(w))))


def geometric_mean_identity(solution):
    """Distances ``a_j = prod_i |1 - c_i/z_j|`` and ``(prod_j a_j^gamma_j)^(1/m)``."""
    diff = solution.critical_angles[:, None] - solution.prevertex_angles[None, :]
    dist = 2.0 * np.abs(np.sin(0.5 * diff))
    a = np.exp(np.sum(np.log(dist), axis=0))
    check = math.exp(float(np.sum(solution.gammas * np.log(a))) / solution.m)
    return {"a": a, "rho0_check": check}


def symmetrize_check(base, k, tol=DEFAULT_TOL):
    """Compare the solver on the k-fold refinement with rho0(base) ** (1/k).

    Composing a univalent ``f`` with ``z -> z^k`` and taking the k-th root
    gives the map for the refined slit set, so the conformal radius is the
    k-th root of the base one.
    """
    if k < 1:
        raise DomainError("k must be a positive integer")
    base_rho0 = solve_prevertices(SlitConfiguration(base), tol).rho0
    if k == 1:
        return {"predicted_rho0": base_rho0, "solved_rho0": base_rho0}
    solved = solve_prevertices(SlitConfiguration(base.refine(k)), tol).rho0
    return {"predicted_rho0": base_rho0 ** (1.0 / k), "solved_rho0": solved}


def rho0_from_gaps(gaps, tol=DEFAULT_TOL):
    """Conformal radius of the slit domain with the given gaps."""
    if not isinstance(gaps, GapVector):
        gaps = GapVector.from_gammas(gaps)
    return solve_prevertices(SlitConfiguration(gaps), tol).rho0


