"""Transfinite diameter of a star of radial unit segments.

Two estimates that never touch the conformal map:

* ``fekete_delta`` maximizes the geometric mean of pairwise distances of
  ``n`` points on the set; these ``delta_n`` decrease to the capacity.
* ``equilibrium_energy`` minimizes the discretized logarithmic energy of a
  unit charge; the minimum is ``-log(capacity)``.

The star ``E = union_j [0, 1] exp(i phi_j)`` has capacity ``1 / rho0`` where
``rho0`` is the conformal radius of the complementary slit domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, SolverError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SegmentSet:
    angles: tuple

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.size < 1:
            raise DomainError("need at least one segment")
        if np.any(np.diff(a) <= 0) or a[-1] - a[0] >= TWO_PI:
            raise DomainError("angles must be strictly increasing within one turn")

    @classmethod
    def from_gaps(cls, gammas, base_angle=0.0):
        g = np.asarray(gammas, dtype=float)
        offsets = np.concatenate(([0.0], np.cumsum(g[:-1])))
        return cls(tuple(base_angle + math.pi * offsets))

    @property
    def m(self):
        return len(self.angles)

    def directions(self):
        return np.exp(1j * np.asarray(self.angles, dtype=float))


@dataclass
class CapacityEstimate:
    rho_inf: float
    energy_estimate: float = math.nan
    delta_sequence: list = field(default_factory=list)
    method: str = ""
    charges: np.ndarray | None = field(default=None, repr=False)
    energy_history: list = field(default_factory=list, repr=False)


# --------------------------------------------------------------------------
# Fekete points
# --------------------------------------------------------------------------


def _log_product(w):
    d = np.abs(w[:, None] - w[None, :])
    iu = np.triu_indices(w.size, 1)
    return float(np.sum(np.log(d[iu])))


def _ascent(t, seg, dirs, maxiter=500):
    """L-BFGS-B on the radial parameters with the segment assignment fixed."""
    u = dirs[seg]

    def f(x):
        w = x * u
        diff = w[:, None] - w[None, :]
        d2 = np.maximum(np.abs(diff) ** 2, 1e-300)
        np.fill_diagonal(d2, 1.0)
        val = -0.5 * np.sum(np.log(d2)) / 2.0
        # d/dx_i log|w_i - w_j| = Re(conj(u_i) (w_i - w_j)) / |w_i - w_j|^2
        grad = -np.sum(np.real(np.conj(u)[:, None] * diff) / d2, axis=1)
        return val, grad

    res = minimize(f, t, jac=True, method="L-BFGS-B", bounds=[(0.0, 1.0)] * t.size,
                   options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-12})
    return np.clip(res.x, 0.0, 1.0)


def _switch_pass(t, seg, dirs):
    """Move single points to another segment when that raises the product."""
    improved = False
    grid = 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, 65)))
    for i in range(t.size):
        others = np.delete(t * dirs[seg], i)
        with np.errstate(divide="ignore"):
            cur = float(np.sum(np.log(np.abs(t[i] * dirs[seg[i]] - others))))
        best = (cur, seg[i], t[i])
        for j in range(dirs.size):
            cand = grid[:, None] * dirs[j] - others[None, :]
            with np.errstate(divide="ignore"):
                vals = np.sum(np.log(np.abs(cand)), axis=1)
            k = int(np.argmax(vals))
            if vals[k] > best[0] + 1e-12:
                best = (float(vals[k]), j, grid[k])
        if best[1] != seg[i] or best[2] != t[i]:
            if best[0] > cur + 1e-12:
                seg[i], t[i] = best[1], best[2]
                improved = True
    return improved


def fekete_delta(E, n, restarts=4, seed=0):
    """Best found ``(prod_{i<j} |w_i - w_j|)^(1/C(n,2))`` over n points on E.

    A lower bound on the true ``delta_n``.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    dirs = E.directions()
    rng = np.random.default_rng(seed)
    pairs = n * (n - 1) / 2.0
    best = -math.inf
    for r in range(max(1, restarts)):
        # spread points over segments, clustered toward the tips
        seg = np.arange(n) % E.m if r == 0 else rng.integers(0, E.m, n)
        t = 0.5 * (1.0 - np.cos(math.pi * (rng.random(n) if r else (np.arange(n) // E.m + 1) / (n // E.m + 1))))
        if E.m == 1 or r == 0:
            # the tips always carry points
            t[: E.m] = 1.0
        for _ in range(20):
            t = _ascent(t, seg, dirs)
            if not _switch_pass(t, seg, dirs):
                break
        w = t * dirs[seg]
        if len(np.unique(np.round(w, 14))) < n:
            continue
        best = max(best, _log_product(w))
    return math.exp(best / pairs)


# --------------------------------------------------------------------------
# Equilibrium energy
# --------------------------------------------------------------------------


def _h(u):
    # second antiderivative of log|u|, with h(0) = 0
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    nz = u != 0.0
    out[nz] = 0.5 * u[nz] ** 2 * np.log(np.abs(u[nz])) - 0.75 * u[nz] ** 2
    return out


def collinear_pair_integral(a, b, c, d):
    """Exact ``int_a^b int_c^d log|x - y| dy dx`` for intervals on one line."""
    return _h(b - c) - _h(a - c) - _h(b - d) + _h(a - d)


def _gauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def _cross_mean_log(lo1, hi1, lo2, hi2, u1, u2, order):
    """Mean of log|s u1 - t u2| over panel pairs on two different rays."""
    x, w = _gauss(order)
    s = lo1[:, None] + (hi1 - lo1)[:, None] * x[None, :]
    t = lo2[:, None] + (hi2 - lo2)[:, None] * x[None, :]
    cos_a = float(np.real(u1 * np.conj(u2)))
    # |s u1 - t u2|^2 = s^2 + t^2 - 2 s t cos(angle)
    S = s[:, None, :, None]
    T = t[None, :, None, :]
    d2 = S * S + T * T - 2.0 * cos_a * S * T
    d2 = np.maximum(d2, 1e-300)
    W = w[:, None] * w[None, :]
    return 0.5 * np.einsum("pqab,ab->pq", np.log(d2), W)


def panel_nodes(N):
    """Cosine-clustered panel breakpoints on [0, 1]."""
    return 0.5 * (1.0 - np.cos(math.pi * np.arange(N + 1) / N))


def energy_matrix(E, N):
    """Mean of ``-log|x - y|`` over every pair of panels."""
    nodes = panel_nodes(N)
    lo, hi = nodes[:-1], nodes[1:]
    L = hi - lo
    dirs = E.directions()
    m = E.m
    A = np.empty((m * N, m * N))
    same = -collinear_pair_integral(lo[:, None], hi[:, None], lo[None, :], hi[None, :]) / np.outer(L, L)
    for j in range(m):
        A[j * N:(j + 1) * N, j * N:(j + 1) * N] = same
        for k in range(j + 1, m):
            B = -_cross_mean_log(lo, hi, lo, hi, dirs[j], dirs[k], 3)
            # refine the pairs whose panels nearly touch (near the shared origin)
            mid = 0.5 * (lo + hi)
            sep = np.abs(mid[:, None] * dirs[j] - mid[None, :] * dirs[k])
            near = sep < 4.0 * (L[:, None] + L[None, :])
            if np.any(near):
                ii, jj = np.nonzero(near)
                fine = -_diag_cross(lo[ii], hi[ii], lo[jj], hi[jj], dirs[j], dirs[k], 24)
                B[ii, jj] = fine
            A[j * N:(j + 1) * N, k * N:(k + 1) * N] = B
            A[k * N:(k + 1) * N, j * N:(j + 1) * N] = B.T
    return A


def _diag_cross(lo1, hi1, lo2, hi2, u1, u2, order):
    # panel pairs listed elementwise rather than as a full product
    x, w = _gauss(order)
    s = lo1[:, None] + (hi1 - lo1)[:, None] * x[None, :]
    t = lo2[:, None] + (hi2 - lo2)[:, None] * x[None, :]
    cos_a = float(np.real(u1 * np.conj(u2)))
    d2 = s[:, :, None] ** 2 + t[:, None, :] ** 2 - 2.0 * cos_a * s[:, :, None] * t[:, None, :]
    d2 = np.maximum(d2, 1e-300)
    return 0.5 * np.einsum("pab,ab->p", np.log(d2), w[:, None] * w[None, :])


def minimize_energy(A, maxiter=None, tol=1e-13):
    """Primal active-set solve of ``min q^T A q`` on the probability simplex.

    Starts from uniform charges; each accepted step lowers the energy.
    Returns ``(q, energy, history)``.
    """
    n = A.shape[0]
    maxiter = maxiter if maxiter is not None else 4 * n
    q = np.full(n, 1.0 / n)
    free = np.ones(n, dtype=bool)
    history = [float(q @ A @ q)]
    for _ in range(maxiter):
        idx = np.flatnonzero(free)
        sub = A[np.ix_(idx, idx)]
        y = np.linalg.solve(sub, np.ones(idx.size))
        target = np.zeros(n)
        target[idx] = y / y.sum()
        p = target - q
        if np.max(np.abs(p)) <= tol:
            # stationary on the working set: check multipliers of the zero charges
            grad = 2.0 * A @ q
            lam = np.mean(grad[idx])
            mu = grad - lam
            mu[free] = 0.0
            j = int(np.argmin(mu))
            if mu[j] >= -tol:
                return q, float(q @ A @ q), history
            free[j] = True
            continue
        blocking = (p < 0.0) & free
        alpha = 1.0
        hit = -1
        if np.any(blocking):
            ratios = q[blocking] / -p[blocking]
            k = int(np.argmin(ratios))
            if ratios[k] < 1.0:
                alpha = float(ratios[k])
                hit = int(np.flatnonzero(blocking)[k])
        q = q + alpha * p
        q[~free] = 0.0
        if hit >= 0:
            q[hit] = 0.0
            free[hit] = False
        q = np.maximum(q, 0.0)
        q /= q.sum()
        history.append(float(q @ A @ q))
    raise SolverError("equilibrium QP did not converge", best_iterate=q, residual=history[-1])


def equilibrium_energy(E, N=512):
    """Capacity from the minimal discretized logarithmic energy."""
    if N < 32:
        raise DomainError("need at least 32 panels per segment")
    A = energy_matrix(E, N)
    q, energy, history = minimize_energy(A)
    return CapacityEstimate(
        rho_inf=math.exp(-energy),
        energy_estimate=energy,
        method=f"energy-N{N}",
        charges=q,
        energy_history=history,
    )


def capacity_estimate(E, N=512, fekete_ns=(8, 16, 32), restarts=2):
    """Energy estimate together with a short Fekete ``delta_n`` record."""
    est = equilibrium_energy(E, N)
    est.delta_sequence = [(n, fekete_delta(E, n, restarts)) for n in fekete_ns]
    est.method = f"energy-N{N}+fekete"
    return est
