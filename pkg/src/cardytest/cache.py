"""Memoized conformal radii keyed by gcd-reduced canonical gap parts.

The on-disk format is one record per line::

    n_reduced parts_csv rho0_hex residual iterations

where ``rho0_hex`` is ``float.hex`` of the radius, so values round-trip
bit-exactly.  The file is append-only and is re-read when the cache opens.
"""

from __future__ import annotations

import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import SolverError
from .slitmap import DEFAULT_TOL, GapVector, SlitConfiguration, solve_prevertices

log = logging.getLogger(__name__)

CACHE_ENV = "CARDYTEST_CACHE_DIR"
CACHE_NAME = "rho0_cache.txt"
CHUNK = 4096


def default_cache_path():
    root = os.environ.get(CACHE_ENV)
    if root is None:
        root = Path.home() / ".cache" / "cardytest"
    return Path(root) / CACHE_NAME


def format_record(key, rho0, residual, iterations):
    parts = ",".join(str(a) for a in key)
    return f"{sum(key)} {parts} {float(rho0).hex()} {residual!r} {int(iterations)}\n"


def parse_record(line):
    n, parts, rho_hex, residual, iterations = line.split()
    key = tuple(int(a) for a in parts.split(","))
    if sum(key) != int(n):
        raise ValueError(f"corrupt cache record: {line!r}")
    return key, float.fromhex(rho_hex), float(residual), int(iterations)


def solve_key(key, tol=DEFAULT_TOL):
    sol = solve_prevertices(SlitConfiguration(GapVector.from_parts(key)), tol)
    return sol.rho0, sol.residual, sol.iterations


class RhoCache:
    """Thread-safe memo of ``rho0`` per class; each key is solved at most once."""

    def __init__(self, path=None, tol=DEFAULT_TOL, threads=1):
        self.path = Path(path) if path is not None else None
        self.tol = tol
        self.threads = max(1, int(threads))
        self.entries = {}
        self.solves = 0
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        with open(self.path) as fh:
            for line in fh:
                if line.strip():
                    key, rho0, residual, its = parse_record(line)
                    self.entries[key] = (rho0, residual, its)
        log.info("loaded %d cached classes from %s", len(self.entries), self.path)

    def __contains__(self, key):
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def rho0(self, key):
        key = tuple(key)
        if key not in self.entries:
            self.ensure([key])
        return self.entries[key][0]

    def ensure(self, keys):
        """Solve every key not yet cached, in chunks flushed to disk."""
        missing = sorted({tuple(k) for k in keys if tuple(k) not in self.entries})
        for start in range(0, len(missing), CHUNK):
            chunk = missing[start:start + CHUNK]
            results = self._solve_many(chunk)
            with self._lock:
                for key, res in zip(chunk, results):
                    self.entries[key] = res
                self.solves += len(chunk)
                if self.path is not None:
                    self.path.parent.mkdir(parents=True, exist_ok=True)
                    with open(self.path, "a") as fh:
                        fh.writelines(format_record(k, *r) for k, r in zip(chunk, results))

    def _solve_one(self, key):
        try:
            return solve_key(key, self.tol)
        except SolverError as exc:
            raise SolverError(f"class {key}: {exc}", exc.best_iterate, exc.residual, key) from exc

    def _solve_many(self, keys):
        if self.threads == 1 or len(keys) < 2:
            return [self._solve_one(k) for k in keys]
        with ThreadPoolExecutor(self.threads) as pool:
            return list(pool.map(self._solve_one, keys))
