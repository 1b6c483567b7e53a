"""Frequency expansion of the double-layer operator in the geometric basis.

The kernel of ``K^omega`` is expanded as

    sum_k b_k omega^{2k} d/dnu_y [ |x-y|^{2k} (log omega + log|x-y| + d_k) ]

and ``|x-y|^{2k}`` is split multinomially into ``z^p zbar^q xi^a xibar^b``.
Each layer ``k`` then reduces to the boundary symbols ``C_m``, ``X_{m,n}``
and ``Y_n`` built from the map's trace.  Those symbols depend only on the
pair ``(a, b) = (k3 + k4, k2 + k4)``, so they are computed once per pair.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .conformal import ConformalMap, boundary_trace, derivative_trace
from .grunsky import (
    GrunskyTable,
    InsufficientOrderError,
    apply_K0,
    apply_S0,
    grunsky_table,
    k0_matrix,
    required_order,
    s0_matrix,
)
from .laurent import LaurentSeries

__all__ = [
    "FundSolCoeffs",
    "DTensor",
    "boundary_power",
    "compute_C",
    "compute_X_row",
    "multinomial_weights",
    "pair_weights",
    "assemble_dtensor",
    "default_cache_dir",
]

log = logging.getLogger(__name__)

_CACHE_VERSION = "1"


@dataclass(frozen=True)
class FundSolCoeffs:
    """Series coefficients of the Helmholtz fundamental solution."""

    K: int

    euler_gamma = float(np.euler_gamma)

    @property
    def b(self) -> np.ndarray:
        k = np.arange(self.K + 1)
        fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
        return (-1.0) ** k / (2 * np.pi * 4.0**k * fact**2)

    @property
    def d(self) -> np.ndarray:
        harmonic = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, self.K + 1))])
        return self.euler_gamma - np.log(2.0) - 0.5j * np.pi - harmonic

    def tau(self, omega: float) -> complex:
        return (self.euler_gamma + np.log(omega / 2)) / (2 * np.pi) - 0.25j


def multinomial_weights(k: int) -> dict[tuple[int, int, int, int], int]:
    """Signed multinomial weights ``(-1)^{k2+k3} k! / (k1! k2! k3! k4!)``."""
    out = {}
    fk = math.factorial(k)
    for k1 in range(k + 1):
        for k2 in range(k - k1 + 1):
            for k3 in range(k - k1 - k2 + 1):
                k4 = k - k1 - k2 - k3
                w = fk // (
                    math.factorial(k1) * math.factorial(k2) * math.factorial(k3) * math.factorial(k4)
                )
                out[(k1, k2, k3, k4)] = (-1) ** (k2 + k3) * w
    return out


@lru_cache(maxsize=None)
def pair_weights(k: int) -> np.ndarray:
    """``W[a, b]``: multinomial weights summed over tuples with ``k3+k4=a``, ``k2+k4=b``."""
    W = np.zeros((k + 1, k + 1))
    for (k1, k2, k3, k4), w in multinomial_weights(k).items():
        W[k3 + k4, k2 + k4] += w
    W.setflags(write=False)
    return W


class _Traces:
    """Cached powers of the boundary trace and its conjugate."""

    def __init__(self, cmap: ConformalMap):
        self.r = cmap.r
        self.psi = boundary_trace(cmap)
        self.psibar = self.psi.conj()
        self.dpsi = derivative_trace(cmap)
        self.dpsibar = self.dpsi.conj()
        self._pow = [LaurentSeries.unit()]
        self._powbar = [LaurentSeries.unit()]

    def pow(self, p: int) -> LaurentSeries:
        while len(self._pow) <= p:
            self._pow.append(self._pow[-1] * self.psi)
        return self._pow[p]

    def powbar(self, q: int) -> LaurentSeries:
        while len(self._powbar) <= q:
            self._powbar.append(self._powbar[-1] * self.psibar)
        return self._powbar[q]

    def Y(self, p: int, q: int) -> LaurentSeries:
        return self.pow(p) * self.powbar(q)

    def Q1(self, a: int, b: int) -> LaurentSeries:
        # r Psi^{a-1} Psi' conj(Psi)^b; carries weight a
        if a == 0:
            return LaurentSeries.zero()
        return (self.pow(a - 1) * self.dpsi * self.powbar(b)) * self.r

    def Q2(self, a: int, b: int) -> LaurentSeries:
        # r Psi^a conj(Psi)^{b-1} conj(Psi'); carries weight b
        if b == 0:
            return LaurentSeries.zero()
        return (self.pow(a) * self.powbar(b - 1) * self.dpsibar) * self.r


def boundary_power(cmap: ConformalMap, p: int, q: int) -> LaurentSeries:
    """Trace of ``Psi^p conj(Psi)^q`` as a series in ``e^{i theta}``."""
    if p < 0 or q < 0:
        raise ValueError("powers must be nonnegative")
    return _Traces(cmap).Y(p, q)


def _ab(k2: int, k3: int, k4: int) -> tuple[int, int]:
    if min(k2, k3, k4) < 0:
        raise ValueError("multinomial indices must be nonnegative")
    return k3 + k4, k2 + k4


def compute_C(cmap: ConformalMap, m: int, k2: int, k3: int, k4: int) -> complex:
    """``int d/dnu (xi^a conj(xi)^b) phi_m |dxi|`` over the boundary."""
    a, b = _ab(k2, k3, k4)
    tr = _Traces(cmap)
    return complex(
        2 * np.pi * (a * tr.Q1(a, b).coefficient(-m - 1) + b * tr.Q2(a, b).coefficient(1 - m))
    )


def compute_X_row(
    cmap: ConformalMap, table: GrunskyTable, m: int, k2: int, k3: int, k4: int
) -> LaurentSeries:
    """phi-coefficients ``X_{m, .}`` of the log-kernel part for one multinomial triple."""
    a, b = _ab(k2, k3, k4)
    tr = _Traces(cmap)
    P = tr.Y(a, b).shift(m)
    psi_part = tr.Q1(a, b).shift(m + 1) * a + tr.Q2(a, b).shift(m - 1) * b
    out = apply_K0(table, P) * (2 * np.pi)
    if a or b:
        out = out + apply_S0(table, psi_part) * (2 * np.pi)
    return out


def _toeplitz(s: LaurentSeries, out_lo, out_hi, in_lo, in_hi) -> np.ndarray:
    """``T[o, i] = s_{o - i}`` over the given index windows."""
    o = np.arange(out_lo, out_hi + 1)[:, None]
    i = np.arange(in_lo, in_hi + 1)[None, :]
    diff = o - i
    lo = out_lo - in_hi
    vec = s.window(lo, out_hi - in_lo)
    return vec[diff - lo]


def _check_support(s: LaurentSeries, lo: int, hi: int, what: str) -> None:
    t = s.trim()
    if t.to_dict() and (t.lo < lo or t.hi > hi):
        raise InsufficientOrderError(f"{what} support [{t.lo}, {t.hi}] exceeds window [{lo}, {hi}]")


@dataclass(frozen=True)
class DTensor:
    """Coefficients ``D_{k,j}^{(m,n)}``.

    ``D1[k, n + N, m + N]`` and ``D2[k, n + N, m + N]`` hold the ``j = 1``
    (log omega) and ``j = 2`` layers; rows are output indices ``n``,
    columns input indices ``m``.
    """

    K: int
    N: int
    D1: np.ndarray
    D2: np.ndarray
    fingerprint: str = ""

    def entry(self, k: int, j: int, m: int, n: int) -> complex:
        if j not in (1, 2):
            raise ValueError("layer j must be 1 or 2")
        if not (0 <= k <= self.K) or max(abs(m), abs(n)) > self.N:
            raise IndexError("entry outside the tensor")
        arr = self.D1 if j == 1 else self.D2
        return complex(arr[k, n + self.N, m + self.N])

    def truncate(self, K: int | None = None, N: int | None = None) -> "DTensor":
        """Sub-tensor with smaller frequency order and/or basis half-width."""
        K = self.K if K is None else K
        N = self.N if N is None else N
        if K > self.K or N > self.N or K < 0 or N < 0:
            raise ValueError("can only truncate to smaller K, N")
        s = slice(self.N - N, self.N + N + 1)
        return DTensor(K, N, self.D1[: K + 1, s, s], self.D2[: K + 1, s, s], self.fingerprint)

    def save(self, path) -> None:
        np.savez_compressed(path, K=self.K, N=self.N, D1=self.D1, D2=self.D2, fp=self.fingerprint)

    @classmethod
    def load(cls, path) -> "DTensor":
        with np.load(path, allow_pickle=False) as z:
            return cls(int(z["K"]), int(z["N"]), z["D1"], z["D2"], str(z["fp"]))


def default_cache_dir() -> Path:
    env = os.environ.get("CONFEIG_CACHE")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "confeig"


def _cache_key(cmap: ConformalMap, K: int, N: int) -> str:
    raw = f"{_CACHE_VERSION}:{cmap.fingerprint()}:{K}:{N}".encode()
    return hashlib.sha256(raw).hexdigest()[:24]


def _assemble_block(tr, K0full, S0full, W, N, K, a, b_coeffs, d_coeffs):
    """Contributions of all pairs ``(a, b)`` for one fixed ``a``."""
    D1 = np.zeros((K + 1, 2 * N + 1, 2 * N + 1), dtype=complex)
    D2 = np.zeros_like(D1)
    for b in range(K + 1):
        P = tr.Y(a, b)
        Q1 = tr.Q1(a, b)
        Q2 = tr.Q2(a, b)
        _check_support(P.shift(N), -W, W, "boundary product")
        TP = _toeplitz(P, -W, W, -N, N)
        TQ = a * _toeplitz(Q1.shift(1), -W, W, -N, N) + b * _toeplitz(Q2.shift(-1), -W, W, -N, N)
        X = 2 * np.pi * (K0full @ TP + S0full @ TQ)  # rows -W..W, cols m
        C = 2 * np.pi * (
            a * Q1.window(-N - 1, N - 1)[::-1] + b * Q2.window(-N + 1, N + 1)[::-1]
        )  # C[m + N] for m = -N..N: coefficient of index -m-1 (resp. 1-m)
        for k in range(max(a, b, 1), K + 1):
            w = pair_weights(k)[a, b]
            if w == 0:
                continue
            Y = tr.Y(k - a, k - b)
            Yvec = Y.window(-N, N)
            TY = _toeplitz(Y, -N, N, -W, W)
            outer = np.outer(Yvec, C)
            scale = b_coeffs[k] * w
            D1[k] += scale * outer
            D2[k] += scale * (d_coeffs[k] * outer + TY @ X)
    return D1, D2


def assemble_dtensor(
    cmap: ConformalMap,
    K: int,
    N: int,
    *,
    threads: int | None = None,
    cache: bool | str | Path = False,
) -> DTensor:
    """Assemble ``D_{k,j}^{(m,n)}`` for ``0 <= k <= K`` and ``|m|, |n| <= N``.

    ``cache`` may be True (default directory) or a directory path; cached
    tensors are keyed by the map coefficients, ``K`` and ``N``.
    """
    if K < 0 or N < 1:
        raise ValueError("need K >= 0 and N >= 1")
    cache_dir = None
    if cache:
        cache_dir = default_cache_dir() if cache is True else Path(cache)
        path = cache_dir / f"dtensor-{_cache_key(cmap, K, N)}.npz"
        if path.exists():
            try:
                t = DTensor.load(path)
                if t.K == K and t.N == N and t.fingerprint == cmap.fingerprint():
                    return t
            except (OSError, ValueError, KeyError):
                log.warning("ignoring unreadable cache file %s", path)

    L = max(cmap.degree, 1)
    W = required_order(N, K, L) - 1
    table = grunsky_table(cmap, W)
    K0full = k0_matrix(table, -W, W, -W, W)
    S0full = s0_matrix(table, -W, W, -W, W)
    fs = FundSolCoeffs(K)
    bk, dk = fs.b, fs.d

    D1 = np.zeros((K + 1, 2 * N + 1, 2 * N + 1), dtype=complex)
    D2 = np.zeros_like(D1)
    D2[0] = K0full[W - N : W + N + 1, W - N : W + N + 1]

    if K >= 1:
        # one trace cache per worker; the power lists are not shared
        def work(a):
            return _assemble_block(_Traces(cmap), K0full, S0full, W, N, K, a, bk, dk)

        nthreads = threads or os.cpu_count() or 1
        if nthreads > 1:
            with ThreadPoolExecutor(max_workers=nthreads) as ex:
                parts = list(ex.map(work, range(K + 1)))
        else:
            parts = [work(a) for a in range(K + 1)]
        # fixed summation order keeps results independent of thread count
        for p1, p2 in parts:
            D1 += p1
            D2 += p2

    D1.setflags(write=False)
    D2.setflags(write=False)
    tensor = DTensor(K, N, D1, D2, cmap.fingerprint())
    if cache_dir is not None:
        try:
            cache_dir.mkdir(parents=True, exist_ok=True)
            tensor.save(path)
        except OSError:
            log.warning("could not write DTensor cache to %s", cache_dir)
    return tensor
