"""Finite sections ``K_N^(+-)(omega)`` and characteristic-value search."""

from __future__ import annotations

import cmath
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.signal import peak_prominences

from .freqexp import DTensor
from .minimize import brent_bounded

__all__ = [
    "BC",
    "SpectralMatrix",
    "EigenResult",
    "ScanResult",
    "MullerOutcome",
    "RefineError",
    "operator_matrix",
    "assemble",
    "singular_values",
    "neg_log_cond",
    "scan",
    "refine",
    "determinant",
    "muller_roots",
    "MIN_OMEGA",
]

log = logging.getLogger(__name__)

MIN_OMEGA = 0.05
COND_MIN = 1e5
MULTIPLICITY_RATIO = 1e-4
MIN_PROMINENCE = 1.0


class BC(str, Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"

    @property
    def shift(self) -> float:
        return -0.5 if self is BC.NEUMANN else 0.5

    @classmethod
    def parse(cls, value) -> "BC":
        if isinstance(value, BC):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown boundary condition {value!r}") from None


@dataclass(frozen=True)
class SpectralMatrix:
    N: int
    bc: BC
    omega: float
    entries: np.ndarray


@dataclass(frozen=True)
class EigenResult:
    bc: BC
    omega: float
    cond: float
    K: int
    N: int
    iterations: int
    multiplicity_flag: bool
    converged: bool = True
    weak: bool = False
    sigma_ratio: float = field(default=float("nan"), compare=False)

    @property
    def omega_T(self) -> float:
        return self.omega

    @property
    def lam(self) -> float:
        return self.omega * self.omega

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "lambda": self.lam,
            "cond": self.cond,
            "iterations": self.iterations,
            "multiplicity_flag": self.multiplicity_flag,
            "converged": self.converged,
            "weak": self.weak,
        }


class RefineError(RuntimeError):
    """Refinement did not converge; ``best`` carries the last iterate."""

    def __init__(self, message: str, best: EigenResult):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class ScanResult:
    omegas: np.ndarray
    values: np.ndarray
    brackets: list

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("omega,neg_log_cond\n")
            for w, v in zip(self.omegas, self.values):
                fh.write(f"{w:.17g},{v:.17g}\n")


def operator_matrix(tensor: DTensor, omega: complex) -> np.ndarray:
    """``D_{0,2} + sum_k omega^{2k} (D_{k,2} + log(omega) D_{k,1})`` by Horner in omega^2."""
    lw = np.log(omega) if isinstance(omega, complex) else math.log(omega)
    w2 = omega * omega
    K = tensor.K
    if K == 0:
        return np.array(tensor.D2[0])
    A = tensor.D2[K] + lw * tensor.D1[K]
    for k in range(K - 1, 0, -1):
        A = A * w2 + (tensor.D2[k] + lw * tensor.D1[k])
    return A * w2 + tensor.D2[0]


def assemble(tensor: DTensor, bc, omega: float) -> SpectralMatrix:
    bc = BC.parse(bc)
    omega = float(omega)
    if not omega > 0:
        raise ValueError("omega must be positive")
    A = operator_matrix(tensor, omega)
    A[np.diag_indices_from(A)] += bc.shift
    return SpectralMatrix(tensor.N, bc, omega, A)


def singular_values(matrix: SpectralMatrix) -> np.ndarray:
    """Singular values in ascending order."""
    return np.linalg.svd(matrix.entries, compute_uv=False)[::-1]


def neg_log_cond(matrix: SpectralMatrix) -> float:
    s = singular_values(matrix)
    if s[0] == 0:
        return -math.inf
    return -math.log(s[-1] / s[0])


def _value(tensor, bc, omega):
    return neg_log_cond(assemble(tensor, bc, omega))


def scan(
    tensor: DTensor,
    bc,
    w1: float,
    w2: float,
    steps: int,
    *,
    threads=None,
    min_prominence: float = MIN_PROMINENCE,
) -> ScanResult:
    """Evaluate ``-log cond`` on a uniform grid and bracket its interior local minima.

    Minima whose depth below the surrounding curve (topographic prominence)
    is under ``min_prominence`` are dropped: smooth background dips are not
    characteristic values.  Pass 0 to keep every local minimum.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    if not (0 < w1 < w2):
        raise ValueError("need 0 < w1 < w2")
    if w1 < MIN_OMEGA:
        log.info("scan start %.3g clamped to %.3g", w1, MIN_OMEGA)
        w1 = MIN_OMEGA
        if w1 >= w2:
            raise ValueError(f"window lies below the minimum frequency {MIN_OMEGA}")
    bc = BC.parse(bc)
    omegas = np.linspace(w1, w2, steps)
    nthreads = threads or os.cpu_count() or 1
    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            values = np.array(list(ex.map(lambda w: _value(tensor, bc, w), omegas)))
    else:
        values = np.array([_value(tensor, bc, w) for w in omegas])
    # strict on the left, non-strict on the right: plateaus go to the smaller omega
    idx = [
        i
        for i in range(1, steps - 1)
        if values[i] < values[i - 1] and values[i] <= values[i + 1]
    ]
    brackets = []
    if idx:
        finite = np.where(np.isfinite(values), values, -1e300)
        prom = peak_prominences(-finite, idx)[0]
        for i, p in zip(idx, prom):
            if p >= min_prominence:
                brackets.append((float(omegas[i - 1]), float(omegas[i + 1])))
    return ScanResult(omegas, values, brackets)


def _result_at(tensor, bc, omega, iterations, converged, cond_min=COND_MIN):
    s = singular_values(assemble(tensor, bc, omega))
    cond = math.inf if s[0] == 0 else float(s[-1] / s[0])
    ratio = float(s[1] / s[-1]) if s.size > 1 else 1.0
    return EigenResult(
        bc=bc,
        omega=float(omega),
        cond=cond,
        K=tensor.K,
        N=tensor.N,
        iterations=iterations,
        multiplicity_flag=ratio < MULTIPLICITY_RATIO,
        converged=converged,
        weak=cond <= cond_min,
        sigma_ratio=ratio,
    )


def refine(
    tensor: DTensor,
    bc,
    bracket,
    *,
    xtol: float = 1e-12,
    cond_min: float = COND_MIN,
    maxiter: int = 200,
) -> EigenResult:
    """Maximize the condition number inside ``bracket``.

    Raises :class:`RefineError` after ``maxiter`` iterations.  A converged
    point with ``cond <= cond_min`` is returned with ``weak=True``.
    """
    bc = BC.parse(bc)
    lo, hi = float(bracket[0]), float(bracket[1])
    lo = max(lo, MIN_OMEGA)
    if not lo < hi:
        raise ValueError("empty bracket")
    res = brent_bounded(lambda w: _value(tensor, bc, w), lo, hi, xtol=xtol, maxiter=maxiter)
    out = _result_at(tensor, bc, res.x, res.iterations, res.converged, cond_min)
    if not res.converged:
        raise RefineError(f"no convergence after {maxiter} iterations", out)
    return out


def determinant(matrix: SpectralMatrix) -> complex:
    return complex(np.linalg.det(matrix.entries))


def _det_at(tensor, bc, omega: complex) -> complex:
    A = operator_matrix(tensor, complex(omega))
    A[np.diag_indices_from(A)] += bc.shift
    return complex(np.linalg.det(A))


@dataclass(frozen=True)
class MullerOutcome:
    seed: tuple
    root: complex | None
    converged: bool
    iterations: int
    message: str = ""


def muller_roots(
    tensor: DTensor,
    bc,
    seeds,
    tol: float = 1e-12,
    *,
    maxiter: int = 100,
    decrease: float = 1e6,
    imag_tol: float = 1e-4,
) -> list[MullerOutcome]:
    """Muller iteration on ``omega -> det K_N(omega)``, one run per seed triple.

    Iterates run in the complex plane; a limit with ``|Im omega| > imag_tol``
    is a zero of the finite section but not a Laplace eigenvalue, and is
    reported as a failure.
    """
    bc = BC.parse(bc)
    out = []
    for seed in seeds:
        x = [complex(s) for s in seed]
        if len(x) != 3 or any(s.real <= 0 for s in x):
            raise ValueError("each seed must be a triple of positive frequencies")
        f = [_det_at(tensor, bc, s) for s in x]
        f0 = max(abs(v) for v in f)
        root, ok, msg, it = None, False, "no convergence", 0
        for it in range(1, maxiter + 1):
            h1, h2 = x[1] - x[0], x[2] - x[1]
            if h1 == 0 or h2 == 0 or h1 + h2 == 0:
                msg = "degenerate seed points"
                break
            d1 = (f[1] - f[0]) / h1
            d2 = (f[2] - f[1]) / h2
            a = (d2 - d1) / (h2 + h1)
            b = a * h2 + d2
            c = f[2]
            disc = cmath.sqrt(b * b - 4 * a * c)
            den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
            if den == 0:
                msg = "zero denominator"
                break
            dx = -2 * c / den
            xn = x[2] + dx
            if xn.real <= 0:
                msg = "iterate left the right half-plane"
                break
            fn = _det_at(tensor, bc, xn)
            x = [x[1], x[2], xn]
            f = [f[1], f[2], fn]
            if not np.isfinite(fn):
                msg = "non-finite determinant"
                break
            if abs(dx) < tol:
                if abs(xn.imag) > imag_tol:
                    msg = f"converged to a non-real zero {xn:.6g}"
                elif f0 > 0 and abs(fn) <= f0 / decrease:
                    root, ok, msg = xn, True, "converged"
                else:
                    msg = "stalled without sufficient determinant decrease"
                break
        else:
            msg = f"diverged: no convergence after {maxiter} iterations"
        out.append(MullerOutcome(tuple(seed), root, ok, it, msg))
    return out
