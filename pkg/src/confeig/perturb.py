"""First-order eigenvalue perturbation under ``Psi(w) + eps w^{-j}``.

Two routes are provided: closed-form unit-disk coefficients of the
first-order operator terms, and a finite-difference realization for any
finite map (the perturbed map is again a finite Laurent map, so nothing
is approximated beyond the usual truncations).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bessel import disk_eigenvalues
from .conformal import ConformalMap, PerturbSpec, perturb
from .freqexp import FundSolCoeffs, assemble_dtensor, pair_weights
from .spectral import BC, EigenResult, RefineError, refine, scan

__all__ = [
    "DiskO1O2Coeffs",
    "ShiftEstimate",
    "disk_o_coeffs",
    "first_order_shift_fd",
    "disk_radial_criticality_check",
    "suggest_order",
    "RATIO_WINDOW",
    "EPS_ASYMPTOTIC",
]

RATIO_WINDOW = (3.5, 4.5)
# beyond this amplitude the ratio test says nothing about the first-order term
EPS_ASYMPTOTIC = 0.05


def _xhat(s: int, a: int, b: int) -> float:
    # disk: X_{m, .}(a, b) is supported on the single index s = a - b + m
    return math.pi if s == 0 else -math.pi * (a + b) / abs(s)


def _o1_entry(m: int, k: int, j: int, bk: float, dk: complex) -> tuple[complex, float]:
    """``(A_{m,k}[j], B_{m,k}[j])``: row ``m - j - 1`` of the eps-derivative."""
    if k == 0:
        return (0.5 * m if 1 <= m <= j else 0.0), 0.0
    W = pair_weights(k)
    B = 0.0
    core = 0.0
    for a in range(k + 1):
        for b in range(k + 1):
            w = W[a, b]
            if w == 0:
                continue
            s = a - b + m
            if s == 0:
                B += w * (a + b) * (k - a)
            if s == j + 1:
                B += w * a * (a + b - 1 - j)
            dx = 0.0
            if 1 <= s <= j:
                dx += math.pi * s - math.pi * (a + b)
            if s == j + 1:
                dx += math.pi * a
            else:
                dx -= math.pi * a * (a + b - 1 - j) / abs(s - j - 1)
            core += w * ((k - a) * _xhat(s, a, b) + dx)
    B *= 2 * math.pi * bk
    A = bk * core + dk * B
    return A, B


def _o2_entry(m: int, k: int, j: int, bk: float, dk: complex) -> tuple[complex, float]:
    """``(A~_{m,k}[j], B~_{m,k}[j])``: row ``m + j + 1`` of the conj(eps)-derivative."""
    if k == 0:
        return (0.5 * abs(m) if -j <= m <= -1 else 0.0), 0.0
    W = pair_weights(k)
    B = 0.0
    core = 0.0
    for a in range(k + 1):
        for b in range(k + 1):
            w = W[a, b]
            if w == 0:
                continue
            s = a - b + m
            if s == 0:
                B += w * (a + b) * (k - b)
            if s == -(j + 1):
                B += w * b * (a + b - 1 - j)
            dx = 0.0
            if -j <= s <= -1:
                dx += math.pi * abs(s) - math.pi * (a + b)
            if s == -(j + 1):
                dx += math.pi * b
            else:
                dx -= math.pi * b * (a + b - 1 - j) / abs(s + j + 1)
            core += w * ((k - b) * _xhat(s, a, b) + dx)
    B *= 2 * math.pi * bk
    A = bk * core + dk * B
    return A, B


@dataclass(frozen=True)
class DiskO1O2Coeffs:
    """Unit-disk coefficients; arrays are indexed ``[m - m_lo, k - k_lo]``."""

    j: int
    ms: tuple
    ks: tuple
    A: np.ndarray
    B: np.ndarray
    At: np.ndarray
    Bt: np.ndarray

    def get(self, m: int, k: int) -> tuple:
        i, c = self.ms.index(m), self.ks.index(k)
        return self.A[i, c], self.B[i, c], self.At[i, c], self.Bt[i, c]

    def o1_output_index(self, m: int) -> int:
        return m - self.j - 1

    def o2_output_index(self, m: int) -> int:
        return m + self.j + 1

    def o1_matrix(self, omega: float, N: int) -> np.ndarray:
        """Finite section of ``O_1(omega)`` (rows = output index)."""
        return self._matrix(omega, N, self.A, self.B, -self.j - 1)

    def o2_matrix(self, omega: float, N: int) -> np.ndarray:
        return self._matrix(omega, N, self.At, self.Bt, self.j + 1)

    def _matrix(self, omega, N, A, B, offset):
        M = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        lw = math.log(omega)
        for i, m in enumerate(self.ms):
            n = m + offset
            if abs(m) > N or abs(n) > N:
                continue
            M[n + N, m + N] = sum(
                omega ** (2 * k) * (A[i, c] + B[i, c] * lw) for c, k in enumerate(self.ks)
            )
        return M


def disk_o_coeffs(j: int, m_range, k_range) -> DiskO1O2Coeffs:
    """Closed-form ``A, B, A~, B~`` for the unit disk perturbed by ``eps w^{-j}``."""
    if j < 1:
        raise ValueError("j must be a positive integer")
    ms = tuple(int(m) for m in m_range)
    ks = tuple(int(k) for k in k_range)
    if any(k < 0 for k in ks):
        raise ValueError("k must be nonnegative")
    fs = FundSolCoeffs(max(ks) if ks else 0)
    bk, dk = fs.b, fs.d
    shape = (len(ms), len(ks))
    A = np.zeros(shape, dtype=complex)
    B = np.zeros(shape)
    At = np.zeros(shape, dtype=complex)
    Bt = np.zeros(shape)
    for i, m in enumerate(ms):
        for c, k in enumerate(ks):
            A[i, c], B[i, c] = _o1_entry(m, k, j, bk[k], dk[k])
            At[i, c], Bt[i, c] = _o2_entry(m, k, j, bk[k], dk[k])
    return DiskO1O2Coeffs(j, ms, ks, A, B, At, Bt)


def suggest_order(omega: float, radius: float, tol: float = 1e-15) -> int:
    """Smallest K whose first neglected kernel term ``(omega R)^{2K}/K!^2`` is below ``tol``."""
    x = omega * radius
    k = 1
    term = x * x
    while term >= tol:
        k += 1
        term *= x * x / (k * k)
    return k


@dataclass(frozen=True)
class ShiftEstimate:
    bc: BC
    omega0: float
    j: int
    eps: complex
    central: float  # (lam(eps) - lam(-eps)) / 2
    first_order: float  # central / |eps|
    fd_value: float  # lam(eps) - lam(0)
    method: str = "finite-difference"
    lam0: float = field(default=float("nan"))


def _track(tensor, bc, omega0, halfwidth):
    """Re-locate the characteristic value nearest ``omega0``."""
    lo = max(omega0 - halfwidth, 0.05)
    sc = scan(tensor, bc, lo, omega0 + halfwidth, 41, threads=1, min_prominence=0.0)
    if not sc.brackets:
        raise RefineError(
            "no characteristic value near the seed on the perturbed domain",
            EigenResult(bc, omega0, 1.0, tensor.K, tensor.N, 0, False, False, True),
        )
    br = min(sc.brackets, key=lambda b: abs(0.5 * (b[0] + b[1]) - omega0))
    return refine(tensor, bc, br)


def first_order_shift_fd(
    cmap: ConformalMap,
    bc,
    eigen: EigenResult,
    spec: PerturbSpec,
    *,
    K: int | None = None,
    N: int | None = None,
    halfwidth: float | None = None,
) -> ShiftEstimate:
    """Central-difference estimate of the first-order eigenvalue change.

    The perturbed eigenvalues are recomputed with the same truncation as
    ``eigen`` unless ``K``/``N`` are given.
    """
    bc = BC.parse(bc)
    if eigen.multiplicity_flag:
        raise ValueError(
            "eigenvalue is flagged as (nearly) multiple; first-order theory needs a simple one"
        )
    K = eigen.K if K is None else K
    N = eigen.N if N is None else N
    eps = spec.eps
    if halfwidth is None:
        halfwidth = max(0.02, 4 * abs(eps)) * eigen.omega
    lam = {}
    for sgn in (1, -1):
        pm = perturb(cmap, PerturbSpec(spec.j, sgn * eps))
        t = assemble_dtensor(pm, K, N)
        lam[sgn] = _track(t, bc, eigen.omega, halfwidth).lam
    lam0 = eigen.lam
    central = 0.5 * (lam[1] - lam[-1])
    return ShiftEstimate(
        bc=bc,
        omega0=eigen.omega,
        j=spec.j,
        eps=eps,
        central=central,
        first_order=central / abs(eps) if eps != 0 else 0.0,
        fd_value=lam[1] - lam0,
        lam0=lam0,
    )


def _radial_modes(bc: BC, count: int):
    refs = disk_eigenvalues(bc.value, 4 * count + 4)
    radial = [e for e in refs if e.n == 0 and e.omega > 0]
    return radial[:count]


def disk_radial_criticality_check(
    bc,
    k_modes: int,
    j_list,
    eps: float = 0.01,
    *,
    N: int = 10,
    K: int | None = None,
    threads: int | None = None,
) -> list[dict]:
    """O(eps^2) test of the first ``k_modes`` radial eigenvalues of the unit disk.

    For every mode and ``j`` the report holds the central first-order term,
    ``lam(eps) - lam``, ``lam(eps/2) - lam`` and their ratio.  ``pass``
    requires ``|central| < 1e-3 eps lam`` and the ratio inside
    :data:`RATIO_WINDOW`.  A small central term with the ratio outside the
    window, or any run with ``|eps| > EPS_ASYMPTOTIC``, is reported as
    ``inconclusive``.
    """
    bc = BC.parse(bc)
    disk = ConformalMap.disk()
    modes = _radial_modes(bc, k_modes)
    if len(modes) < k_modes:
        raise ValueError("not enough radial modes found")
    tasks = []
    for mode_index, ref in enumerate(modes, start=1):
        Kk = K if K is not None else suggest_order(ref.omega * (1 + 2 * eps), 1.0)
        tensor = assemble_dtensor(disk, Kk, N)
        base = _track(tensor, bc, ref.omega, 0.02 * ref.omega)
        for j in j_list:
            tasks.append((mode_index, ref, base, Kk, j))

    def run(task):
        mode_index, ref, base, Kk, j = task
        full = first_order_shift_fd(disk, bc, base, PerturbSpec(j, eps), K=Kk, N=N)
        half = first_order_shift_fd(disk, bc, base, PerturbSpec(j, eps / 2), K=Kk, N=N)
        ratio = full.fd_value / half.fd_value if half.fd_value != 0 else math.inf
        small = abs(full.central) < 1e-3 * eps * base.lam
        in_window = RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1]
        if not small:
            status = "fail"
        elif in_window and abs(eps) <= EPS_ASYMPTOTIC:
            status = "pass"
        else:
            status = "inconclusive"
        return {
            "bc": bc.value,
            "mode": mode_index,
            "omega": base.omega,
            "j": j,
            "eps": eps,
            "first_order": full.central,
            "fd_eps": full.fd_value,
            "fd_eps_half": half.fd_value,
            "ratio": ratio,
            "pass": status == "pass",
            "status": status,
        }

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(run, tasks))
    return [run(t) for t in tasks]
