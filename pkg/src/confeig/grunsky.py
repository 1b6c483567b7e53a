"""Faber polynomials, Grunsky coefficients and the zero-frequency operators.

Everything is computed for the capacity-one map ``Psi(r u) / r`` so the
stored table holds ``c_{m,n} / r^{m+n}`` directly; downstream code never
rescales.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .conformal import ConformalMap
from .laurent import LaurentSeries

__all__ = [
    "InsufficientOrderError",
    "GrunskyTable",
    "faber_polynomials",
    "grunsky_table",
    "apply_K0",
    "apply_S0",
    "k0_matrix",
    "s0_matrix",
    "required_order",
]


class InsufficientOrderError(ValueError):
    """A basis index exceeds the order of the Grunsky table."""


def _composition_series(cmap: ConformalMap, M: int):
    """Run the elimination recurrence on the normalized map.

    Returns ``(G, betas)`` where ``G[m]`` holds the coefficients of
    ``F~_m(Psi~(u))`` over powers ``-m*L .. m`` (index ``p + m*L``) and
    ``betas[m]`` maps ``j -> beta_j`` with ``F~_m = z F~_{m-1} - sum beta_j F~_j``.
    """
    norm = cmap.normalized()
    L = max(norm.degree, 0)
    # Psi~ coefficients over powers -L..1
    psi = np.zeros(L + 2, dtype=complex)
    psi[L + 1] = 1.0
    for n, a in enumerate(norm.coeffs[: L + 1]):
        psi[L - n] += a
    G = [np.ones(1, dtype=complex)]
    betas = [{}]
    for m in range(1, M + 1):
        t = np.convolve(psi, G[m - 1])  # powers -m*L .. m
        off = m * L
        beta = {}
        for j in range(m - 1, -1, -1):
            bj = t[off + j]
            if bj != 0:
                beta[j] = bj
                gj = G[j]
                # G_j spans powers -j*L .. j
                t[off - j * L : off + j + 1] -= bj * gj
            t[off + j] = 0.0
        t[off + m] = 1.0
        G.append(t)
        betas.append(beta)
    return G, betas, L


@dataclass(frozen=True)
class GrunskyTable:
    """Normalized Grunsky coefficients ``c~[m-1, n-1] = c_{m,n} / r^{m+n}``.

    ``ctilde`` has shape ``(M, M*L)`` so no coefficient of ``F_m(Psi)`` is
    dropped; ``c`` gives the square unnormalized ``M x M`` view.
    """

    order: int
    r: float
    ctilde: np.ndarray

    @property
    def width(self) -> int:
        return self.ctilde.shape[1]

    @property
    def c(self) -> np.ndarray:
        M = self.order
        out = np.zeros((M, M), dtype=complex)
        w = min(M, self.width)
        idx = np.arange(1, M + 1)
        scale = self.r ** (idx[:, None] + idx[None, :w])
        out[:, :w] = self.ctilde[:, :w] * scale
        return out

    def normalized(self, m: int, n: int) -> complex:
        if not (1 <= m <= self.order):
            raise InsufficientOrderError(f"row {m} outside Grunsky table of order {self.order}")
        if n < 1 or n > self.width:
            return 0j
        return complex(self.ctilde[m - 1, n - 1])

    def to_csv(self, path) -> None:
        """Debug dump of the unnormalized table as ``m,n,re,im`` rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "n", "re", "im"])
            for m in range(1, self.order + 1):
                for n in range(1, self.width + 1):
                    v = self.ctilde[m - 1, n - 1] * self.r ** (m + n)
                    if v != 0:
                        w.writerow([m, n, repr(float(v.real)), repr(float(v.imag))])


def faber_polynomials(cmap: ConformalMap, M: int) -> list[np.ndarray]:
    """Coefficient vectors (ascending powers of z) of ``F_1 .. F_M``."""
    if M < 1:
        raise ValueError("M must be at least 1")
    _, betas, _ = _composition_series(cmap, M)
    F = [np.ones(1, dtype=complex)]
    for m in range(1, M + 1):
        f = np.zeros(m + 1, dtype=complex)
        f[1:] = F[m - 1]
        for j, bj in betas[m].items():
            f[: j + 1] -= bj * F[j]
        F.append(f)
    r = cmap.r
    # F_m(z) = r^m F~_m(z / r)
    return [F[m] * r ** (m - np.arange(m + 1)) for m in range(1, M + 1)]


def grunsky_table(cmap: ConformalMap, M: int) -> GrunskyTable:
    if M < 1:
        raise ValueError("M must be at least 1")
    G, _, L = _composition_series(cmap, M)
    width = max(M * L, 1)
    ct = np.zeros((M, width), dtype=complex)
    for m in range(1, M + 1):
        off = m * L
        # negative powers -1 .. -m*L live at indices off-1 .. 0
        neg = G[m][:off][::-1]
        ct[m - 1, : neg.size] = neg
    ct.setflags(write=False)
    return GrunskyTable(M, cmap.r, ct)


def required_order(N: int, K: int, L: int) -> int:
    """Table order needed to assemble a basis of half-width N to frequency order K."""
    return N + (max(L, 1) + 1) * K + 1


def _as_series(v) -> LaurentSeries:
    if isinstance(v, LaurentSeries):
        return v
    if isinstance(v, Mapping):
        return LaurentSeries.from_dict(v)
    raise TypeError("expected a LaurentSeries or an index->value mapping")


def _check_range(table: GrunskyTable, s: LaurentSeries) -> None:
    nz = s.trim()
    if nz.to_dict() and max(abs(nz.lo), abs(nz.hi)) > table.order:
        raise InsufficientOrderError(
            f"input index {max(abs(nz.lo), abs(nz.hi))} exceeds Grunsky order {table.order}"
        )


def apply_K0(table: GrunskyTable, phi_coeffs) -> LaurentSeries:
    """Coefficients of ``K^0[sum_m v_m phi_m]`` in the phi basis."""
    s = _as_series(phi_coeffs)
    _check_range(table, s)
    out = {}
    for m, v in s.to_dict().items():
        if m == 0:
            out[0] = out.get(0, 0) + 0.5 * v
            continue
        row = table.ctilde[abs(m) - 1]
        for k in np.flatnonzero(row):
            c = row[k]
            if m > 0:
                out[-(k + 1)] = out.get(-(k + 1), 0) + 0.5 * c * v
            else:
                out[k + 1] = out.get(k + 1, 0) + 0.5 * np.conj(c) * v
    return LaurentSeries.from_dict(out)


def apply_S0(table: GrunskyTable, psi_coeffs) -> LaurentSeries:
    """Coefficients of ``S^0[sum_m v_m psi_m]`` in the phi basis."""
    s = _as_series(psi_coeffs)
    _check_range(table, s)
    out = {}
    for m, v in s.to_dict().items():
        if m == 0:
            out[0] = out.get(0, 0) + np.log(table.r) * v
            continue
        f = -v / (2 * abs(m))
        out[m] = out.get(m, 0) + f
        row = table.ctilde[abs(m) - 1]
        for k in np.flatnonzero(row):
            c = row[k] if m > 0 else np.conj(row[k])
            idx = -(k + 1) if m > 0 else k + 1
            out[idx] = out.get(idx, 0) + f * c
    return LaurentSeries.from_dict(out)


def _zero_freq_matrix(table, in_lo, in_hi, out_lo, out_hi, single_layer):
    if max(abs(in_lo), abs(in_hi)) > table.order:
        raise InsufficientOrderError(
            f"input window [{in_lo}, {in_hi}] exceeds Grunsky order {table.order}"
        )
    A = np.zeros((out_hi - out_lo + 1, in_hi - in_lo + 1), dtype=complex)
    ct = table.ctilde
    for m in range(in_lo, in_hi + 1):
        col = m - in_lo
        if m == 0:
            if out_lo <= 0 <= out_hi:
                A[-out_lo, col] = np.log(table.r) if single_layer else 0.5
            continue
        am = abs(m)
        f = -1.0 / (2 * am) if single_layer else 0.5
        row = ct[am - 1]
        if m > 0:
            # output index -k for k = 1..width
            ks = np.arange(1, row.size + 1)
            outs = -ks
            vals = row
        else:
            ks = np.arange(1, row.size + 1)
            outs = ks
            vals = np.conj(row)
        sel = (outs >= out_lo) & (outs <= out_hi)
        A[outs[sel] - out_lo, col] += f * vals[sel]
        if single_layer and out_lo <= m <= out_hi:
            A[m - out_lo, col] += f
    return A


def k0_matrix(table: GrunskyTable, in_lo: int, in_hi: int, out_lo: int, out_hi: int) -> np.ndarray:
    """Dense K^0 block: rows are output phi indices, columns input phi indices."""
    return _zero_freq_matrix(table, in_lo, in_hi, out_lo, out_hi, False)


def s0_matrix(table: GrunskyTable, in_lo: int, in_hi: int, out_lo: int, out_hi: int) -> np.ndarray:
    """Dense S^0 block mapping psi coefficients to phi coefficients."""
    return _zero_freq_matrix(table, in_lo, in_hi, out_lo, out_hi, True)
