"""Classical eigenvalue inequalities as sanity checks on computed spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "J01",
    "P1",
    "DEFAULT_RTOL",
    "AuditLine",
    "expand_multiplicities",
    "audit_spectra",
    "normalize_area",
    "polya_frequency",
]

# first zero of J_0 and first positive zero of J_1'
J01 = 2.404825557695773
P1 = 1.841183781340659

# the disk attains Faber-Krahn and Szego-Weinberger with equality, so an
# exact comparison would flip on solver error; 1e-6 covers N = K = 10
DEFAULT_RTOL = 1e-6


@dataclass(frozen=True)
class AuditLine:
    check: str
    k: int | None
    lhs: float
    rhs: float
    passed: bool

    def format(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        idx = "" if self.k is None else f"[k={self.k}]"
        rel = "<=" if self.check in ("szego-weinberger", "polya", "friedlander") else ">="
        return f"{tag} {self.check}{idx}: {self.lhs:.10g} {rel} {self.rhs:.10g}"


def expand_multiplicities(values: Iterable) -> list[float]:
    """Turn ``lam`` or ``(lam, multiplicity)`` items into a sorted, repeated list."""
    out = []
    for v in values:
        if isinstance(v, (tuple, list)):
            lam, mult = float(v[0]), int(v[1])
        else:
            lam, mult = float(v), 1
        out.extend([lam] * mult)
    return sorted(out)


def polya_frequency(k: int, area: float) -> float:
    """``sqrt(4 pi k / |Omega|)``."""
    return math.sqrt(4 * math.pi * k / area)


def audit_spectra(
    area: float,
    dirichlet: Sequence | None = None,
    neumann: Sequence | None = None,
    *,
    rtol: float = DEFAULT_RTOL,
) -> list[AuditLine]:
    """Check the classical inequalities on computed spectra.

    ``dirichlet`` lists ``lam_1^D, lam_2^D, ...``.  ``neumann`` lists the
    nonzero Neumann eigenvalues ``lam_2^N, lam_3^N, ...``; ``lam_1^N = 0``
    is implicit.  Entries may be ``(lam, multiplicity)`` pairs.  ``rtol``
    loosens every comparison by a relative margin (pass 0 for exact checks).
    """
    if not area > 0:
        raise ValueError("area must be positive")
    if not dirichlet and not neumann:
        raise ValueError("audit needs at least one spectrum")
    D = expand_multiplicities(dirichlet or [])
    Nn = expand_multiplicities(neumann or [])
    lines = []

    def le(x, y):
        return x <= y * (1 + rtol)

    if D:
        rhs = math.pi * J01**2 / area
        lines.append(AuditLine("faber-krahn", None, D[0], rhs, D[0] * (1 + rtol) >= rhs))
    if Nn:
        rhs = math.pi * P1**2 / area
        lines.append(AuditLine("szego-weinberger", None, Nn[0], rhs, le(Nn[0], rhs)))
        for k, lam in enumerate(Nn, start=1):
            rhs = 4 * math.pi * k / area
            lines.append(AuditLine("polya", k, lam, rhs, le(lam, rhs)))
    if D and Nn:
        for k in range(1, min(len(D), len(Nn)) + 1):
            lines.append(AuditLine("friedlander", k, Nn[k - 1], D[k - 1], le(Nn[k - 1], D[k - 1])))
    return lines


def normalize_area(omegas, area: float, reference_area: float = 1.0) -> np.ndarray:
    """Frequencies rescaled to the reference area: ``omega * sqrt(|Omega| / |Omega_ref|)``.

    With ``reference_area = 1`` the ``area`` argument is simply the ratio.
    """
    if not (area > 0 and reference_area > 0):
        raise ValueError("areas must be positive")
    return np.asarray(omegas, dtype=float) * math.sqrt(area / reference_area)
