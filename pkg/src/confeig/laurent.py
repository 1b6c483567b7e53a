"""Finite two-sided series in ``e^{i theta}``.

A :class:`LaurentSeries` stores the coefficients of ``sum_n c_n e^{i n theta}``
densely over the index range ``[lo, hi]``.  It doubles as the "indexed
vector" type for coefficients in the geometric bases, since
``phi_n(Psi(r e^{i theta})) = e^{i n theta}``.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

__all__ = [
    "LaurentSeries",
    "add",
    "multiply",
    "conjugate_on_circle",
    "power",
    "coefficient",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    arr.setflags(write=False)
    return arr


class LaurentSeries:
    """Immutable finite Laurent series ``sum_{n=lo}^{hi} c[n - lo] e^{i n theta}``.

    Parameters
    ----------
    lo : int
        Index of the first stored coefficient.
    coeffs : array_like of complex
        Coefficients for indices ``lo, lo + 1, ...``.  An empty input is
        replaced by the single coefficient ``0`` at index ``lo``.
    """

    __slots__ = ("_lo", "_coeffs")

    def __init__(self, lo: int, coeffs):
        arr = _frozen(coeffs)
        if arr.size == 0:
            arr = _frozen([0.0])
        self._lo = int(lo)
        self._coeffs = arr

    # -- construction -------------------------------------------------
    @classmethod
    def zero(cls) -> "LaurentSeries":
        return cls(0, [0.0])

    @classmethod
    def unit(cls) -> "LaurentSeries":
        return cls(0, [1.0])

    @classmethod
    def monomial(cls, n: int, value: complex = 1.0) -> "LaurentSeries":
        return cls(n, [value])

    @classmethod
    def from_dict(cls, terms: Mapping[int, complex]) -> "LaurentSeries":
        if not terms:
            return cls.zero()
        lo, hi = min(terms), max(terms)
        arr = np.zeros(hi - lo + 1, dtype=np.complex128)
        for n, v in terms.items():
            arr[n - lo] += v
        return cls(lo, arr)

    # -- accessors ----------------------------------------------------
    @property
    def lo(self) -> int:
        return self._lo

    @property
    def hi(self) -> int:
        return self._lo + self._coeffs.size - 1

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def coefficient(self, n: int) -> complex:
        if n < self.lo or n > self.hi:
            return 0j
        return complex(self._coeffs[n - self.lo])

    def to_dict(self) -> dict[int, complex]:
        return {int(n): complex(c) for n, c in zip(self.indices, self._coeffs) if c != 0}

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Dense coefficient vector over ``[lo, hi]``, zero-padded."""
        out = np.zeros(hi - lo + 1, dtype=np.complex128)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo : b - lo + 1] = self._coeffs[a - self.lo : b - self.lo + 1]
        return out

    # -- algebra ------------------------------------------------------
    def trim(self) -> "LaurentSeries":
        """Drop exact zeros at both ends (idempotent)."""
        nz = np.flatnonzero(self._coeffs)
        if nz.size == 0:
            return LaurentSeries.zero()
        return LaurentSeries(self.lo + nz[0], self._coeffs[nz[0] : nz[-1] + 1])

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by ``e^{i k theta}``."""
        return LaurentSeries(self.lo + k, self._coeffs)

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries(0, [other])
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return LaurentSeries(lo, self.window(lo, hi) + other.window(lo, hi))

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.lo, -self._coeffs)

    def __sub__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries(0, [other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return LaurentSeries(self.lo + other.lo, np.convolve(self._coeffs, other._coeffs))
        return LaurentSeries(self.lo, self._coeffs * complex(other))

    __rmul__ = __mul__

    def __pow__(self, p: int):
        return power(self, p)

    def conj(self) -> "LaurentSeries":
        """Complex conjugate as a function of real theta."""
        return LaurentSeries(-self.hi, np.conj(self._coeffs[::-1]))

    def evaluate(self, theta):
        """Evaluate at real angles ``theta`` (scalar or array)."""
        theta = np.asarray(theta, dtype=float)
        z = np.exp(1j * theta)
        # Horner in e^{i theta}, then rescale by e^{i lo theta}.
        acc = np.zeros_like(z)
        for c in self._coeffs[::-1]:
            acc = acc * z + c
        return acc * np.exp(1j * self.lo * theta)

    def __call__(self, theta):
        return self.evaluate(theta)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        a, b = self.trim(), other.trim()
        return a.lo == b.lo and np.array_equal(a.coeffs, b.coeffs)

    __hash__ = None

    def allclose(self, other: "LaurentSeries", atol: float = 1e-13, rtol: float = 0.0) -> bool:
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return bool(np.allclose(self.window(lo, hi), other.window(lo, hi), atol=atol, rtol=rtol))

    def __repr__(self):
        terms = ", ".join(f"{n}: {c:.6g}" for n, c in self.to_dict().items())
        return f"LaurentSeries({{{terms}}})"


def add(s1: LaurentSeries, s2: LaurentSeries) -> LaurentSeries:
    return s1 + s2


def multiply(s1: LaurentSeries, s2: LaurentSeries) -> LaurentSeries:
    return s1 * s2


def conjugate_on_circle(s: LaurentSeries) -> LaurentSeries:
    return s.conj()


def power(s: LaurentSeries, p: int) -> LaurentSeries:
    """``s**p`` for integer ``p >= 0`` by binary exponentiation."""
    if p < 0:
        raise ValueError("power requires a nonnegative exponent")
    result = LaurentSeries.unit()
    base = s
    while p:
        if p & 1:
            result = result * base
        p >>= 1
        if p:
            base = base * base
    return result


def coefficient(s: LaurentSeries, n: int) -> complex:
    return s.coefficient(n)
