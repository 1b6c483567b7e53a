"""Self-contained Bessel functions of integer order and their zeros.

Used as an independent reference for the unit disk, whose Dirichlet and
Neumann frequencies are the positive zeros of ``J_n`` and ``J_n'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["DiskEigenRef", "bessel_j", "bessel_j_prime", "bessel_zeros", "disk_eigenvalues"]


def _series(n: int, x: float) -> float:
    # ascending series sum (-1)^k (x/2)^{2k+n} / (k! (n+k)!)
    h = 0.5 * x
    term = h**n / math.factorial(n)
    total = term
    h2 = h * h
    k = 0
    while True:
        k += 1
        term *= -h2 / (k * (n + k))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and k > h:
            return total


def _miller(n: int, x: float) -> float:
    # backward recurrence from well above max(n, x), normalized by
    # J_0 + 2 (J_2 + J_4 + ...) = 1
    start = 2 * ((max(n, int(x)) + 30 + int(math.sqrt(40 * max(n, x)))) // 2)
    jp1, j = 0.0, 1e-30
    norm = 0.0
    result = 0.0
    for k in range(start, 0, -1):
        jm1 = 2 * k / x * j - jp1
        jp1, j = j, jm1
        if abs(j) > 1e250:  # rescale to avoid overflow
            jp1 *= 1e-250
            j *= 1e-250
            norm *= 1e-250
            result *= 1e-250
        if k - 1 == n:
            result = j
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2 * j
    norm += j  # J_0 term
    return result / norm


def bessel_j(n: int, x: float) -> float:
    """``J_n(x)`` for integer ``n >= 0`` and real ``x >= 0``."""
    if n < 0 or int(n) != n:
        raise ValueError("order must be a nonnegative integer")
    if x < 0:
        raise ValueError("argument must be nonnegative")
    n = int(n)
    x = float(x)
    if x == 0:
        return 1.0 if n == 0 else 0.0
    # the series cancels badly beyond x ~ 8 whatever the order
    if x <= min(n + 8, 8.0):
        return _series(n, x)
    return _miller(n, x)


def bessel_j_prime(n: int, x: float) -> float:
    if n == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))


def _mcmahon(n: int, k: int, derivative: bool) -> float:
    mu = 4.0 * n * n
    if derivative:
        beta = (k + 0.5 * n - 0.75) * math.pi
        return beta - (mu + 3) / (8 * beta)
    beta = (k + 0.5 * n - 0.25) * math.pi
    return beta - (mu - 1) / (8 * beta)


def _second_derivative(n: int, x: float) -> float:
    # Bessel ODE: x^2 J'' + x J' + (x^2 - n^2) J = 0
    return -bessel_j_prime(n, x) / x - (1 - n * n / (x * x)) * bessel_j(n, x)


def _safeguarded_newton(f, df, lo, hi, x0, tol=1e-15, maxiter=100):
    flo = f(lo)
    x = x0 if lo < x0 < hi else 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0:
            return x
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
        else:
            hi = x
        d = df(x)
        xn = x - fx / d if d != 0 else 0.5 * (lo + hi)
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= tol * max(1.0, abs(x)):
            return xn
        x = xn
    return x


def bessel_zeros(n: int, x_max: float, derivative: bool = False) -> list[float]:
    """Positive zeros of ``J_n`` (or ``J_n'``) up to ``x_max``, ascending.

    For ``J_0'`` the zero at the origin is included.
    """
    if derivative:
        f = lambda x: bessel_j_prime(n, x)  # noqa: E731
        df = lambda x: _second_derivative(n, x)  # noqa: E731
    else:
        f = lambda x: bessel_j(n, x)  # noqa: E731
        df = lambda x: bessel_j_prime(n, x)  # noqa: E731
    zeros = [0.0] if (derivative and n == 0) else []
    step = 0.05
    x = 1e-3
    fx = f(x)
    k = 1
    while x < x_max:
        xn = min(x + step, x_max)
        fn = f(xn)
        if fx == 0 or (fx < 0) != (fn < 0):
            guess = _mcmahon(n, k, derivative)
            z = _safeguarded_newton(f, df, x, xn, guess)
            if z <= x_max:
                zeros.append(z)
            k += 1
        x, fx = xn, fn
    return zeros


@dataclass(frozen=True)
class DiskEigenRef:
    bc: str
    n: int
    k: int
    omega: float
    multiplicity: int

    @property
    def lam(self) -> float:
        return self.omega**2


def disk_eigenvalues(bc: str, count: int) -> list[DiskEigenRef]:
    """First ``count`` distinct unit-disk frequencies with multiplicities."""
    if count < 1:
        raise ValueError("count must be at least 1")
    bc = str(getattr(bc, "value", bc)).lower()
    if bc not in ("dirichlet", "neumann"):
        raise ValueError(f"unknown boundary condition {bc!r}")
    deriv = bc == "neumann"
    x_max = 10.0
    while True:
        found = []
        n = 0
        # j_{n,1} > n and j'_{n,1} >= n, so orders up to x_max suffice
        while n <= x_max:
            for k, z in enumerate(bessel_zeros(n, x_max, deriv), start=1):
                found.append(DiskEigenRef(bc, n, k, z, 1 if n == 0 else 2))
            n += 1
        if len(found) >= count:
            found.sort(key=lambda e: e.omega)
            return found[:count]
        x_max *= 1.5
