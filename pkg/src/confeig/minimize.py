"""Bounded scalar minimization (golden section with parabolic steps).

This follows the classic Brent/``fminbnd`` scheme, except that the
relative part of the tolerance is a few machine epsilons instead of
``sqrt(eps)``, so brackets can shrink to ~1e-12 in absolute terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = ["MinimizeResult", "brent_bounded"]

_GOLD = 0.5 * (3.0 - math.sqrt(5.0))
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class MinimizeResult:
    x: float
    fun: float
    iterations: int
    converged: bool
    step: float  # last accepted change in the best point


def brent_bounded(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    xtol: float = 1e-12,
    maxiter: int = 200,
) -> MinimizeResult:
    """Minimize ``f`` on ``[lo, hi]``; stops when the bracket is within ``xtol``."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    a, b = float(lo), float(hi)
    x = w = v = a + _GOLD * (b - a)
    fx = f(x)
    fw = fv = fx
    d = e = 0.0
    step = math.inf
    it = 0
    while it < maxiter:
        xm = 0.5 * (a + b)
        tol1 = 4 * _EPS * abs(x) + xtol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            return MinimizeResult(x, fx, it, True, step)
        it += 1
        golden = True
        if abs(e) > tol1:
            # trial parabola through x, w, v
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            etemp = e
            e = d
            if abs(p) < abs(0.5 * q * etemp) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if (u - a) < tol2 or (b - u) < tol2:
                    d = tol1 if xm >= x else -tol1
                golden = False
        if golden:
            e = (a - x) if x >= xm else (b - x)
            d = _GOLD * e
        u = x + (d if abs(d) >= tol1 else (tol1 if d > 0 else -tol1))
        fu = f(u)
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            step = abs(u - x)
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return MinimizeResult(x, fx, it, False, step)
