"""Exterior conformal maps ``Psi(w) = w + sum_n a_n w^{-n}`` on ``|w| > r``."""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .laurent import LaurentSeries

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

__all__ = [
    "ConformalMap",
    "PerturbSpec",
    "boundary_trace",
    "derivative_trace",
    "perturb",
    "injectivity_diagnostic",
    "load_domain",
    "save_domain",
    "DomainFileError",
]


class DomainFileError(ValueError):
    """Raised for unreadable or malformed domain-spec files."""


@dataclass(frozen=True)
class ConformalMap:
    """Finite exterior map ``Psi(w) = w + a_0 + a_1/w + ... + a_L/w^L``.

    ``coeffs[n]`` is ``a_n``; the map is defined on ``|w| >= r``.
    Univalence is not checked here, see :func:`injectivity_diagnostic`.
    """

    r: float = 1.0
    coeffs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        r = float(self.r)
        if not np.isfinite(r) or r <= 0:
            raise ValueError(f"inner radius must be positive, got {self.r!r}")
        c = tuple(complex(a) for a in self.coeffs)
        if not all(np.isfinite(a.real) and np.isfinite(a.imag) for a in c):
            raise ValueError("map coefficients must be finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "coeffs", c)

    # -- common domains --------------------------------------------------
    @classmethod
    def disk(cls, radius: float = 1.0) -> "ConformalMap":
        return cls(radius, ())

    @classmethod
    def ellipse(cls, a: complex) -> "ConformalMap":
        """``w + a/w`` on ``|w| >= 1``: semi-axes ``1 + a`` and ``1 - a`` for real a."""
        return cls(1.0, (0.0, a))

    @classmethod
    def hourglass(cls, delta: float = 1.0) -> "ConformalMap":
        """The family ``w - delta * (0.7/w + 0.25/w**3)``."""
        return cls(1.0, (0.0, -0.7 * delta, 0.0, -0.25 * delta))

    # -- basic properties ------------------------------------------------
    @property
    def degree(self) -> int:
        """Highest ``n`` with ``a_n != 0`` (0 for a translated disk)."""
        nz = [n for n, a in enumerate(self.coeffs) if a != 0 and n >= 1]
        return max(nz) if nz else 0

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = w.copy()
        for n, a in enumerate(self.coeffs):
            if a != 0:
                out = out + a * w ** (-n)
        return out

    def derivative(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.ones_like(w)
        for n, a in enumerate(self.coeffs):
            if n >= 1 and a != 0:
                out = out - n * a * w ** (-n - 1)
        return out

    def area(self) -> float:
        """Enclosed area ``pi (r^2 - sum_n n |a_n|^2 r^{-2n})``."""
        s = sum(n * abs(a) ** 2 * self.r ** (-2 * n) for n, a in enumerate(self.coeffs))
        return float(np.pi * (self.r**2 - s))

    def boundary_radius(self, nodes: int = 4096) -> float:
        """``max |Psi(r e^{i theta})|`` sampled on a uniform grid."""
        theta = 2 * np.pi * np.arange(nodes) / nodes
        return float(np.max(np.abs(self(self.r * np.exp(1j * theta)))))

    def normalized(self) -> "ConformalMap":
        """The capacity-one map ``Psi(r u) / r``."""
        return ConformalMap(1.0, tuple(a * self.r ** (-n - 1) for n, a in enumerate(self.coeffs)))

    def fingerprint(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {"r": self.r, "coeffs": [[a.real, a.imag] for a in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> "ConformalMap":
        try:
            r = float(data["r"])
            raw = data.get("coeffs", [])
            coeffs = []
            for item in raw:
                if isinstance(item, (list, tuple)):
                    if len(item) != 2:
                        raise ValueError(f"coefficient entry {item!r} is not [re, im]")
                    coeffs.append(complex(float(item[0]), float(item[1])))
                else:
                    coeffs.append(complex(float(item)))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainFileError(f"invalid domain spec: {exc}") from exc
        try:
            return cls(r, tuple(coeffs))
        except ValueError as exc:
            raise DomainFileError(str(exc)) from exc


@dataclass(frozen=True)
class PerturbSpec:
    """Perturbation ``Psi(w) + eps * w^{-j}``."""

    j: int
    eps: complex

    def __post_init__(self):
        if int(self.j) != self.j or self.j < 1:
            raise ValueError("perturbation mode j must be a positive integer")
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "eps", complex(self.eps))


def boundary_trace(cmap: ConformalMap) -> LaurentSeries:
    """``Psi(r e^{i theta})`` as a series in ``e^{i theta}``."""
    terms = {1: cmap.r}
    for n, a in enumerate(cmap.coeffs):
        terms[-n] = terms.get(-n, 0) + a * cmap.r ** (-n)
    return LaurentSeries.from_dict(terms)


def derivative_trace(cmap: ConformalMap) -> LaurentSeries:
    """``Psi'(r e^{i theta})`` as a series in ``e^{i theta}``."""
    terms = {0: 1.0}
    for n, a in enumerate(cmap.coeffs):
        if n >= 1:
            terms[-n - 1] = -n * a * cmap.r ** (-n - 1)
    return LaurentSeries.from_dict(terms)


def perturb(cmap: ConformalMap, spec: PerturbSpec) -> ConformalMap:
    """Add ``eps w^{-j}``; ``r`` is kept fixed."""
    coeffs = list(cmap.coeffs)
    if len(coeffs) <= spec.j:
        coeffs.extend([0j] * (spec.j + 1 - len(coeffs)))
    coeffs[spec.j] += spec.eps
    return ConformalMap(cmap.r, tuple(coeffs))


def _segments_cross(p: np.ndarray) -> bool:
    # Closed polygon p[0..n-1]; proper crossings between non-adjacent edges.
    a = p
    b = np.roll(p, -1)
    n = len(p)
    ax, ay = a.real, a.imag
    dx, dy = (b - a).real, (b - a).imag

    def orient(i_x, i_y, j_dx, j_dy, k_x, k_y):
        return j_dx * (k_y - i_y) - j_dy * (k_x - i_x)

    for i in range(n):
        # edges j > i + 1, excluding the wrap-around neighbour of edge 0
        j = np.arange(i + 2, n if i > 0 else n - 1)
        if j.size == 0:
            continue
        o1 = orient(ax[i], ay[i], dx[i], dy[i], ax[j], ay[j])
        o2 = orient(ax[i], ay[i], dx[i], dy[i], ax[j] + dx[j], ay[j] + dy[j])
        o3 = orient(ax[j], ay[j], dx[j], dy[j], ax[i], ay[i])
        o4 = orient(ax[j], ay[j], dx[j], dy[j], ax[i] + dx[i], ay[i] + dy[i])
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return True
    return False


def injectivity_diagnostic(cmap: ConformalMap, nodes: int = 512) -> bool:
    """Heuristic univalence check of ``Psi`` on ``|w| >= r``.

    Returns False if the sampled boundary polygon self-intersects, winds
    clockwise, ``|Psi'|`` drops below 1e-8 at a node, or ``Psi'`` has a
    zero with ``|w| >= r``.
    """
    if nodes < 64:
        raise ValueError("injectivity_diagnostic needs at least 64 nodes")
    theta = 2 * np.pi * np.arange(nodes) / nodes
    w = cmap.r * np.exp(1j * theta)
    z = cmap(w)
    if np.min(np.abs(cmap.derivative(w))) < 1e-8:
        return False
    signed_area = 0.5 * np.sum((np.conj(z) * np.roll(z, -1)).imag)
    if signed_area <= 0:
        return False
    # w^{L+1} Psi'(w) is a polynomial; its roots are the critical points.
    L = cmap.degree
    if L >= 1:
        poly = np.zeros(L + 2, dtype=complex)
        poly[0] = 1.0
        for n, a in enumerate(cmap.coeffs):
            if n >= 1:
                poly[n + 1] -= n * a
        crit = np.roots(poly)
        if crit.size and np.max(np.abs(crit)) >= cmap.r * (1 - 1e-12):
            return False
    return not _segments_cross(z)


def load_domain(path) -> ConformalMap:
    """Read a JSON or TOML domain file ``{r, coeffs: [[re, im], ...]}``."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DomainFileError(f"cannot read domain file {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode())
        else:
            data = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise DomainFileError(f"cannot parse domain file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainFileError(f"domain file {path} must hold an object")
    return ConformalMap.from_dict(data)


def save_domain(cmap: ConformalMap, path) -> None:
    """Write JSON, or TOML when the suffix is ``.toml``."""
    path = Path(path)
    data = cmap.to_dict()
    if path.suffix.lower() == ".toml":
        # two keys of plain numbers: JSON number syntax is valid TOML
        text = f"r = {json.dumps(data['r'])}\ncoeffs = {json.dumps(data['coeffs'])}\n"
    else:
        text = json.dumps(data, indent=2) + "\n"
    path.write_text(text)
