"""Slater determinants over a spectral basis.

All determinants use LU with partial pivoting in double precision; for the
confluent variants the ratio to the product of column norms is reported so
that callers can see how well conditioned a value is.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateProbe, NearSingular
from .spectral import SpectralBasis

NEAR_SINGULAR = 1e-10
PROBE_FLOOR = 1e-13


@dataclass(frozen=True)
class NodeSpec:
    """Distinct points in ]0, 1[ with prescribed zero multiplicities."""

    points: tuple
    multiplicities: tuple

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        ks = tuple(int(k) for k in self.multiplicities)
        if len(pts) != len(ks):
            raise ValueError("points and multiplicities must have equal length")
        if any(not 0.0 < p < 1.0 for p in pts):
            raise ValueError("node points must lie strictly inside ]0, 1[")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise ValueError("node points must be strictly increasing")
        if any(k < 1 for k in ks):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "multiplicities", ks)

    @classmethod
    def simple(cls, points) -> "NodeSpec":
        return cls(tuple(points), (1,) * len(points))

    @classmethod
    def parse(cls, text: str) -> "NodeSpec":
        """Parse ``"0.2:1,0.5:2"``; a bare point means multiplicity 1."""
        pts, ks = [], []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            if ":" in item:
                p, k = item.split(":", 1)
                pts.append(float(p))
                ks.append(int(k))
            else:
                pts.append(float(item))
                ks.append(1)
        return cls(tuple(pts), tuple(ks))

    @property
    def total(self) -> int:
        return sum(self.multiplicities)

    def __str__(self):
        return ",".join(f"{p!r}:{k}" for p, k in zip(self.points, self.multiplicities))


def slater_matrix(basis: SpectralBasis, points) -> np.ndarray:
    """The matrix ``[h_i(x_j)]``, rows indexed by eigenfunction."""
    return basis.values(np.asarray(points, dtype=float))


def slater_det(basis: SpectralBasis, points: Sequence[float]) -> float:
    points = np.asarray(points, dtype=float)
    if points.shape != (basis.n,):
        raise ValueError(f"need {basis.n} points for a basis of size {basis.n}")
    return float(np.linalg.det(slater_matrix(basis, points)))


def _probe_point(k):
    return np.arange(1, k + 1) / (k + 1)


def sign_normalize(basis: SpectralBasis, rng=None) -> SpectralBasis:
    """Flip eigenfunction signs so every leading Slater determinant is positive.

    For k = 1..n the sign of ``h_k`` is chosen so that ``S_k`` is positive at
    the equispaced interior tuple ``(1/(k+1), ..., k/(k+1))``. A probe whose
    determinant falls under 1e-13 is replaced by a random ordered tuple.
    """
    signs = [p.sign for p in basis.pairs]
    current = basis
    for k in range(1, basis.n + 1):
        sub = current.truncate(k)
        point = _probe_point(k)
        d = slater_det(sub, point)
        attempts = 0
        while abs(d) < PROBE_FLOOR:
            if rng is None:
                from .rng import SplitMix64
                rng = SplitMix64(k)
            attempts += 1
            if attempts > 20:
                raise DegenerateProbe(f"no usable probe for S_{k}")
            point = np.array(rng.sorted_points(k, 0.05, 0.95, min_gap=0.5 / (k + 1)))
            d = slater_det(sub, point)
        if d < 0:
            signs[k - 1] = -signs[k - 1]
            current = current.with_signs(signs)
    return current


def cofactor_coeffs(basis: SpectralBasis, c: Sequence[float]) -> np.ndarray:
    """Coefficients s_j with ``sum_j s_j h_j(x) = S_n(c_1, ..., c_{n-1}, x)``.

    ``s_j = (-1)^(n+j)`` times the minor obtained by deleting row j from the
    n x (n-1) matrix ``[h_i(c_k)]``.
    """
    c = np.asarray(c, dtype=float)
    n = basis.n
    if c.shape != (n - 1,):
        raise ValueError(f"need {n - 1} points for a basis of size {n}")
    return _last_column_cofactors(slater_matrix(basis, c))


def _last_column_cofactors(cols: np.ndarray) -> np.ndarray:
    """Cofactors along the (missing) last column of an n x (n-1) matrix."""
    n = cols.shape[0]
    if n == 1:
        return np.array([1.0])
    s = np.empty(n)
    for j in range(n):
        minor = np.delete(cols, j, axis=0)
        # 1-based (-1)^(n+j) with j+1 in place of j
        s[j] = (-1.0) ** (n + j + 1) * np.linalg.det(minor)
    return s


def confluent_columns(basis: SpectralBasis, spec: NodeSpec) -> np.ndarray:
    """Columns ``h(c_1), h'(c_1), ..., h^(k_1-1)(c_1), ..., h^(k_p-1)(c_p)``."""
    cols = []
    for c, k in zip(spec.points, spec.multiplicities):
        for m in range(k):
            cols.append(basis.column(c, m))
    if not cols:
        return np.zeros((basis.n, 0))
    return np.column_stack(cols)


def confluent_slater(basis: SpectralBasis, spec: NodeSpec, x: float, order: int = 0) -> float:
    """The confluent determinant with last column ``h^(order)(x)``.

    ``order`` > 0 gives the x-derivatives of the function of x.
    """
    if spec.total != basis.n - 1:
        raise ValueError("multiplicities must sum to n - 1")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    a = np.column_stack([confluent_columns(basis, spec), basis.column(x, order)])
    return float(np.linalg.det(a))


def confluent_coeffs(basis: SpectralBasis, spec: NodeSpec) -> np.ndarray:
    """Coefficients of the confluent determinant expanded along its last column."""
    if spec.total != basis.n - 1:
        raise ValueError("multiplicities must sum to n - 1")
    return _last_column_cofactors(confluent_columns(basis, spec))


@dataclass(frozen=True)
class ConfluentDeterminant:
    value: float
    column_norm_product: float

    @property
    def relative(self) -> float:
        return abs(self.value) / self.column_norm_product


def confluent_matrix_det(basis: SpectralBasis, spec: NodeSpec,
                         threshold: float = NEAR_SINGULAR) -> ConfluentDeterminant:
    """Determinant of the full n x n confluent matrix (multiplicities sum to n).

    Raises NearSingular when ``|det|`` falls below ``threshold`` times the
    product of the column norms.
    """
    if spec.total != basis.n:
        raise ValueError("multiplicities must sum to n")
    a = confluent_columns(basis, spec)
    value = float(np.linalg.det(a))
    scale = float(np.prod(np.linalg.norm(a, axis=0)))
    if abs(value) <= threshold * scale:
        raise NearSingular(value, scale, threshold)
    return ConfluentDeterminant(value, scale)
