"""The harmonic oscillator on the real line, handled exactly.

Eigenfunctions are ``h_n(x) = gamma_{n-1} H_{n-1}(x) exp(-x^2/2)`` with
eigenvalue ``2n - 1``. Because the Gaussian factor is positive, every question
about zeros reduces to a question about a polynomial with rational
coefficients, which is answered with Sturm chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, VerificationFailure, ZeroVector
from .exactpoly import UPoly, count_real_roots, root_multiplicity, snap
from .vandermonde import bareiss_det

MAX_DEGREE = 40


@lru_cache(maxsize=None)
def _hermite_poly(m: int) -> UPoly:
    if m == 0:
        return UPoly([1])
    if m == 1:
        return UPoly([0, 2])
    two_x = UPoly([0, 2])
    return two_x * _hermite_poly(m - 1) - (2 * (m - 1)) * _hermite_poly(m - 2)


@dataclass(frozen=True)
class HermitePoly:
    """Physicists' Hermite polynomial with integer coefficients, lowest first."""

    degree: int
    coeffs: tuple

    @property
    def poly(self) -> UPoly:
        return UPoly(self.coeffs)

    def __call__(self, x):
        return np.polyval([float(c) for c in reversed(self.coeffs)], x)


def hermite(m: int) -> HermitePoly:
    """H_m from ``H_{m+1} = 2x H_m - 2m H_{m-1}``."""
    if not 0 <= m <= MAX_DEGREE:
        raise BudgetExceeded(f"Hermite degree must lie in [0, {MAX_DEGREE}]")
    p = _hermite_poly(m)
    return HermitePoly(m, tuple(int(c) for c in p.coeffs))


def hermite_ode_residual(m: int) -> UPoly:
    """``H'' - 2x H' + 2m H``; the zero polynomial when the recurrence is right."""
    h = hermite(m).poly
    d1 = h.derivative()
    return d1.derivative() - UPoly([0, 2]) * d1 + (2 * m) * h


def gamma_norm(m: int) -> float:
    """``(2^m m! sqrt(pi))^(-1/2)``, evaluated in log space."""
    if not 0 <= m <= MAX_DEGREE:
        raise BudgetExceeded(f"degree must lie in [0, {MAX_DEGREE}]")
    return math.exp(-0.5 * (m * math.log(2.0) + math.lgamma(m + 1) + 0.5 * math.log(math.pi)))


@dataclass(frozen=True)
class OscillatorEigenfunction:
    index: int

    @property
    def eigenvalue(self) -> int:
        return 2 * self.index - 1

    @property
    def gamma(self) -> float:
        return gamma_norm(self.index - 1)

    @property
    def hermite(self) -> HermitePoly:
        return hermite(self.index - 1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.gamma * self.hermite(x) * np.exp(-0.5 * x * x)


def oscillator_values(n: int, x) -> np.ndarray:
    """Matrix ``h_i(x_j)`` for i = 1..n."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([OscillatorEigenfunction(i)(x) for i in range(1, n + 1)])


def oscillator_slater(points: Sequence[float]) -> float:
    pts = np.asarray(points, dtype=float)
    return float(np.linalg.det(oscillator_values(len(pts), pts)))


def vandermonde_float(points: Sequence[float]) -> float:
    pts = np.asarray(points, dtype=float)
    i, j = np.triu_indices(len(pts), k=1)
    return float(np.prod(pts[i] - pts[j]))


def closed_form_constant(n: int) -> float:
    """``(-1)^(n(n-1)/2) 2^(n(n-1)/2) prod_{m<n} gamma_m``."""
    e = n * (n - 1) // 2
    return (-1) ** e * 2.0 ** e * math.prod(gamma_norm(m) for m in range(n))


def identity_deviations(n: int, points: np.ndarray) -> np.ndarray:
    """Relative gap between the Slater determinant and its closed form, per point row.

    Rows where the determinant is below 1e-12 in magnitude are returned as nan.
    """
    b = closed_form_constant(n)
    out = np.full(len(points), np.nan)
    for r, x in enumerate(points):
        s = oscillator_slater(x)
        if abs(s) < 1e-12:
            continue
        rhs = b * math.exp(-0.5 * float(np.dot(x, x))) * vandermonde_float(x)
        out[r] = abs(s - rhs) / abs(s)
    return out


def random_points(rng, n: int, count: int, lo: float = -2.5, hi: float = 2.5) -> np.ndarray:
    """``count`` rows of n distinct coordinates drawn uniformly, in draw order."""
    rows = []
    while len(rows) < count:
        x = [rng.uniform(lo, hi) for _ in range(n)]
        if len(set(x)) == n:
            rows.append(x)
    return np.array(rows)


def slater_vandermonde_constant(n: int, rng=None, trials: int = 20, tol: float = 1e-8) -> float:
    """The constant B_n tying the oscillator Slater determinant to the
    Vandermonde product, checked at ``trials`` random points."""
    from .rng import SplitMix64

    if not 1 <= n <= 7:
        raise ValueError("n must lie in [1, 7]")
    rng = rng or SplitMix64(n)
    dev = identity_deviations(n, random_points(rng, n, trials))
    worst = float(np.nanmax(dev)) if np.any(~np.isnan(dev)) else 0.0
    if worst > tol:
        raise VerificationFailure(f"B_{n}: relative deviation {worst:.3e} exceeds {tol:.0e}")
    return closed_form_constant(n)


def polynomial_part(b: Sequence[float], tol: float = 1e-12) -> UPoly:
    """``sum_j r_j H_{j-1}`` with ``r_j`` the snapped value of ``b_j gamma_{j-1}``."""
    out = UPoly()
    for j, bj in enumerate(b):
        r = snap(float(bj) * gamma_norm(j), tol)
        if r:
            out = out + r * hermite(j).poly
    return out


def oscillator_zero_count(b: Sequence[float]) -> int:
    """Real zeros of ``sum_j b_j h_j`` counted with multiplicity."""
    b = [float(v) for v in b]
    if len(b) > 12:
        raise BudgetExceeded("at most 12 coefficients are supported")
    if not any(b):
        raise ZeroVector("coefficient vector is zero")
    p = polynomial_part(b)
    if not p:
        raise ZeroVector("coefficients snap to the zero polynomial")
    return count_real_roots(p)


def coefficients_for_polynomial(p: UPoly, n: int) -> np.ndarray:
    """b with ``sum_j b_j h_j = p(x) exp(-x^2/2)``; requires ``deg p < n``."""
    if p.degree >= n:
        raise ValueError("polynomial degree must be below n")
    t = [Fraction(0)] * n
    rest = p
    for m in range(p.degree, -1, -1):
        h = hermite(m).poly
        t[m] = rest.coeffs[m] / h.lead if rest.degree == m else Fraction(0)
        rest = rest - t[m] * h
    return np.array([float(t[j]) / gamma_norm(j) for j in range(n)])


def _hermite_column(n: int, c: Fraction, order: int) -> list:
    return [_derive(_hermite_poly(i), order)(c) for i in range(n)]


def _derive(p: UPoly, k: int) -> UPoly:
    for _ in range(k):
        p = p.derivative()
    return p


def slater_polynomial(points: Sequence, multiplicities: Sequence[int] = None) -> UPoly:
    """Polynomial part in x of the oscillator determinant with columns fixed at
    rational points (derivative columns for repeated points) and last column at x.

    Column operations strip the Gaussian, so the columns reduce to
    ``H^(m)(c)``. Expanded exactly by cofactors along the last column.
    """
    pts = [Fraction(p) for p in points]
    ks = [1] * len(pts) if multiplicities is None else [int(k) for k in multiplicities]
    n = sum(ks) + 1
    cols = [_hermite_column(n, c, m) for c, k in zip(pts, ks) for m in range(k)]
    out = UPoly()
    for i in range(n):
        minor = [[col[r] for col in cols] for r in range(n) if r != i]
        cof = (-1) ** (n + i + 1) * bareiss_det(minor) if cols else Fraction(1)
        if cof:
            out = out + cof * _hermite_poly(i)
    return out


def prescribed_orders(points: Sequence, multiplicities: Sequence[int] = None) -> list:
    """Exact vanishing order of the polynomial part at each prescribed point."""
    p = slater_polynomial(points, multiplicities)
    return [root_multiplicity(p, Fraction(c)) for c in points]


def has_only_prescribed_zeros(points: Sequence, multiplicities: Sequence[int] = None) -> bool:
    """True when the prescribed zeros, at their prescribed orders, are all the real zeros."""
    ks = [1] * len(points) if multiplicities is None else list(multiplicities)
    p = slater_polynomial(points, ks)
    orders = [root_multiplicity(p, Fraction(c)) for c in points]
    return orders == ks and count_real_roots(p) == sum(ks)
