"""Exact Vandermonde polynomials and their local structure.

``P_n(x) = prod_{i<j} (x_i - x_j)`` and ``Q_n(x) = prod_{j>=2} (x_1 - x_j)`` are
expanded as sparse integer polynomials so that the identities about them can
be checked with no rounding at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

from .errors import BudgetExceeded, NotConstant

MAX_N = 8

Monomial = Tuple[int, ...]


class MultiPoly:
    """Sparse polynomial in ``nvars`` variables with exact coefficients.

    Coefficients are ints or Fractions; zero coefficients are never stored.
    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Monomial, object] = None):
        self.nvars = nvars
        clean = {}
        for mono, c in (terms or {}).items():
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} has wrong arity for {nvars} variables")
            if c != 0:
                clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i):
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, {tuple(mono): 1})

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {len(self.terms)} terms)"

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def is_constant(self):
        return all(sum(m) == 0 for m in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, 0)

    def _check(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out: Dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def diff(self, i: int, times: int = 1) -> "MultiPoly":
        """Exact partial derivative of order ``times`` in variable ``i``."""
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e < times:
                continue
            coef = c
            for k in range(times):
                coef *= e - k
            mm = list(m)
            mm[i] = e - times
            out[tuple(mm)] = coef
        return MultiPoly(self.nvars, out)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates")
        total = 0
        for m, c in self.terms.items():
            t = c
            for xi, e in zip(point, m):
                if e:
                    t = t * xi ** e
            total += t
        return total

    def substitute(self, mapping: Dict[int, "MultiPoly"]) -> "MultiPoly":
        """Replace variables by polynomials (same variable count)."""
        result = MultiPoly(self.nvars)
        cache = {}
        for m, c in self.terms.items():
            term = MultiPoly.constant(self.nvars, c)
            for i, e in enumerate(m):
                if not e:
                    continue
                if i in mapping:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = _pow(mapping[i], e)
                    term = term * cache[key]
                else:
                    term = term * _pow(MultiPoly.variable(self.nvars, i), e)
            result = result + term
        return result


def _pow(p, e):
    out = MultiPoly.constant(p.nvars, 1)
    for _ in range(e):
        out = out * p
    return out


def _lex_leading(p: MultiPoly):
    m = max(p.terms)
    return m, p.terms[m]


def divide(p: MultiPoly, d: MultiPoly):
    """Multivariate division in lex order: returns (quotient, remainder).

    With a single divisor the remainder is zero exactly when ``d`` divides ``p``
    over the rationals.
    """
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lm_d, lc_d = _lex_leading(d)
    q = MultiPoly(p.nvars)
    r = MultiPoly(p.nvars)
    rest = p
    while not rest.is_zero():
        lm, lc = _lex_leading(rest)
        if all(a >= b for a, b in zip(lm, lm_d)):
            mono = tuple(a - b for a, b in zip(lm, lm_d))
            coef = Fraction(lc) / lc_d
            if coef.denominator == 1:
                coef = coef.numerator
            t = MultiPoly(p.nvars, {mono: coef})
            q = q + t
            rest = rest - t * d
        else:
            lead = MultiPoly(p.nvars, {lm: lc})
            r = r + lead
            rest = rest - lead
    return q, r


def laplacian(p: MultiPoly) -> MultiPoly:
    """Sum of the pure second partials."""
    out = MultiPoly(p.nvars)
    for i in range(p.nvars):
        out = out + p.diff(i, 2)
    return out


def _budget(n):
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_N:
        raise BudgetExceeded(f"n={n} exceeds the exact-arithmetic budget n <= {MAX_N}")


def build_Q(n: int, nvars: int = None, offset: int = 0) -> MultiPoly:
    """``Q_n`` in variables ``offset .. offset+n-1`` of an ``nvars``-variable ring."""
    nvars = n if nvars is None else nvars
    out = MultiPoly.constant(nvars, 1)
    x1 = MultiPoly.variable(nvars, offset)
    for j in range(1, n):
        out = out * (x1 - MultiPoly.variable(nvars, offset + j))
    return out


def build_P(n: int) -> MultiPoly:
    """Expanded ``P_n``; ``P_1 = 1``."""
    _budget(n)
    xs = [MultiPoly.variable(n, i) for i in range(n)]
    out = MultiPoly.constant(n, 1)
    for i in range(n):
        for j in range(i + 1, n):
            out = out * (xs[i] - xs[j])
    return out


def vandermonde_det(points: Sequence) -> Fraction:
    """Determinant of the matrix with rows ``1, x, ..., x^(n-1)``.

    Computed by Bareiss fraction-free elimination, so every intermediate
    division is exact.
    """
    pts = [Fraction(p) for p in points]
    n = len(pts)
    _budget(n)
    a = [[p ** i for p in pts] for i in range(n)]
    return bareiss_det(a)


def bareiss_det(a):
    """Exact determinant of a square matrix of ints/Fractions (copied)."""
    m = [list(row) for row in a]
    n = len(m)
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = Fraction(m[k][k])
    return sign * Fraction(m[n - 1][n - 1])


def apply_D(p: MultiPoly, variables: Sequence[int] = None) -> MultiPoly:
    """Apply ``d^(k-1)/dv_k^(k-1) ... d/dv_2`` for the listed variables ``v_1..v_k``."""
    variables = list(range(p.nvars)) if variables is None else list(variables)
    out = p
    for order, v in enumerate(variables):
        if order:
            out = out.diff(v, order)
    return out


def mixed_derivative_constant(n: int) -> int:
    """``D_n P_n`` evaluated exactly.

    The result is ``(-1)^(n(n-1)/2) (n-1)! (n-2)! ... 2!``: the monomial
    ``x_2 x_3^2 ... x_n^(n-1)`` enters ``P_n`` with that sign.
    """
    _budget(n)
    r = apply_D(build_P(n))
    if not r.is_constant():
        raise NotConstant(f"D_{n} P_{n} has degree {r.degree()}")
    return r.constant_term()


def superfactorial_product(n: int) -> int:
    """(n-1)! (n-2)! ... 2! 1!"""
    return math.prod(math.factorial(k) for k in range(1, n))


@dataclass(frozen=True)
class GroupedPoint:
    """Distinct values ``c̄_1 < ... < c̄_p`` repeated with multiplicities ``k_j``."""

    values: tuple
    multiplicities: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        ks = tuple(int(k) for k in self.multiplicities)
        if len(vals) != len(ks) or not vals:
            raise ValueError("values and multiplicities must be nonempty and aligned")
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be strictly increasing")
        if any(k < 1 for k in ks):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "multiplicities", ks)

    @property
    def n(self):
        return sum(self.multiplicities)

    def expanded(self):
        """The n-vector with each value repeated by its multiplicity."""
        return tuple(v for v, k in zip(self.values, self.multiplicities) for _ in range(k))

    def groups(self):
        """Index ranges of each group inside the expanded vector."""
        out, start = [], 0
        for k in self.multiplicities:
            out.append(range(start, start + k))
            start += k
        return out


def local_factor_rho(c: GroupedPoint) -> Fraction:
    """Closed form ``prod_{i<j} (c̄_i - c̄_j)^(k_i k_j)``."""
    _budget(c.n)
    v, k = c.values, c.multiplicities
    out = Fraction(1)
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            out *= (v[i] - v[j]) ** (k[i] * k[j])
    return out


def stagewise_rho(c: GroupedPoint) -> list:
    """The factors ``rho_i = [prod_{j>i} (c̄_i - c̄_j)^(k_j)]^(k_i)`` peeled group by group."""
    v, k = c.values, c.multiplicities
    out = []
    for i in range(len(v)):
        inner = Fraction(1)
        for j in range(i + 1, len(v)):
            inner *= (v[i] - v[j]) ** k[j]
        out.append(inner ** k[i])
    return out


def evaluate_P(points: Sequence) -> Fraction:
    """``P_n`` at a point straight from the product definition."""
    out = Fraction(1)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            out *= Fraction(points[i]) - Fraction(points[j])
    return out


@dataclass
class FactorizationReport:
    rho: Fraction
    max_deviation: Dict[Fraction, Fraction]
    fitted_constant: Fraction
    trials: int

    def passes(self, bound: float) -> bool:
        return all(dev <= bound * t for t, dev in self.max_deviation.items())


DEFAULT_STEPS = (Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))


def factorization_ratio(c: GroupedPoint, eta: Sequence, t) -> Fraction:
    """``P_n(c + t eta) / (rho(c) prod_j P_{k_j}(t eta^(j)))`` in exact arithmetic."""
    t = Fraction(t)
    base = c.expanded()
    x = [ci + t * Fraction(e) for ci, e in zip(base, eta)]
    denom = local_factor_rho(c)
    for g in c.groups():
        denom *= evaluate_P([t * Fraction(eta[i]) for i in g])
    return evaluate_P(x) / denom


def verify_local_factorization(c: GroupedPoint, trials: int, rng=None,
                               steps: Iterable = DEFAULT_STEPS) -> FactorizationReport:
    """Ratio test of the local factorization of ``P_n`` near ``c``.

    Directions ``eta`` have rational entries in [-1/2, 1/2] with distinct
    coordinates inside every group. ``rng`` must provide ``integers(lo, hi)``;
    a fixed-seed generator is used when omitted.
    """
    from .rng import SplitMix64

    _budget(c.n)
    rng = rng or SplitMix64(0)
    steps = tuple(Fraction(s) for s in steps)
    worst = {t: Fraction(0) for t in steps}
    done = 0
    while done < trials:
        eta = [Fraction(rng.integers(-500, 501), 1000) for _ in range(c.n)]
        if any(len({eta[i] for i in g}) < len(g) for g in c.groups()):
            continue
        for t in steps:
            dev = abs(factorization_ratio(c, eta, t) - 1)
            worst[t] = max(worst[t], dev)
        done += 1
    fitted = max((worst[t] / t for t in steps), default=Fraction(0))
    return FactorizationReport(local_factor_rho(c), worst, fitted, trials)
