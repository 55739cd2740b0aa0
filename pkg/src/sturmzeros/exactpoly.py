"""Exact univariate polynomials over the rationals.

Real roots are counted with a Sturm chain on the square-free parts of a Yun
decomposition, so every answer here is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(v)


class UPoly:
    """Polynomial with Fraction coefficients, stored lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_frac(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(c)

    @classmethod
    def x(cls) -> "UPoly":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Sequence, lead=1) -> "UPoly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-_frac(r), 1])
        return p

    def __repr__(self):
        return f"UPoly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UPoly([other])
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __add__(self, other):
        other = _lift(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return UPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return UPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = _lift(other)
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        if len(rem) - 1 < dd:
            return UPoly(), self
        quot = [Fraction(0)] * (len(rem) - dd)
        lead = other.lead
        for k in range(len(rem) - 1 - dd, -1, -1):
            f = rem[k + dd] / lead
            quot[k] = f
            if f:
                for i, c in enumerate(other.coeffs):
                    rem[k + i] -= f * c
        return UPoly(quot), UPoly(rem[:dd])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UPoly":
        return UPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "UPoly":
        if not self.coeffs:
            return self
        return UPoly([c / self.lead for c in self.coeffs])

    def __pow__(self, k: int):
        out = UPoly([1])
        for _ in range(k):
            out = out * self
        return out


def _lift(v) -> UPoly:
    return v if isinstance(v, UPoly) else UPoly([v])


def gcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic greatest common divisor (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


def square_free_decomposition(p: UPoly) -> List[UPoly]:
    """Yun's algorithm: monic square-free, pairwise coprime ``f_1, f_2, ...``
    with ``p = lead * prod f_i^i``. Trailing unit factors are dropped."""
    if p.degree < 1:
        return []
    dp = p.derivative()
    a = gcd(p, dp)
    b = p // a
    c = dp // a
    out = []
    while b.degree >= 1:
        d = c - b.derivative()
        f = gcd(b, d)
        out.append(f)
        b = b // f
        c = d // f
    while out and out[-1].degree < 1:
        out.pop()
    return out


def sturm_chain(p: UPoly) -> List[UPoly]:
    chain = [p, p.derivative()]
    while chain[-1].degree >= 1:
        r = chain[-2] % chain[-1]
        if not r:
            break
        chain.append(-r)
    return [f for f in chain if f]


def _sign_at(f: UPoly, x) -> int:
    """Sign of f at a rational x, or at +-inf when x is the string '+inf' / '-inf'."""
    if x == "+inf":
        v = f.lead
    elif x == "-inf":
        v = f.lead * (-1 if f.degree % 2 else 1)
    else:
        v = f(x)
    return (v > 0) - (v < 0)


def _variations(chain, x) -> int:
    signs = [s for s in (_sign_at(f, x) for f in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_distinct_real_roots(p: UPoly, lo="-inf", hi="+inf") -> int:
    """Distinct real roots in ``(lo, hi]`` (the whole line by default)."""
    if not p:
        raise ValueError("the zero polynomial has infinitely many roots")
    if p.degree < 1:
        return 0
    chain = sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


def real_root_multiplicities(p: UPoly) -> List[int]:
    """Multiplicity of each distinct real root, with repetitions per root."""
    out = []
    for i, f in enumerate(square_free_decomposition(p), start=1):
        out.extend([i] * count_distinct_real_roots(f))
    return sorted(out)


def count_real_roots(p: UPoly) -> int:
    """Number of real roots counted with multiplicity."""
    return sum(real_root_multiplicities(p))


def root_bound(p: UPoly) -> Fraction:
    """Cauchy bound: every root satisfies ``|x| < 1 + max |a_i / a_n|``."""
    lead = abs(p.lead)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


def isolate_real_roots(p: UPoly, width=Fraction(1, 10**12)) -> List[Tuple[Fraction, Fraction, int]]:
    """Disjoint intervals ``(lo, hi]`` each holding one distinct real root,
    refined to ``width``, paired with that root's multiplicity."""
    width = _frac(width)
    out = []
    for mult, f in enumerate(square_free_decomposition(p), start=1):
        chain = sturm_chain(f)
        bound = root_bound(f)
        stack = [(-bound, bound)]
        while stack:
            lo, hi = stack.pop()
            k = _variations(chain, lo) - _variations(chain, hi)
            if k == 0:
                continue
            if k == 1 and hi - lo <= width:
                out.append((lo, hi, mult))
                continue
            mid = (lo + hi) / 2
            stack.append((mid, hi))
            stack.append((lo, mid))
    out.sort()
    return out


def root_multiplicity(p: UPoly, c) -> int:
    """Exact order of vanishing of p at the rational point c."""
    if not p:
        raise ValueError("the zero polynomial vanishes to infinite order")
    c = _frac(c)
    lin = UPoly([-c, 1])
    k = 0
    while p(c) == 0:
        p = p // lin
        k += 1
    return k


def snap(x: float, tol: float = 1e-12) -> Fraction:
    """Simplest continued-fraction convergent within ``tol * max(1, |x|)`` of x."""
    target = Fraction(x)
    allowed = Fraction(tol) * max(1, abs(target))
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    rest = target
    while True:
        a = rest.numerator // rest.denominator
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        conv = Fraction(h1, k1)
        if abs(conv - target) <= allowed:
            return conv
        frac_part = rest - a
        if frac_part == 0:
            return conv
        rest = 1 / frac_part
