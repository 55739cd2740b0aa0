"""Locate, count and classify interior zeros of eigenfunction combinations.

A zero of ``S_b = sum_j b_j h_j`` is found either as a sign change on a
sampling grid or as a sign-preserving dip of ``|S_b|``. Each candidate's
vanishing order is the first derivative order whose scaled Taylor
coefficient is not negligible next to the others at that point; odd orders
are nodes and even orders are antinodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from .errors import NearSingular, UnresolvedZero, ZeroVector
from .slater import NEAR_SINGULAR, NodeSpec, confluent_columns, confluent_coeffs
from .spectral import MAX_ORDER, SpectralBasis

NODE = "node"
ANTINODE = "antinode"

MIN_GRID = 256
BISECT_TOL = 1e-12
DIP_THRESHOLD = 1e-7
DIP_PREFILTER = 1e-3
ORDER_REL = 1e-6
ORDER_FLOOR = 1e-10
SPLIT_FLOOR = 1e-12
CLOSE_CELLS = 4


@dataclass(frozen=True)
class ZeroRecord:
    location: float
    multiplicity: int
    kind: str

    def __post_init__(self):
        if not 0.0 < self.location < 1.0:
            raise ValueError("zero locations must be interior")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")
        expected = NODE if self.multiplicity % 2 else ANTINODE
        if self.kind != expected:
            raise ValueError(f"order {self.multiplicity} zero must be a {expected}")


@dataclass(frozen=True)
class ZeroReport:
    records: tuple
    grid: int
    sup_norm: float

    @property
    def N(self) -> int:
        return sum(1 for r in self.records if r.kind == NODE)

    @property
    def A(self) -> int:
        return sum(1 for r in self.records if r.kind == ANTINODE)

    @property
    def total_with_multiplicity(self) -> int:
        return sum(r.multiplicity for r in self.records)

    @property
    def locations(self) -> np.ndarray:
        return np.array([r.location for r in self.records])

    @property
    def multiplicities(self) -> List[int]:
        return [r.multiplicity for r in self.records]

    def to_dict(self) -> dict:
        return {
            "zeros": [{"x": r.location, "multiplicity": r.multiplicity, "kind": r.kind}
                      for r in self.records],
            "N": self.N,
            "A": self.A,
            "total": self.total_with_multiplicity,
        }


@dataclass(frozen=True)
class Verdict:
    claim: str
    passed: bool
    lhs: int
    bound: int
    relation: str

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"{self.claim}: {self.lhs} {self.relation} {self.bound} [{status}]"


def oscillation_length(basis: SpectralBasis) -> float:
    """Local wavelength scale of the basis: ``1 / sqrt(max(lambda_n - min q, pi^2))``."""
    q_min = basis.problem.q_bounds[0]
    return 1.0 / math.sqrt(max(basis.eigenvalues[-1] - q_min, math.pi ** 2))


class _Combination:
    """Evaluation helper for one coefficient vector."""

    def __init__(self, basis: SpectralBasis, b: np.ndarray):
        self.basis = basis
        self.b = b

    def __call__(self, x, m: int = 0) -> np.ndarray:
        return self.b @ self.basis.derivatives(x, m)

    def at(self, x: float, m: int = 0) -> float:
        return float(self(np.array([x]), m)[0])


def _sign(v):
    return np.where(v >= 0.0, 1.0, -1.0)


def _bisect(f, lo, hi, s_lo, tol=BISECT_TOL):
    """Vectorized bisection on brackets with known signs at ``lo``."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    s_lo = np.array(s_lo, dtype=float)
    if lo.size == 0:
        return lo
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        same = _sign(f(mid)) == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


class _Analyzer:
    def __init__(self, basis, b, grid):
        self.basis = basis
        self.S = _Combination(basis, b)
        self.grid = grid
        self.xs = np.linspace(0.0, 1.0, grid + 1)
        self.step = 1.0 / grid
        if grid == basis.n_grid:
            self.samples = basis.combination_nodes(b, 0)
        else:
            self.samples = self.S(self.xs)
        self.norm = float(np.max(np.abs(self.samples)))
        self.ell = oscillation_length(basis)

    def _stack(self, xs) -> np.ndarray:
        """Signed ``S^(m)(x)`` for m = 0..MAX_ORDER, shape (MAX_ORDER + 1, len(xs))."""
        return np.array([self.S.b @ h for h in self.basis.derivative_stack(xs, MAX_ORDER)])

    def orders(self, xs, start: int = 1, stack: Optional[np.ndarray] = None) -> List[Optional[int]]:
        """First order m >= start at each x whose Taylor term is not negligible.

        Terms are ``|S^(m)(x)| ell^m / m!``. Negligible means below
        ``ORDER_REL`` times the largest term at x, or below the rounding floor
        ``ORDER_FLOOR * ||S||``. The relative test keeps the decision local
        where S is small compared with its sup norm.
        """
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        if xs.size == 0:
            return []
        if stack is None:
            stack = self._stack(xs)
        m = np.arange(MAX_ORDER + 1)[:, None]
        scale = self.ell ** m / np.array([math.factorial(k) for k in range(MAX_ORDER + 1)])[:, None]
        t = (np.abs(stack) * scale)[start:]
        cut = np.maximum(ORDER_REL * t.max(axis=0), ORDER_FLOOR * self.norm)
        out = []
        for col in range(xs.size):
            hits = np.nonzero(t[:, col] > cut[col])[0]
            out.append(int(hits[0]) + start if hits.size else None)
        return out

    def order_at(self, x: float, start: int = 1) -> Optional[int]:
        return self.orders([x], start)[0]

    def endpoint_signs(self):
        """Sign of S just inside 0 and 1, from the first significant derivative."""
        stack = self._stack([0.0, 1.0])
        out = []
        for col, m in enumerate(self.orders([0.0, 1.0], stack=stack)):
            if m is None:
                out.append(0.0)
                continue
            v = stack[m, col]
            if col == 1 and m % 2:
                v = -v
            out.append(1.0 if v > 0 else -1.0)
        return out

    def sign_change_candidates(self) -> List[float]:
        s = _sign(self.samples)
        inner = np.arange(1, self.grid - 1)
        idx = inner[s[inner] != s[inner + 1]]
        lo = list(self.xs[idx])
        hi = list(self.xs[idx + 1])
        s_lo = list(s[idx])
        first, last = self.endpoint_signs()
        if first and first != s[1]:
            lo.insert(0, 0.0)
            hi.insert(0, self.xs[1])
            s_lo.insert(0, first)
        if last and last != s[self.grid - 1]:
            lo.append(self.xs[self.grid - 1])
            hi.append(1.0)
            s_lo.append(s[self.grid - 1])
        return list(_bisect(self.S, lo, hi, s_lo))

    def dip_candidates(self):
        """Sign-preserving local minima of |S| refined to a root of S'.

        Returns ``(dips, crossings)``: accepted dips and the sign changes of
        any close pair of zeros hidden inside one cell.
        """
        a = np.abs(self.samples)
        s = _sign(self.samples)
        i = np.arange(2, self.grid - 1)
        mask = ((a[i] <= a[i - 1]) & (a[i] < a[i + 1])
                & (s[i - 1] == s[i]) & (s[i] == s[i + 1])
                & (a[i] <= DIP_PREFILTER * self.norm))
        dips, crossings = [], []
        for k in i[mask]:
            lo, hi = self.xs[k - 1], self.xs[k + 1]
            d_lo = self.S.at(lo, 1)
            if _sign(d_lo) == _sign(self.S.at(hi, 1)):
                continue
            c = float(_bisect(lambda x: self.S(x, 1), [lo], [hi], [_sign(d_lo)])[0])
            v = self.S.at(c)
            if _sign(v) != s[k]:
                crossings.extend(_bisect(self.S, [lo, c], [c, hi], [s[k], _sign(v)]))
            elif abs(v) <= DIP_THRESHOLD * self.norm:
                dips.append(c)
        return dips, crossings

    def polish(self, c: float, k: int) -> Optional[float]:
        """Locate an order-k zero as the simple root of ``S^(k-1)`` near c."""
        if k == 1:
            return c
        f = lambda x: self.S(np.clip(x, 0.0, 1.0), k - 1)
        for w in (0.25, 1.0, 2.0):
            lo, hi = max(c - w * self.step, 0.0), min(c + w * self.step, 1.0)
            s_lo = _sign(f(np.array([lo]))[0])
            if s_lo != _sign(f(np.array([hi]))[0]):
                return float(_bisect(f, [lo], [hi], [s_lo])[0])
        return None

    def resolve(self, c: float, odd: bool, k: Optional[int] = None):
        """Vanishing order and polished location of a zero near c.

        ``odd`` is whether S changes sign across the candidate; an order of
        the wrong parity means c is still too far from the zero, so it is
        bumped by one and the location re-polished. ``k`` is the order at c
        when the caller already knows it.
        """
        if k is None:
            k = self.order_at(c)
        for _ in range(MAX_ORDER):
            if k is None:
                raise UnresolvedZero(c)
            if (k % 2 == 1) != odd:
                k += 1
            moved = self.polish(c, k)
            if moved is None or moved == c:
                return c, k
            k_new = self.order_at(moved)
            c = moved
            if k_new == k:
                break
            k = k_new
        if k is None or k > MAX_ORDER:
            raise UnresolvedZero(c)
        return c, k

    def separate(self, cluster, probed) -> bool:
        """Whether a cluster is distinct simple crossings rather than one zero.

        Rounding noise around a multiple zero produces spurious sign flips a
        hair apart; between genuine neighbours |S| rises above the noise.
        """
        if not all(odd and probed[c] == 1 for c, odd in cluster):
            return False
        xs = np.array([c for c, _ in cluster])
        mids = self.S(0.5 * (xs[1:] + xs[:-1]))
        return bool(np.all(np.abs(mids) > SPLIT_FLOOR * self.norm))

    def classify(self, crossings: Sequence[float], dips: Sequence[float]) -> List[ZeroRecord]:
        tagged = sorted([(c, True) for c in crossings] + [(c, False) for c in dips])
        tagged = [t for t in tagged if 0.0 < t[0] < 1.0]
        clusters: list = []
        for t in tagged:
            if clusters and t[0] - clusters[-1][-1][0] <= 2 * self.step:
                clusters[-1].append(t)
            else:
                clusters.append([t])
        probed = dict(zip((c for c, _ in tagged), self.orders([c for c, _ in tagged])))
        records = []
        for cluster in clusters:
            xs = [c for c, _ in cluster]
            if len(cluster) > 1 and self.separate(cluster, probed):
                found = [(c, 1) for c in xs]
            else:
                odd = sum(1 for _, o in cluster if o) % 2 == 1
                k = probed[xs[0]] if len(xs) == 1 else None
                found = [self.resolve(float(np.mean(xs)), odd, k)]
            for loc, order in found:
                if 0.0 < loc < 1.0:
                    records.append(ZeroRecord(loc, order, NODE if order % 2 else ANTINODE))
        records.sort(key=lambda r: r.location)
        return records

    def run(self) -> List[ZeroRecord]:
        dips, hidden = self.dip_candidates()
        return self.classify(self.sign_change_candidates() + hidden, dips)


def find_zeros(basis: SpectralBasis, b: Sequence[float], grid: Optional[int] = None) -> ZeroReport:
    """Interior zeros of ``S_b`` with multiplicities and node/antinode kinds.

    Sampling uses ``grid`` uniform cells (the basis grid by default). If two
    zeros end up closer than four cells, the search is repeated once on a
    grid twice as fine.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (basis.n,):
        raise ValueError(f"need {basis.n} coefficients")
    if not np.any(b):
        raise ZeroVector("coefficient vector is zero")
    grid = basis.n_grid if grid is None else int(grid)
    if grid < MIN_GRID:
        raise ValueError(f"grid must be at least {MIN_GRID}")
    an = _Analyzer(basis, b, grid)
    records = an.run()
    gaps = np.diff([r.location for r in records])
    if gaps.size and np.min(gaps) < CLOSE_CELLS * an.step:
        an = _Analyzer(basis, b, 2 * grid)
        records = an.run()
    return ZeroReport(tuple(records), an.grid, an.norm)


def check_sturm_upper(report: ZeroReport, n: int) -> Verdict:
    t = report.total_with_multiplicity
    return Verdict("sturm-upper", t <= n - 1, t, n - 1, "<=")


def check_sign_changes_lower(report: ZeroReport, m_low: int) -> Verdict:
    return Verdict("sign-change-lower", report.N >= m_low - 1, report.N, m_low - 1, ">=")


def check_gantmacher_krein(report: ZeroReport, n: int) -> Verdict:
    v = report.N + 2 * report.A
    return Verdict("node-antinode", v <= n - 1, v, n - 1, "<=")


def liouville_iterate(basis: SpectralBasis, b: Sequence[float], ell: int) -> np.ndarray:
    """``b'_k = (lambda_1 - lambda_k)^ell b_k``, rescaled to unit norm."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    b = np.asarray(b, dtype=float)
    lam = basis.eigenvalues
    # scale by the largest gap first so the powers stay bounded
    gaps = (lam[0] - lam) / max(lam[-1] - lam[0], 1.0)
    out = gaps ** ell * b
    norm = np.linalg.norm(out)
    if norm == 0.0:
        raise ZeroVector("iterate vanished")
    return out / norm


def reconstruct_from_zeros(basis: SpectralBasis, spec: NodeSpec,
                           threshold: float = NEAR_SINGULAR) -> np.ndarray:
    """Coefficients of the combination vanishing to the prescribed orders.

    They are the cofactors of the confluent determinant along its last column.
    """
    if spec.total != basis.n - 1:
        raise ValueError(f"multiplicities must sum to n - 1 = {basis.n - 1}")
    s = confluent_coeffs(basis, spec)
    cols = confluent_columns(basis, spec)
    scale = float(np.prod(np.linalg.norm(cols, axis=0))) if cols.size else 1.0
    size = float(np.linalg.norm(s))
    if size <= threshold * scale:
        raise NearSingular(size, scale, threshold)
    return s


def constrained_combination(basis: SpectralBasis, spec: NodeSpec) -> np.ndarray:
    """A unit vector spanning the null space of the prescribed vanishing conditions."""
    ns = null_space(confluent_columns(basis, spec).T)
    if ns.shape[1] != 1:
        raise NearSingular(0.0, 1.0, NEAR_SINGULAR)
    return ns[:, 0]


def proportionality_cosine(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b)))
