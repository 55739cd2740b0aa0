"""Dirichlet eigenpairs of ``-y'' + q y = lambda y`` on [0, 1] by Pruefer shooting.

The Pruefer angle ``theta`` (``tan theta = y / y'``) obeys

    theta' = cos^2 theta + (lambda - q(x)) sin^2 theta,   theta(0) = 0,

and the j-th eigenvalue is the unique lambda with ``theta(1) = j pi``. Since
``theta(1; lambda)`` is increasing, eigenvalues are located by bracketing.
Eigenfunctions are then integrated as a linear ODE onto a uniform grid and
interpolated between nodes by quintic Hermite polynomials built from
``h, h', h''`` (the last one supplied by the ODE itself).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import List, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BracketFailure, IntegrationFailure, OrderBudget
from .potential import Potential, parse_potential

PRUFER_RTOL = 1e-10
PRUFER_ATOL = 1e-12
EIGEN_RTOL = 1e-12
EIGEN_ATOL = 1e-14
MAX_STEPS = 10**6
DEFAULT_GRID = 4096
MAX_ORDER = 12
LAMBDA_LIMIT = 1e8
# interior trial points per bracket and round (a 16-way split, i.e. four bisections)
SECTIONS = 15
SECANT_STEPS = 3


@dataclass(frozen=True)
class DirichletProblem:
    potential: Potential

    @classmethod
    def from_source(cls, src: str) -> "DirichletProblem":
        return cls(parse_potential(src))

    @cached_property
    def q_bounds(self):
        return self.potential.bounds()

    @property
    def q_sup(self) -> float:
        lo, hi = self.q_bounds
        return max(abs(lo), abs(hi))


class _Counter:
    def __init__(self, fun, limit):
        self.fun = fun
        self.calls = 0
        self.limit = limit

    def __call__(self, x, y):
        self.calls += 1
        if self.calls > self.limit:
            raise IntegrationFailure(f"more than {MAX_STEPS} integration steps")
        return self.fun(x, y)


def prufer_terminal_angle(problem: DirichletProblem, lam, rtol=PRUFER_RTOL, atol=PRUFER_ATOL):
    """theta(1; lam) for a scalar or an array of spectral parameters.

    An array is integrated as one vector system, which shares step control
    across components; each component still meets the tolerances.
    """
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if not np.all(np.isfinite(lam)):
        raise ValueError("spectral parameter must be finite")
    q = problem.potential.derivative(0)

    lam_minus_one = lam - 1.0

    def rhs(x, th):
        # cos^2 + (lam - q) sin^2 written with a single transcendental call
        s = np.sin(th)
        return 1.0 + (lam_minus_one - q(x)) * (s * s)

    # DOP853 makes 12 function evaluations per step
    fun = _Counter(rhs, 12 * MAX_STEPS)
    sol = solve_ivp(fun, (0.0, 1.0), np.zeros_like(lam), method="DOP853",
                    rtol=rtol, atol=atol)
    if sol.status != 0:
        raise IntegrationFailure(sol.message)
    out = sol.y[:, -1]
    return float(out[0]) if scalar else out


def _initial_bracket(problem, j):
    s = problem.q_sup
    return -s - 1.0, (j * math.pi) ** 2 + s + 1.0


def _expand_brackets(problem, js, lo, hi):
    targets = np.asarray(js) * math.pi
    if np.any(np.abs(lo) > LAMBDA_LIMIT) or np.any(np.abs(hi) > LAMBDA_LIMIT):
        raise BracketFailure(f"no eigenvalue bracket within |lambda| <= {LAMBDA_LIMIT:g}")
    th_lo = prufer_terminal_angle(problem, lo)
    th_hi = prufer_terminal_angle(problem, hi)
    step_lo = hi - lo
    step_hi = hi - lo
    while True:
        bad_lo = th_lo >= targets
        bad_hi = th_hi <= targets
        if not (bad_lo.any() or bad_hi.any()):
            return lo, hi, th_lo, th_hi
        lo = np.where(bad_lo, lo - step_lo, lo)
        hi = np.where(bad_hi, hi + step_hi, hi)
        step_lo = np.where(bad_lo, 2 * step_lo, step_lo)
        step_hi = np.where(bad_hi, 2 * step_hi, step_hi)
        if np.any(np.abs(lo) > LAMBDA_LIMIT) or np.any(np.abs(hi) > LAMBDA_LIMIT):
            raise BracketFailure(f"no eigenvalue bracket within |lambda| <= {LAMBDA_LIMIT:g}")
        th_lo = np.where(bad_lo, prufer_terminal_angle(problem, lo), th_lo)
        th_hi = np.where(bad_hi, prufer_terminal_angle(problem, hi), th_hi)


def locate_eigenvalues(problem: DirichletProblem, js: Sequence[int]) -> np.ndarray:
    """Eigenvalues ``lambda_j`` for every index in ``js``, solved together.

    Brackets are narrowed by multisection until their width is at most
    ``1e-11 (1 + |lambda|)`` and then polished by three safeguarded secant
    steps.
    """
    js = np.asarray(js, dtype=int)
    if np.any(js < 1):
        raise ValueError("eigenvalue index must be >= 1")
    targets = js * math.pi
    lo, hi = map(np.array, zip(*(_initial_bracket(problem, int(j)) for j in js)))
    lo, hi, th_lo, th_hi = _expand_brackets(problem, js, lo, hi)

    frac = np.arange(1, SECTIONS + 1) / (SECTIONS + 1)
    while True:
        active = np.nonzero(hi - lo > 1e-11 * (1.0 + np.maximum(abs(lo), abs(hi))))[0]
        if active.size == 0:
            break
        trial = lo[active, None] + (hi - lo)[active, None] * frac[None, :]
        th = prufer_terminal_angle(problem, trial.ravel()).reshape(trial.shape)
        for row, k in enumerate(active):
            above = np.nonzero(th[row] > targets[k])[0]
            first = above[0] if above.size else SECTIONS
            if first < SECTIONS:
                hi[k], th_hi[k] = trial[row, first], th[row, first]
            if first > 0:
                lo[k], th_lo[k] = trial[row, first - 1], th[row, first - 1]

    lam = 0.5 * (lo + hi)
    for _ in range(SECANT_STEPS):
        slope = th_hi - th_lo
        ok = slope > 0
        guess = np.where(ok, lo + (targets - th_lo) * (hi - lo) / np.where(ok, slope, 1.0), lam)
        inside = (guess > lo) & (guess < hi)
        lam = np.where(inside, guess, 0.5 * (lo + hi))
        th = prufer_terminal_angle(problem, lam)
        below = th < targets
        lo, th_lo = np.where(below, lam, lo), np.where(below, th, th_lo)
        hi, th_hi = np.where(below, hi, lam), np.where(below, th_hi, th)
    return lam


def simpson_weights(m: int, dx: float) -> np.ndarray:
    if m % 2:
        raise ValueError("composite Simpson needs an even number of intervals")
    w = np.full(m + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (dx / 3.0)


def _hermite5(x, grid_step, f0, f1, f2):
    """Quintic Hermite interpolation on a uniform grid starting at 0.

    ``f0, f1, f2`` hold a function and its first two derivatives at the nodes,
    shape ``(k, M + 1)``; returns shape ``(k, len(x))``.
    """
    m = f0.shape[-1] - 1
    x = np.asarray(x, dtype=float)
    s = x / grid_step
    i = np.clip(np.floor(s).astype(int), 0, m - 1)
    t = s - i
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    t5 = t4 * t
    h = grid_step
    b0 = 1 - 10 * t3 + 15 * t4 - 6 * t5
    b1 = t - 6 * t3 + 8 * t4 - 3 * t5
    b2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5)
    b3 = 10 * t3 - 15 * t4 + 6 * t5
    b4 = -4 * t3 + 7 * t4 - 3 * t5
    b5 = 0.5 * (t3 - 2 * t4 + t5)
    return (f0[:, i] * b0 + h * f1[:, i] * b1 + h * h * f2[:, i] * b2
            + f0[:, i + 1] * b3 + h * f1[:, i + 1] * b4 + h * h * f2[:, i + 1] * b5)


def _check_order(m):
    if m < 0:
        raise ValueError("derivative order must be >= 0")
    if m > MAX_ORDER:
        raise OrderBudget(f"derivative order {m} exceeds the cap {MAX_ORDER}")


def _derivative_stack(potential, lams, h0, h1, x, m):
    """[h, h', ..., h^(m)] from ``h^(k+2) = sum_i C(k, i) g^(i) h^(k-i)``, ``g = q - lambda``."""
    out = [h0, h1]
    if m >= 2:
        qs = [np.broadcast_to(potential.derivative(i)(x), np.shape(x)) for i in range(m - 1)]
        g = [qs[0][None, :] - lams[:, None]] + [qi[None, :] for qi in qs[1:]]
        for k in range(m - 1):
            acc = 0.0
            for i in range(k + 1):
                acc = acc + math.comb(k, i) * g[i] * out[k - i]
            out.append(acc)
    return out[: m + 1]


@dataclass(frozen=True, eq=False)
class EigenPair:
    """One normalized Dirichlet eigenpair with its dense solution record.

    ``values``/``slopes`` hold ``h`` and ``h'`` at the uniform nodes for the
    reference orientation ``h'(0) > 0``; ``sign`` multiplies every evaluation.
    """

    index: int
    eigenvalue: float
    problem: DirichletProblem
    values: np.ndarray
    slopes: np.ndarray
    sign: int = 1

    @property
    def n_grid(self) -> int:
        return self.values.shape[0] - 1

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_grid + 1)

    def flipped(self) -> "EigenPair":
        return replace(self, sign=-self.sign)

    def __call__(self, x):
        return eval_derivative(self, x, 0)

    def derivative(self, x, m):
        return eval_derivative(self, x, m)


def eval_derivative(pair: EigenPair, x, m: int):
    """``h^(m)(x)`` for a single pair; x may be a scalar or an array."""
    _check_order(m)
    basis = SpectralBasis(pair.problem, (pair,))
    out = basis.derivatives(x, m)[0]
    return float(out[0]) if np.ndim(x) == 0 else out


def _integrate_eigenfunctions(problem, lams, n_grid):
    q = problem.potential.derivative(0)
    k = len(lams)

    def rhs(x, y):
        return np.concatenate([y[k:], (q(x) - lams) * y[:k]])

    grid = np.linspace(0.0, 1.0, n_grid + 1)
    y0 = np.concatenate([np.zeros(k), np.ones(k)])
    fun = _Counter(rhs, 12 * MAX_STEPS)
    sol = solve_ivp(fun, (0.0, 1.0), y0, method="DOP853", t_eval=grid,
                    rtol=EIGEN_RTOL, atol=EIGEN_ATOL)
    if sol.status != 0:
        raise IntegrationFailure(sol.message)
    y, yp = sol.y[:k], sol.y[k:]
    w = simpson_weights(n_grid, 1.0 / n_grid)
    norms = np.sqrt((y * y) @ w)
    return y / norms[:, None], yp / norms[:, None]


def _make_pairs(problem, js, n_grid):
    if n_grid < 2 or n_grid % 2:
        raise ValueError("n_grid must be a positive even number")
    lams = locate_eigenvalues(problem, js)
    h, hp = _integrate_eigenfunctions(problem, lams, n_grid)
    pairs = []
    for row, (j, lam) in enumerate(zip(js, lams)):
        v, s = h[row].copy(), hp[row].copy()
        v.setflags(write=False)
        s.setflags(write=False)
        pairs.append(EigenPair(int(j), float(lam), problem, v, s))
    return pairs


def solve_eigen(problem: DirichletProblem, j: int, n_grid: int = DEFAULT_GRID) -> EigenPair:
    """The j-th eigenpair, normalized in L2 with ``h'(0) > 0``."""
    return _make_pairs(problem, [j], n_grid)[0]


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """The first n eigenpairs of a problem on a shared grid."""

    problem: DirichletProblem
    pairs: tuple
    _stack: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        grids = {p.n_grid for p in self.pairs}
        if len(grids) > 1:
            raise ValueError("pairs must share a grid resolution")

    @property
    def n(self) -> int:
        return len(self.pairs)

    def __len__(self):
        return len(self.pairs)

    @property
    def n_grid(self) -> int:
        return self.pairs[0].n_grid

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_grid + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.eigenvalue for p in self.pairs])

    @property
    def signs(self) -> np.ndarray:
        return np.array([p.sign for p in self.pairs], dtype=float)

    def node_derivatives(self, m: int) -> np.ndarray:
        """``h_j^(m)`` at the grid nodes for m <= 3, shape (n, M + 1)."""
        cached = self._stack.get(m)
        if cached is not None:
            return cached
        sg = self.signs[:, None]
        if m == 0:
            out = sg * np.array([p.values for p in self.pairs])
        elif m == 1:
            out = sg * np.array([p.slopes for p in self.pairs])
        elif m in (2, 3):
            out = np.array(_derivative_stack(self.problem.potential, self.eigenvalues,
                                             self.node_derivatives(0), self.node_derivatives(1),
                                             self.grid, m)[m])
        else:
            raise ValueError("node derivatives are stored up to order 3")
        out.setflags(write=False)
        self._stack[m] = out
        return out

    def _interp(self, x, m):
        step = 1.0 / self.n_grid
        return _hermite5(x, step, self.node_derivatives(m), self.node_derivatives(m + 1),
                         self.node_derivatives(m + 2))

    def derivatives(self, x, m: int) -> np.ndarray:
        """Matrix of ``h_j^(m)(x_k)``, shape (n, len(x))."""
        _check_order(m)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any((xs < 0.0) | (xs > 1.0)):
            raise ValueError("evaluation points must lie in [0, 1]")
        h0 = self._interp(xs, 0)
        if m == 0:
            return h0
        h1 = self._interp(xs, 1)
        if m == 1:
            return h1
        return _derivative_stack(self.problem.potential, self.eigenvalues, h0, h1, xs, m)[m]

    def derivative_stack(self, x, m: int) -> List[np.ndarray]:
        """``[h^(0)(x), ..., h^(m)(x)]`` from a single recurrence pass."""
        _check_order(m)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any((xs < 0.0) | (xs > 1.0)):
            raise ValueError("evaluation points must lie in [0, 1]")
        h0, h1 = self._interp(xs, 0), self._interp(xs, 1)
        if m <= 1:
            return [h0, h1][:m + 1]
        return list(_derivative_stack(self.problem.potential, self.eigenvalues, h0, h1, xs, m))[:m + 1]

    def values(self, x) -> np.ndarray:
        return self.derivatives(x, 0)

    def column(self, x: float, m: int = 0) -> np.ndarray:
        """The vector ``(h_1^(m)(x), ..., h_n^(m)(x))``."""
        return self.derivatives([x], m)[:, 0]

    def truncate(self, n: int) -> "SpectralBasis":
        if not 1 <= n <= self.n:
            raise ValueError(f"cannot truncate a basis of size {self.n} to {n}")
        return SpectralBasis(self.problem, self.pairs[:n])

    def with_signs(self, signs) -> "SpectralBasis":
        pairs = tuple(p if p.sign == s else p.flipped() for p, s in zip(self.pairs, signs))
        return SpectralBasis(self.problem, pairs)

    def combination_nodes(self, b, m: int) -> np.ndarray:
        """``S_b^(m)`` at the grid nodes (m <= 3)."""
        return np.asarray(b, dtype=float) @ self.node_derivatives(m)


def solve_basis(problem: DirichletProblem, n: int, n_grid: int = DEFAULT_GRID) -> SpectralBasis:
    """The first n eigenpairs, all eigenvalues located in one vectorized search."""
    if n < 1:
        raise ValueError("basis size must be >= 1")
    return SpectralBasis(problem, tuple(_make_pairs(problem, list(range(1, n + 1)), n_grid)))


def orthonormality_matrix(basis: SpectralBasis) -> np.ndarray:
    """Gram matrix of the basis by composite Simpson on the dense grid."""
    h = basis.node_derivatives(0)
    w = simpson_weights(basis.n_grid, 1.0 / basis.n_grid)
    return (h * w) @ h.T


def count_sign_changes(samples) -> int:
    """Sign changes across interior samples, skipping exact zeros."""
    s = np.sign(np.asarray(samples)[1:-1])
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def node_count(pair_or_basis, j: int = None) -> int:
    """Sign changes of an eigenfunction on its dense grid."""
    if isinstance(pair_or_basis, EigenPair):
        return count_sign_changes(pair_or_basis.values)
    return count_sign_changes(pair_or_basis.node_derivatives(0)[j - 1])
