"""Verification suites shared by the command line and the acceptance tests.

Every check returns a plain ``dict`` with at least ``id`` and ``passed`` so it
can be serialized straight into a report.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, List, Optional

import numpy as np

from . import oscillator as osc
from . import vandermonde as vdm
from .rng import SplitMix64
from .slater import NodeSpec
from .spectral import SpectralBasis, node_count, orthonormality_matrix
from .zeros import (
    check_gantmacher_krein,
    check_sign_changes_lower,
    check_sturm_upper,
    constrained_combination,
    find_zeros,
    proportionality_cosine,
    reconstruct_from_zeros,
)

GRAM_TOL = 1e-7


def result(id_: str, passed: bool, **extra) -> dict:
    out = {"id": id_, "passed": bool(passed)}
    out.update(extra)
    return out


# spectrum ------------------------------------------------------------------

def spectrum_checks(basis: SpectralBasis) -> List[dict]:
    lam = basis.eigenvalues
    nodes = [node_count(basis, j) for j in range(1, basis.n + 1)]
    gram = orthonormality_matrix(basis)
    dev = float(np.max(np.abs(gram - np.eye(basis.n))))
    return [
        result("eigenvalues-simple", bool(np.all(np.diff(lam) > 0)),
               eigenvalues=[float(v) for v in lam]),
        result("node-count", nodes == list(range(basis.n)), node_counts=nodes),
        result("orthonormality", dev <= GRAM_TOL, max_deviation=dev, tolerance=GRAM_TOL),
    ]


# randomized bounds ----------------------------------------------------------

def supported_unit_vector(rng: SplitMix64, n: int, m_low: int = 1) -> np.ndarray:
    """Uniform unit vector supported on indices m_low..n (1-based)."""
    b = np.zeros(n)
    b[m_low - 1:] = rng.unit_vector(n - m_low + 1)
    return b


def bound_trials(basis: SpectralBasis, trials: int, rng: SplitMix64,
                 m_low: int = 1, grid: Optional[int] = None) -> Iterator[dict]:
    """One row per random combination with its zero counts and three verdicts."""
    n = basis.n
    for i in range(trials):
        b = supported_unit_vector(rng, n, m_low)
        rep = find_zeros(basis, b, grid)
        yield {
            "trial": i,
            "total": rep.total_with_multiplicity,
            "N": rep.N,
            "A": rep.A,
            "sturm_upper": check_sturm_upper(rep, n).passed,
            "sign_change_lower": check_sign_changes_lower(rep, m_low).passed,
            "node_antinode": check_gantmacher_krein(rep, n).passed,
        }


def summarize_trials(rows: List[dict]) -> List[dict]:
    out = []
    for key, id_ in (("sturm_upper", "sturm-upper"), ("sign_change_lower", "sign-change-lower"),
                     ("node_antinode", "node-antinode")):
        bad = sum(1 for r in rows if not r[key])
        out.append(result(id_, bad == 0, checked=len(rows), violations=bad))
    return out


# reconstruction -------------------------------------------------------------

def reconstruction_checks(basis: SpectralBasis, spec: NodeSpec, tol: float = 1e-9):
    """Round trip of a zero prescription; returns ``(coefficients, report, results)``."""
    s = reconstruct_from_zeros(basis, spec)
    b = s / np.linalg.norm(s)
    rep = find_zeros(basis, b)
    locs = rep.locations
    same_count = len(locs) == len(spec.points)
    err = float(np.max(np.abs(locs - np.array(spec.points)))) if same_count and len(locs) else 0.0
    orders_ok = same_count and rep.multiplicities == list(spec.multiplicities)
    cos = proportionality_cosine(b, constrained_combination(basis, spec))
    results = [
        result("zero-locations", same_count and err <= tol, max_error=err, tolerance=tol),
        result("vanishing-orders", orders_ok, found=rep.multiplicities,
               prescribed=list(spec.multiplicities)),
        result("proportionality", cos >= 1 - 1e-8, cosine=cos, residual=1.0 - cos),
        result("node-antinode", check_gantmacher_krein(rep, basis.n).passed,
               N=rep.N, A=rep.A),
    ]
    return b, rep, results


# oscillator -----------------------------------------------------------------

def oscillator_checks(n: int, rng: SplitMix64, points: int = 50, trials: int = 500) -> List[dict]:
    out = []
    degrees = list(range(max(n, 11)))
    bad = [m for m in degrees if osc.hermite_ode_residual(m)]
    out.append(result("hermite-ode", not bad, degrees=len(degrees), failures=bad))
    out.append(result("hermite-coefficients", True,
                      coefficients={str(m): list(osc.hermite(m).coeffs) for m in range(n)}))

    dev = osc.identity_deviations(n, osc.random_points(rng, n, points))
    worst = float(np.nanmax(dev)) if np.any(~np.isnan(dev)) else 0.0
    out.append(result("slater-vandermonde", worst <= 1e-8, constant=osc.closed_form_constant(n),
                      max_relative_deviation=worst, points=points))

    worst_count, bad = 0, 0
    for _ in range(trials):
        count = osc.oscillator_zero_count(rng.unit_vector(n))
        worst_count = max(worst_count, count)
        bad += count > n - 1
    out.append(result("zero-count", bad == 0, trials=trials, max_count=worst_count, bound=n - 1))

    ok = True
    if n >= 2:
        for _ in range(10):
            c = sorted({Fraction(rng.integers(-2000, 2001), 1000) for _ in range(n - 1)})
            if len(c) == n - 1:
                ok &= osc.has_only_prescribed_zeros(c)
    out.append(result("prescribed-simple-zeros", ok))
    return out


# vandermonde ----------------------------------------------------------------

EXAMPLE_GROUPS = {
    "local-factorization-2-2-1": vdm.GroupedPoint((0, 1, 2), (2, 2, 1)),
    "local-factorization-3-1-1": vdm.GroupedPoint((0, 1, 2), (3, 1, 1)),
}


def vandermonde_checks(n: int, rng: SplitMix64, trials: int = 5) -> List[dict]:
    out = []
    p = vdm.build_P(n)
    out.append(result("harmonic", vdm.laplacian(p).is_zero(), n=n))
    const = vdm.mixed_derivative_constant(n)
    expected = vdm.superfactorial_product(n)
    out.append(result("mixed-derivative", abs(const) == expected and
                      const == (-1) ** (n * (n - 1) // 2) * expected,
                      value=const, magnitude=expected))
    pt = [Fraction(rng.integers(-50, 51), 7) for _ in range(n)]
    lhs = vdm.evaluate_P(pt)
    rhs = (-1) ** (n * (n - 1) // 2) * vdm.vandermonde_det(pt)
    out.append(result("determinant-identity", lhs == rhs, value=str(lhs)))
    for id_, c in EXAMPLE_GROUPS.items():
        rep = vdm.verify_local_factorization(c, trials, rng)
        out.append(result(id_, rep.passes(10), rho=str(rep.rho),
                          max_deviation={str(t): float(d) for t, d in rep.max_deviation.items()}))
    return out


def verdict(results: List[dict]) -> str:
    return "pass" if all(r["passed"] for r in results) else "fail"
