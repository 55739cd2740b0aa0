import itertools
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from sturmzeros.errors import BudgetExceeded
from sturmzeros.rng import SplitMix64
from sturmzeros.vandermonde import (
    GroupedPoint,
    MultiPoly,
    apply_D,
    bareiss_det,
    build_P,
    build_Q,
    divide,
    evaluate_P,
    factorization_ratio,
    laplacian,
    local_factor_rho,
    mixed_derivative_constant,
    stagewise_rho,
    superfactorial_product,
    vandermonde_det,
    verify_local_factorization,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def cofactor_det(a):
    """Brute-force Laplace expansion along the first row."""
    n = len(a)
    if n == 1:
        return a[0][0]
    return sum((-1) ** j * a[0][j] * cofactor_det([row[:j] + row[j + 1:] for row in a[1:]])
               for j in range(n) if a[0][j] != 0)


# -- build_P -------------------------------------------------------------------

def test_P2_at_three_one():
    assert build_P(2)(3, 1) == 2


def test_P3_at_two_one_zero():
    assert build_P(3)(2, 1, 0) == 2


@pytest.mark.parametrize("n", range(2, 7))
def test_P_vanishes_on_repeated_coordinate(n):
    pt = list(range(n))
    pt[-1] = pt[0]
    assert build_P(n)(*pt) == 0


def test_P1_is_one():
    assert build_P(1) == MultiPoly.constant(1, 1)


def test_P_budget():
    with pytest.raises(BudgetExceeded):
        build_P(9)


@pytest.mark.parametrize("n", range(2, 6))
def test_P_expansion_matches_sympy(n):
    xs = sympy.symbols(f"x0:{n}")
    ref = sympy.Poly(sympy.prod([xs[i] - xs[j] for i in range(n) for j in range(i + 1, n)]), *xs)
    assert {m: int(c) for m, c in ref.terms()} == build_P(n).terms


def test_P8_monomial_count_within_budget():
    # P_n has at most n! monomials (the Vandermonde determinant expansion)
    assert len(build_P(8).terms) == math.factorial(8)


# -- vandermonde_det -------------------------------------------------------------

def test_det_zero_one():
    assert vandermonde_det([0, 1]) == 1
    assert build_P(2)(0, 1) == -1


def test_det_two_one_zero_by_cofactors():
    a = [[1, 1, 1], [2, 1, 0], [4, 1, 0]]
    assert cofactor_det(a) == -2
    assert vandermonde_det([2, 1, 0]) == -2
    assert build_P(3)(2, 1, 0) == (-1) ** 3 * vandermonde_det([2, 1, 0])


def test_det_repeated_points():
    assert vandermonde_det([Fraction(1, 3), 2, Fraction(1, 3)]) == 0


@given(st.integers(1, 6).flatmap(lambda n: st.lists(rationals, min_size=n, max_size=n)))
def test_det_identity(points):
    n = len(points)
    det = vandermonde_det(points)
    assert det == cofactor_det([[p ** i for p in points] for i in range(n)])
    assert evaluate_P(points) == (-1) ** (n * (n - 1) // 2) * det


def test_bareiss_matches_sympy_on_dense_matrix():
    rng = SplitMix64(5)
    a = [[Fraction(rng.integers(-9, 10), rng.integers(1, 5)) for _ in range(6)] for _ in range(6)]
    assert bareiss_det(a) == sympy.Matrix(a).det()


def test_det_budget():
    with pytest.raises(BudgetExceeded):
        vandermonde_det(range(9))


# -- laplacian -------------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 7))
def test_P_is_harmonic(n):
    assert laplacian(build_P(n)) == 0


def test_laplacian_of_square():
    x1 = MultiPoly.variable(2, 0)
    assert laplacian(x1 * x1) == MultiPoly.constant(2, 2)


def test_laplacian_of_product():
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    assert laplacian(x1 * x2) == 0


# -- mixed derivative ------------------------------------------------------------

@pytest.mark.parametrize("n, signed", [(1, 1), (2, -1), (3, -2), (4, 12), (5, 288), (6, -34560)])
def test_mixed_derivative_constant(n, signed):
    # magnitudes are (n-1)!(n-2)!...2!; the sign is that of x_2 x_3^2 ... x_n^(n-1) in P_n
    c = mixed_derivative_constant(n)
    assert c == signed
    assert abs(c) == superfactorial_product(n)


def test_mixed_derivative_sign_from_direct_expansion():
    # d/dx_2 (x_1 - x_2) = -1
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    assert apply_D(x1 - x2) == MultiPoly.constant(2, -1)
    for n in range(2, 7):
        mono = tuple(range(n))
        assert build_P(n).terms[mono] == (-1) ** (n * (n - 1) // 2)


# -- local factorization ---------------------------------------------------------

def test_rho_two_two_one():
    c = GroupedPoint((0, 1, 2), (2, 2, 1))
    assert local_factor_rho(c) == 4


def test_rho_three_one_one():
    # (0-1)^3 (0-2)^3 (1-2)^1 = (-1)(-8)(-1)
    c = GroupedPoint((0, 1, 2), (3, 1, 1))
    assert local_factor_rho(c) == -8


def test_rho_single_group():
    assert local_factor_rho(GroupedPoint((Fraction(1, 2),), (4,))) == 1


@given(st.lists(rationals, min_size=1, max_size=4, unique=True),
       st.lists(st.integers(1, 3), min_size=4, max_size=4))
def test_rho_closed_form_equals_stagewise_product(values, ks):
    values = sorted(values)
    ks = ks[:len(values)]
    if sum(ks) > 8:
        return
    c = GroupedPoint(tuple(values), tuple(ks))
    assert local_factor_rho(c) == math.prod(stagewise_rho(c))


@given(st.lists(rationals, min_size=2, max_size=6, unique=True))
def test_rho_without_grouping_is_P(values):
    values = sorted(values)
    c = GroupedPoint(tuple(values), (1,) * len(values))
    assert local_factor_rho(c) == evaluate_P(values)


def test_example_grouping_ratio_converges():
    c = GroupedPoint((0, 1, 2), (2, 2, 1))
    eta = [Fraction(1, 3), Fraction(-1, 5), Fraction(1, 7), Fraction(2, 5), Fraction(-1, 4)]
    r = factorization_ratio(c, eta, Fraction(1, 10000))
    assert abs(r - 1) < Fraction(1, 1000)


@pytest.mark.parametrize("ks", [(2, 2, 1), (3, 1, 1), (1, 1, 1), (2, 3), (4, 1)])
def test_verify_local_factorization_linear_rate(ks):
    c = GroupedPoint(tuple(range(len(ks))), ks)
    rep = verify_local_factorization(c, trials=4, rng=SplitMix64(11))
    assert rep.passes(10)
    # the deviation should shrink roughly in proportion to t
    devs = [rep.max_deviation[t] for t in sorted(rep.max_deviation, reverse=True)]
    assert devs[-1] < devs[0]


def test_ratio_invariant_under_direction_scaling_to_first_order():
    # homogeneity: scaling eta by s leaves r(t) = r(s t), so r stays 1 + O(t)
    c = GroupedPoint((0, 1, 2), (2, 2, 1))
    eta = [Fraction(1, 3), Fraction(-1, 5), Fraction(1, 7), Fraction(2, 5), Fraction(-1, 4)]
    t = Fraction(1, 1000)
    r1 = factorization_ratio(c, eta, t)
    r2 = factorization_ratio(c, [3 * e for e in eta], t / 3)
    assert r1 == r2


# -- algebraic properties --------------------------------------------------------

@given(st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.lists(rationals, min_size=n, max_size=n), st.integers(0, n - 2))))
def test_antisymmetry(data):
    pt, i = data
    swapped = list(pt)
    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    p = build_P(len(pt))
    assert p(*swapped) == -p(*pt)


@given(st.integers(2, 6).flatmap(
    lambda n: st.tuples(st.lists(rationals, min_size=n, max_size=n), rationals)))
def test_homogeneity(data):
    pt, s = data
    n = len(pt)
    p = build_P(n)
    assert p(*[s * v for v in pt]) == s ** (n * (n - 1) // 2) * p(*pt)


@pytest.mark.parametrize("n", range(1, 7))
def test_P_factors_into_Q(n):
    prod = MultiPoly.constant(n, 1)
    for i in range(n):
        prod = prod * build_Q(n - i, nvars=n, offset=i)
    assert prod == build_P(n)


@pytest.mark.parametrize("n", range(2, 5))
def test_P_divisible_by_first_difference(n):
    x1, x2 = MultiPoly.variable(n, 0), MultiPoly.variable(n, 1)
    q, r = divide(build_P(n), x1 - x2)
    assert r == 0
    assert q * (x1 - x2) == build_P(n)


def test_division_leaves_remainder_for_non_factor():
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    q, r = divide(x1 * x1 + x2, x1 - x2)
    assert r != 0
    assert q * (x1 - x2) + r == x1 * x1 + x2


def test_grouped_point_validation():
    with pytest.raises(ValueError):
        GroupedPoint((1, 0), (1, 1))
    with pytest.raises(ValueError):
        GroupedPoint((0, 1), (1, 0))


def test_grouped_point_expansion():
    c = GroupedPoint((0, 1, 2), (2, 2, 1))
    assert c.expanded() == (0, 0, 1, 1, 2)
    assert [list(g) for g in c.groups()] == [[0, 1], [2, 3], [4]]
    assert c.n == 5


def test_polynomial_diff_and_substitute():
    x, y = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    p = x * x * y + 3 * y
    assert p.diff(0) == 2 * x * y
    assert p.diff(1, 2) == 0
    assert p.substitute({1: x})(Fraction(2), Fraction(7)) == 8 + 6
    assert sorted(itertools.chain.from_iterable(p.terms)) == [0, 1, 1, 2]
