import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmzeros.errors import NearSingular, ZeroVector
from sturmzeros.rng import SplitMix64
from sturmzeros.slater import NodeSpec
from sturmzeros.zeros import (
    ANTINODE,
    NODE,
    ZeroRecord,
    ZeroReport,
    check_gantmacher_krein,
    check_sign_changes_lower,
    check_sturm_upper,
    constrained_combination,
    find_zeros,
    liouville_iterate,
    oscillation_length,
    proportionality_cosine,
    reconstruct_from_zeros,
)


def unit(n, j):
    e = np.zeros(n)
    e[j - 1] = 1.0
    return e


# -- pure eigenfunctions ----------------------------------------------------------

@pytest.mark.parametrize("j", range(1, 9))
def test_free_eigenfunction_zeros_at_rational_points(free_basis, j):
    rep = find_zeros(free_basis, unit(8, j))
    assert rep.N == j - 1 and rep.A == 0
    assert rep.locations == pytest.approx([k / j for k in range(1, j)], abs=1e-9)


@pytest.mark.parametrize("src", ["10*cos(4*x)", "25*(x-0.5)^2"])
def test_eigenfunction_zero_counts(basis_factory, src):
    b = basis_factory(src)
    for j in range(1, 9):
        rep = find_zeros(b, unit(8, j))
        assert (rep.N, rep.A) == (j - 1, 0)


def test_first_eigenfunction_has_no_interior_zero(free_basis):
    # h_1 vanishes only at the endpoints, which are excluded
    assert find_zeros(free_basis, unit(8, 1)).records == ()


def test_symmetric_potential_puts_node_at_midpoint(basis_factory):
    rep = find_zeros(basis_factory("25*(x-0.5)^2"), unit(8, 2))
    assert rep.locations == pytest.approx([0.5], abs=1e-10)


# -- constructed multiple zeros ---------------------------------------------------

def test_free_double_zero_is_antinode(free_basis):
    # h_1 + h_3 = 2 sqrt2 sin(2 pi x) cos(pi x)... has a double zero at 1/2
    rep = find_zeros(free_basis.truncate(3), np.array([1.0, 0.0, 1.0]) / math.sqrt(2))
    assert [(r.multiplicity, r.kind) for r in rep.records] == [(2, ANTINODE)]
    assert rep.locations[0] == pytest.approx(0.5, abs=1e-9)
    assert check_gantmacher_krein(rep, 3).lhs == 2


@pytest.mark.parametrize("text, kinds", [
    ("0.5:2", [(2, ANTINODE)]),
    ("0.3:3", [(3, NODE)]),
    ("0.4:1,0.7:2", [(1, NODE), (2, ANTINODE)]),
    ("0.2:2,0.6:2", [(2, ANTINODE), (2, ANTINODE)]),
    ("0.45:4", [(4, ANTINODE)]),
])
def test_confluent_orders_detected(basis_factory, text, kinds):
    spec = NodeSpec.parse(text)
    basis = basis_factory("10*cos(4*x)").truncate(spec.total + 1)
    s = reconstruct_from_zeros(basis, spec)
    rep = find_zeros(basis, s / np.linalg.norm(s))
    assert [(r.multiplicity, r.kind) for r in rep.records] == kinds
    assert rep.locations == pytest.approx(list(spec.points), abs=1e-8)
    assert rep.total_with_multiplicity == basis.n - 1
    # N + 2A is tight only when every order is 1 or 2
    tight = max(spec.multiplicities) <= 2
    assert (check_gantmacher_krein(rep, basis.n).lhs == basis.n - 1) == tight


def test_cofactor_zeros_are_simple(basis_factory):
    spec = NodeSpec.simple([0.15, 0.35, 0.6, 0.85])
    basis = basis_factory("25*(x-0.5)^2").truncate(5)
    rep = find_zeros(basis, reconstruct_from_zeros(basis, spec))
    assert rep.multiplicities == [1, 1, 1, 1]
    assert rep.locations == pytest.approx(list(spec.points), abs=1e-9)


def test_close_pair_triggers_refinement(free_basis):
    spec = NodeSpec.simple([0.5, 0.5 + 2.5 / 4096])
    basis = free_basis.truncate(3)
    rep = find_zeros(basis, reconstruct_from_zeros(basis, spec))
    assert rep.grid == 2 * 4096
    assert rep.locations == pytest.approx(list(spec.points), abs=1e-9)


def test_rounding_flips_do_not_split_double_zero(free_basis):
    spec = NodeSpec.parse("0.129808:2,0.234233:2,0.581908:2")
    basis = free_basis.truncate(7)
    rep = find_zeros(basis, reconstruct_from_zeros(basis, spec))
    assert rep.multiplicities == [2, 2, 2]
    assert rep.locations == pytest.approx(list(spec.points), abs=1e-9)


def test_very_close_simple_pair_stays_split(free_basis):
    spec = NodeSpec.simple([0.4, 0.4 + 1e-5])
    basis = free_basis.truncate(3)
    rep = find_zeros(basis, reconstruct_from_zeros(basis, spec))
    assert rep.multiplicities == [1, 1]
    # a pair this tight amplifies coefficient rounding by about 1/gap
    assert rep.locations == pytest.approx(list(spec.points), abs=1e-8)


# -- bounds -----------------------------------------------------------------------

@settings(max_examples=40)
@given(st.integers(0, 2 ** 32), st.integers(2, 8))
def test_bounds_on_random_combinations(free_basis, seed, n):
    b = SplitMix64(seed).unit_vector(n)
    rep = find_zeros(free_basis.truncate(n), b)
    assert check_sturm_upper(rep, n).passed
    assert check_gantmacher_krein(rep, n).passed
    assert rep.N <= rep.total_with_multiplicity


@settings(max_examples=30)
@given(st.integers(0, 2 ** 32), st.integers(1, 6))
def test_lower_bound_with_restricted_support(basis_factory, seed, m_low):
    basis = basis_factory("10*cos(4*x)").truncate(6)
    b = np.zeros(6)
    b[m_low - 1:] = SplitMix64(seed).unit_vector(6 - m_low + 1)
    rep = find_zeros(basis, b)
    assert check_sign_changes_lower(rep, m_low).passed


def test_verdict_text():
    v = check_sturm_upper(ZeroReport((), 256, 1.0), 4)
    assert str(v) == "sturm-upper: 0 <= 3 [pass]"


# -- Liouville iteration ----------------------------------------------------------

def test_liouville_zero_step_is_normalization(free_basis):
    b = np.array([3.0, 0, 0, 4.0, 0, 0, 0, 0])
    assert liouville_iterate(free_basis, b, 0) == pytest.approx(b / 5)


def test_liouville_kills_first_component(free_basis):
    b = SplitMix64(2).unit_vector(8)
    assert liouville_iterate(free_basis, b, 1)[0] == 0.0


def test_liouville_node_counts_nondecrease(free_basis):
    basis = free_basis.truncate(5)
    rng = SplitMix64(17)
    for _ in range(15):
        b = rng.unit_vector(5)
        counts = [find_zeros(basis, liouville_iterate(basis, b, ell)).N for ell in range(6)]
        assert counts == sorted(counts)


def test_liouville_mass_moves_to_last_index(free_basis):
    basis = free_basis.truncate(5)
    b = np.full(5, 1 / math.sqrt(5))
    tail = [abs(liouville_iterate(basis, b, ell)[-1]) for ell in range(0, 40, 5)]
    assert tail == sorted(tail) and tail[-1] > 0.999


def test_liouville_rejects_negative_power(free_basis):
    with pytest.raises(ValueError):
        liouville_iterate(free_basis, unit(8, 2), -1)


# -- reconstruction ---------------------------------------------------------------

def test_two_term_reconstruction_is_second_eigenfunction(free_basis):
    s = reconstruct_from_zeros(free_basis.truncate(2), NodeSpec.simple([0.5]))
    assert s / np.linalg.norm(s) == pytest.approx([0.0, 1.0], abs=1e-9)


@pytest.mark.parametrize("text", ["0.2,0.5,0.8", "0.5:3", "0.25:2,0.75:1"])
def test_reconstruction_proportional_to_null_space(basis_factory, text):
    spec = NodeSpec.parse(text)
    basis = basis_factory("25*(x-0.5)^2").truncate(spec.total + 1)
    cos = proportionality_cosine(reconstruct_from_zeros(basis, spec),
                                 constrained_combination(basis, spec))
    assert cos >= 1 - 1e-12


def test_reconstruction_size_checked(free_basis):
    with pytest.raises(ValueError):
        reconstruct_from_zeros(free_basis.truncate(3), NodeSpec.simple([0.5]))


def test_reconstruction_near_singular(free_basis):
    with pytest.raises(NearSingular):
        reconstruct_from_zeros(free_basis.truncate(3), NodeSpec.simple([0.3, 0.6]), threshold=1.0)


def test_proportionality_cosine_ignores_sign_and_scale():
    assert proportionality_cosine([1, 2, 3], [-2, -4, -6]) == pytest.approx(1.0)
    assert proportionality_cosine([1, 0], [0, 1]) == 0.0


# -- input validation -------------------------------------------------------------

def test_zero_vector_rejected(free_basis):
    with pytest.raises(ZeroVector):
        find_zeros(free_basis, np.zeros(8))


def test_coarse_grid_rejected(free_basis):
    with pytest.raises(ValueError):
        find_zeros(free_basis, unit(8, 3), grid=128)


def test_coefficient_count_checked(free_basis):
    with pytest.raises(ValueError):
        find_zeros(free_basis, np.ones(3))


def test_explicit_grid_agrees_with_default(basis_factory):
    basis = basis_factory("10*cos(4*x)")
    b = SplitMix64(3).unit_vector(8)
    a, c = find_zeros(basis, b), find_zeros(basis, b, grid=1000)
    assert a.multiplicities == c.multiplicities
    assert a.locations == pytest.approx(c.locations, abs=1e-10)


@pytest.mark.parametrize("loc, mult, kind", [(0.0, 1, NODE), (1.0, 1, NODE), (0.5, 2, NODE),
                                             (0.5, 1, ANTINODE), (0.5, 0, ANTINODE)])
def test_record_validation(loc, mult, kind):
    with pytest.raises(ValueError):
        ZeroRecord(loc, mult, kind)


def test_oscillation_length_free(free_basis):
    assert oscillation_length(free_basis) == pytest.approx(1 / (8 * math.pi))
    assert oscillation_length(free_basis.truncate(1)) == pytest.approx(1 / math.pi)


def test_report_serialization(free_basis):
    d = find_zeros(free_basis, unit(8, 3)).to_dict()
    assert d["N"] == 2 and d["A"] == 0 and d["total"] == 2
    assert [z["kind"] for z in d["zeros"]] == [NODE, NODE]
