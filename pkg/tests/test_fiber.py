from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from arakelov import linalg
from arakelov.errors import ComponentOutOfRange, InvalidPermutation, NonPrime, PTooSmall
from arakelov.fiber import (
    C_INF,
    C_ZERO,
    Component,
    FiberParams,
    VerticalDivisor,
    build_special_fiber,
    closed_form_phi,
    cuspidal_divisor_class,
    fricke_involution,
    full_fiber,
    genus_x0,
    implied_zero_coefficients,
    interior,
    intersection_matrix,
    phi_omega,
    solve_vertical_divisor,
)
from arakelov.primes import primes_between

from oracles import dense_phi, genus_classical

PRIMES = primes_between(19, 199)


def fib(p, e=1):
    return build_special_fiber(FiberParams(p, e))


def branch_with_width(F_, w):
    return next(b.n for b in F_.branches if b.w == w)


# construction ----------------------------------------------------------------

def test_p23_structure():
    f = fib(23)
    assert (f.s, f.g) == (3, 2)
    assert sorted(b.w for b in f.branches) == [1, 2, 3]
    assert f.eichler_mass() == F(11, 6)


def test_p37_all_width_one():
    f = fib(37)
    assert (f.s, f.g) == (3, 2)
    assert [b.w for b in f.branches] == [1, 1, 1]


def test_p19_e2_lengths():
    f = fib(19, 2)
    assert (f.s, f.g) == (2, 1)
    assert sorted((b.w, b.interior_length) for b in f.branches) == [(1, 1), (2, 3)]


def test_p19_width_counts_from_residues():
    # 19 = 3 mod 4 gives the width-2 branch; 19 = 1 mod 3 gives no width-3 branch
    assert sorted(b.w for b in fib(19).branches) == [1, 2]


@pytest.mark.parametrize("p", primes_between(19, 1999))
def test_mass_and_genus(p):
    f = fib(p)
    assert f.s == f.g + 1
    assert f.eichler_mass() == F(p - 1, 12)
    assert F(p - 13, 12) <= f.g <= F(p + 1, 12)
    assert f.g == genus_classical(p)
    a2 = sum(b.w == 2 for b in f.branches)
    a3 = sum(b.w == 3 for b in f.branches)
    assert a2 == int(p % 4 == 3) and a3 == int(p % 3 == 2)


@pytest.mark.parametrize("bad,exc", [(21, NonPrime), (17, PTooSmall), (13, PTooSmall), (1, NonPrime)])
def test_bad_params(bad, exc):
    with pytest.raises(exc):
        FiberParams(bad)


def test_bad_e():
    with pytest.raises(ValueError):
        FiberParams(23, 0)


def test_genus_small_primes():
    assert [genus_x0(p) for p in (5, 7, 11, 13, 17, 19)] == [0, 0, 1, 0, 1, 1]


# intersection matrix -----------------------------------------------------------

def test_block_w1_e3():
    f = fib(37, 3)
    blk = intersection_matrix(f).block(1)
    assert blk == [[-2, 1], [1, -2]]
    assert linalg.det(blk) == 3


def test_p23_degenerate_branch_direct_edge():
    f = fib(23)
    M = intersection_matrix(f)
    assert M.rows[0][len(f) - 1] == 1
    assert M.rows == (
        (-3, 1, 1, 0, 1),
        (1, -2, 0, 0, 1),
        (1, 0, -2, 1, 0),
        (0, 0, 1, -2, 1),
        (1, 1, 0, 1, -3),
    )


@pytest.mark.parametrize("p", [19, 23, 29, 37, 101])
@pytest.mark.parametrize("e", range(1, 11))
def test_block_determinants(p, e):
    f = fib(p, e)
    M = intersection_matrix(f)
    for b in f.branches:
        if b.interior_length:
            assert linalg.det(M.block(b.n)) == (-1) ** (b.w * e - 1) * b.w * e


@pytest.mark.parametrize("p", [19, 23, 43, 97])
@pytest.mark.parametrize("e", [1, 2, 3])
def test_matrix_symmetric_kernel(p, e):
    f = fib(p, e)
    M = intersection_matrix(f)
    assert M.is_symmetric()
    assert all(s == 0 for s in M.row_sums())
    ker = linalg.nullspace([list(r) for r in M.rows], len(f))
    assert len(ker) == 1 and len(set(ker[0])) == 1


# vertical divisors ---------------------------------------------------------------

def test_phi_zero_p23():
    f = fib(23)
    d = solve_vertical_divisor(f, C_ZERO)
    n2, n3 = branch_with_width(f, 2), branch_with_width(f, 3)
    assert d.coefficient(n2, 1) == F(-3, 11)
    assert d.coefficient(n3, 1) == F(-2, 11)
    assert d.coefficient(n3, 2) == F(-4, 11)
    assert d[C_ZERO] == F(-6, 11)
    assert set(implied_zero_coefficients(f, C_ZERO)) == {F(-6, 11)}


def test_phi_interior_p23():
    f = fib(23)
    n2, n3 = branch_with_width(f, 2), branch_with_width(f, 3)
    d = solve_vertical_divisor(f, interior(n2, 1))
    assert d.coefficient(n2, 1) == F(-7, 11)
    assert d.coefficient(n3, 1) == F(-1, 11)
    assert d.coefficient(n3, 2) == F(-2, 11)
    assert d[C_ZERO] == F(-3, 11)
    assert set(implied_zero_coefficients(f, interior(n2, 1))) == {F(-3, 11)}


def test_phi_inf_zero():
    f = fib(23)
    assert solve_vertical_divisor(f, C_INF).is_zero()
    assert closed_form_phi(f, C_INF).is_zero()


def test_aliases():
    f = fib(23, 2)
    n3 = branch_with_width(f, 3)
    assert f.component(n3, 0) == C_INF and f.component(n3, 6) == C_ZERO
    assert closed_form_phi(f, interior(n3, 6)) == closed_form_phi(f, C_ZERO)


@pytest.mark.parametrize("target", [interior(1, 2), interior(9, 1), interior(3, 7), interior(0, 1), Component("bogus")])
def test_out_of_range(target):
    with pytest.raises(ComponentOutOfRange):
        solve_vertical_divisor(fib(23), target)


@pytest.mark.parametrize("p,e", [(19, 1), (23, 2), (29, 3), (47, 1), (59, 2)])
def test_solver_matches_dense_oracle(p, e):
    f = fib(p, e)
    M = intersection_matrix(f)
    for t in f.basis:
        ours = solve_vertical_divisor(f, t)
        ref = dense_phi(f, [list(r) for r in M.rows], f.index(t))
        assert list(ours.values) == ref


@given(st.sampled_from(PRIMES), st.sampled_from([1, 2, 3, 4, 6]), st.data())
def test_closed_form_equals_solver(p, e, data):
    f = fib(p, e)
    t = data.draw(st.sampled_from(f.basis))
    a, b = closed_form_phi(f, t), solve_vertical_divisor(f, t)
    assert a == b
    M = intersection_matrix(f)
    lhs = M.apply(a.values)
    rhs = [0] * len(f)
    rhs[f.index(t)] += 1
    rhs[0] -= 1
    assert list(lhs) == rhs
    assert len(set(implied_zero_coefficients(f, t))) == 1
    assert 0 >= a.min_coefficient() >= -3 * e
    assert max(a.values) <= 0


@given(st.sampled_from(PRIMES), st.integers(1, 4))
def test_case_a_bound(p, e):
    f = fib(p, e)
    d = closed_form_phi(f, C_ZERO)
    assert all(0 >= v >= F(-12 * e, p - 1) for comp, v in d.items() if comp != C_ZERO)


def test_phi_omega_values():
    f = fib(23)
    n3 = branch_with_width(f, 3)
    assert phi_omega(f).coefficient(n3, 2) == F(-4, 11)
    assert phi_omega(fib(19)).is_zero()


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("e", [1, 2, 3])
def test_phi_omega_bound(p, e):
    f = fib(p, e)
    w = phi_omega(f)
    assert w.min_coefficient() >= -e
    for comp, v in w.items():
        if comp.kind == "int":
            assert v == F(12 * (1 - f.g) * comp.m, (p - 1) * f.branch(comp.n).w)


# cuspidal class and Fricke ----------------------------------------------------------

def test_cusp_values():
    f = fib(23)
    c = cuspidal_divisor_class(f)
    assert c[C_INF] == F(6, 22) and c[C_ZERO] == F(-6, 22)
    assert c.coefficient(branch_with_width(f, 3), 1) == F(1, 11)
    assert c.exempt
    assert [c[x] for x in f.basis] == [F(3, 11), 0, F(1, 11), F(-1, 11), F(-3, 11)]


@given(st.sampled_from(PRIMES), st.integers(1, 6))
def test_cusp_identity_and_antisymmetry(p, e):
    f = fib(p, e)
    c = cuspidal_divisor_class(f)
    assert c == closed_form_phi(f, C_ZERO) + F(6 * e, p - 1) * full_fiber(f)
    assert fricke_involution(f, c) == -c


@given(st.sampled_from(PRIMES), st.integers(1, 3), st.data())
def test_fricke_involutive(p, e, data):
    f = fib(p, e)
    vals = data.draw(st.lists(st.fractions(max_denominator=50), min_size=len(f), max_size=len(f)))
    d = VerticalDivisor.from_values(f, vals)
    ones = [b.n for b in f.branches if b.w == 1]
    perm = list(range(1, f.s + 1))
    if len(ones) >= 2 and data.draw(st.booleans()):
        i, j = ones[0], ones[1]
        perm[i - 1], perm[j - 1] = j, i
    assert fricke_involution(f, fricke_involution(f, d, perm), perm) == d
    assert fricke_involution(f, full_fiber(f), perm) == full_fiber(f)


def test_fricke_rejects_width_change():
    f = fib(23)
    n2, n3 = branch_with_width(f, 2), branch_with_width(f, 3)
    perm = [1, 2, 3]
    perm[n2 - 1], perm[n3 - 1] = n3, n2
    with pytest.raises(InvalidPermutation):
        fricke_involution(f, full_fiber(f), perm)
    with pytest.raises(InvalidPermutation):
        fricke_involution(f, full_fiber(f), [1, 1, 2])


def test_nonexempt_convention():
    f = fib(23)
    with pytest.raises(Exception):
        VerticalDivisor(f, tuple(F(1) for _ in f.basis))


def test_json_shapes():
    f = fib(23)
    js = solve_vertical_divisor(f, C_ZERO).to_json()
    assert js["coefficients"][0] == {"component": {"t": "inf"}, "value": "0/1"}
    assert js["coefficients"][-1] == {"component": {"t": "zero"}, "value": "-6/11"}
    assert Component.from_json({"t": "int", "n": 2, "m": 1}) == interior(2, 1)
    assert intersection_matrix(f).to_json()["matrix"][0] == [-3, 1, 1, 0, 1]
