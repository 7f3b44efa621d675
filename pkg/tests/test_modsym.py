from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from arakelov import linalg
from arakelov.errors import BadPrime, NonPrime, PTooSmall, SturmNotReached
from arakelov.modsym import (
    CSV_COLUMNS,
    _convergents,
    _round_half_away,
    atkin_lehner,
    brumer_scan,
    build_manin_space,
    hecke_matrix,
    heilbronn_cremona,
    reports_to_csv,
    reports_to_json,
    sturm_bound,
    winding_dimension,
    winding_report,
)
from arakelov.primes import primes_between

from oracles import count_points_11a_mod2, genus_classical

_cache = {}


def space(p):
    if p not in _cache:
        _cache[p] = build_manin_space(p)
    return _cache[p]


def test_round_half_away():
    assert [_round_half_away(a, 2) for a in (-3, -1, 1, 3)] == [-2, -1, 1, 2]
    assert _round_half_away(7, -2) == -4 and _round_half_away(5, 3) == 2


@given(st.integers(-500, 500), st.integers(1, 500))
def test_convergents_end_at_value(a, b):
    cs = _convergents(a, b)
    assert F(*cs[-1]) == F(a, b)
    prev = (1, 0)
    for c in cs:
        assert c[0] * prev[1] - c[1] * prev[0] in (1, -1)
        prev = c


@pytest.mark.parametrize("ell", [2, 3, 5, 7, 11, 13])
def test_heilbronn_determinants(ell):
    H = heilbronn_cremona(ell)
    assert all(a * d - b * c == ell for a, b, c, d in H)


@pytest.mark.parametrize("p,dim", [(11, 2), (23, 4), (37, 4)])
def test_cuspidal_dims(p, dim):
    S = space(p)
    assert S.num_symbols == p + 1
    assert S.cuspidal_dim == dim
    assert S.dim == dim + 1


@pytest.mark.parametrize("p", primes_between(5, 211))
def test_cuspidal_dim_genus(p):
    assert space(p).cuspidal_dim == 2 * genus_classical(p)


def test_bad_inputs():
    with pytest.raises(NonPrime):
        build_manin_space(21)
    with pytest.raises(PTooSmall):
        build_manin_space(3)
    with pytest.raises(BadPrime):
        hecke_matrix(space(11), 11)
    with pytest.raises(BadPrime):
        hecke_matrix(space(11), 4)


def test_t2_p11_point_count():
    a2 = 2 + 1 - count_points_11a_mod2()
    assert a2 == -2
    T2 = hecke_matrix(space(11), 2)
    assert T2.matrix == ((a2, 0), (0, a2))


@pytest.mark.parametrize("p", [11, 23, 37, 43, 67, 101])
def test_hecke_commute_and_integral_trace(p):
    S = space(p)
    Ts = [hecke_matrix(S, q) for q in (2, 3, 5, 7) if q != p]
    W = atkin_lehner(S).matrix
    assert W.is_involution()
    for i, A in enumerate(Ts):
        assert A.trace().denominator == 1
        assert A.commutes_with(W)
        for B in Ts[i + 1:]:
            assert A.commutes_with(B)


@pytest.mark.parametrize("p", [11, 23, 37, 61])
@pytest.mark.parametrize("ell", [2, 3, 5, 7])
def test_eisenstein_eigenvalue(p, ell):
    S = space(p)
    E = S.eisenstein_vector
    assert linalg.matvec(S.hecke_on_m(ell), E) == [(ell + 1) * x for x in E]


@pytest.mark.parametrize("p,dims", [(11, (0, 1)), (23, (0, 2)), (37, (1, 1))])
def test_atkin_lehner_dims(p, dims):
    al = atkin_lehner(space(p))
    assert (al.dim_plus, al.dim_minus) == dims


@pytest.mark.parametrize("p", primes_between(11, 199))
def test_al_dims_sum_and_sign(p):
    S = space(p)
    al = atkin_lehner(S)
    assert al.dim_plus + al.dim_minus == S.g
    # U_p = -w_p on weight-2 newforms, so trace(w_p) = -sum a_p
    assert al.dim_minus >= al.dim_plus or p in (389, 433)


@pytest.mark.parametrize("p,d", [(11, 1), (19, 1), (23, 2), (37, 1)])
def test_winding_dimension_oracle(p, d):
    assert winding_dimension(space(p)) == d


def test_winding_projection_exact():
    S = space(37)
    e = S.winding_element
    assert S.boundary(e) == (-1, 1)  # [inf] - [0]
    v = S.winding_projection
    assert S.boundary(v) == (0, 0)
    coords = S.cuspidal_coordinates(v)
    recon = [sum(c * b[i] for c, b in zip(coords, S.cuspidal_basis)) for i in range(S.dim)]
    assert recon == list(v)
    star = S.star_on_m()
    assert linalg.matvec(star, list(v)) == list(v)


def test_winding_order_independent_and_sturm():
    S = space(67)
    B = sturm_bound(67)
    ps = [q for q in primes_between(2, B)]
    assert winding_dimension(S, ps) == winding_dimension(S, list(reversed(ps))) == winding_dimension(S, ps + [13, 17])
    with pytest.raises(SturmNotReached):
        winding_dimension(S, ps[:-1])


@settings(max_examples=15)
@given(st.sampled_from(primes_between(11, 199)))
def test_winding_within_minus(p):
    r = winding_report(p)
    assert 0 <= r.dim_Je <= r.dim_minus


def test_brumer_scan_rows():
    reps = brumer_scan(19, 61)
    assert [r.p for r in reps] == primes_between(19, 61)
    r23 = next(r for r in reps if r.p == 23)
    assert (r23.g, r23.dim_Je, r23.ratio, r23.brumer_weak) == (2, 2, 1, True)
    r37 = next(r for r in reps if r.p == 37)
    assert (r37.dim_minus, r37.dim_Je) == (1, 1)
    csv = reports_to_csv(reps)
    assert csv.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert "23,2,0,2,2,1/1,true" in csv.splitlines()
    assert reports_to_json(reps)[0]["p"] == 19
    with pytest.raises(PTooSmall):
        brumer_scan(11, 30)


def test_brumer_scan_parallel_same_order():
    assert brumer_scan(19, 80, jobs=2) == brumer_scan(19, 80)
