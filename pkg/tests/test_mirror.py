from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from nlgw import cohoring, mirror
from nlgw.mirror import MirrorError
from nlgw.qseries import FracSeries

t = sp.symbols("t")


def line_oracle(fam, d, jmax, v, c):
    """I_d on the line H_i = t v_i, h = t c at z = 1, by sympy rational functions."""
    amb = fam.ambient
    k = amb.k
    tot = sp.Integer(0)
    for comp in mirror.compositions(d, k):
        term = sp.Integer(1)
        for i in range(k):
            for j in range(i + 1, k):
                m = comp[i] - comp[j]
                a = v[i] - v[j]
                term *= sp.Integer(-1) ** m * (t * a + m) / (t * a)
            for kk in range(1, comp[i] + 1):
                term /= (t * v[i] + kk) ** amb.factors[i]
        for s in fam.summands:
            deg = sum(x * y for x, y in zip(s, comp))
            lin = sum(x * y for x, y in zip(s, v)) + (s[k] * c if amb.has_pencil_line else 0)
            for kk in range(1, deg + 1):
                term *= t * lin + kk
        tot += term
    P, Q = sp.fraction(sp.cancel(sp.together(tot)))
    P = sp.Poly(P, t).all_coeffs()[::-1]
    Q = sp.Poly(Q, t).all_coeffs()[::-1]
    out = []
    for n in range(jmax + 1):
        s = (P[n] if n < len(P) else 0) - sum(Q[i] * out[n - i] for i in range(1, min(n, len(Q) - 1) + 1))
        out.append(s / Q[0])
    return out


def check_against_oracle(fam, d, jmax, v, route):
    I = mirror.assemble_I_fiber(fam, d, jmax, route)
    c = sp.symbols("c")
    samples = {cv: line_oracle(fam, d, jmax, [sp.Integer(x) for x in v], sp.Integer(cv)) for cv in range(jmax + 1)}
    k = fam.ambient.k
    for j in range(jmax + 1):
        pc = sp.Poly(sp.interpolate([(cv, samples[cv][j]) for cv in samples], c), c)
        mine = I.z_coefficient(-j)
        for hpow in (0, 1):
            got = sum(sp.Rational(x.numerator, x.denominator) * sp.prod([sp.Integer(v[i]) ** e[i] for i in range(k)])
                      for e, x in mine.items() if e[k] == hpow)
            assert got == pc.coeff_monomial(c ** hpow), (d, j, hpow)


@pytest.mark.parametrize("d", [1, 2])
def test_fano_full_route_against_rational_functions(d):
    check_against_oracle(cohoring.fano_pencil(), d, 3, (3, -2), "full")


def test_fano_line_route_against_rational_functions():
    check_against_oracle(cohoring.fano_pencil(), 2, 3, (5, 1), "line")


def test_dv_degree_one_against_rational_functions():
    check_against_oracle(cohoring.dv_pencil(), 1, 2, (7, -3, 2, 11, -5, 4), "line")


def test_routes_agree_on_fano():
    fam = cohoring.fano_pencil()
    for d in range(4):
        assert mirror.assemble_I_fiber(fam, d, 3, "full") == mirror.assemble_I_fiber(fam, d, 3, "line")


def test_degree_zero_is_one():
    for fam in (cohoring.fano_pencil(), cohoring.dv_pencil()):
        I0 = mirror.assemble_I_fiber(fam, 0)
        assert I0.terms == {(0,) * fam.ambient.nvars: {0: 1}}


def test_fano_degree_one_by_factors():
    """The two compositions assembled from the exact factor elements."""
    fam = cohoring.fano_pencil()
    amb = fam.ambient
    total = None
    for comp in [(1, 0), (0, 1)]:
        md = list(comp) + [0]
        rf = mirror.root_factor(amb, comp)
        x = rf.numerator.mul(mirror.toric_factor(amb, md)).mul(mirror.twist_factor(amb, fam.summands, md))
        x = x.scale(rf.sign)
        total = x if total is None else total + x
    # divide by H1 - H2 per z-power; caps H^6 = 0 are harmless here since
    # the lowest surviving degrees stay below 5
    I1 = mirror.assemble_I_fiber(fam, 1, 2, "full")
    for j in range(3):
        num = {e: c for e, c in total.z_coefficient(-j).items() if sum(e) <= j + 1}
        q = cohoring.poly_divide_linear(num, 0, 1)
        assert {e: c for e, c in q.items() if sum(e) == j} == I1.z_coefficient(-j)


def test_toric_factor_on_pencil_line():
    amb = cohoring.AmbientSpec.grassmannian(2, 6, pencil=True)
    x = mirror.toric_factor(amb, [0, 0, 1])
    # 1/(h+z)^2 = z^-2 - 2 h z^-3
    assert x.terms == {(0, 0, 0): {-2: 1}, (0, 0, 1): {-3: -2}}


def test_twist_factor_single():
    amb = cohoring.AmbientSpec.grassmannian(2, 6)
    x = mirror.twist_factor(amb, [(1, 0)], [1, 0])
    assert x.terms == {(1, 0): {0: 1}, (0, 0): {1: 1}}
    with pytest.raises(MirrorError):
        mirror.twist_factor(amb, [(-1, 0)], [1, 0])


def test_root_factor_sign():
    amb = cohoring.AmbientSpec.grassmannian(2, 6)
    rf = mirror.root_factor(amb, (1, 0))
    assert rf.sign == -1
    assert rf.numerator.terms == {(1, 0): {0: 1}, (0, 1): {0: -1}, (0, 0): {1: 1}}


@pytest.mark.parametrize("name,dmax", [("fano-pencil", 6), ("dv-pencil", 3)])
def test_mirror_shape(name, dmax):
    fam = cohoring.family_by_name(name)
    I = mirror.compute_I(fam, dmax, 2)
    assert mirror.check_mirror_shape(mirror.j_function(I))
    mm = mirror.mirror_map(I)
    assert mm.f0[0] == 1 and mm.f1[0] == 0 and mm.f2[0] == 0


def test_mirror_map_stable_under_truncation():
    fam = cohoring.fano_pencil()
    a = mirror.mirror_map(mirror.compute_I(fam, 4, 2))
    b = mirror.mirror_map(mirror.compute_I(fam, 6, 2))
    assert a.f0.equal_to(b.f0) and a.f1.equal_to(b.f1) and a.f2.equal_to(b.f2)


def test_invariant_independent_of_window():
    fam = cohoring.fano_pencil()
    a = mirror.family_invariants(fam, 4, I=mirror.compute_I(fam, 4, 2)).values
    b = mirror.family_invariants(fam, 4, I=mirror.compute_I(fam, 4, 3)).values
    assert a == b


def test_wrong_dimension_flagged():
    fam = cohoring.fano_pencil()
    inv = mirror.family_invariants(fam, 2, power=2)
    assert not inv.dimension_ok and all(v == 0 for v in inv.values.values())


def test_fano_invariants():
    fam = cohoring.fano_pencil()
    v = mirror.family_invariants(fam, 3).values
    assert v == {1: 0, 2: 122472, 3: 28512}


def test_inversion_identity():
    r = FracSeries({}, 6)
    qs = mirror.q_of_Q(r, 5)
    assert qs.equal_to(FracSeries({1: 1}, 6))


@pytest.mark.parametrize("c", [1, -3, Fraction(2, 7)])
def test_inversion_lagrange(c):
    """q = Q exp(-c q) has q = sum_n (-c n)^(n-1) / n! Q^n."""
    from math import factorial
    n = 8
    qs = mirror.q_of_Q(FracSeries({1: c}, n), n - 1)
    for k in range(1, n):
        assert qs[k] == Fraction(-c * k) ** (k - 1) / factorial(k)


def test_invert_mirror_variable_series():
    ratio = FracSeries({1: 2}, 6)
    f = FracSeries({1: 1}, 6)
    assert mirror.invert_mirror_variable(f, ratio, 5).equal_to(mirror.q_of_Q(ratio, 5))


vals = st.dictionaries(st.integers(1, 30), st.fractions(-50, 50, max_denominator=7), min_size=30, max_size=30)


@settings(max_examples=25, deadline=None)
@given(vals, st.integers(-4, 0))
def test_mc_family_round_trip(values, w):
    values = {d: values.get(d, Fraction(0)) for d in range(1, 31)}
    sub = mirror.mc_subtract_family(values, mirror.parity_residue, w)
    assert mirror.mc_add_family(sub, mirror.parity_residue, w) == values


def test_mc_family_prime_and_one():
    values = {1: Fraction(5), 3: Fraction(7)}
    out = mirror.mc_subtract_family(values, mirror.parity_residue, -2)
    assert out[1] == 5
    assert out[3] == 7 - Fraction(5, 9)


def test_mc_family_missing():
    with pytest.raises(KeyError):
        mirror.mc_subtract_family({4: Fraction(1)}, mirror.parity_residue, -2)


def test_parallel_degrees_identical():
    fam = cohoring.fano_pencil()
    a = mirror.compute_I(fam, 4, 2, workers=1)
    b = mirror.compute_I(fam, 4, 2, workers=2)
    assert a.per_degree == b.per_degree


def test_worker_env_validation(monkeypatch):
    monkeypatch.setenv(mirror.WORKERS_ENV, "3")
    assert mirror.worker_count() == 3
    monkeypatch.setenv(mirror.WORKERS_ENV, "zero")
    with pytest.raises(ValueError):
        mirror.worker_count()
