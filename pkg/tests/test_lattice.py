from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from nlgw import lattice
from nlgw.lattice import (ABSENT, CurveClassKey, LatticeError, det_bordered, disc_D, heegner_to_cc_coefficient,
                          norm_for, primitive_from_unrefined, projection_norm, refine_nl, represent_e,
                          unrefine_nl)


def test_disc_examples():
    assert disc_D(11, 2, 0) == 1
    assert disc_D(11, 2, -2) == 12
    assert disc_D(11, 4, -2) == 15
    assert disc_D(3, 3, Fraction(3, 2)) == 0


def test_disc_rejects():
    with pytest.raises(LatticeError):
        disc_D(11, 1, 0)          # 1/4
    with pytest.raises(LatticeError):
        disc_D(11, 1, 1)          # negative
    with pytest.raises(ValueError):
        disc_D(12, 2, 0)


def test_norm_inverse():
    for d in range(1, 8):
        for D in range(0, 30):
            s = norm_for(11, d, D)
            assert disc_D(11, d, s) == D


def test_bordered_determinant_by_cofactors():
    a = [[2, 1], [1, 4]]
    d, s = (3, -1), Fraction(1, 2)
    m = sympy.Matrix([[2, 1, 3], [1, 4, -1], [3, -1, sympy.Rational(1, 2)]])
    assert det_bordered(a, d, s) == Fraction(str(m.det()))


def test_key_validation():
    k = CurveClassKey.k3n2(2, -2, 4)
    assert k.r == frozenset({1})
    with pytest.raises(LatticeError):
        CurveClassKey.k3n2(3, 0, 4)
    with pytest.raises(LatticeError):
        CurveClassKey.k3n2(2, 1, 2)       # s/m^2 = 1/4


def test_refine_example():
    k = refine_nl(2, -8, 4)
    assert (k.m, k.s, k.d) == (1, -2, (2,))


def test_represent_e_conventions():
    assert represent_e(11, 15) == (1, 2)
    assert represent_e(11, 3, strict=False) == (-2, 5)
    assert represent_e(11, 3) is None
    assert represent_e(11, 7) is None


def test_cc_coefficient_basic():
    # NL(15) with alpha = 2 meets C_30 once
    assert heegner_to_cc_coefficient(11, 15, 2, 15) == 1
    # D = 4 c^2 with c = 1, e = 4
    assert heegner_to_cc_coefficient(11, 4, 2, 4) == 1
    assert heegner_to_cc_coefficient(11, 15, 2, 5, strict=False) == 0
    assert heegner_to_cc_coefficient(11, 15, 2, 5) == ABSENT
    assert heegner_to_cc_coefficient(11, 3, 5, 3) == ABSENT


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(-10, 20), st.integers(1, 12)),
                       st.integers(-50, 50), min_size=1, max_size=20))
def test_refine_unrefine_round_trip(table):
    """Moebius inversion: primitive -> unrefined -> primitive."""
    def prim(s, d):
        return table.get((int(2 * s) if (2 * s).denominator == 1 else None, d[0]), 0)

    def unref(s, d):
        return unrefine_nl(prim, s, d)

    for (two_s, d) in table:
        s = Fraction(two_s, 2)
        assert primitive_from_unrefined(unref, s, (d,)) == prim(s, (d,))


gram = st.integers(1, 3).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(-6, 6), min_size=n * n, max_size=n * n),
                        st.lists(st.integers(-6, 6), min_size=n, max_size=n), st.integers(-10, 10)))


@settings(max_examples=60, deadline=None)
@given(gram)
def test_projection_norm_schur(data):
    """det(a, d; d, s) / det(a) = s - d^T a^-1 d."""
    n, flat, d, s = data
    m = sympy.Matrix(n, n, flat)
    a = m + m.T
    if a.det() == 0:
        return
    want = sympy.Rational(s) - (sympy.Matrix(d).T * a.inv() * sympy.Matrix(d))[0, 0]
    got = projection_norm(a.tolist(), d, s)
    assert got == Fraction(int(want.p), int(want.q))
