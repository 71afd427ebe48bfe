from fractions import Fraction

import pytest

from nlgw import nlforms
from nlgw.nlforms import HeegnerSeries, SolveError


def test_dv_closed_form_coefficients(dv_phi):
    want = {0: -10, 11: 640, 12: 990, 14: 5500, 15: 11440, 16: 21450, 20: 198770, 22: 510840}
    for D, v in want.items():
        assert dv_phi.nl(D) == v
    for D in nlforms.DV_GAP:
        assert dv_phi.nl(D) == 0


def test_phi0_phi1_expansions():
    assert [nlforms.dv_phi0(5)[n] for n in range(5)] == [-5, 320, 255420, 14793440, 262345260]
    f1 = nlforms.dv_phi1(16)
    assert f1.items() == [(0, -5), (11, 320), (12, 990), (14, 5500), (15, 11440)]


def test_phi0_is_phi1_at_multiples_of_p():
    f0, f1 = nlforms.dv_phi0(4), nlforms.dv_phi1(44)
    for n in range(4):
        assert f0[n] == f1[11 * n]


def test_plus_form_vanishes_at_nonresidues(dv_phi):
    sq = nlforms.squares_mod(11)
    assert all(dv_phi.nl(D) == 0 for D in range(61) if D % 11 not in sq)


def test_plus_space_dimensions():
    assert len(nlforms.plus_space_basis(11)) == 6
    assert len(nlforms.plus_space_basis(3)) == 2


def test_constraint_solve_reproduces_closed_form(dv_phi):
    phi = nlforms.solve_dv_from_constraints(44)
    assert phi.equal_to(dv_phi)


def test_constraint_solve_needs_all_constraints():
    with pytest.raises(SolveError):
        nlforms.solve_plus_form(11, {0: Fraction(-5), 1: 0, 3: 0}, 44)


def test_cubic_values(cubic_phi):
    assert cubic_phi.nl(0) == -2
    assert cubic_phi.nl(3) == 192
    assert cubic_phi.nl(1) == 0
    assert cubic_phi.nl(4) == 3402
    assert cubic_phi.nl(7) == 917568


def test_refined_nl_examples(dv_phi, cubic_phi):
    # NL_{2,0,8} = NL_{1,0,4} = NL(4) - NL(1) for the cubic
    assert nlforms.refined_nl(cubic_phi, 2, 0, 8) == 3402
    assert nlforms.refined_nl(dv_phi, 1, -2, 4) == 11440
    assert nlforms.nl_number(dv_phi, -2, 2) == 990
    # 2s not integral: no class
    assert nlforms.nl_number_checked(cubic_phi, Fraction(2, 3), 2) == (0, False)


def test_json_round_trip(dv_phi):
    js = dv_phi.to_json()
    assert js["nl"][0] == [0, "-10"]


def test_hls_extended_classification(dv_phi):
    rows = {r["e"]: r for r in nlforms.hls_report(dv_phi, 30, strict=False)}
    for e in (1, 3, 4, 5, 9):
        assert rows[e]["status"] == nlforms.HLS
    assert rows[15]["status"] == nlforms.NOT_HLS
    assert rows[15]["C"] == 11440


def test_hls_default_marks_absent(dv_phi):
    rows = {r["e"]: r for r in nlforms.hls_report(dv_phi, 30)}
    assert rows[3]["status"] == nlforms.ABSENT
    assert rows[5]["status"] == nlforms.ABSENT
    assert rows[3]["gap_zero"] and rows[5]["gap_zero"]
    assert rows[15]["status"] == nlforms.NOT_HLS


def test_first_type_round_trip(dv_phi):
    vec = nlforms.heegner_to_first_type(dv_phi, 40, strict=False)
    assert not vec.unexplained
    for D in range(1, 41):
        assert vec.forward(D, strict=False) == dv_phi.nl(D)


def test_first_type_literal_leaves_residue(dv_phi):
    # 14 = 11*(-1) + 5^2 only, so C_28 is absent and NL(14) stays unexplained
    vec = nlforms.heegner_to_first_type(dv_phi, 40)
    assert vec.unexplained == {14: 5500}
    assert {3, 5, 14} <= vec.absent
    for D in range(1, 41):
        if D not in vec.absent:
            assert vec.forward(D) == dv_phi.nl(D)
