"""
Noether-Lefschetz generating series for prime-discriminant K3^[2] families.

Conventions.  A family polarized by H with q(H) = 2p has NL numbers NL(D)
indexed by D >= 0 a square mod p.  We store them as a FracSeries on the
grid 1/p, the coefficient of q^(D/p) being NL(D).

The weight-11 form in the plus space (coefficients vanishing at
non-residues) is the series phi_1 below; NL(D) = (1 + [p | D]) * phi_1[D].
phi_0 is phi_1 restricted to exponents divisible by p, rescaled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .qseries import (FracSeries, TruncationError, as_fraction, check_odd_prime,
                      eisenstein_E1, eisenstein_E3, eta_power_product,
                      legendre_chi, squares_mod)
from . import lattice


DEFAULT_B = 44


class SolveError(ValueError):
    pass


# -- Heegner series -------------------------------------------------------------

@dataclass(frozen=True)
class HeegnerSeries:
    p: int
    series: FracSeries     # grid p; coefficient at numerator D is NL(D)

    @property
    def order(self) -> int:
        """Largest verified D."""
        return self.series.order - 1

    def nl(self, D: int) -> Fraction:
        if D < 0:
            return Fraction(0)
        return self.series[D]

    def support(self) -> List[Tuple[int, Fraction]]:
        return self.series.items()

    def table(self, upto: Optional[int] = None) -> List[Tuple[int, Fraction]]:
        top = self.order if upto is None else min(upto, self.order)
        return [(D, self.nl(D)) for D in range(top + 1) if self.nl(D)]

    def to_json(self) -> dict:
        from .qseries import frac_str
        return {"p": self.p, "order": self.order,
                "nl": [[D, frac_str(c)] for D, c in self.support()]}

    @classmethod
    def from_plus_form(cls, p: int, form: FracSeries) -> "HeegnerSeries":
        """NL(D) = (1 + [p|D]) form[D]."""
        if form.grid != 1:
            raise ValueError("plus-space form must have integral exponents")
        cs = {D: c * (2 if D % p == 0 else 1) for D, c in form.coeffs.items()}
        return cls(p, FracSeries(cs, form.order, p))

    def plus_form(self) -> FracSeries:
        cs = {D: c / (2 if D % self.p == 0 else 1) for D, c in self.series.coeffs.items()}
        return FracSeries(cs, self.series.order, 1)

    def equal_to(self, other: "HeegnerSeries", upto: Optional[int] = None) -> bool:
        if self.p != other.p:
            return False
        top = min(self.order, other.order)
        if upto is not None:
            top = min(top, upto)
        return all(self.nl(D) == other.nl(D) for D in range(top + 1))


# -- generators and monomials ----------------------------------------------

def delta_p(p: int, terms: int) -> Optional[FracSeries]:
    """eta(tau)^r eta(p tau)^r with r = 24/(p+1), when that is integral."""
    if 24 % (p + 1):
        return None
    r = 24 // (p + 1)
    return eta_power_product([(1, r), (p, r)], terms)


def delta_weight(p: int) -> Optional[int]:
    return None if 24 % (p + 1) else 24 // (p + 1)


@dataclass(frozen=True)
class MonomialBasis:
    p: int
    weight: int
    monomials: Tuple[Tuple[int, int, int], ...]   # (a, b, c): E1^a E3^b Delta_p^c

    @classmethod
    def build(cls, p: int, weight: int) -> "MonomialBasis":
        w_delta = delta_weight(p)
        cmax = weight // w_delta if w_delta else 0
        out = []
        for c in range(cmax + 1):
            for b in range((weight - c * (w_delta or 0)) // 3 + 1):
                a = weight - 3 * b - c * (w_delta or 0)
                out.append((a, b, c))
        return cls(p, weight, tuple(sorted(out, reverse=True)))

    def evaluate(self, terms: int) -> List[FracSeries]:
        e1 = eisenstein_E1(self.p, terms)
        e3 = eisenstein_E3(self.p, terms)
        dl = delta_p(self.p, terms)
        cache = {}

        def pw(name, base, k):
            key = (name, k)
            if key not in cache:
                cache[key] = base ** k
            return cache[key]

        out = []
        for a, b, c in self.monomials:
            f = pw("e1", e1, a) * pw("e3", e3, b)
            if c:
                f = f * pw("dl", dl, c)
            out.append(f.truncate(terms))
        return out


def _vec(f: FracSeries, B: int) -> List[Fraction]:
    return [f[n] for n in range(B + 1)]


def _plus_space(p: int, weight: int, B: int):
    """Row-reduced basis (as coefficient lists up to B) of the plus space."""
    mons = MonomialBasis.build(p, weight)
    series = mons.evaluate(B + 1)
    rows = [_vec(f, B) for f in series]
    M = sympy.Matrix(rows)
    nonres = [n for n in range(1, B + 1) if legendre_chi(p, n) == -1]
    # combinations x with x . M[:, nonres] = 0
    K = M[:, nonres].T.nullspace()
    if not K:
        return mons, []
    V = sympy.Matrix.hstack(*K).T * M
    R, piv = V.rref()
    basis = [list(R.row(i)) for i in range(len(piv))]
    return mons, basis


def _to_series(vec, B) -> FracSeries:
    return FracSeries({n: Fraction(int(sympy.Rational(x).p), int(sympy.Rational(x).q))
                       for n, x in enumerate(vec)}, B + 1)


def plus_space_basis(p: int, weight: int = 11, B: int = DEFAULT_B) -> List[FracSeries]:
    check_odd_prime(p)
    if p % 4 != 3:
        raise ValueError("plus space model needs p = 3 mod 4")
    if B <= p:
        raise SolveError("precision B = %d too small for p = %d" % (B, p))
    _, basis = _plus_space(p, weight, B)
    _, low = _plus_space(p, weight, B - p)
    if len(low) != len(basis):
        raise SolveError("rank not stabilized between B-p = %d (%d) and B = %d (%d)"
                         % (B - p, len(low), B, len(basis)))
    return [_to_series(v, B) for v in basis]


def solve_plus_form(p: int, constraints: Dict[int, Fraction], B: int = DEFAULT_B,
                    weight: int = 11) -> FracSeries:
    """Unique plus-space form with prescribed coefficients form[n] = value."""
    basis = plus_space_basis(p, weight, B)
    A = sympy.Matrix([[b[n] for b in basis] for n in sorted(constraints)])
    rhs = sympy.Matrix([as_fraction(constraints[n]) for n in sorted(constraints)])
    if A.rank() < len(basis):
        raise SolveError("constraints have rank %d < %d; increase B or add constraints"
                         % (A.rank(), len(basis)))
    aug = A.row_join(rhs)
    if aug.rank() != A.rank():
        raise SolveError("inconsistent constraint system")
    sol, params = A.gauss_jordan_solve(rhs)
    if params.shape[0]:
        raise SolveError("solution not unique")
    out = FracSeries({}, B + 1)
    for coef, b in zip(sol, basis):
        out = out + b.scale(Fraction(int(sympy.Rational(coef).p), int(sympy.Rational(coef).q)))
    return out


# -- the Debarre-Voisin forms ------------------------------------------------

# (coefficient, a, b, c) for E1^a E3^b Delta11^c
PHI0_TERMS = [
    (Fraction(-5), 11, 0, 0),
    (Fraction(430), 8, 1, 0),
    (Fraction(5199920, 9), 5, 0, 3),
    (Fraction(-35407490, 27), 3, 0, 4),
    (Fraction(49194440, 9), 4, 1, 2),
    (Fraction(248350), 5, 2, 0),
    (Fraction(-596661440, 27), 2, 1, 3),
    (Fraction(-306631760, 9), 3, 2, 1),
    (Fraction(51243500, 3), 0, 1, 4),
    (Fraction(1331452540, 27), 1, 2, 2),
    (Fraction(349019440, 9), 2, 3, 0),
]

PHI1_TERMS = [
    (Fraction(-5), 11, 0, 0),
    (Fraction(110), 8, 1, 0),
    (Fraction(722740, 3993), 5, 0, 3),
    (Fraction(-1805750, 3993), 3, 0, 4),
    (Fraction(-12660620, 11979), 4, 1, 2),
    (Fraction(-990), 5, 2, 0),
    (Fraction(118940, 363), 1, 0, 5),
    (Fraction(5609180, 3993), 2, 1, 3),
    (Fraction(29208460, 11979), 3, 2, 1),
    (Fraction(3500, 33), 0, 1, 4),
    (Fraction(2610980, 1089), 2, 3, 0),
]


def _poly_form(terms_list, terms: int, p: int = 11) -> FracSeries:
    e1 = eisenstein_E1(p, terms)
    e3 = eisenstein_E3(p, terms)
    dl = delta_p(p, terms)
    out = FracSeries({}, terms)
    for coef, a, b, c in terms_list:
        if a + 3 * b + 2 * c != 11:
            raise AssertionError("weight bookkeeping broken for %r" % ((a, b, c),))
        out = out + ((e1 ** a) * (e3 ** b) * (dl ** c)).truncate(terms).scale(coef)
    return out


def dv_phi0(terms: int) -> FracSeries:
    return _poly_form(PHI0_TERMS, terms)


def dv_phi1(terms: int) -> FracSeries:
    return _poly_form(PHI1_TERMS, terms)


def dv_phi(terms: int) -> HeegnerSeries:
    """phi(q^11) = phi_0(q^11) + phi_1(q); NL(D) for D < terms."""
    p = 11
    f1 = dv_phi1(terms)
    f0 = dv_phi0((terms + p - 1) // p)
    cs = dict(f1.coeffs)
    for n, c in f0.coeffs.items():
        cs[n * p] = cs.get(n * p, 0) + c
    return HeegnerSeries(p, FracSeries(cs, terms, p))


DV_GAP = (1, 3, 4, 5, 9)
DV_NL0 = Fraction(-10)


def solve_dv_from_constraints(B: int = DEFAULT_B, nl0=DV_NL0, check: bool = True) -> HeegnerSeries:
    if B < 25:
        raise SolveError("B must be >= 25")
    p = 11
    cons = {0: as_fraction(nl0) / 2}
    for D in DV_GAP:
        cons[D] = Fraction(0)
    form = solve_plus_form(p, cons, B)
    phi = HeegnerSeries.from_plus_form(p, form)
    if check:
        ref = dv_phi(B + 1)
        if not phi.equal_to(ref):
            raise SolveError("constraint solution disagrees with the closed-form series")
    return phi


def solve_cubic_form(nl0, nl3, B: int = DEFAULT_B) -> HeegnerSeries:
    p = 3
    form = solve_plus_form(p, {0: as_fraction(nl0) / 2, 3: as_fraction(nl3) / 2}, B)
    return HeegnerSeries.from_plus_form(p, form)


# -- lookups ------------------------------------------------------------------

def nl_number_checked(phi: HeegnerSeries, s, d: int):
    """(NL_{s,d}, ok); ok is False when no lattice vector exists (value 0)."""
    if (2 * as_fraction(s)).denominator != 1:
        return Fraction(0), False
    D = lattice.try_disc_D(phi.p, d, s)
    if D is None:
        return Fraction(0), False
    return phi.nl(D), True


def nl_number(phi: HeegnerSeries, s, d: int) -> Fraction:
    return nl_number_checked(phi, s, d)[0]


def refined_nl(phi: HeegnerSeries, m: int, s, d: int) -> Fraction:
    return lattice.refined_from_unrefined(lambda s_, d_: nl_number(phi, s_, d_[0]), m, s, (d,))


# -- first-type divisors and HLS ------------------------------------------------

@dataclass
class NLFirstTypeVector:
    p: int
    values: Dict[int, Fraction] = field(default_factory=dict)
    absent: set = field(default_factory=set)
    unexplained: Dict[int, Fraction] = field(default_factory=dict)

    def forward(self, D: int, strict: bool = True) -> Fraction:
        """NL(D) recomputed from the C_2e."""
        if D % self.p not in squares_mod(self.p):
            return Fraction(0)
        alpha = lattice.default_alpha(self.p, D)
        total = Fraction(0)
        for e, c in self.values.items():
            coef = lattice.heegner_to_cc_coefficient(self.p, D, alpha, e, strict)
            if coef != lattice.ABSENT:
                total += coef * c
        return total


def heegner_to_first_type(phi: HeegnerSeries, e_max: int, strict: bool = True) -> NLFirstTypeVector:
    p = phi.p
    if e_max > phi.order:
        raise TruncationError("series verified only to D = %d" % phi.order)
    out = NLFirstTypeVector(p)
    sq = squares_mod(p)
    for D in range(1, e_max + 1):
        if D % p not in sq:
            if phi.nl(D):
                raise SolveError("NL(%d) nonzero at a non-residue" % D)
            continue
        alpha = lattice.default_alpha(p, D)
        rest = phi.nl(D)
        for e in sorted(out.values):
            if e < D:
                coef = lattice.heegner_to_cc_coefficient(p, D, alpha, e, strict)
                if coef != lattice.ABSENT:
                    rest -= coef * out.values[e]
        diag = lattice.heegner_to_cc_coefficient(p, D, alpha, D, strict)
        if diag == lattice.ABSENT:
            out.absent.add(D)
            if rest:
                out.unexplained[D] = rest
            continue
        out.values[D] = rest / diag
    return out


HLS, NOT_HLS, ABSENT = "HLS", "not-HLS", "absent"


def hls_report(phi: HeegnerSeries, e_max: int, strict: bool = True) -> List[dict]:
    vec = heegner_to_first_type(phi, e_max, strict)
    rows = []
    for e in range(1, e_max + 1):
        if e % phi.p not in squares_mod(phi.p):
            continue
        if e in vec.absent:
            status, c = ABSENT, None
        else:
            c = vec.values[e]
            status = HLS if c == 0 else NOT_HLS
        # NL(e) left over when C_2e has no representation
        rows.append({"e": e, "divisor": "C_%d" % (2 * e), "C": c, "status": status,
                     "gap_zero": phi.nl(e) == 0, "unexplained": vec.unexplained.get(e, Fraction(0))})
    return rows
