"""
GW/NL consistency: family invariants of a pencil against NL numbers times
reduced fiber invariants.

For each fiber degree d two comparisons are made:

    raw family invariant        = sum_{m,s} NL_{m,s,d} <H^3>_{m,s,d}
    mc-subtracted invariant     = sum_s NL_{s,d} <H^3>_{1,s,d}

The first needs imprimitive G_{m,s}; those are taken from the proven set
or, where allowed by the mode, from the multiple-cover formula.  The
second holds exactly when the subtracted invariants do not depend on m.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import lattice, mirror, nlforms, redgw
from .cohoring import FamilySpec, ZeroLocus, grr_hodge_degree
from .lattice import CurveClassKey
from .nlforms import HeegnerSeries
from .qseries import as_fraction, divisors, frac_str
from .redgw import FGPair, PrimTables

log = logging.getLogger(__name__)

MODES = ("proven-only", "conjectural", "hybrid")
CUBIC_NL3 = 192


class GWNLError(RuntimeError):
    pass


def is_proven(m: int, s, n_insertions: int = 1) -> bool:
    """Keys where the multiple-cover formula is a theorem: m = 1, s < 0, or s = 0 with m = 2 or one insertion."""
    s = as_fraction(s)
    return m == 1 or s < 0 or (s == 0 and (m == 2 or n_insertions == 1))


def _norms(p: int, d: int):
    """Half-integral s with 4s >= -10 and d^2 - 2ps >= 0."""
    top = floor(Fraction(d * d, p))               # 2s <= d^2 / p
    for two_s in range(-5, top + 1):
        yield Fraction(two_s, 2)


@dataclass
class Contribution:
    m: int
    s: Fraction
    D: Optional[int]
    NL: Fraction
    G: Optional[Fraction]
    term: Optional[Fraction]
    proven: bool

    def to_json(self) -> dict:
        return {"m": self.m, "s_times_4": int(4 * self.s), "D": self.D, "NL": frac_str(self.NL),
                "G": None if self.G is None else frac_str(self.G),
                "term": None if self.term is None else frac_str(self.term), "proven": self.proven}


def _need(prim: PrimTables, s):
    if not prim.covers(s):
        raise GWNLError("primitive table too short for s = %s" % (s,))


def primitive_contributions(phi: HeegnerSeries, prim: PrimTables, p: int, d: int) -> List[Contribution]:
    out = []
    for s in _norms(p, d):
        D = lattice.try_disc_D(p, d, s)
        if D is None:
            continue
        nl = phi.nl(D)
        if not nl:
            continue
        _need(prim, s)
        g = prim.g(s)
        term = nl * redgw.fiber_invariant_H3(p, CurveClassKey.k3n2(1, s, d), FGPair(prim.f(s), g))
        out.append(Contribution(1, s, D, nl, g, term, True))
    return out


def rhs_primitive(phi: HeegnerSeries, prim: PrimTables, p: int, d: int) -> Fraction:
    if d < 1:
        raise ValueError("d must be >= 1")
    return sum((c.term for c in primitive_contributions(phi, prim, p, d)), Fraction(0))


def refined_contributions(phi: HeegnerSeries, prim: PrimTables, p: int, d: int,
                          mode: str = "hybrid") -> List[Contribution]:
    if mode not in MODES:
        raise ValueError("mode must be one of %s" % (MODES,))
    out = []
    for m in divisors(d):
        dp = d // m
        for t in _norms(p, dp):
            nl = nlforms.refined_nl(phi, 1, t, dp)
            if not nl:
                continue
            s = t * m * m
            proven = is_proven(m, s)
            D = lattice.try_disc_D(p, d, s)
            if mode == "proven-only" and not proven:
                out.append(Contribution(m, s, D, nl, None, None, False))
                continue
            for k in divisors(m):
                _need(prim, t * (m // k) ** 2)
            G = redgw.mc_assemble(prim, m, s).G
            term = nl * redgw.fiber_invariant_H3(p, CurveClassKey.k3n2(m, s, d), FGPair(Fraction(0), G))
            out.append(Contribution(m, s, D, nl, G, term, proven))
    return out


def rhs_refined(phi: HeegnerSeries, prim: PrimTables, p: int, d: int, use_conjecture: bool = True):
    """Sum over (m, s); None when a non-proven key is needed and use_conjecture is off."""
    cs = refined_contributions(phi, prim, p, d, "conjectural" if use_conjecture else "proven-only")
    if any(c.term is None for c in cs):
        return None
    return sum((c.term for c in cs), Fraction(0))


# -- reports ----------------------------------------------------------------------------

MATCH, MISMATCH, UNVERIFIED = "match", "mismatch", "unverified"


@dataclass
class GWNLRow:
    d: int
    lhs_raw: Fraction
    lhs: Fraction
    rhs: Fraction
    rhs_refined: Optional[Fraction]
    contributions: List[Contribution]
    refined: List[Contribution]

    @property
    def proven(self) -> bool:
        return all(c.proven for c in self.refined)

    @property
    def match(self) -> bool:
        return self.lhs == self.rhs

    @property
    def match_refined(self) -> Optional[bool]:
        return None if self.rhs_refined is None else self.lhs_raw == self.rhs_refined

    @property
    def status(self) -> str:
        if not self.match or self.match_refined is False:
            return MISMATCH
        if self.match_refined is None:
            return UNVERIFIED
        return MATCH

    def to_json(self) -> dict:
        return {"degree": self.d, "lhs": frac_str(self.lhs), "lhs_raw": frac_str(self.lhs_raw),
                "rhs": frac_str(self.rhs),
                "rhs_refined": None if self.rhs_refined is None else frac_str(self.rhs_refined),
                "contributions": [c.to_json() for c in self.contributions],
                "refined_contributions": [c.to_json() for c in self.refined],
                "conjectural_keys": [[c.m, int(4 * c.s)] for c in self.refined if not c.proven],
                "match": self.match, "match_refined": self.match_refined, "status": self.status}


@dataclass
class GWNLReport:
    family: str
    p: int
    mode: str
    rows: List[GWNLRow] = field(default_factory=list)

    @property
    def full_match(self) -> bool:
        return bool(self.rows) and all(r.status == MATCH for r in self.rows)

    @property
    def any_mismatch(self) -> bool:
        return any(r.status == MISMATCH for r in self.rows)

    def to_json(self) -> dict:
        return {"family": self.family, "p": self.p, "mode": self.mode,
                "note": "family quantities on the base P^1 of the pencil; lhs is mc-subtracted, "
                        "lhs_raw is compared with the refined sum",
                "rows": [r.to_json() for r in self.rows],
                "matched": sum(r.status == MATCH for r in self.rows), "degrees": len(self.rows),
                "full_match": self.full_match}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)


def family_lhs(fam: FamilySpec, d_max: int, progress: Optional[Callable] = None) -> Tuple[Dict[int, Fraction], Dict[int, Fraction]]:
    """(raw, mc-subtracted) <H^3> of the pencil total space for d = 1..d_max."""
    inv = mirror.family_invariants(fam, d_max, progress=progress)
    raw = inv.values
    return raw, mirror.mc_subtract_family(raw, mirror.parity_residue, -2)


def family_nl_series(fam: FamilySpec, B: int = nlforms.DEFAULT_B, locus: Optional[ZeroLocus] = None) -> HeegnerSeries:
    """NL series of a built-in pencil: the closed form for DV, the cubic solve otherwise."""
    if fam.p == 11:
        return nlforms.dv_phi(B + 1)
    if fam.p == 3:
        nl0 = grr_hodge_degree(fam, locus) / 3
        return nlforms.solve_cubic_form(nl0, CUBIC_NL3, B)
    raise GWNLError("no NL series known for %s" % fam.name)


def prim_for(p: int, d_max: int) -> PrimTables:
    return redgw.prim_tables(Fraction(d_max * d_max, 2 * p).__ceil__())


def check_gwnl(fam: FamilySpec, phi: HeegnerSeries, prim: PrimTables, d_max: int,
               mode: str = "proven-only", lhs=None, progress: Optional[Callable] = None) -> GWNLReport:
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    if mode not in MODES:
        raise ValueError("mode must be one of %s" % (MODES,))
    p = fam.p
    if phi.p != p:
        raise GWNLError("NL series is for p = %d, family has p = %d" % (phi.p, p))
    raw, sub = lhs if lhs is not None else family_lhs(fam, d_max, progress)
    rep = GWNLReport(fam.name, p, mode)
    for d in range(1, d_max + 1):
        try:
            prim_c = primitive_contributions(phi, prim, p, d)
            ref_c = refined_contributions(phi, prim, p, d, mode)
        except Exception as exc:
            raise GWNLError("degree %d: %s" % (d, exc)) from exc
        rhs = sum((c.term for c in prim_c), Fraction(0))
        rr = None if any(c.term is None for c in ref_c) else sum((c.term for c in ref_c), Fraction(0))
        rep.rows.append(GWNLRow(d, raw[d], sub[d], rhs, rr, prim_c, ref_c))
        if progress:
            progress({"stage": "gwnl", "degree": d, "status": rep.rows[-1].status})
    return rep


# -- constraint extraction --------------------------------------------------------

@dataclass
class LinearEquation:
    d: int
    lhs: Fraction
    coeffs: Dict[int, Fraction]     # D -> coefficient of NL(D)

    def __str__(self):
        parts = ["%s NL(%d)" % (frac_str(c), D) for D, c in sorted(self.coeffs.items())]
        return "%s = %s" % (frac_str(self.lhs), " + ".join(parts) if parts else "0")


def gwnl_equation(p: int, prim: PrimTables, d: int, lhs: Fraction) -> LinearEquation:
    """lhs = sum_s coefficient(s) NL(D(s)) with the primitive fiber invariants."""
    co: Dict[int, Fraction] = {}
    for s in _norms(p, d):
        D = lattice.try_disc_D(p, d, s)
        if D is None:
            continue
        g = prim.g(s)
        if not g:
            continue
        c = redgw.fiber_invariant_H3(p, CurveClassKey.k3n2(1, s, d), FGPair(Fraction(0), g))
        co[D] = co.get(D, 0) + c
    return LinearEquation(d, as_fraction(lhs), co)


def _rat(x):
    import sympy
    x = as_fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def solve_with_equations(p: int, anchors: Dict[int, Fraction], eqs: List[LinearEquation],
                         B: int = nlforms.DEFAULT_B) -> HeegnerSeries:
    """The plus-space form with NL(D) = anchors[D] satisfying every equation; unique or an error."""
    import sympy
    basis = nlforms.plus_space_basis(p, 11, B)
    n = len(basis)

    def nl_row(D):
        w = 2 if D % p == 0 else 1
        return [w * _rat(b[D]) for b in basis]

    rows, rhs = [], []
    for D, v in anchors.items():
        rows.append(nl_row(D))
        rhs.append(_rat(v))
    for e in eqs:
        r = [sympy.Integer(0)] * n
        for D, c in e.coeffs.items():
            r = [x + _rat(c) * y for x, y in zip(r, nl_row(D))]
        rows.append(r)
        rhs.append(_rat(e.lhs))
    M, R = sympy.Matrix(rows), sympy.Matrix(rhs)
    rank = M.rank()
    if rank < n:
        raise GWNLError("constraint system is underdetermined (rank %d < %d)" % (rank, n))
    x = (M.T * M).LUsolve(M.T * R)
    if M * x != R:
        raise GWNLError("constraint system is inconsistent")
    form = basis[0].scale(0)
    for c, b in zip(x, basis):
        c = sympy.Rational(c)
        form = form + b.scale(Fraction(int(c.p), int(c.q)))
    return HeegnerSeries.from_plus_form(p, form)


@dataclass
class ConstraintSystem:
    equations: List[LinearEquation]
    phi: HeegnerSeries

    def values(self) -> Dict[int, Fraction]:
        Ds = sorted({D for e in self.equations for D in e.coeffs})
        return {D: self.phi.nl(D) for D in Ds}


def dv_constraint_extraction(lhs_mc: Dict[int, Fraction], prim: PrimTables, p: int = 11,
                             nl0=nlforms.DV_NL0, B: int = nlforms.DEFAULT_B) -> ConstraintSystem:
    """The GW/NL equations at the given degrees plus NL(0), solved in the plus space."""
    eqs = [gwnl_equation(p, prim, d, lhs_mc[d]) for d in sorted(lhs_mc)]
    phi = solve_with_equations(p, {0: as_fraction(nl0)}, eqs, B)
    return ConstraintSystem(eqs, phi)


@dataclass
class CandidateResult:
    d: int
    m: int
    s: Fraction                # norm of beta
    alpha_norm: Fraction       # norm of beta / m
    NL: Fraction
    solved_G: Fraction
    predicted_G: Fraction

    @property
    def agrees(self) -> bool:
        return self.solved_G == self.predicted_G

    def to_json(self) -> dict:
        return {"d": self.d, "m": self.m, "s_times_4": int(4 * self.s), "alpha_norm": frac_str(self.alpha_norm),
                "NL": frac_str(self.NL), "solved_G": frac_str(self.solved_G),
                "predicted_G": frac_str(self.predicted_G), "agrees": self.agrees}


def mc_candidate_extraction(phi: HeegnerSeries, prim: PrimTables, p: int, lhs_raw: Dict[int, Fraction],
                            degrees: Sequence[int], targets=None) -> List[CandidateResult]:
    """Solve the refined relation at each degree for one imprimitive G.

    The unknown at degree d is the target key (m, alpha-norm) with m | d and
    nonzero refined NL; all other keys use the proven or mc values.  With no
    targets given, the unknown is the unique imprimitive key with nonzero NL
    and s >= 0 (or the m = 2, s = 0 key when present).
    """
    out = []
    for d in degrees:
        cs = refined_contributions(phi, prim, p, d, "conjectural")
        cand = [c for c in cs if c.m > 1 and c.s >= 0]
        if targets is not None:
            want = {(m, as_fraction(a)) for m, a in targets}
            cand = [c for c in cand if (c.m, c.s / (c.m * c.m)) in want]
        if not cand:
            continue
        if len(cand) > 1:
            raise GWNLError("degree %d has %d unknown imprimitive keys; underdetermined" % (d, len(cand)))
        u = cand[0]
        rest = sum((c.term for c in cs if c is not u), Fraction(0))
        unit = redgw.fiber_invariant_H3(p, CurveClassKey.k3n2(u.m, u.s, d), FGPair(Fraction(0), Fraction(1)))
        solved = (lhs_raw[d] - rest) / (u.NL * unit)
        out.append(CandidateResult(d, u.m, u.s, u.s / (u.m * u.m), u.NL, solved, u.G))
    return out
