"""
Truncated cohomology rings of (P^{n-1})^k (x P^1) with z-Laurent coefficients,
abelianized integration over Grassmannians, and Chern / Todd class integrals
over zero loci of homogeneous bundles.

Generators are H_1..H_k (H_i^n = 0) and optionally h (h^2 = 0).  Monomials are
exponent tuples in the fixed variable order (H_1, ..., H_k, h).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, combinations_with_replacement, permutations
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .qseries import as_fraction


class RingError(ValueError):
    pass


Mono = Tuple[int, ...]
Poly = Dict[Mono, Fraction]


# -- plain sparse polynomials ----------------------------------------------------

def poly_mul(a: Poly, b: Poly, caps: Optional[Sequence[int]] = None,
             maxdeg: Optional[int] = None) -> Poly:
    """Product; monomials with e_i >= caps[i] or total degree > maxdeg are dropped."""
    out: Dict[Mono, object] = {}
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if maxdeg is not None and da + sum(eb) > maxdeg:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            if caps is not None and any(x >= c for x, c in zip(e, caps)):
                continue
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def poly_add(a: Poly, b: Poly, scale=1) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + scale * c
    return {e: c for e, c in out.items() if c}


def linear(coeffs: Sequence[int]) -> Poly:
    n = len(coeffs)
    return {tuple(1 if j == i else 0 for j in range(n)): c for i, c in enumerate(coeffs) if c}


def one(nvars: int) -> Poly:
    return {(0,) * nvars: 1}


def poly_pow(a: Poly, k: int, nvars: int, caps=None, maxdeg=None) -> Poly:
    out = one(nvars)
    for _ in range(k):
        out = poly_mul(out, a, caps, maxdeg)
    return out


def homogeneous_part(a: Poly, deg: int) -> Poly:
    return {e: c for e, c in a.items() if sum(e) == deg}


def poly_divide_linear(a: Poly, i: int, j: int) -> Poly:
    """Exact quotient a / (x_i - x_j); raises if the remainder is nonzero.

    Division is done in x_i: write a = sum_t x_i^t a_t(others) and run
    synthetic division by (x_i - x_j).
    """
    if not a:
        return {}
    by_rest: Dict[Mono, Dict[int, object]] = {}
    for e, c in a.items():
        rest = e[:i] + (0,) + e[i + 1:]
        by_rest.setdefault(rest, {})[e[i]] = c
    out: Dict[Mono, object] = {}
    rem: Dict[Mono, object] = {}
    for rest, cs in by_rest.items():
        top = max(cs)
        carry = {}
        for t in range(top, 0, -1):
            # coefficient of x_i^t in the current dividend (as poly in x_j)
            cur = dict(carry)
            if t in cs:
                cur[0] = cur.get(0, 0) + cs[t]
            # quotient term x_i^{t-1} * cur ; subtract (x_i - x_j) * that -> carry x_j*cur to x_i^{t-1}
            for je, c in cur.items():
                if c:
                    e = list(rest)
                    e[i] = t - 1
                    e[j] += je
                    key = tuple(e)
                    out[key] = out.get(key, 0) + c
            carry = {je + 1: c for je, c in cur.items() if c}
        # constant term in x_i: cs.get(0) + carry must vanish
        last = dict(carry)
        if 0 in cs:
            last[0] = last.get(0, 0) + cs[0]
        for je, c in last.items():
            if c:
                e = list(rest)
                e[j] += je
                rem[tuple(e)] = rem.get(tuple(e), 0) + c
    if any(rem.values()):
        raise RingError("nonzero remainder in division by x_%d - x_%d" % (i + 1, j + 1))
    return {e: c for e, c in out.items() if c}


def vandermonde_poly(k: int, nvars: int) -> Poly:
    V = one(nvars)
    for i in range(k):
        for j in range(i + 1, k):
            f = [0] * nvars
            f[i], f[j] = 1, -1
            V = poly_mul(V, linear(f))
    return V


def poly_vandermonde_divide(a: Poly, k: int) -> Poly:
    for i in range(k):
        for j in range(i + 1, k):
            a = poly_divide_linear(a, i, j)
    return a


# -- ambient spaces ------------------------------------------------------------------

@dataclass(frozen=True)
class AmbientSpec:
    factors: Tuple[int, ...]               # n_i: H_i^{n_i} = 0, i.e. P^{n_i - 1}
    has_pencil_line: bool = False
    roots: Tuple[Tuple[int, ...], ...] = ()
    weyl_order: int = 1

    @classmethod
    def grassmannian(cls, k: int, n: int, pencil: bool = False) -> "AmbientSpec":
        roots = []
        for i in range(k):
            for j in range(k):
                if i != j:
                    r = [0] * k
                    r[i], r[j] = 1, -1
                    roots.append(tuple(r))
        return cls(tuple([n] * k), pencil, tuple(roots), factorial(k))

    def __post_init__(self):
        rs = set(self.roots)
        if any(tuple(-x for x in r) not in rs for r in rs):
            raise RingError("roots must come in +- pairs")

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def nvars(self) -> int:
        return self.k + (1 if self.has_pencil_line else 0)

    @property
    def caps(self) -> Tuple[int, ...]:
        return tuple(self.factors) + ((2,) if self.has_pencil_line else ())

    @property
    def abelian_dim(self) -> int:
        return sum(n - 1 for n in self.factors) + (1 if self.has_pencil_line else 0)

    @property
    def dim(self) -> int:
        return self.abelian_dim - len(self.roots)

    @property
    def top_monomial(self) -> Mono:
        return tuple(n - 1 for n in self.factors) + ((1,) if self.has_pencil_line else ())

    def is_grassmannian(self) -> bool:
        if len(set(self.factors)) != 1:
            return False
        k = self.k
        return len(self.roots) == k * (k - 1) and self.weyl_order == factorial(k)

    def gens(self) -> List["RingElement"]:
        out = []
        for i in range(self.nvars):
            e = [0] * self.nvars
            e[i] = 1
            out.append(RingElement(self, {tuple(e): {0: Fraction(1)}}))
        return out

    def form(self, coeffs: Sequence[int]) -> Poly:
        """Linear form in (H_1..H_k[, h]) as a Poly."""
        coeffs = list(coeffs) + [0] * (self.nvars - len(coeffs))
        return linear(coeffs)


# -- ring elements with z-Laurent coefficients -----------------------------------

class RingElement:
    """sum over monomials of (Laurent polynomial in z) * H^e h^f."""

    __slots__ = ("ambient", "terms", "zmax")

    def __init__(self, ambient: AmbientSpec, terms=None, zmax: Optional[int] = None):
        self.ambient = ambient
        self.zmax = zmax if zmax is not None else ambient.abelian_dim + 3
        caps = ambient.caps
        clean: Dict[Mono, Dict[int, Fraction]] = {}
        for e, zs in (terms or {}).items():
            if len(e) != len(caps):
                raise RingError("monomial %r has wrong length" % (e,))
            if any(x >= c for x, c in zip(e, caps)):
                continue
            zz = {}
            for zp, c in zs.items():
                c = as_fraction(c)
                if c:
                    if abs(zp) > self.zmax:
                        raise RingError("z^%d outside the window [-%d, %d]" % (zp, self.zmax, self.zmax))
                    zz[zp] = c
            if zz:
                clean[e] = zz
        self.terms = clean

    @classmethod
    def from_poly(cls, ambient: AmbientSpec, p: Poly, zpow: int = 0, **kw) -> "RingElement":
        return cls(ambient, {e: {zpow: c} for e, c in p.items()}, **kw)

    @classmethod
    def scalar(cls, ambient: AmbientSpec, c, zpow: int = 0) -> "RingElement":
        return cls(ambient, {(0,) * ambient.nvars: {zpow: c}})

    def _check(self, other):
        if not isinstance(other, RingElement) or other.ambient != self.ambient:
            raise RingError("ambient mismatch")

    def __add__(self, other):
        self._check(other)
        out = {e: dict(zs) for e, zs in self.terms.items()}
        for e, zs in other.terms.items():
            t = out.setdefault(e, {})
            for zp, c in zs.items():
                t[zp] = t.get(zp, 0) + c
        return RingElement(self.ambient, out, max(self.zmax, other.zmax))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "RingElement":
        c = as_fraction(c)
        return RingElement(self.ambient, {e: {zp: c * v for zp, v in zs.items()}
                                          for e, zs in self.terms.items()}, self.zmax)

    def mul(self, other: "RingElement", zmin: Optional[int] = None) -> "RingElement":
        """Product; z-powers below zmin are dropped on purpose when zmin is given."""
        self._check(other)
        caps = self.ambient.caps
        out: Dict[Mono, Dict[int, object]] = {}
        for ea, za in self.terms.items():
            for eb, zb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if any(x >= c for x, c in zip(e, caps)):
                    continue
                t = out.setdefault(e, {})
                for pa, ca in za.items():
                    for pb, cb in zb.items():
                        zp = pa + pb
                        if zmin is not None and zp < zmin:
                            continue
                        t[zp] = t.get(zp, 0) + ca * cb
        return RingElement(self.ambient, out, max(self.zmax, other.zmax))

    __mul__ = mul

    def __eq__(self, other):
        return isinstance(other, RingElement) and (self - other).is_zero()

    def is_zero(self) -> bool:
        return not self.terms

    def z_coefficient(self, zpow: int) -> Poly:
        return {e: zs[zpow] for e, zs in self.terms.items() if zs.get(zpow)}

    def z_powers(self) -> List[int]:
        return sorted({zp for zs in self.terms.values() for zp in zs})

    def is_weyl_invariant(self) -> bool:
        amb = self.ambient
        k = amb.k if amb.is_grassmannian() else 0
        if k < 2:
            return True
        for e, zs in self.terms.items():
            for perm in (tuple(range(1, k)) + (0,), (1, 0) + tuple(range(2, k))):
                f = tuple(e[perm[i]] for i in range(k)) + e[k:]
                if self.terms.get(f) != zs:
                    return False
        return True

    def sorted_terms(self):
        # graded lex with H_1 < ... < h
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __repr__(self):
        parts = []
        for e, zs in self.sorted_terms()[:6]:
            parts.append("%r:%r" % (e, {k: str(v) for k, v in sorted(zs.items())}))
        more = "" if len(self.terms) <= 6 else ", ..."
        return "RingElement({%s%s})" % (", ".join(parts), more)


def ring_mul(a: RingElement, b: RingElement) -> RingElement:
    return a.mul(b)


def vandermonde_divide(numerator: RingElement, k: Optional[int] = None,
                       lift_degree: Optional[int] = None) -> RingElement:
    """Exact division by prod_{i<j} (H_i - H_j).

    `numerator` must be given on a lifted ambient (caps raised by at least
    k - 1); the quotient is then truncated to the real caps.  Each z-power is
    divided separately; any remainder raises RingError.
    """
    amb = numerator.ambient
    k = amb.k if k is None else k
    out: Dict[Mono, Dict[int, Fraction]] = {}
    for zp in numerator.z_powers():
        q = poly_vandermonde_divide(numerator.z_coefficient(zp), k)
        for e, c in q.items():
            out.setdefault(e, {})[zp] = c
    return RingElement(amb, out, numerator.zmax)


def lifted(amb: AmbientSpec, extra: int) -> AmbientSpec:
    """Same generators with H-caps raised by `extra` (and no roots)."""
    return AmbientSpec(tuple(n + extra for n in amb.factors), amb.has_pencil_line)


def truncate_to(x: RingElement, amb: AmbientSpec) -> RingElement:
    return RingElement(amb, x.terms, x.zmax)


# -- integration -------------------------------------------------------------------

def integrate_abelian(x, ambient: Optional[AmbientSpec] = None, zpow: int = 0) -> Fraction:
    """Coefficient of the top monomial of (P^{n_i-1})_i (x P^1)."""
    if isinstance(x, RingElement):
        ambient = x.ambient
        return as_fraction(x.terms.get(ambient.top_monomial, {}).get(zpow, 0))
    return as_fraction(x.get(ambient.top_monomial, 0))


def root_product(ambient: AmbientSpec) -> Poly:
    out = one(ambient.nvars)
    for r in ambient.roots:
        out = poly_mul(out, ambient.form(r), ambient.caps)
    return out


def martin_integrate(ambient: AmbientSpec, x, check: bool = True) -> Fraction:
    """|W|^{-1} * abelian integral of x * prod over roots."""
    if isinstance(x, RingElement):
        if check and not x.is_weyl_invariant():
            raise RingError("class is not Weyl invariant")
        x = x.z_coefficient(0)
    elif check and not RingElement.from_poly(ambient, x).is_weyl_invariant():
        raise RingError("class is not Weyl invariant")
    prod = poly_mul(x, root_product(ambient), ambient.caps)
    return integrate_abelian(prod, ambient) / ambient.weyl_order


def jacobi_target(ambient: AmbientSpec) -> Mono:
    n = ambient.factors[0]
    k = ambient.k
    return tuple(n - 1 - i for i in range(k)) + ((1,) if ambient.has_pencil_line else ())


def grassmannian_integrate(ambient: AmbientSpec, x: Poly) -> Fraction:
    """Integral of a symmetric class over Gr(k,n) (x P^1).

    Uses int f = [x_1^{n-1} x_2^{n-2} ... x_k^{n-k}] (f * prod_{i<j}(x_i - x_j)),
    which equals the Martin formula for Weyl-invariant f and needs only the
    Vandermonde (degree k(k-1)/2) instead of the full root product.
    """
    if not ambient.is_grassmannian():
        raise RingError("not a Grassmannian ambient")
    V = vandermonde_poly(ambient.k, ambient.nvars)
    return as_fraction(pair_with(x, V, one(ambient.nvars), jacobi_target(ambient)))


def pair_with(f: Poly, V: Poly, big: Poly, target: Mono):
    """[target] (f * V * big) computed by lookups into `big`."""
    G = poly_mul(f, V)
    s = 0
    for b, cb in G.items():
        r = tuple(t - x for t, x in zip(target, b))
        if min(r) < 0:
            continue
        c = big.get(r)
        if c:
            s += cb * c
    return s


def integrate(ambient: AmbientSpec, x: Poly) -> Fraction:
    if ambient.is_grassmannian() and ambient.k > 1:
        return grassmannian_integrate(ambient, x)
    if ambient.roots:
        return martin_integrate(ambient, x, check=False)
    return integrate_abelian(x, ambient)


# -- families ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    name: str
    ambient: AmbientSpec
    summands: Tuple[Tuple[int, ...], ...]   # linear forms over (H_1..H_k[, h])
    polarization: Tuple[int, ...]
    p: Optional[int] = None                 # q(H) = 2p for the fibers

    @property
    def fiber_dim(self) -> int:
        return self.ambient.dim - len(self.summands) - (1 if self.ambient.has_pencil_line else 0)

    @property
    def dim(self) -> int:
        return self.ambient.dim - len(self.summands)

    def form(self, coeffs) -> Poly:
        return self.ambient.form(coeffs)

    def summand_degree(self, summand, multidegree) -> int:
        return sum(a * b for a, b in zip(summand, multidegree))


def _pad(t, n):
    return tuple(t) + (0,) * (n - len(t))


def fano_pencil() -> FamilySpec:
    amb = AmbientSpec.grassmannian(2, 6, pencil=True)
    summ = tuple(_pad([a, b, 1], 3) for a, b in [(3, 0), (2, 1), (1, 2), (0, 3)])
    return FamilySpec("fano-pencil", amb, summ, (1, 1, 0), p=3)


def fano_fourfold() -> FamilySpec:
    amb = AmbientSpec.grassmannian(2, 6)
    summ = tuple((a, b) for a, b in [(3, 0), (2, 1), (1, 2), (0, 3)])
    return FamilySpec("fano-fourfold", amb, summ, (1, 1), p=3)


def dv_pencil() -> FamilySpec:
    amb = AmbientSpec.grassmannian(6, 10, pencil=True)
    summ = []
    for T in combinations(range(6), 3):
        f = [0] * 7
        for t in T:
            f[t] = 1
        f[6] = 1
        summ.append(tuple(f))
    return FamilySpec("dv-pencil", amb, tuple(summ), (1,) * 6 + (0,), p=11)


def dv_fourfold() -> FamilySpec:
    amb = AmbientSpec.grassmannian(6, 10)
    summ = []
    for T in combinations(range(6), 3):
        f = [0] * 6
        for t in T:
            f[t] = 1
        summ.append(tuple(f))
    return FamilySpec("dv-fourfold", amb, tuple(summ), (1,) * 6, p=11)


BUILTIN = {"fano-pencil": fano_pencil, "fano-fourfold": fano_fourfold,
           "dv-pencil": dv_pencil, "dv-fourfold": dv_fourfold}


def family_by_name(name: str) -> FamilySpec:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise ValueError("unknown family %r (known: %s)" % (name, ", ".join(sorted(BUILTIN))))


class ZeroLocus:
    """A family with its Euler class e(E) cached, for repeated integrals over X."""

    def __init__(self, fam: FamilySpec):
        self.fam = fam
        self.amb = fam.ambient

    @cached_property
    def euler_class(self) -> Poly:
        e = one(self.amb.nvars)
        for s in self.fam.summands:
            e = poly_mul(e, self.amb.form(s), self.amb.caps)
        return e

    @cached_property
    def _vandermonde(self) -> Poly:
        return vandermonde_poly(self.amb.k, self.amb.nvars)

    def integrate(self, f: Poly) -> Fraction:
        """int_X f = int_Y f * e(E)."""
        amb = self.amb
        if amb.is_grassmannian() and amb.k > 1:
            target = jacobi_target(amb)
            return as_fraction(pair_with(f, self._vandermonde, self.euler_class, target))
        return integrate(amb, poly_mul(f, self.euler_class, amb.caps))


# -- Chern and Todd classes -------------------------------------------------------

def _log1p_linear(form: Poly, nvars: int, maxdeg: int, caps) -> Poly:
    """log(1 + l) for a linear form l, up to degree maxdeg."""
    out: Poly = {}
    pw = one(nvars)
    for m in range(1, maxdeg + 1):
        pw = poly_mul(pw, form, caps, maxdeg)
        out = poly_add(out, pw, Fraction((-1) ** (m + 1), m))
    return out


def _bernoulli_log_td(maxdeg: int) -> List[Fraction]:
    """Coefficients of log(x / (1 - e^{-x})) = x/2 + sum ... up to x^maxdeg."""
    # series of (1 - e^{-x})/x = sum (-1)^m x^m / (m+1)!
    g = [Fraction((-1) ** m, factorial(m + 1)) for m in range(maxdeg + 1)]
    # log of g, then negate
    lg = [Fraction(0)] * (maxdeg + 1)
    for n in range(1, maxdeg + 1):
        s = n * g[n]
        for kk in range(1, n):
            s -= kk * lg[kk] * g[n - kk]
        lg[n] = s / n
    return [-c for c in lg]


def _apply_series(coeffs: Sequence[Fraction], form: Poly, nvars: int, maxdeg: int, caps) -> Poly:
    out: Poly = {}
    pw = one(nvars)
    for m in range(1, maxdeg + 1):
        pw = poly_mul(pw, form, caps, maxdeg)
        if coeffs[m]:
            out = poly_add(out, pw, coeffs[m])
    return out


def poly_exp(a: Poly, nvars: int, maxdeg: int, caps) -> Poly:
    """exp(a) for a with no constant term."""
    out = one(nvars)
    term = one(nvars)
    for m in range(1, maxdeg + 1):
        term = {e: c / m for e, c in poly_mul(term, a, caps, maxdeg).items()}
        if not term:
            break
        out = poly_add(out, term)
    return out


def _tangent_roots(amb: AmbientSpec):
    """(weights of T_ambient as (form, multiplicity) with sign +1), (root forms with sign -1)."""
    plus = []
    for i, n in enumerate(amb.factors):
        f = [0] * amb.nvars
        f[i] = 1
        plus.append((tuple(f), n))
    if amb.has_pencil_line:
        f = [0] * amb.nvars
        f[-1] = 1
        plus.append((tuple(f), 2))
    minus = [tuple(list(r) + [0] * (amb.nvars - len(r))) for r in amb.roots]
    return plus, minus


def chern_log(fam: FamilySpec, maxdeg: int, include_base: bool = True) -> Poly:
    """log( c(T_Y) / c(E) ) up to degree maxdeg."""
    amb = fam.ambient
    nv, caps = amb.nvars, amb.caps
    plus, minus = _tangent_roots(amb)
    if not include_base:
        plus = [(f, m) for f, m in plus if not (amb.has_pencil_line and f[-1])]
    out: Poly = {}
    for f, mult in plus:
        out = poly_add(out, _log1p_linear(linear(f), nv, maxdeg, caps), mult)
    for f in minus:
        out = poly_add(out, _log1p_linear(linear(f), nv, maxdeg, caps), -1)
    for s in fam.summands:
        out = poly_add(out, _log1p_linear(amb.form(s), nv, maxdeg, caps), -1)
    return out


def todd_log(fam: FamilySpec, maxdeg: int, include_base: bool = False) -> Poly:
    """log( td(T_Y) / td(E) ), without the base P^1 factor by default."""
    amb = fam.ambient
    nv, caps = amb.nvars, amb.caps
    coeffs = _bernoulli_log_td(maxdeg)
    plus, minus = _tangent_roots(amb)
    if not include_base:
        plus = [(f, m) for f, m in plus if not (amb.has_pencil_line and f[-1])]
    out: Poly = {}
    for f, mult in plus:
        out = poly_add(out, _apply_series(coeffs, linear(f), nv, maxdeg, caps), mult)
    for f in minus:
        out = poly_add(out, _apply_series(coeffs, linear(f), nv, maxdeg, caps), -1)
    for s in fam.summands:
        out = poly_add(out, _apply_series(coeffs, amb.form(s), nv, maxdeg, caps), -1)
    return out


def _check_summands(fam: FamilySpec):
    for s in fam.summands:
        if not any(s):
            raise RingError("bundle summand with zero first Chern class: c(E) not invertible as expected")


def euler_characteristic(fam: FamilySpec, locus: Optional[ZeroLocus] = None) -> int:
    _check_summands(fam)
    locus = locus or ZeroLocus(fam)
    amb = fam.ambient
    top = fam.dim
    c = poly_exp(chern_log(fam, top), amb.nvars, top, amb.caps)
    val = locus.integrate(homogeneous_part(c, top))
    if val.denominator != 1:
        raise RingError("non-integral Euler characteristic %s" % val)
    return int(val)


def grr_hodge_degree(fam: FamilySpec, locus: Optional[ZeroLocus] = None) -> Fraction:
    """int_X td(T_X / pi^* T_P1): the degree of R pi_* O_X, equal to 3 c_1(L)."""
    if not fam.ambient.has_pencil_line:
        raise RingError("GRR degree needs a pencil family")
    _check_summands(fam)
    locus = locus or ZeroLocus(fam)
    amb = fam.ambient
    top = fam.dim
    td = poly_exp(todd_log(fam, top), amb.nvars, top, amb.caps)
    return locus.integrate(homogeneous_part(td, top))


def singular_fiber_count(e_total: int, e_smooth: int = 324, e_singular: int = 300) -> Fraction:
    if e_smooth == e_singular:
        raise ValueError("e_smooth must differ from e_singular")
    delta = Fraction(2 * e_smooth - e_total, e_smooth - e_singular)
    return delta
