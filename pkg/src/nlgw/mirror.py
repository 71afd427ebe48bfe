"""
Small I-functions of the pencil total spaces in fiber classes, the mirror
map, and one-point genus-0 invariants.

I_d is homogeneous of degree 0 in (H, h, z), so I_d = sum_j z^{-j} C_{d,j}
with C_{d,j} a class of degree j.  Two exact routes compute the C_{d,j}:

* full: expand every composition at z = 1 as a polynomial in (H, h) truncated
  by total degree, sum, and divide by the Vandermonde exactly.
* line: restrict to H_i = eps * v_i for integer directions v and expand in
  eps; negative eps-powers must cancel, and the symmetric C_{d,j} are fitted
  from several directions (plus spare ones for verification).

The full route is used for Gr(2,6); the line route makes Gr(6,10) cheap.
"""

from __future__ import annotations

import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import sympy
from gmpy2 import mpq

from .cohoring import (AmbientSpec, FamilySpec, Poly, RingElement, RingError, ZeroLocus,
                       homogeneous_part, linear, one, poly_add, poly_mul,
                       poly_vandermonde_divide)
from .qseries import FracSeries, as_fraction, divisors, moebius

log = logging.getLogger(__name__)


class MirrorError(RuntimeError):
    pass


def compositions(d: int, k: int):
    if k == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in compositions(d - first, k - 1):
            yield (first,) + rest


# -- the three factors as ring elements (spec-level, exact in z) ---------------

def toric_factor(amb: AmbientSpec, multidegree: Sequence[int]) -> RingElement:
    """prod_i prod_{k=1}^{d_i} (H_i + k z)^{-n_i}; multidegree may include the P^1 degree."""
    nv = amb.nvars
    res = RingElement.scalar(amb, 1)
    ns = list(amb.factors) + ([2] if amb.has_pencil_line else [])
    for i, di in enumerate(multidegree):
        n = ns[i]
        for kk in range(1, di + 1):
            # (H + k z)^{-n} = sum_j binom(-n, j) H^j (k z)^{-n-j}
            terms = {}
            for j in range(amb.caps[i]):
                e = [0] * nv
                e[i] = j
                c = Fraction(_binom_neg(n, j), kk ** (n + j))
                terms[tuple(e)] = {-n - j: c}
            res = res * RingElement(amb, terms, zmax=10 ** 6)
    return res


def _binom_neg(n: int, j: int) -> int:
    """binom(-n, j)."""
    return (-1) ** j * comb(n + j - 1, j)


def twist_factor(amb: AmbientSpec, summands, multidegree: Sequence[int]) -> RingElement:
    """prod_T prod_{k=1}^{l_T . beta} (l_T + k z)."""
    res = RingElement.scalar(amb, 1)
    for s in summands:
        deg = sum(a * b for a, b in zip(s, multidegree))
        if deg < 0:
            raise MirrorError("negative pairing %d with summand %r" % (deg, s))
        lin = amb.form(s)
        for kk in range(1, deg + 1):
            terms = {e: {0: c} for e, c in lin.items()}
            zero = (0,) * amb.nvars
            terms.setdefault(zero, {})[1] = Fraction(kk)
            res = res * RingElement(amb, terms, zmax=10 ** 6)
    return res


@dataclass(frozen=True)
class RootFactor:
    """sign * numerator / prod_{i<j}(H_i - H_j)."""
    sign: int
    numerator: RingElement


def root_factor(amb: AmbientSpec, composition: Sequence[int]) -> RootFactor:
    k = amb.k
    num = RingElement.scalar(amb, 1)
    sign = 1
    for i in range(k):
        for j in range(i + 1, k):
            m = composition[i] - composition[j]
            if m % 2:
                sign = -sign
            f = [0] * amb.nvars
            f[i], f[j] = 1, -1
            terms = {e: {0: c} for e, c in linear(f).items()}
            if m:
                terms[(0,) * amb.nvars] = {1: Fraction(m)}
            num = num * RingElement(amb, terms, zmax=10 ** 6)
    return RootFactor(sign, num)


# -- full route ------------------------------------------------------------------

def _inv_power_series(n: int, kk: int, var: int, nv: int, maxdeg: int) -> Poly:
    """(x_var + kk)^{-n} at z = 1, up to degree maxdeg."""
    out = {}
    for j in range(maxdeg + 1):
        e = [0] * nv
        e[var] = j
        out[tuple(e)] = Fraction(_binom_neg(n, j), kk ** (n + j))
    return out


def _full_I(fam: FamilySpec, d: int, jmax: int) -> Dict[int, Poly]:
    """C_{d,j} for j <= jmax as truncated polynomials (per-variable caps applied at the end)."""
    amb = fam.ambient
    k, nv = amb.k, amb.nvars
    degV = k * (k - 1) // 2
    T = jmax + degV
    hcap = [10 ** 6] * k + ([2] if amb.has_pencil_line else [])
    total: Poly = {}
    for comp in compositions(d, k):
        md = list(comp) + ([0] if amb.has_pencil_line else [])
        term = one(nv)
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                m = comp[i] - comp[j]
                if m % 2:
                    sign = -sign
                f = [0] * nv
                f[i], f[j] = 1, -1
                lin = linear(f)
                if m:
                    lin = poly_add(lin, {(0,) * nv: Fraction(m)})
                term = poly_mul(term, lin, hcap, T)
        for i in range(k):
            for kk in range(1, comp[i] + 1):
                term = poly_mul(term, _inv_power_series(amb.factors[i], kk, i, nv, T), hcap, T)
        for s in fam.summands:
            deg = sum(a * b for a, b in zip(s, md))
            lin = amb.form(s)
            for kk in range(1, deg + 1):
                term = poly_mul(term, poly_add(lin, {(0,) * nv: Fraction(kk)}), hcap, T)
        total = poly_add(total, term, sign)
    q = poly_vandermonde_divide(total, k)
    caps = amb.caps
    out = {}
    for j in range(jmax + 1):
        out[j] = {e: c for e, c in homogeneous_part(q, j).items()
                  if all(x < cp for x, cp in zip(e, caps))}
    return out


# -- line route ----------------------------------------------------------------------

def _ser_mul(a, b, L):
    out = [mpq(0)] * L
    for i, x in enumerate(a):
        if i >= L:
            break
        if x:
            for j in range(min(L - i, len(b))):
                out[i + j] += x * b[j]
    return out


def _ser_exp(a, L):
    e = [mpq(0)] * L
    e[0] = mpq(1)
    for n in range(1, L):
        s = mpq(0)
        for kk in range(1, n + 1):
            if a[kk]:
                s += kk * a[kk] * e[n - kk]
        e[n] = s / n
    return e


def line_values(fam: FamilySpec, d: int, v: Sequence[int], jmax: int):
    """[(A_j, B_j)]: C_{d,j}(eps v, eps h) = eps^j (A_j + h B_j)."""
    amb = fam.ambient
    k = amb.k
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    NP = len(pairs)
    L = jmax + NP + 1
    accA = [mpq(0)] * (NP + jmax + 1)
    accB = [mpq(0)] * (NP + jmax + 1)
    v = [mpq(x) for x in v]
    summands = [(sum(s[i] * v[i] for i in range(k)), s[k] if amb.has_pencil_line else 0,
                 s[:k]) for s in fam.summands]
    for comp in compositions(d, k):
        sign = 1
        P = 0
        R = [mpq(1)]
        const = mpq(1)
        for (i, j) in pairs:
            m = comp[i] - comp[j]
            if m % 2:
                sign = -sign
            if m:
                a = v[i] - v[j]
                P += 1
                R = _ser_mul(R + [mpq(0)], [mpq(m), a], len(R) + 1)
                const *= a
        la = [mpq(0)] * L
        lb = [mpq(0)] * L
        c0 = mpq(1)
        for i in range(k):
            n = amb.factors[i]
            for kk in range(1, comp[i] + 1):
                c0 /= mpq(kk) ** n
                x = v[i] / kk
                pw = mpq(1)
                for e in range(1, L):
                    pw *= x
                    la[e] -= n * (1 if e % 2 else -1) * pw / e
        for lv, hc, s in summands:
            deg = sum(a * b for a, b in zip(s, comp))
            for kk in range(1, deg + 1):
                c0 *= kk
                x = lv / kk
                pw = mpq(1)   # x^{e-1}
                for e in range(1, L):
                    sg = 1 if e % 2 else -1
                    lb[e] += hc * sg * pw / kk
                    pw *= x
                    la[e] += sg * pw / e
        ea = _ser_exp(la, L)
        eb = _ser_mul(ea, lb, L)
        fa = _ser_mul(R, ea, L)
        fb = _ser_mul(R, eb, L)
        scale = sign * c0 / const
        for e in range(L):
            pw = e - P
            if pw > jmax:
                break
            accA[pw + NP] += scale * fa[e]
            accB[pw + NP] += scale * fb[e]
    for i in range(NP):
        if accA[i] or accB[i]:
            raise MirrorError("Vandermonde divisibility failed at degree %d (eps^%d)" % (d, i - NP))
    return [(accA[NP + j], accB[NP + j]) for j in range(jmax + 1)]


def partitions(n: int, maxlen: int, maxpart: Optional[int] = None):
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    if maxlen == 0:
        return
    for p in range(min(n, maxpart), 0, -1):
        for rest in partitions(n - p, maxlen - 1, p):
            yield (p,) + rest


def msym_monomials(lam, k: int):
    return set(permutations(tuple(lam) + (0,) * (k - len(lam))))


def msym_eval(lam, v) -> mpq:
    s = mpq(0)
    for e in msym_monomials(lam, len(v)):
        t = mpq(1)
        for x, a in zip(v, e):
            if a:
                t *= mpq(x) ** a
        s += t
    return s


def _directions(k: int, count: int, seed: int = 20240521):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        v = rng.sample(range(1, 8 * k + 40), k)
        if v not in out:
            out.append(v)
    return out


def _fit(vals_by_dir, dirs, basis, extra: int):
    """Solve sum_l c_l m_l(v) = val(v) exactly; spare directions verify."""
    if not basis:
        if any(x for x in vals_by_dir):
            raise MirrorError("nonzero value where the symmetric basis is empty")
        return {}
    n = len(basis)
    M = sympy.Matrix([[sympy.Rational(int(msym_eval(l, v).numerator), int(msym_eval(l, v).denominator))
                       for l in basis] for v in dirs])
    rhs = sympy.Matrix([sympy.Rational(int(x.numerator), int(x.denominator)) for x in vals_by_dir])
    sol = M[:n, :].LUsolve(rhs[:n, :]) if M[:n, :].rank() == n else None
    if sol is None:
        sol = (M.T * M).LUsolve(M.T * rhs)
    if M * sol != rhs:
        raise MirrorError("symmetric fit inconsistent across directions")
    return {l: Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q)) for l, c in zip(basis, sol)}


def _line_I(fam: FamilySpec, d: int, jmax: int, extra: int = 2) -> Dict[int, Poly]:
    amb = fam.ambient
    k = amb.k
    bases = {j: (list(partitions(j, k)), list(partitions(j - 1, k)) if j else []) for j in range(jmax + 1)}
    need = max(max(len(a), len(b)) for a, b in bases.values())
    dirs = _directions(k, need + extra)
    vals = [line_values(fam, d, v, jmax) for v in dirs]
    out = {}
    nv = amb.nvars
    for j in range(jmax + 1):
        A, B = bases[j]
        cA = _fit([vals[i][j][0] for i in range(len(dirs))], dirs, A, extra)
        cB = _fit([vals[i][j][1] for i in range(len(dirs))], dirs, B, extra)
        if B and not amb.has_pencil_line:
            if any(cB.values()):
                raise MirrorError("h-part without a pencil factor")
        poly: Poly = {}
        for lam, c in cA.items():
            for e in msym_monomials(lam, k):
                key = e + ((0,) if amb.has_pencil_line else ())
                poly[key] = poly.get(key, 0) + c
        for lam, c in cB.items():
            for e in msym_monomials(lam, k):
                key = e + (1,)
                poly[key] = poly.get(key, 0) + c
        caps = amb.caps
        out[j] = {e: c for e, c in poly.items() if c and all(x < cp for x, cp in zip(e, caps))}
    return out


# -- I-functions ------------------------------------------------------------------

@dataclass
class IFunction:
    family: FamilySpec
    jmax: int
    per_degree: Dict[int, RingElement] = field(default_factory=dict)
    route: str = "full"

    def component(self, d: int, j: int) -> Poly:
        return self.per_degree[d].z_coefficient(-j)

    @property
    def d_max(self) -> int:
        return max(self.per_degree)


def default_route(fam: FamilySpec) -> str:
    return "full" if fam.ambient.k <= 3 else "line"


def assemble_I_fiber(fam: FamilySpec, d: int, jmax: Optional[int] = None,
                     route: Optional[str] = None) -> RingElement:
    """I_d as a ring element, keeping z^{-j} for j <= jmax."""
    amb = fam.ambient
    if d < 0:
        raise ValueError("degree must be >= 0")
    if jmax is None:
        jmax = amb.dim if amb.k <= 3 else 2
    route = route or default_route(fam)
    if d == 0:
        return RingElement.scalar(amb, 1)
    if route == "full":
        comps = _full_I(fam, d, jmax)
    elif route == "line":
        comps = _line_I(fam, d, jmax)
    else:
        raise ValueError("unknown route %r" % (route,))
    terms = {}
    for j, poly in comps.items():
        for e, c in poly.items():
            terms.setdefault(e, {})[-j] = c
    return RingElement(amb, terms, zmax=max(jmax, amb.abelian_dim) + 3)


WORKERS_ENV = "NLGW_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError("%s must be a positive integer, got %r" % (WORKERS_ENV, raw)) from None
    if n < 1:
        raise ValueError("%s must be a positive integer, got %r" % (WORKERS_ENV, raw))
    return n


def compute_I(fam: FamilySpec, d_max: int, jmax: int = 2, route: Optional[str] = None,
              progress: Optional[Callable] = None, workers: Optional[int] = None) -> IFunction:
    """I_0 .. I_{d_max}; degrees are independent and go to a process pool when workers > 1."""
    route = route or default_route(fam)
    workers = worker_count() if workers is None else workers
    I = IFunction(fam, jmax, route=route)
    degrees = range(d_max + 1)
    if workers > 1 and d_max > 0:
        with ProcessPoolExecutor(max_workers=min(workers, d_max + 1)) as ex:
            parts = ex.map(assemble_I_fiber, [fam] * len(degrees), degrees,
                           [jmax] * len(degrees), [route] * len(degrees))
            for d, part in zip(degrees, parts):
                I.per_degree[d] = part
                if progress:
                    progress({"stage": "I", "family": fam.name, "degree": d})
        return I
    for d in degrees:
        I.per_degree[d] = assemble_I_fiber(fam, d, jmax, route)
        if progress:
            progress({"stage": "I", "family": fam.name, "degree": d})
    return I


# -- mirror map ----------------------------------------------------------------------

@dataclass
class MirrorMapData:
    f0: FracSeries
    f1: FracSeries
    f2: FracSeries


def _coef_list(f: FracSeries, n: int) -> List[Fraction]:
    return [f[i] for i in range(n)]


def mirror_map(I: IFunction, d_max: Optional[int] = None) -> MirrorMapData:
    fam = I.family
    amb = fam.ambient
    d_max = I.d_max if d_max is None else d_max
    k = amb.k
    e1 = tuple(1 if i == 0 else 0 for i in range(amb.nvars))
    eh = (0,) * k + (1,) if amb.has_pencil_line else None
    f0, f1, f2 = {}, {}, {}
    for d in range(d_max + 1):
        el = I.per_degree[d]
        if any(zp > 0 for zp in el.z_powers()):
            raise MirrorError("positive z-power in I_%d" % d)
        f0[d] = el.z_coefficient(0).get((0,) * amb.nvars, Fraction(0))
        c1 = el.z_coefficient(-1)
        f1[d] = c1.get(e1, Fraction(0))
        f2[d] = c1.get(eh, Fraction(0)) if eh else Fraction(0)
        # C_{d,1} must be a combination of the Plucker class and h
        extra = {e: c for e, c in c1.items() if e != eh and sum(e[:k]) == 1 and c != f1[d]}
        if extra:
            raise MirrorError("degree-1 part of I_%d is not a multiple of the polarization" % d)
    n = d_max + 1
    return MirrorMapData(FracSeries(f0, n), FracSeries(f1, n), FracSeries(f2, n))


def series_exp(a: FracSeries) -> FracSeries:
    """exp(a) for a = O(q)."""
    if a.valuation() < 1:
        raise ValueError("exp needs a = O(q)")
    n = a.order
    e = [Fraction(0)] * n
    e[0] = Fraction(1)
    for m in range(1, n):
        s = Fraction(0)
        for kk in range(1, m + 1):
            c = a.coeffs.get(kk)
            if c:
                s += kk * c * e[m - kk]
        e[m] = s / m
    return FracSeries.from_list(e)


def compose(a: FracSeries, qs: FracSeries) -> FracSeries:
    """a(q(Q)) for q(Q) = Q + O(Q^2)."""
    n = min(a.order, qs.order)
    out = FracSeries({}, n)
    pw = FracSeries.constant(1, n)
    for i in range(n):
        if i:
            pw = (pw * qs).truncate(n)
        c = a.coeffs.get(i)
        if c:
            out = out + pw.scale(c)
    return out.truncate(n)


def q_of_Q(ratio: FracSeries, d_max: int) -> FracSeries:
    """q as a series in Q, where Q = q exp(ratio(q)) and ratio = f1/f0 = O(q).

    Fixed point q <- Q exp(-ratio(q)); each pass fixes one more coefficient.
    """
    n = d_max + 1
    ratio = ratio.truncate(n)
    if ratio.coeffs.get(0):
        raise MirrorError("f1/f0 must vanish at q = 0")
    Q = FracSeries({1: 1}, n)
    qs = Q
    for _ in range(n):
        qs = (Q * series_exp(-compose(ratio, qs)).truncate(n - 1)).truncate(n)
    back = (qs * series_exp(compose(ratio, qs)).truncate(n - 1)).truncate(n)
    if not back.equal_to(Q):
        raise MirrorError("mirror map inversion failed")
    return qs


def invert_mirror_variable(series: FracSeries, ratio: FracSeries, d_max: int) -> FracSeries:
    """Re-expand a q-series in Q."""
    return compose(series.truncate(d_max + 1), q_of_Q(ratio, d_max))


# -- J-function and invariants -----------------------------------------------------

class QRingSeries:
    """sum_d q^d x_d with x_d ring elements (d < order)."""

    def __init__(self, amb: AmbientSpec, coeffs: Dict[int, RingElement], order: int):
        self.amb = amb
        self.order = order
        self.coeffs = {d: x for d, x in coeffs.items() if d < order and not x.is_zero()}

    def get(self, d: int) -> RingElement:
        return self.coeffs.get(d, RingElement(self.amb, {}))

    def __add__(self, other):
        out = dict(self.coeffs)
        for d, x in other.coeffs.items():
            out[d] = out[d] + x if d in out else x
        return QRingSeries(self.amb, out, min(self.order, other.order))

    def mul(self, other, zmin: int):
        n = min(self.order, other.order)
        out: Dict[int, RingElement] = {}
        for da, xa in self.coeffs.items():
            for db, xb in other.coeffs.items():
                if da + db < n:
                    y = xa.mul(xb, zmin)
                    out[da + db] = out[da + db] + y if da + db in out else y
        return QRingSeries(self.amb, out, n)

    def scale_series(self, s: FracSeries):
        n = min(self.order, s.order)
        out: Dict[int, RingElement] = {}
        for d, x in self.coeffs.items():
            for e, c in s.coeffs.items():
                if d + e < n:
                    y = x.scale(c)
                    out[d + e] = out[d + e] + y if d + e in out else y
        return QRingSeries(self.amb, out, n)


def j_function(I: IFunction, d_max: Optional[int] = None) -> QRingSeries:
    """e^{-t/z} I / I_0 in the q variable, truncated at z^{-jmax}."""
    amb = I.family.ambient
    d_max = I.d_max if d_max is None else d_max
    n = d_max + 1
    jmax = I.jmax
    zmin = -jmax
    mm = mirror_map(I, d_max)
    inv0 = mm.f0.inverse()
    Iq = QRingSeries(amb, {d: I.per_degree[d] for d in range(n)}, n).scale_series(inv0)
    # t/z as a q-series of ring elements: the z^{-1} part of I/I_0
    tz = QRingSeries(amb, {d: RingElement(amb, {e: {-1: c} for e, c in Iq.get(d).z_coefficient(-1).items()})
                           for d in range(n)}, n)
    # exp(-t/z) = sum (-t/z)^m / m!, m <= jmax
    neg = QRingSeries(amb, {d: x.scale(-1) for d, x in tz.coeffs.items()}, n)
    ex = QRingSeries(amb, {0: RingElement.scalar(amb, 1)}, n)
    term = QRingSeries(amb, {0: RingElement.scalar(amb, 1)}, n)
    for m in range(1, jmax + 1):
        term = term.mul(neg, zmin)
        term = QRingSeries(amb, {d: x.scale(Fraction(1, m)) for d, x in term.coeffs.items()}, n)
        ex = ex + term
    return ex.mul(Iq, zmin)


def check_mirror_shape(J: QRingSeries) -> bool:
    """e^{-t/z} I/I_0 = 1 + O(z^{-2})."""
    for d in range(J.order):
        x = J.get(d)
        for zp in x.z_powers():
            if zp > 0 or zp == -1 or (zp == 0 and d > 0):
                raise MirrorError("J has a z^%d term in degree %d" % (zp, d))
    return True


def to_Q(J: QRingSeries, I: IFunction, d_max: Optional[int] = None) -> QRingSeries:
    """Re-expand a q-series of ring elements in the mirror variable Q."""
    d_max = J.order - 1 if d_max is None else d_max
    n = d_max + 1
    mm = mirror_map(I, d_max)
    ratio = (mm.f1 / mm.f0).truncate(n)
    qs = q_of_Q(ratio, d_max)
    pw = [FracSeries.constant(1, n)]
    for i in range(1, n):
        pw.append((pw[-1] * qs).truncate(n))
    out: Dict[int, RingElement] = {}
    for d, x in J.coeffs.items():
        for e, c in pw[d].coeffs.items():
            y = x.scale(c)
            out[e] = out[e] + y if e in out else y
    return QRingSeries(J.amb, out, n)


@dataclass
class FamilyInvariants:
    """One-point invariants <insertion psi^k> of the total space, indexed by d."""
    family: str
    insertion: Tuple[int, ...]
    power: int
    k: int
    values: Dict[int, Fraction]
    dimension_ok: bool = True


def power_of_form(amb: AmbientSpec, form, power: int) -> Poly:
    f = amb.form(form)
    out = one(amb.nvars)
    for _ in range(power):
        out = poly_mul(out, f, amb.caps)
    return out


def family_invariants(fam: FamilySpec, d_max: int, insertion=None, power: int = 3, k: int = 0,
                      I: Optional[IFunction] = None, locus: Optional[ZeroLocus] = None,
                      progress: Optional[Callable] = None) -> FamilyInvariants:
    """<ins^power psi^k>_{0,d} for d = 1..d_max from [Q^d z^{-2-k}] of J, paired with e(E)."""
    amb = fam.ambient
    insertion = tuple(fam.polarization) if insertion is None else tuple(insertion)
    jneed = 2 + k
    if I is None or I.jmax < jneed or I.d_max < d_max:
        I = compute_I(fam, d_max, jneed, progress=progress)
    if power + jneed != fam.dim:
        return FamilyInvariants(fam.name, insertion, power, k,
                                {d: Fraction(0) for d in range(1, d_max + 1)}, dimension_ok=False)
    J = j_function(I, d_max)
    check_mirror_shape(J)
    JQ = to_Q(J, I, d_max)
    locus = locus or ZeroLocus(fam)
    ins = power_of_form(amb, insertion, power)
    vals = {}
    for d in range(1, d_max + 1):
        cls = JQ.get(d).z_coefficient(-jneed)
        vals[d] = locus.integrate(poly_mul(ins, cls, amb.caps))
    return FamilyInvariants(fam.name, insertion, power, k, vals)


def family_invariant(fam: FamilySpec, insertion, d: int, k: int = 0, power: int = 3, **kw) -> Fraction:
    return family_invariants(fam, d, insertion, power, k, **kw).values[d]


def mc_subtract_family(values: Dict[int, Fraction], residue_of: Callable[[int], int],
                       weight_exponent: int = -2) -> Dict[int, Fraction]:
    out = {}
    for d in values:
        s = Fraction(0)
        for kk in divisors(d):
            mu = moebius(kk)
            if not mu:
                continue
            if d // kk not in values:
                raise KeyError("missing value at degree %d" % (d // kk))
            sign = -1 if (residue_of(d) + residue_of(d // kk)) % 2 else 1
            s += sign * mu * Fraction(kk) ** weight_exponent * values[d // kk]
        out[d] = s
    return out


def mc_add_family(values: Dict[int, Fraction], residue_of: Callable[[int], int],
                  weight_exponent: int = -2) -> Dict[int, Fraction]:
    """Inverse of mc_subtract_family."""
    out = {}
    for d in values:
        s = Fraction(0)
        for kk in divisors(d):
            sign = -1 if (residue_of(d) + residue_of(d // kk)) % 2 else 1
            s += sign * Fraction(kk) ** weight_exponent * values[d // kk]
        out[d] = s
    return out


def parity_residue(d: int) -> int:
    """r(d) = d mod 2 for a polarization of square 2p, p odd."""
    return d % 2
