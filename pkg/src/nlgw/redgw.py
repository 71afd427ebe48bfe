"""
Reduced genus-0 invariants of K3^[2]-type: primitive F/G series, the
multiple-cover sums, Fujiki contractions to one-point fiber invariants,
the uniruled-divisor formula and the formal Hecke operator.

Norms s are half-integers; tables are keyed by the integer 4s.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, Iterable, Optional, Tuple

from .lattice import CurveClassKey
from .qseries import (FracSeries, TruncationError, alpha_series, as_fraction, delta_series,
                      divisors, frac_str, g2_series, moebius, theta)

# characteristic numbers of K3^[2]-type used in the contractions
FUJIKI_CONSTANT = 3          # int a^4 = 3 q(a)^2
C2_A2 = 30                   # int c2 a^2 = 30 q(a)
C2_C2 = 828

SUPPORT_4S = -10             # F, G vanish for 4s below this


class TableError(KeyError):
    pass


def key4(s) -> int:
    s = as_fraction(s)
    k = 4 * s
    if k.denominator != 1:
        raise ValueError("4s must be an integer, got s = %s" % (s,))
    return int(k)


def is_norm(s) -> bool:
    """Curve classes on K3^[2] have 2s integral."""
    return (2 * as_fraction(s)).denominator == 1


@dataclass(frozen=True)
class FGPair:
    F: Fraction
    G: Fraction

    def __add__(self, other):
        return FGPair(self.F + other.F, self.G + other.G)

    def scale(self, a, b=None):
        b = a if b is None else b
        return FGPair(self.F * a, self.G * b)


ZERO = FGPair(Fraction(0), Fraction(0))


@dataclass
class PrimTables:
    """f_{1,s}, g_{1,s} keyed by 4s; exact for 4s <= max_key."""
    f1: Dict[int, Fraction]
    g1: Dict[int, Fraction]
    max_key: int

    def _get(self, table, s) -> Fraction:
        k = key4(s)
        if not is_norm(s):
            raise ValueError("s = %s is not a curve norm" % (as_fraction(s),))
        if k < SUPPORT_4S:
            return Fraction(0)
        if k > self.max_key:
            raise TableError("s = %s beyond the table (4s <= %d)" % (as_fraction(s), self.max_key))
        return table.get(k, Fraction(0))

    def f(self, s) -> Fraction:
        return self._get(self.f1, s)

    def g(self, s) -> Fraction:
        return self._get(self.g1, s)

    def pair(self, s) -> FGPair:
        return FGPair(self.f(s), self.g(s))

    def covers(self, s) -> bool:
        return key4(s) <= self.max_key


def _prim_series(s_max) -> Tuple[FracSeries, FracSeries]:
    """The two closed forms as Laurent series in q, exact below q^{2 s_max + 1}."""
    top = int(2 * as_fraction(s_max)) + 1          # exponents e = 2s < top
    terms = top + 12
    th = theta(terms)
    al = alpha_series(terms)
    d4 = delta_series(terms).subs_power(4).truncate(terms)
    den = (th * al * d4).truncate(terms)                 # q^5 (1 + ...)
    inv = den.shift(-5).inverse().shift(-5)              # exact below q^{terms - 10}
    F = inv.scale(Fraction(-1, 4))
    num = (th ** 4 + al.scale(4) + g2_series(terms).subs_power(4).truncate(terms).scale(24)).truncate(terms)
    G = (num * inv).scale(Fraction(1, 12))
    if F.order < top or G.order < top:
        raise TruncationError("primitive series short of q^%d" % top)
    return F.truncate(top), G.truncate(top)


def prim_tables(s_max=2) -> PrimTables:
    """Coefficient of (-q)^{2s} in the closed forms, as f_{1,s} and g_{1,s}."""
    s_max = as_fraction(s_max)
    if s_max < Fraction(-5, 4):
        raise ValueError("s_max must be >= -5/4")
    F, G = _prim_series(s_max)
    f1, g1 = {}, {}
    for e in range(F.valuation(), F.order):
        sign = -1 if e % 2 else 1
        if F.coeffs.get(e):
            f1[2 * e] = sign * F.coeffs[e]
        if G.coeffs.get(e):
            g1[2 * e] = sign * G.coeffs[e]
    return PrimTables(f1, g1, 2 * (F.order - 1))


# -- multiple covers --------------------------------------------------------------

def _mc_sign(s, k: int) -> int:
    t = 2 * (as_fraction(s) + as_fraction(s) / (k * k))
    if t.denominator != 1:
        raise ValueError("2(s + s/k^2) not integral")
    return -1 if int(t) % 2 else 1


def mc_assemble(prim: PrimTables, m: int, s) -> FGPair:
    """F_{m,s} = sum_{k|m} k^-5 (-1)^{2(s+s/k^2)} F_{1,s/k^2}; G with k^-3."""
    s = as_fraction(s)
    if m < 1 or not is_norm(s):
        raise ValueError("need m >= 1 and 2s integral")
    F = G = Fraction(0)
    for k in divisors(m):
        t = s / (k * k)
        if not is_norm(t):
            continue
        sg = _mc_sign(s, k)
        F += sg * Fraction(1, k ** 5) * prim.f(t)
        G += sg * Fraction(1, k ** 3) * prim.g(t)
    return FGPair(F, G)


def mc_subtract(values: Callable[[int, Fraction], FGPair], m: int, s) -> FGPair:
    """f_{m,s} = sum_{k|m} mu(k) k^-5 (-1)^{2(s+s/k^2)} F_{m/k,s/k^2}; g with k^-3.

    `values(m', s')` returns the imprimitive pair and raises for missing entries.
    """
    s = as_fraction(s)
    F = G = Fraction(0)
    for k in divisors(m):
        mu = moebius(k)
        t = s / (k * k)
        if not mu or not is_norm(t):
            continue
        v = values(m // k, t)
        sg = mu * _mc_sign(s, k)
        F += sg * Fraction(1, k ** 5) * v.F
        G += sg * Fraction(1, k ** 3) * v.G
    return FGPair(F, G)


def uniruled_mc(prim_n: Callable, m: int, s, r: int) -> Fraction:
    """N_{m,s,r} = sum_{k|m} k^-3 (-1)^{mr + (m/k) r} N_{1,s/k^2,mr/k}.

    `prim_n(s, r)` gives the primitive count; it is only called on valid norms.
    """
    s = as_fraction(s)
    total = Fraction(0)
    for k in divisors(m):
        t = s / (k * k)
        if not is_norm(t):
            continue
        sg = -1 if (m * r + (m // k) * r) % 2 else 1
        total += sg * Fraction(1, k ** 3) * as_fraction(prim_n(t, m * r // k))
    return total


def uniruled_from_tables(prim: PrimTables) -> Callable:
    """Primitive uniruled counts are the G constants."""
    return lambda s, r: prim.g(s)


# -- contractions ----------------------------------------------------------------

def fiber_invariant_H3(p: int, key: CurveClassKey, pair: FGPair) -> Fraction:
    """<H^3> = G * int beta^dual H^3 = G * 3 q(H) (H, beta^dual)."""
    if len(key.d) != 1:
        raise ValueError("single polarization expected")
    return FUJIKI_CONSTANT * (2 * p) * key.d[0] * as_fraction(pair.G)


@dataclass(frozen=True)
class Pushforward:
    """ev_* (psi^k [M]) in the basis beta^dual, (beta^dual)^2, c2, point."""
    beta: Fraction = Fraction(0)
    beta2: Fraction = Fraction(0)
    c2: Fraction = Fraction(0)
    point: Fraction = Fraction(0)
    k: int = 0

    def pair_with_power(self, p: int, d: int, s, c2_a2: int = C2_A2, fujiki: int = FUJIKI_CONSTANT) -> Fraction:
        """Integral against H^{3-k} with q(H) = 2p, (H, beta^dual) = d, q(beta^dual) = s."""
        s = as_fraction(s)
        qH = 2 * p
        if self.k == 0:
            return self.beta * fujiki * qH * d
        if self.k == 1:
            # int a^2 b^2 = q(a) q(b) + 2 q(a,b)^2 when the Fujiki constant is 3
            ab = Fraction(fujiki, 3) * (s * qH + 2 * d * d)
            return self.beta2 * ab + self.c2 * c2_a2 * qH
        return self.point


def descendent_pushforward_constants(pair: FGPair, s, k: int) -> Pushforward:
    s = as_fraction(s)
    F, G = as_fraction(pair.F), as_fraction(pair.G)
    if k == 0:
        return Pushforward(beta=G, k=0)
    if k == 1:
        return Pushforward(beta2=2 * F, c2=-(G + s * F) / 15, k=1)
    if k == 2:
        return Pushforward(point=-12 * F, k=2)
    if k == 3:
        return Pushforward(point=24 * F, k=3)
    raise ValueError("psi power must be in 0..3, got %d" % k)


# -- Hecke operator ---------------------------------------------------------------

@dataclass
class HilbDoubleSeries:
    """sum c(d, r) q^d p^r with finite support."""
    coeffs: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {k: as_fraction(v) for k, v in self.coeffs.items() if as_fraction(v)}

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return HilbDoubleSeries(out)

    def __eq__(self, other):
        return isinstance(other, HilbDoubleSeries) and self.coeffs == other.coeffs


def hecke_T(m: int, ell: int, f: HilbDoubleSeries) -> HilbDoubleSeries:
    """T_m c(d, r) = sum_{k | (m, d, r)} k^{ell-1} c(m d / k^2, r / k)."""
    if m < 1:
        raise ValueError("m must be positive")
    out: Dict[Tuple[int, int], Fraction] = {}
    for (D, R), c in f.coeffs.items():
        for k in divisors(m):
            # (d, r) with m d / k^2 = D and r / k = R
            if (D * k * k) % m:
                continue
            d, r = D * k * k // m, R * k
            if d % k:
                continue
            out[(d, r)] = out.get((d, r), 0) + Fraction(k) ** (ell - 1) * c
    return HilbDoubleSeries(out)


def modified_degree(deg: int, w: int = 0, f: int = 0, n: int = 2) -> int:
    return deg + w - f


# -- output -----------------------------------------------------------------------

def mc_table_csv(prim: PrimTables, ms: Iterable[int], s_values: Iterable) -> str:
    """Rows (m, 4s, F, G, f, g); f, g are the subtracted values (equal to f_1, g_1 under the conjecture)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "s_times_4", "F", "G", "f", "g"])
    s_values = [as_fraction(s) for s in s_values]
    for m in ms:
        for s in s_values:
            if not is_norm(s):
                continue
            FG = mc_assemble(prim, m, s)
            fg = mc_subtract(lambda mm, ss: mc_assemble(prim, mm, ss), m, s)
            w.writerow([m, key4(s), frac_str(FG.F), frac_str(FG.G), frac_str(fg.F), frac_str(fg.G)])
    return buf.getvalue()
