"""
Exact formal q-series with fractional exponents, plus the classical
series (eta products, theta, Eisenstein, Delta) built on top of them.

A FracSeries stores coefficients at exponents e/N for a fixed grid N.
Coefficients at exponents >= order/N are *unknown*; asking for one
raises TruncationError instead of returning zero.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm, isqrt
from typing import Dict, Iterable, Optional

from sympy import factorint, isprime


class TruncationError(ValueError):
    pass


# order used for exact constants
EXACT = 10 ** 12


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    # gmpy2.mpq and friends
    return Fraction(int(x.numerator), int(x.denominator))


def frac_str(x) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


# -- number theory helpers ---------------------------------------------

def moebius(k: int) -> int:
    if k < 1:
        raise ValueError("moebius needs k >= 1, got %r" % (k,))
    fac = factorint(k)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors(n: int) -> list:
    n = abs(n)
    if n == 0:
        raise ValueError("divisors of 0")
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def check_odd_prime(p: int):
    if not (isinstance(p, int) and p > 2 and isprime(p)):
        raise ValueError("expected an odd prime, got %r" % (p,))


def legendre_chi(p: int, n: int) -> int:
    check_odd_prime(p)
    if n % p == 0:
        return 0
    # Euler's criterion
    return 1 if pow(n % p, (p - 1) // 2, p) == 1 else -1


def squares_mod(p: int) -> set:
    return {(k * k) % p for k in range(p)}


def sigma(n: int, k: int = 1) -> int:
    return sum(d ** k for d in divisors(n))


# -- the series type -----------------------------------------------------

class FracSeries:
    """Sum_e c_e q^(e/grid), known for e < order."""

    __slots__ = ("grid", "coeffs", "order")

    def __init__(self, coeffs: Optional[Dict[int, object]] = None, order: int = 0, grid: int = 1):
        if grid < 1:
            raise ValueError("grid must be positive")
        self.grid = grid
        self.order = order
        cs = {}
        for e, c in (coeffs or {}).items():
            if e >= order:
                continue
            c = as_fraction(c)
            if c:
                cs[e] = c
        self.coeffs = cs

    # constructors
    @classmethod
    def constant(cls, c, order: int, grid: int = 1) -> "FracSeries":
        return cls({0: c}, order, grid)

    @classmethod
    def from_list(cls, values: Iterable, grid: int = 1, start: int = 0) -> "FracSeries":
        values = list(values)
        return cls({start + i: v for i, v in enumerate(values)}, start + len(values), grid)

    # basic access
    def valuation(self) -> int:
        return min(self.coeffs) if self.coeffs else self.order

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, e: int) -> Fraction:
        if e >= self.order:
            raise TruncationError("coefficient at %d/%d unknown (order %d/%d)"
                                  % (e, self.grid, self.order, self.grid))
        return self.coeffs.get(e, Fraction(0))

    def coeff(self, exponent) -> Fraction:
        """Coefficient at a rational exponent."""
        exponent = as_fraction(exponent)
        num = exponent * self.grid
        if num.denominator != 1:
            return Fraction(0)
        return self[int(num)]

    def items(self):
        return sorted(self.coeffs.items())

    def regrid(self, grid: int) -> "FracSeries":
        if grid % self.grid:
            raise ValueError("grid %d does not refine %d" % (grid, self.grid))
        f = grid // self.grid
        return FracSeries({e * f: c for e, c in self.coeffs.items()}, self.order * f, grid)

    def truncate(self, order: int) -> "FracSeries":
        return FracSeries(self.coeffs, min(order, self.order), self.grid)

    def _common(self, other):
        if not isinstance(other, FracSeries):
            other = FracSeries.constant(other, EXACT, self.grid)
        g = lcm(self.grid, other.grid)
        return self.regrid(g), other.regrid(g)

    # arithmetic
    def __add__(self, other):
        a, b = self._common(other)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            out[e] = out.get(e, 0) + c
        return FracSeries(out, min(a.order, b.order), a.grid)

    __radd__ = __add__

    def __neg__(self):
        return FracSeries({e: -c for e, c in self.coeffs.items()}, self.order, self.grid)

    def __sub__(self, other):
        return self + (-other if isinstance(other, FracSeries) else -as_fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "FracSeries":
        c = as_fraction(c)
        return FracSeries({e: c * v for e, v in self.coeffs.items()}, self.order, self.grid)

    def __mul__(self, other):
        if not isinstance(other, FracSeries):
            return self.scale(other)
        a, b = self._common(other)
        order = min(a.order + b.valuation(), b.order + a.valuation())
        out: Dict[int, Fraction] = {}
        bi = b.items()
        for ea, ca in a.items():
            if ea + b.valuation() >= order:
                break
            for eb, cb in bi:
                e = ea + eb
                if e >= order:
                    break
                out[e] = out.get(e, 0) + ca * cb
        return FracSeries(out, order, a.grid)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return FracSeries.constant(1, EXACT, self.grid)
        base, result = self, None
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k: int) -> "FracSeries":
        """Multiply by q^(k/grid)."""
        return FracSeries({e + k: c for e, c in self.coeffs.items()}, self.order + k, self.grid)

    def inverse(self) -> "FracSeries":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of a series with no known nonzero term")
        v = self.valuation()
        rel = self.order - v
        c0 = self.coeffs[v]
        a = [self.coeffs.get(v + i, Fraction(0)) for i in range(rel)]
        b = [Fraction(0)] * rel
        b[0] = 1 / c0
        for n in range(1, rel):
            s = Fraction(0)
            for i in range(1, n + 1):
                if a[i]:
                    s += a[i] * b[n - i]
            b[n] = -s / c0
        return FracSeries({i - v: x for i, x in enumerate(b)}, rel - v, self.grid)

    def __truediv__(self, other):
        if isinstance(other, FracSeries):
            return self * other.inverse()
        return self.scale(1 / as_fraction(other))

    def subs_power(self, k: int) -> "FracSeries":
        """q -> q^k."""
        return FracSeries({e * k: c for e, c in self.coeffs.items()}, self.order * k, self.grid)

    def subs_neg(self) -> "FracSeries":
        """q -> -q (integer exponents only)."""
        if self.grid != 1:
            raise ValueError("q -> -q needs an integral grid")
        return FracSeries({e: (-c if e % 2 else c) for e, c in self.coeffs.items()}, self.order, 1)

    def normalized(self) -> "FracSeries":
        """Coarsen the grid as far as the support allows."""
        g = self.grid
        for e in self.coeffs:
            g = gcd(g, e)
        g = gcd(g, self.order) if self.order else g
        if g <= 1:
            return self
        return FracSeries({e // g: c for e, c in self.coeffs.items()}, self.order // g, self.grid // g)

    def equal_to(self, other, upto=None) -> bool:
        a, b = self._common(other)
        order = min(a.order, b.order)
        if upto is not None:
            order = min(order, upto * a.grid)
        keys = {e for e in a.coeffs if e < order} | {e for e in b.coeffs if e < order}
        return all(a.coeffs.get(e, 0) == b.coeffs.get(e, 0) for e in keys)

    def __eq__(self, other):
        if not isinstance(other, FracSeries):
            return NotImplemented
        a, b = self._common(other)
        return a.order == b.order and a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.grid, self.order, tuple(self.items())))

    def to_json(self) -> dict:
        return {"grid": self.grid, "order": self.order,
                "coeffs": [[e, frac_str(c)] for e, c in self.items()]}

    @classmethod
    def from_json(cls, obj) -> "FracSeries":
        return cls({int(e): Fraction(c) for e, c in obj["coeffs"]}, obj["order"], obj["grid"])

    def __repr__(self):
        terms = []
        for e, c in self.items()[:8]:
            ex = Fraction(e, self.grid)
            terms.append("%s*q^%s" % (frac_str(c), ex))
        return "FracSeries(%s + O(q^%s))" % (" + ".join(terms) or "0", Fraction(self.order, self.grid))


# -- classical series ----------------------------------------------------

def _check_terms(terms):
    if terms < 1:
        raise ValueError("need at least one term, got %r" % (terms,))


def euler_product(terms: int) -> list:
    """Coefficients of prod_{n>=1} (1-q^n) below q^terms (pentagonal numbers)."""
    out = [0] * terms
    k = 0
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= terms:
            break
        s = -1 if k % 2 else 1
        out[g1] += s
        if k and g2 < terms:
            out[g2] += s
        k += 1
    return out


def eta_power_product(factors, terms: int) -> FracSeries:
    """prod eta(a tau)^e, known for exponents below q^terms."""
    _check_terms(terms)
    lead = Fraction(0)
    res = FracSeries.constant(1, terms)
    for a, e in factors:
        if a < 1:
            raise ValueError("scale must be positive")
        if e == 0:
            continue
        lead += Fraction(a * e, 24)
        base = FracSeries.from_list(euler_product(terms)).subs_power(a).truncate(terms)
        if e < 0:
            base = base.inverse()
            e = -e
        res = (res * base ** e).truncate(terms)
    grid = lead.denominator
    body = res.regrid(grid)
    # leading q^lead shifts the window; keep the stated truncation in absolute q
    shifted = body.shift(lead.numerator)
    return shifted.truncate(terms * grid)


def l_value_at_zero(p: int) -> Fraction:
    """L(0, chi_p) = -(1/p) sum_a a chi_p(a)."""
    check_odd_prime(p)
    return Fraction(-sum(a * legendre_chi(p, a) for a in range(1, p)), p)


def eisenstein_E1(p: int, terms: int) -> FracSeries:
    """1 + (2/L(0,chi_p)) sum_n q^n sum_{d|n} chi_p(n/d).

    The factor is 2 for p = 7, 11 and 6 for p = 3; only with it is the
    series modular for Gamma_0(p).
    """
    check_odd_prime(p)
    _check_terms(terms)
    c = 2 / l_value_at_zero(p)
    cs = {0: 1}
    for n in range(1, terms):
        cs[n] = c * sum(legendre_chi(p, n // d) for d in divisors(n))
    return FracSeries(cs, terms)


def eisenstein_E3(p: int, terms: int) -> FracSeries:
    check_odd_prime(p)
    _check_terms(terms)
    cs = {}
    for n in range(1, terms):
        cs[n] = sum(d * d * legendre_chi(p, n // d) for d in divisors(n))
    return FracSeries(cs, terms)


def theta(terms: int) -> FracSeries:
    _check_terms(terms)
    cs = {0: 1}
    n = 1
    while n * n < terms:
        cs[n * n] = 2
        n += 1
    return FracSeries(cs, terms)


def alpha_series(terms: int) -> FracSeries:
    _check_terms(terms)
    return FracSeries({n: sigma(n) for n in range(1, terms, 2)}, terms)


def g2_series(terms: int) -> FracSeries:
    _check_terms(terms)
    cs = {0: Fraction(-1, 24)}
    for n in range(1, terms):
        cs[n] = sigma(n)
    return FracSeries(cs, terms)


def delta_series(terms: int) -> FracSeries:
    """q prod (1-q^n)^24, computed by direct product (independent of eta_power_product)."""
    _check_terms(terms)
    poly = [0] * terms
    poly[0] = 1
    for n in range(1, terms):
        for _ in range(24):
            for i in range(terms - 1, n - 1, -1):
                poly[i] -= poly[i - n]
    return FracSeries({i + 1: c for i, c in enumerate(poly) if i + 1 < terms}, terms)
