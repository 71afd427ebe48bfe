"""
Lattice bookkeeping for prime-discriminant K3^[2] families.

Curve classes are tracked only through their deformation invariants
(divisibility, norm, degrees, residue).  NL numbers of a single
polarization H with q(H) = 2p are looked up through the discriminant
D = (d^2 - 2 p s) / 4.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Dict, Sequence, Tuple

import sympy

from .qseries import as_fraction, check_odd_prime, divisors, moebius, squares_mod


ABSENT = "absent"


class LatticeError(ValueError):
    pass


def _matrix(a) -> sympy.Matrix:
    rows = [[sympy.Rational(as_fraction(x).numerator, as_fraction(x).denominator) for x in row] for row in a]
    m = sympy.Matrix(rows)
    if m.rows != m.cols:
        raise LatticeError("Gram matrix must be square")
    if m != m.T:
        raise LatticeError("Gram matrix must be symmetric")
    return m


def _frac(x) -> Fraction:
    x = sympy.Rational(x)
    return Fraction(int(x.p), int(x.q))


def _as_vec(d) -> Tuple[int, ...]:
    if isinstance(d, int):
        return (d,)
    return tuple(d)


def det_bordered(a, d, s) -> Fraction:
    """det of (a, d^t; d, s)."""
    d = _as_vec(d)
    m = _matrix(a)
    if len(d) != m.rows:
        raise LatticeError("degree vector has length %d, Gram matrix is %dx%d" % (len(d), m.rows, m.rows))
    n = m.rows
    big = sympy.zeros(n + 1, n + 1)
    big[:n, :n] = m
    for i, x in enumerate(d):
        big[i, n] = big[n, i] = sympy.Rational(as_fraction(x).numerator, as_fraction(x).denominator)
    s = as_fraction(s)
    big[n, n] = sympy.Rational(s.numerator, s.denominator)
    return _frac(big.det())


def _det_nonzero(a) -> Fraction:
    det = _frac(_matrix(a).det())
    if det == 0:
        raise LatticeError("singular Gram matrix")
    return det


def projection_norm(a, d, s) -> Fraction:
    """Norm of the component of beta orthogonal to the lattice with Gram matrix a."""
    return det_bordered(a, d, s) / _det_nonzero(a)


def dtilde(a, d, s) -> Fraction:
    return Fraction(-1, 2) * det_bordered(a, d, s) / _det_nonzero(a)


def disc_D(p: int, d: int, s) -> int:
    """D = (d^2 - 2ps)/4; raises when no lattice vector can exist."""
    check_odd_prime(p)
    s = as_fraction(s)
    D = (Fraction(d * d) - 2 * p * s) / 4
    if D.denominator != 1:
        raise LatticeError("D = %s is not integral for (p, d, s) = (%d, %d, %s)" % (D, p, d, s))
    if D < 0:
        raise LatticeError("D = %s is negative for (p, d, s) = (%d, %d, %s)" % (D, p, d, s))
    return int(D)


def try_disc_D(p: int, d: int, s):
    try:
        return disc_D(p, d, s)
    except LatticeError:
        return None


def norm_for(p: int, d: int, D: int) -> Fraction:
    """Inverse of disc_D in s."""
    return Fraction(d * d - 4 * D, 2 * p)


# -- curve class keys -------------------------------------------------------

def residue_pair(r: int, modulus: int = 2) -> frozenset:
    r %= modulus
    return frozenset({r, (-r) % modulus})


@dataclass(frozen=True)
class CurveClassKey:
    m: int
    s: Fraction
    d: Tuple[int, ...]
    r: frozenset

    @classmethod
    def k3n2(cls, m: int, s, d) -> "CurveClassKey":
        """Key in K3^[2]-type; the residue of beta/m is 2(s/m^2) mod 2."""
        s = as_fraction(s)
        d = _as_vec(d)
        if m < 1 or any(x % m for x in d):
            raise LatticeError("divisibility %d does not divide degrees %r" % (m, d))
        prim = s / (m * m)
        if (2 * prim).denominator != 1:
            raise LatticeError("s/m^2 = %s is not a valid norm" % (prim,))
        return cls(m, s, d, residue_pair(int(2 * prim)))

    def to_json(self) -> dict:
        from .qseries import frac_str
        return {"m": self.m, "s": frac_str(self.s), "d": list(self.d), "r": sorted(self.r)}


def refine_nl(m: int, s, d) -> CurveClassKey:
    """NL_{m,s,d} = NL_{1,s/m^2,d/m}: return the primitive key."""
    d = _as_vec(d)
    s = as_fraction(s)
    if m < 1 or any(x % m for x in d):
        raise LatticeError("m = %d does not divide d = %r" % (m, d))
    return CurveClassKey.k3n2(1, s / (m * m), tuple(x // m for x in d))


def _gcd(d) -> int:
    g = 0
    for x in _as_vec(d):
        g = gcd(g, x)
    return g


def primitive_from_unrefined(unrefined: Callable, s, d) -> Fraction:
    """NL_{1,s,d} = sum_{k | gcd d} mu(k) NL_{s/k^2, d/k}."""
    d = _as_vec(d)
    s = as_fraction(s)
    g = _gcd(d)
    total = Fraction(0)
    for k in divisors(g) if g else [1]:
        mu = moebius(k)
        if mu:
            total += mu * as_fraction(unrefined(s / (k * k), tuple(x // k for x in d)))
    return total


def refined_from_unrefined(unrefined: Callable, m: int, s, d) -> Fraction:
    key = refine_nl(m, s, d)
    return primitive_from_unrefined(unrefined, key.s, key.d)


def unrefine_nl(primitive: Callable, s, d) -> Fraction:
    """NL_{s,d} = sum_{m | gcd d} NL_{1,s/m^2,d/m}.

    `primitive(s, d)` returns NL_{1,s,d}; it raises KeyError for missing entries.
    """
    d = _as_vec(d)
    s = as_fraction(s)
    g = _gcd(d)
    total = Fraction(0)
    for m in divisors(g) if g else [1]:
        total += as_fraction(primitive(s / (m * m), tuple(x // m for x in d)))
    return total


# -- Heegner divisors versus C_2e -------------------------------------------

def _isqrt_exact(n: int):
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def square_root_class(p: int, e: int):
    """The k in [0, p//2] with k^2 = e mod p, or None."""
    for k in range(p // 2 + 1):
        if (k * k - e) % p == 0:
            return k
    return None


def represent_e(p: int, e: int, strict: bool = True):
    """Write e = p*a0 + k^2 with 0 <= k <= p//2.

    By default only a0 >= 0 is allowed (the literal parametrization); with
    strict=False a0 may be any integer.  Returns (a0, k) or None.
    """
    k = square_root_class(p, e)
    if k is None:
        return None
    a0 = (e - k * k) // p
    if strict and a0 < 0:
        return None
    return a0, k


def heegner_to_cc_coefficient(p: int, D: int, alpha: int, e: int, strict: bool = True):
    """Coefficient of C_{2e} in NL(D)."""
    check_odd_prime(p)
    if D < 1 or e < 1:
        raise LatticeError("need D >= 1 and e >= 1")
    if D % p not in squares_mod(p):
        raise LatticeError("D = %d is not a square mod %d" % (D, p))
    if (alpha * alpha - D) % p:
        raise LatticeError("alpha^2 != D mod p")
    rep = represent_e(p, e, strict)
    if rep is None:
        if e % p in squares_mod(p):
            return ABSENT
        raise LatticeError("e = %d is not a square mod %d" % (e, p))
    _, k = rep
    if D % e:
        return 0
    c = _isqrt_exact(D // e)
    if c is None:
        return 0
    sols = {x for x in (c, -c) if (k * x - alpha) % p == 0}
    return len(sols)


def default_alpha(p: int, D: int) -> int:
    k = square_root_class(p, D)
    if k is None:
        raise LatticeError("D = %d is not a square mod %d" % (D, p))
    return k
