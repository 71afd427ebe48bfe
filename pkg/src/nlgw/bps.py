"""
GW <-> GV conversions along the multiples m of a fixed primitive class.

    F = sum_{g,m} R_{g,m} u^{2g-2} v^m
      = sum_{g,m} r_{g,m} sum_k k^{-1} (sin(ku/2)/2)^{2g-2} v^{km}

Tables are dicts (g, m) -> Fraction.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from math import factorial, gcd
from typing import Callable, Dict, Tuple

from .qseries import FracSeries, as_fraction, divisors, frac_str, moebius

Table = Dict[Tuple[int, int], Fraction]


class BPSError(KeyError):
    pass


def _sin_factor(order: int) -> FracSeries:
    """S(w) with sin(u/2)/2 = (u/4) S(u^2)."""
    return FracSeries({n: Fraction((-1) ** n, 4 ** n * factorial(2 * n + 1)) for n in range(order)}, order)


def sin_kernel_coeffs(g: int, order: int) -> Dict[int, Fraction]:
    """a_{g,gt}: coefficient of u^{2gt-2} in (sin(u/2)/2)^{2g-2}, for gt < order."""
    if g < 0 or order < 0:
        raise ValueError("need g >= 0 and order >= 0")
    n = max(order - g, 0)
    if n == 0:
        return {}
    S = _sin_factor(n)
    e = 2 * g - 2
    P = S ** e if e >= 0 else S.inverse() ** (-e)
    lead = Fraction(1, 4) ** e
    return {g + j: lead * P[j] for j in range(n) if P[j]}


def _get(t: Table, g: int, m: int) -> Fraction:
    try:
        return as_fraction(t[(g, m)])
    except KeyError:
        raise BPSError("missing entry (g=%d, m=%d)" % (g, m)) from None


def rtilde_from_gw(R: Table, g: int, m: int) -> Fraction:
    """sum_{k|m} k^{2g-3} mu(k) R_{g,m/k}."""
    total = Fraction(0)
    for k in divisors(m):
        mu = moebius(k)
        if mu:
            total += mu * Fraction(k) ** (2 * g - 3) * _get(R, g, m // k)
    return total


def gw_from_rtilde(rt: Table, g: int, m: int) -> Fraction:
    """Inverse of rtilde_from_gw: R_{g,m} = sum_{k|m} k^{2g-3} rt_{g,m/k}."""
    return sum((Fraction(k) ** (2 * g - 3) * _get(rt, g, m // k) for k in divisors(m)), Fraction(0))


def _dense(t: Table, g_max: int, m_max: int) -> Table:
    return {(g, m): as_fraction(t.get((g, m), 0)) for g in range(g_max + 1) for m in range(1, m_max + 1)}


def rtilde_from_gv(r: Table, g_max: int, m_max: int) -> Table:
    """rt_{gt,m} = sum_{g <= gt} a_{g,gt} r_{g,m}."""
    a = {g: sin_kernel_coeffs(g, g_max + 1) for g in range(g_max + 1)}
    out = {}
    for gt in range(g_max + 1):
        for m in range(1, m_max + 1):
            out[(gt, m)] = sum((a[g].get(gt, 0) * as_fraction(r.get((g, m), 0)) for g in range(gt + 1)), Fraction(0))
    return out


def gw_from_gv(r: Table, g_max: int, m_max: int) -> Table:
    rt = rtilde_from_gv(r, g_max, m_max)
    return {(g, m): gw_from_rtilde(rt, g, m) for g in range(g_max + 1) for m in range(1, m_max + 1)}


def gv_from_gw(R: Table, g_max: int, m_max: int) -> Table:
    """Solve the triangle g <= g_max, m <= m_max; every entry must be present."""
    for g in range(g_max + 1):
        for m in range(1, m_max + 1):
            _get(R, g, m)
    a = {g: sin_kernel_coeffs(g, g_max + 1) for g in range(g_max + 1)}
    r: Table = {}
    for m in range(1, m_max + 1):
        for gt in range(g_max + 1):
            rt = rtilde_from_gw(R, gt, m)
            rest = sum((a[g].get(gt, 0) * r[(g, m)] for g in range(gt)), Fraction(0))
            r[(gt, m)] = (rt - rest) / a[gt][gt]
    return r


def abelian_fls_transform(prim: Callable[[int, int], Fraction], g: int, d: int, dp: int) -> Fraction:
    """sum_{k | gcd(d, d')} k^{2g+3} N_{g,(1, d d'/k^2)}.

    `prim(g, n)` returns the primitive value; it raises for missing entries.
    """
    if d < 1 or dp < 1:
        raise ValueError("degrees must be positive")
    total = Fraction(0)
    for k in divisors(gcd(d, dp)):
        total += Fraction(k) ** (2 * g + 3) * as_fraction(prim(g, d * dp // (k * k)))
    return total


def table_to_csv(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["g", "m", "value"])
    for (g, m) in sorted(t):
        w.writerow([g, m, frac_str(t[(g, m)])])
    return buf.getvalue()


def table_from_csv(text: str) -> Table:
    out = {}
    for row in csv.DictReader(io.StringIO(text)):
        out[(int(row["g"]), int(row["m"]))] = Fraction(row["value"])
    return out
