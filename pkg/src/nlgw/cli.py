"""Command line entry point.

Exit codes: 0 success, 1 computational or usage error, 2 mismatch against
reference data.  Results go to stdout (JSON by default, CSV on request);
progress records go to stderr, one JSON object per line.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from fractions import Fraction

import click

from . import bps, cohoring, gwnl, lattice, mirror, nlforms, redgw
from .qseries import frac_str

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2

# reference data the commands check themselves against
DV_HEAD = {0: -10, 11: 640, 12: 990, 14: 5500, 15: 11440, 16: 21450, 20: 198770, 22: 510840}
# expected status per e; e = 3, 5 have no a0 >= 0 representation
HLS_EXPECTED = {1: "HLS", 4: "HLS", 9: "HLS", 15: "not-HLS"}
HLS_GAP = {3: ("absent", "HLS"), 5: ("absent", "HLS")}       # (strict, extended)


class Mismatch(Exception):
    pass


def _jsonable(x):
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def emit(obj, fmt: str = "json", rows=None, header=None):
    if fmt == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_jsonable(v) for v in r])
        click.echo(buf.getvalue(), nl=False)
    else:
        click.echo(json.dumps(_jsonable(obj), sort_keys=True, indent=1))


def progress_printer(quiet: bool):
    t0 = time.time()

    def report(rec):
        if not quiet:
            rec = dict(rec, elapsed=round(time.time() - t0, 2))
            click.echo(json.dumps(rec, sort_keys=True), err=True)
    return report


def _load_config(ctx, param, value):
    """Defaults from a JSON file; explicit flags still win."""
    if value is None:
        return None
    with open(value) as fh:
        cfg = json.load(fh)
    ctx.default_map = {k.replace("_", "-"): v for k, v in cfg.items()}
    return value


FORMAT = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
QUIET = click.option("--quiet", is_flag=True, help="No progress records on stderr.")


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), callback=_load_config,
              is_eager=True, expose_value=False, help="JSON file with default option values.")
def cli():
    """Noether-Lefschetz and reduced Gromov-Witten computations for K3^[2]-type pencils."""


@cli.command("nl-dv")
@click.option("--terms", type=click.IntRange(1), default=22, show_default=True, help="Emit NL(D) for D <= terms.")
@click.option("--B", "B", type=click.IntRange(25), default=nlforms.DEFAULT_B, show_default=True)
@FORMAT
def nl_dv(terms, B, fmt):
    """NL numbers of the Debarre-Voisin pencil."""
    phi = nlforms.dv_phi(max(terms, B) + 1)
    solved = nlforms.solve_dv_from_constraints(B, check=False)
    top = min(terms, solved.order)
    agree = phi.equal_to(solved, upto=top) and all(phi.nl(D) == v for D, v in DV_HEAD.items() if D <= terms)
    table = phi.table(terms)
    gap = {D: phi.nl(D) for D in nlforms.DV_GAP if D <= terms}
    emit({"p": 11, "nl": [[D, c] for D, c in table], "gap": gap, "constraint_solve_agrees": agree},
         fmt, table, ["D", "NL"])
    if not agree:
        raise Mismatch("closed form and constraint solve disagree")


@cli.command("nl-cubic")
@click.option("--nl0", default=None, help="NL(0); default from the GRR degree of the cubic pencil.")
@click.option("--nl3", default=str(gwnl.CUBIC_NL3), show_default=True)
@click.option("--terms", type=click.IntRange(1), default=20, show_default=True, help="Emit NL(D) for D <= terms.")
@click.option("--B", "B", type=click.IntRange(25), default=nlforms.DEFAULT_B, show_default=True)
@FORMAT
def nl_cubic(nl0, nl3, terms, B, fmt):
    """NL numbers of the pencil of Fano varieties of lines on cubic fourfolds."""
    if nl0 is None:
        nl0 = cohoring.grr_hodge_degree(cohoring.fano_pencil()) / 3
    phi = nlforms.solve_cubic_form(Fraction(nl0), Fraction(nl3), B)
    table = phi.table(terms)
    emit({"p": 3, "nl0": Fraction(nl0), "nl": [[D, c] for D, c in table]}, fmt, table, ["D", "NL"])


@cli.command("hls")
@click.option("--p", "p", type=int, default=11, show_default=True)
@click.option("--emax", type=click.IntRange(1), default=30, show_default=True)
@click.option("--e", "only", type=int, default=None, help="Report a single e.")
@click.option("--extended", is_flag=True, help="Allow e = p a0 + k^2 with a0 < 0 (default: a0 >= 0 only).")
@FORMAT
def hls(p, emax, only, extended, fmt):
    """HLS classification of the divisors C_2e from the DV NL series."""
    if p != 11:
        raise click.UsageError("only p = 11 has a built-in NL series")
    if only is not None:
        if only < 1 or only % p not in nlforms.squares_mod(p):
            raise click.UsageError("e = %d is not a nonzero square mod %d" % (only, p))
        emax = max(emax, only)
    phi = nlforms.dv_phi(max(emax + 1, nlforms.DEFAULT_B + 1))
    strict = not extended
    rows = nlforms.hls_report(phi, emax, strict)
    if only is not None:
        rows = [r for r in rows if r["e"] == only]
    emit({"p": p, "strict": strict, "rows": rows}, fmt,
         [(r["e"], r["divisor"], r["C"], r["status"], r["gap_zero"]) for r in rows],
         ["e", "divisor", "C", "status", "gap_zero"])
    want = dict(HLS_EXPECTED)
    want.update({e: v[0 if strict else 1] for e, v in HLS_GAP.items()})
    bad = [r["e"] for r in rows if r["e"] in want and r["status"] != want[r["e"]]]
    if bad:
        raise Mismatch("classification differs at e = %s" % bad)


@cli.command("check-gwnl")
@click.option("--family", type=click.Choice(["dv-pencil", "fano-pencil"]), default="dv-pencil", show_default=True)
@click.option("--dmax", type=click.IntRange(1), default=5, show_default=True)
@click.option("--mode", type=click.Choice(gwnl.MODES), default="proven-only", show_default=True)
@click.option("--B", "B", type=click.IntRange(25), default=nlforms.DEFAULT_B, show_default=True)
@FORMAT
@QUIET
def check_gwnl(family, dmax, mode, B, fmt, quiet):
    """Compare mirror-computed family invariants with the NL side."""
    fam = cohoring.family_by_name(family)
    prog = progress_printer(quiet)
    phi = gwnl.family_nl_series(fam, B)
    prim = gwnl.prim_for(fam.p, dmax)
    rep = gwnl.check_gwnl(fam, phi, prim, dmax, mode, progress=prog)
    emit(rep.to_json(), fmt,
         [(r.d, r.lhs, r.rhs, r.lhs_raw, r.rhs_refined, r.status) for r in rep.rows],
         ["degree", "lhs", "rhs", "lhs_raw", "rhs_refined", "status"])
    if rep.any_mismatch:
        raise Mismatch("%d of %d degrees mismatch" % (sum(r.status == gwnl.MISMATCH for r in rep.rows), len(rep.rows)))
    if not rep.full_match:
        click.echo("some degrees need conjectural input; rerun with --mode hybrid", err=True)
        sys.exit(EXIT_ERROR)


@cli.command("mirror")
@click.option("--family", type=click.Choice(sorted(cohoring.BUILTIN)), default="fano-pencil", show_default=True)
@click.option("--degree", type=click.IntRange(0), default=2, show_default=True)
@click.option("--jmax", type=click.IntRange(0), default=2, show_default=True)
@click.option("--route", type=click.Choice(["full", "line"]), default=None)
@FORMAT
@QUIET
def mirror_cmd(family, degree, jmax, route, fmt, quiet):
    """Dump I_d, the mirror map and <H^3> up to the given degree."""
    fam = cohoring.family_by_name(family)
    prog = progress_printer(quiet)
    I = mirror.compute_I(fam, degree, jmax, route, progress=prog)
    mm = mirror.mirror_map(I)
    Id = I.per_degree[degree]
    dump = [[list(e), zp, c] for e, zs in Id.sorted_terms() for zp, c in sorted(zs.items())]
    out = {"family": family, "degree": degree, "route": I.route,
           "f0": [mm.f0[i] for i in range(degree + 1)],
           "f1": [mm.f1[i] for i in range(degree + 1)],
           "f2": [mm.f2[i] for i in range(degree + 1)],
           "I": dump}
    if fam.ambient.has_pencil_line and degree >= 1:
        inv = mirror.family_invariants(fam, degree, I=I)
        out["H3"] = inv.values
        out["H3_mc"] = mirror.mc_subtract_family(inv.values, mirror.parity_residue, -2)
    emit(out, fmt, [(e, zp, c) for e, zp, c in dump], ["monomial", "zpow", "coefficient"])


@cli.command("chern")
@click.option("--family", type=click.Choice(["dv-pencil", "fano-pencil"]), default="dv-pencil", show_default=True)
@FORMAT
def chern(family, fmt):
    """Euler characteristic, GRR degree and singular fiber count of a pencil."""
    fam = cohoring.family_by_name(family)
    locus = cohoring.ZeroLocus(fam)
    e = cohoring.euler_characteristic(fam, locus)
    grr = cohoring.grr_hodge_degree(fam, locus)
    sing = cohoring.singular_fiber_count(e)
    out = {"family": family, "euler": e, "grr": grr, "nl0": grr / 3, "singular_fibers": sing}
    emit(out, fmt, [(k, v) for k, v in sorted(out.items())], ["key", "value"])


@cli.command("bps")
@click.option("--input", "path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV table (g, m, value).")
@click.option("--direction", type=click.Choice(["gw-to-gv", "gv-to-gw"]), default="gw-to-gv", show_default=True)
@click.option("--gmax", type=click.IntRange(0), default=3, show_default=True)
@click.option("--mmax", type=click.IntRange(1), default=6, show_default=True)
@click.option("--self-test", is_flag=True, help="Round trip on a fixed pseudo-random table.")
@FORMAT
def bps_cmd(path, direction, gmax, mmax, self_test, fmt):
    """Gromov-Witten to Gopakumar-Vafa conversion along multiples of a class."""
    if self_test:
        import random
        rng = random.Random(0)
        r = {(g, m): Fraction(rng.randint(-50, 50), rng.randint(1, 9))
             for g in range(gmax + 1) for m in range(1, mmax + 1)}
        ok = bps.gv_from_gw(bps.gw_from_gv(r, gmax, mmax), gmax, mmax) == r
        emit({"self_test": "pass" if ok else "fail"})
        if not ok:
            raise Mismatch("bps round trip failed")
        return
    if path is None:
        raise click.UsageError("give --input or --self-test")
    with open(path) as fh:
        t = bps.table_from_csv(fh.read())
    res = bps.gv_from_gw(t, gmax, mmax) if direction == "gw-to-gv" else bps.gw_from_gv(t, gmax, mmax)
    if fmt == "csv":
        click.echo(bps.table_to_csv(res), nl=False)
    else:
        emit({"direction": direction, "table": [[g, m, v] for (g, m), v in sorted(res.items())]})


@cli.command("hecke")
@click.option("--m", "m", type=click.IntRange(1), required=True)
@click.option("--ell", type=int, required=True)
@click.option("--coeff", multiple=True, required=True, help="d,r,c  (repeatable)")
@FORMAT
def hecke(m, ell, coeff, fmt):
    """Formal Hecke operator T_m on a finitely supported double series."""
    cs = {}
    for item in coeff:
        try:
            d, r, c = item.split(",")
            cs[(int(d), int(r))] = cs.get((int(d), int(r)), 0) + Fraction(c)
        except ValueError:
            raise click.BadParameter("expected d,r,c, got %r" % item, param_hint="--coeff")
    out = redgw.hecke_T(m, ell, redgw.HilbDoubleSeries(cs))
    rows = [(d, r, c) for (d, r), c in sorted(out.coeffs.items())]
    emit({"m": m, "ell": ell, "coeffs": [list(x) for x in rows]}, fmt, rows, ["d", "r", "c"])


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="nlgw", standalone_mode=False)
    except Mismatch as exc:
        click.echo("mismatch: %s" % exc, err=True)
        sys.exit(EXIT_MISMATCH)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_ERROR)
    except click.Abort:
        sys.exit(EXIT_ERROR)
    except Exception as exc:
        click.echo("error: %s: %s" % (type(exc).__name__, exc), err=True)
        sys.exit(EXIT_ERROR)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
