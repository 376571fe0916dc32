"""Command-line interface: ``hua <subcommand>``.

Exit codes: 0 ok, 1 violation or rejection, 2 usage error, 3 parse error.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from . import aut, cartan, equiv, hua, io, levi, selftest
from .errors import DimensionError, HuaError, InvalidSpecError, NonSmoothPointError, ParseError
from .linalg import rng_from

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3

DEFAULT_TOL = 1e-9
DEFAULT_SEED = 0
DEFAULT_SAMPLES = 1000


def common(fn):
    """--tol, --seed, --samples, --format and --p-tol shared by every subcommand."""

    @click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True, help="Boundary / zero tolerance.")
    @click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="64-bit RNG seed.")
    @click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True, help="Sample count when sampling.")
    @click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
    @click.option("--p-tol", type=float, default=0.0, show_default=True, help="Exponent matching tolerance.")
    @functools.wraps(fn)
    def wrapper(tol, seed, samples, fmt, p_tol, **kw):
        if tol <= 0:
            raise click.UsageError("--tol must be positive")
        if samples < 1:
            raise click.UsageError("--samples must be at least 1")
        try:
            report, code = fn(tol=tol, seed=seed, samples=samples, p_tol=p_tol, **kw)
        except ParseError as exc:
            click.echo(f"parse error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
        except (InvalidSpecError, DimensionError) as exc:
            click.echo(f"usage error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        except HuaError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(EXIT_VIOLATION)
        if isinstance(report, str):
            click.echo(report, nl=False)
        else:
            click.echo(io.dumps_report(report, fmt), nl=False)
        sys.exit(code)

    return wrapper


@click.group()
def main():
    """Geometry and rigidity computations on Hua domains."""


def _spec(path):
    return io.hua_spec_from_json(io.load_json(path))


def _standard(spec):
    if not hua.is_standard(spec):
        raise InvalidSpecError(f"{spec} is not in standard form (use the standardized spec {hua.standardize(spec)[0]})")
    return spec


def _sample_boundary(spec, rng, count, zero_block=None):
    zero = (zero_block,) if zero_block else ()
    return [hua.random_boundary_point(spec, rng, zero) for _ in range(count)]


@main.command()
@click.argument("spec_path", type=click.Path())
@click.argument("points_path", type=click.Path())
@common
def norm(spec_path, points_path, tol, seed, samples, p_tol):
    """Generic norm N(z, z) and Hua margin at each point."""
    spec = _spec(spec_path)
    records = []
    for k, p in enumerate(io.read_points(points_path)):
        hua.check_point(spec, p)
        mb = cartan.base_margin(spec.base, p.z)
        if mb < cartan.CLOSED_MARGIN:
            records.append({"index": k, "N": None, "margin": None, "base_margin": mb})
            continue
        records.append({"index": k, "N": cartan.diagonal_norm(spec.base, p.z, check=False), "margin": hua.hua_margin(spec, p)})
    return io.make_report("norm", records, {"points": len(records)}), EXIT_OK


@main.command()
@click.argument("spec_path", type=click.Path())
@click.argument("points_path", type=click.Path())
@common
def member(spec_path, points_path, tol, seed, samples, p_tol):
    """Membership test (strictly inside) for each point."""
    spec = _spec(spec_path)
    records = []
    for k, p in enumerate(io.read_points(points_path)):
        records.append({"index": k, "inside": hua.contains(spec, p)})
    inside = sum(r["inside"] for r in records)
    return io.make_report("member", records, {"points": len(records), "inside": inside}), EXIT_OK


@main.command()
@click.argument("spec_path", type=click.Path())
@click.option("--points", "points_path", type=click.Path(), default=None, help="Point file; sample the boundary if absent.")
@common
def classify(spec_path, points_path, tol, seed, samples, p_tol):
    """Boundary stratum of each point (Interior, Exterior, B0, B1(j), BaseEdge)."""
    spec = _standard(_spec(spec_path))
    pts = io.read_points(points_path) if points_path else _sample_boundary(spec, rng_from(seed), samples)
    records, counts = [], {}
    for k, p in enumerate(pts):
        st = hua.classify_boundary(spec, p, tol)
        counts[st.tag] = counts.get(st.tag, 0) + 1
        records.append({"index": k, "tag": st.tag, "witness": st.witness})
    return io.make_report("classify", records, {"counts": counts, "points": len(records)}), EXIT_OK


@main.command(name="levi")
@click.argument("spec_path", type=click.Path())
@click.option("--points", "points_path", type=click.Path(), default=None)
@click.option("--zero-block", type=int, default=None, help="Sample b1 points with this block zeroed (1-based).")
@click.option("--fd/--no-fd", default=True, show_default=True, help="Also compute the finite-difference spectrum.")
@common
def levi_cmd(spec_path, points_path, zero_block, fd, tol, seed, samples, p_tol):
    """Levi-form spectra at boundary points."""
    spec = _standard(_spec(spec_path))
    rng = rng_from(seed)
    pts = io.read_points(points_path) if points_path else _sample_boundary(spec, rng, samples, zero_block)
    records = []
    weak = 0
    for k, p in enumerate(pts):
        st = hua.classify_boundary(spec, p, tol)
        rec = {"index": k, "tag": str(st)}
        if st.tag == hua.B1 and spec.exponents[st.witness - 1] >= 2:
            t0 = levi.degenerate_direction(spec, p, st.witness)
            rec["levi_T0"] = levi.levi_form(spec, p, t0)
        try:
            rep = levi.classify_pseudoconvexity(spec, p, levi.PSC_TOL)
        except NonSmoothPointError as exc:
            rec["error"] = str(exc)
            records.append(rec)
            continue
        rec["min_eigenvalue"] = rep.min_eigenvalue
        rec["strongly_pseudoconvex"] = rep.strongly_pseudoconvex
        if fd:
            ev = np.linalg.eigvalsh(_herm(levi.levi_matrix(spec, p, "finite_diff")))
            rec["min_eigenvalue_fd"] = float(ev[0])
        weak += not rep.strongly_pseudoconvex
        records.append(rec)
    return io.make_report("levi", records, {"points": len(records), "not_strongly_pseudoconvex": weak}), EXIT_OK


def _herm(m):
    return 0.5 * (m + m.conj().T)


@main.command(name="aut-sample")
@click.argument("spec_path", type=click.Path())
@click.option("--count", type=int, default=1, show_default=True)
@common
def aut_sample(spec_path, count, tol, seed, samples, p_tol):
    """Emit seeded random automorphisms (JSON lines)."""
    spec = _spec(spec_path)
    rng = rng_from(seed)
    lines = [json.dumps(io.gamma_to_json(aut.random_gamma(spec, rng)), sort_keys=True) for _ in range(count)]
    return "".join(line + "\n" for line in lines), EXIT_OK


@main.command(name="aut-apply")
@click.argument("aut_path", type=click.Path())
@click.argument("points_path", type=click.Path())
@common
def aut_apply(aut_path, points_path, tol, seed, samples, p_tol):
    """Apply an automorphism to every point; report margins before and after."""
    g = io.gamma_from_json(io.load_json(aut_path))
    records = []
    bad = 0
    for k, p in enumerate(io.read_points(points_path)):
        q = g(p)
        before, after = hua.hua_margin(g.spec, p), hua.hua_margin(g.spec, q)
        flipped = (before > tol and after <= 0) or (before < -tol and after >= 0)
        bad += flipped
        records.append({"index": k, "image": io.point_to_json(q), "margin_before": before, "margin_after": after})
    return io.make_report("aut-apply", records, {"points": len(records), "sign_changes": bad}), EXIT_VIOLATION if bad else EXIT_OK


@main.command(name="equiv")
@click.argument("spec1_path", type=click.Path())
@click.argument("spec2_path", type=click.Path())
@common
def equiv_cmd(spec1_path, spec2_path, tol, seed, samples, p_tol):
    """Decide whether two Hua domains are biholomorphic (standardizing first)."""
    s1, s2 = _spec(spec1_path), _spec(spec2_path)
    try:
        w = equiv.hua_equivalent(s1, s2, p_tol=p_tol, auto_standardize=True)
    except equiv.UndeterminedEquivalence as exc:
        rec = {"equivalent": None, "reason": str(exc)}
        return io.make_report("equiv", [rec], rec), EXIT_VIOLATION
    if w is None:
        rec = {"equivalent": False, "sigma": None, "base_map": None, "residuals": {}}
        return io.make_report("equiv", [rec], rec), EXIT_VIOLATION
    rng = rng_from(seed)
    flips = 0
    for _ in range(samples):
        p = hua.random_interior_point(s1, rng)
        p = hua.HuaPoint(p.z, tuple(rng.uniform(0.5, 2.0) * b for b in p.w))
        flips += hua.contains(s1, p) != hua.contains(s2, w.apply(p))
    rec = {"equivalent": True, "sigma": list(w.sigma), "base_map": w.base_map, "residuals": {"membership_mismatches": flips}}
    return io.make_report("equiv", [rec], rec), EXIT_VIOLATION if flips else EXIT_OK


@main.command()
@click.argument("matrix_path", type=click.Path())
@click.argument("in_spec_path", type=click.Path())
@click.argument("out_spec_path", type=click.Path())
@common
def recover(matrix_path, in_spec_path, out_spec_path, tol, seed, samples, p_tol):
    """Recover (sigma, U) from a linear map zeta -> zeta L between ellipsoids."""
    l = io.decode_array(io.load_json(matrix_path), 2)
    a = io.ellipsoid_spec_from_json(io.load_json(in_spec_path))
    b = io.ellipsoid_spec_from_json(io.load_json(out_spec_path))
    rec = equiv.recover_block_structure(l, a, b, tol=equiv.RECOVER_TOL, samples=min(samples, 200), seed=seed)
    out = {
        "accepted": rec.accepted,
        "sigma": list(rec.sigma) if rec.sigma else None,
        "unitaries": [io.encode_array(u) for u in rec.unitaries] if rec.unitaries else None,
        "offending": [list(x) for x in rec.offending],
        "reason": rec.reason,
    }
    return io.make_report("recover", [out], {"accepted": rec.accepted}), EXIT_OK if rec.accepted else EXIT_VIOLATION


@main.command(name="sample-boundary")
@click.argument("spec_path", type=click.Path())
@click.option("--zero-block", type=int, default=None)
@common
def sample_boundary(spec_path, zero_block, tol, seed, samples, p_tol):
    """Emit seeded boundary points as JSON lines."""
    spec = _spec(spec_path)
    return io.dumps_points(_sample_boundary(spec, rng_from(seed), samples, zero_block)), EXIT_OK


@main.command(name="selftest")
@click.option("--scale", type=float, default=1.0, show_default=True, help="Multiply every check's sample count.")
@common
def selftest_cmd(scale, tol, seed, samples, p_tol):
    """Run the seeded invariant suite; exit 1 if any check fails."""
    records = selftest.run(seed, scale)
    failed = [r["check"] for r in records if not r["passed"]]
    summary = {"checks": len(records), "failed": failed, "seed": seed}
    return io.make_report("selftest", records, summary), EXIT_VIOLATION if failed else EXIT_OK


if __name__ == "__main__":
    main()
