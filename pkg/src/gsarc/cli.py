"""Command-line front end.

    gsarc classify --named kvn
    gsarc green --alpha 0 --beta 0 --delta 0
    gsarc perturb --named dirichlet --format md
    gsarc roots --named periodic --zmax 500
    gsarc survey --count 200 --seed 1
    gsarc tables > tables.md

Exit status: 0 on success, 1 on a domain error, 2 on a usage error.
"""

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import bc as bcm
from . import greens, perturbation, resolvent, spectral
from .kernels import KernelError, as_fraction, frac_str


class DomainError(Exception):
    pass


def _rational(text):
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _unit(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return v


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def _points(text):
    out = []
    try:
        for chunk in text.split(";"):
            x, y = (float(v) for v in chunk.split(","))
            out.append((x, y))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y;x,y;...', got {text!r}") from None
    return out


def _f15(v):
    return float(f"{v:.15g}")


def _bc_from_args(args, parser):
    named = args.named is not None
    coupled = any(v is not None for v in (args.alpha, args.beta))
    if named and (coupled or args.delta is not None or args.kind):
        parser.error("--named cannot be combined with --kind/--alpha/--beta/--delta")
    if named:
        return bcm.named(args.named)
    kind = args.kind or bcm.GSARC
    if kind == bcm.GSARC:
        if None in (args.alpha, args.beta, args.delta):
            parser.error("give --named NAME or all of --alpha, --beta, --delta")
        return bcm.gsarc(args.alpha, args.beta, args.delta)
    if kind == bcm.LDRR:
        if args.delta is None:
            parser.error("--kind ldrr requires --delta")
        if coupled:
            parser.error("--kind ldrr takes only --delta")
        return bcm.ldrr(args.delta)
    if coupled or args.delta is not None:
        parser.error(f"--kind {kind} takes no parameters")
    return bcm.BoundaryCondition(kind)


# --- emitters --------------------------------------------------------------------------------


class Result:
    def __init__(self, payload, header=None, rows=None, markdown=None):
        self.payload = payload
        self.header = header
        self.rows = rows
        self.markdown = markdown


def _flatten(payload, prefix=""):
    for k, v in payload.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, json.dumps(v) if isinstance(v, (list, tuple)) else v


def _md_table(header, rows):
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(lines)


def emit(result, fmt, out):
    if fmt == "json":
        out.write(json.dumps(result.payload, indent=2) + "\n")
        return
    header, rows = result.header, result.rows
    if header is None:
        header, rows = ["key", "value"], list(_flatten(result.payload))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        out.write(buf.getvalue())
    else:
        out.write((result.markdown or _md_table(header, rows)) + "\n")


# --- commands --------------------------------------------------------------------------------


def _disc_str(bc):
    try:
        d = bcm.discriminant(bc)
    except bcm.NotApplicable:
        return None
    if isinstance(d, float):
        return "inf" if d > 0 else "-inf"
    return frac_str(d)


def cmd_classify(bc, args):
    payload = {
        "bc": bc.to_json(),
        "delta": _disc_str(bc),
        "zero_eig": bcm.has_zero_eigenvalue(bc),
        "rank": perturbation.rank(bc),
    }
    return Result(payload)


def _kernel_rows(named_polys):
    rows = []
    for name, P in named_polys:
        for (i, j), c in P.sorted_terms():
            rows.append([name, i, j, frac_str(c)])
    return ["part", "i", "j", "c"], rows


def cmd_green(bc, args):
    pkg = greens.green_kernel(bc)
    header, rows = _kernel_rows([("Q", pkg.g0.lower), ("p", pkg.p)])
    md = _md_table(["quantity", "value"], [
        ["G0 (x <= y)", repr(pkg.g0.lower_branch())],
        ["G0", f"-1/2|x-y| + {pkg.g0.lower!r}"],
        ["p", repr(pkg.p)],
        ["multiplicity", pkg.multiplicity],
    ])
    return Result(pkg.to_json(), header, rows, md)


def cmd_riesz(bc, args):
    pkg = greens.green_kernel(bc)
    header, rows = _kernel_rows([("p", pkg.p)])
    return Result({"bc": bc.to_json(), "p": pkg.p.to_json(), "multiplicity": pkg.multiplicity}, header, rows)


def _grid(n):
    t = np.linspace(0.0, 1.0, n)
    return [(float(x), float(y)) for x in t for y in t]


def cmd_resolvent_eval(bc, args):
    pts = _grid(args.grid) if args.grid else [(args.x, args.y)]
    rows = []
    for x, y in pts:
        g = complex(resolvent.resolvent_eval(bc, args.z, x, y))
        rows.append([x, y, _f15(g.real), _f15(g.imag)])
    payload = {"bc": bc.to_json(), "z": [args.z.real, args.z.imag], "samples": [dict(zip(("x", "y", "re", "im"), r)) for r in rows]}
    return Result(payload, ["x", "y", "re", "im"], rows)


def cmd_roots(bc, args):
    roots = resolvent.characteristic_roots(bc, args.zmax, with_multiplicity=True)
    if args.negative:
        roots = resolvent.negative_roots(bc, -args.zmax, with_multiplicity=True) + roots
    rows = [[_f15(r.z), r.multiplicity] for r in roots]
    return Result({"bc": bc.to_json(), "roots": [{"z": z, "multiplicity": m} for z, m in rows]}, ["z", "multiplicity"], rows)


def cmd_laurent(bc, args):
    pts = args.points or _grid(args.grid)
    data = resolvent.laurent_data(bc, pts, eps=args.epsilon, M=args.nodes)
    header = ["x", "y", "p_hat", "g0_hat", "d_hat", "p_contour", "g0_contour", "d_contour"]
    cols = [data.p_hat, data.g0_hat, data.d_hat, data.p_contour, data.g0_contour, data.d_contour]
    rows = [[float(x), float(y)] + [_f15(c[k]) for c in cols] for k, (x, y) in enumerate(data.points)]
    payload = {"bc": bc.to_json(), "epsilon": data.epsilon, "nodes": data.nodes, "samples": [dict(zip(header, r)) for r in rows]}
    return Result(payload, header, rows)


def _matrix_md(M):
    return "\n".join("    [" + ", ".join(frac_str(v) for v in row) + "]" for row in M)


def cmd_perturb(bc, args):
    spec = perturbation.perturbation_spectrum(bc)
    payload = spec.to_json()
    payload["bc"] = bc.to_json()
    payload["kernel"] = spec.kernel.to_json()
    rows = [
        [str(_f15(e.lambda_float)) if not isinstance(e.lambda_float, complex) else str(e.lambda_float), e.lambda_exact or "", " ".join(e.vector_json()) if e.exact else ""]
        for e in spec.eigen
    ]
    md = "\n".join([
        f"T(x,y) = {spec.kernel!r}",
        "",
        "basis: " + ", ".join(repr(b) for b in spec.basis),
        "",
        "matrix:",
        _matrix_md(spec.matrix),
        "",
        _md_table(["lambda", "exact", "eigenfunction coefficients"], rows),
        "",
        f"rank: {spec.rank}",
    ])
    return Result(payload, ["lambda", "exact", "coefficients"], rows, md)


def cmd_volterra(args):
    v = perturbation.volterra_decomposition()
    eig = [{"lambda": str(e.value), "lambda_float": [e.lambda_float.real, e.lambda_float.imag], "vector": [str(c) for c in e.coeffs]} for e in v.eigen]
    payload = {"kernel_identity": v.kernel_identity, "matrix": [[frac_str(c) for c in r] for r in v.matrix], "eigen": eig}
    rows = [[d["lambda"], " ".join(d["vector"])] for d in eig]
    return Result(payload, ["lambda", "coefficients"], rows)


def cmd_validate(bc, args):
    report = {"bc": bc.to_json()}
    ok = True
    try:
        greens.verify_green(bc)
        report["verify_green"] = True
    except greens.IdentityViolation as e:
        report["verify_green"] = str(e)
        ok = False
    dual = spectral.duality_check(bc, args.n, args.top)
    report["duality_max_rel_err"] = dual.max_rel_err
    report["duality_unmatched"] = [float(u) for u in dual.unmatched]
    ok &= dual.passed()
    ident = spectral.operator_identity_check(bc, min(args.n, 256))
    report["identity_residual"] = ident.residual
    report["interlacing"] = ident.interlacing_ok
    ok &= ident.residual <= 1e-13 and ident.interlacing_ok
    tr = spectral.trace_check(bc, min(args.n, 256))
    report["trace"] = {"nystrom": tr.nystrom, "exact": tr.exact}
    ok &= abs(tr.nystrom - tr.exact) <= 1e-10
    report["passed"] = bool(ok)
    if not ok:
        raise DomainError(json.dumps(report))
    return Result(report)


def cmd_survey(args):
    report = perturbation.zero_discriminant_rank_survey(args.count, args.seed)
    rows = [[frac_str(a), frac_str(b), r] for r in sorted(report) for a, b in report[r]]
    payload = {
        "count": args.count,
        "seed": args.seed,
        "ranks": {str(r): len(v) for r, v in sorted(report.items())},
        "samples": [{"alpha": a, "beta": b, "rank": r} for a, b, r in rows],
    }
    return Result(payload, ["alpha", "beta", "rank"], rows)


TABLE_BCS = ("nonlocal", "kvn", "dirichlet", "neumann", "periodic", "antiperiodic", "radoux")


def tables_markdown():
    bcs = [bcm.named(n) for n in TABLE_BCS] + [bcm.robin(1, 2), bcm.gsarc(1, 2, Fraction(7, 3)), bcm.gsarc(2, -2, -2)]
    out = ["## Discriminant and perturbation rank", ""]
    out.append(_md_table(["BC", "discriminant", "zero eigenvalue", "rank"], [
        [b.name, _disc_str(b) if _disc_str(b) is not None else "n/a", "yes" if bcm.has_zero_eigenvalue(b) else "no", perturbation.rank(b)]
        for b in bcs
    ]))
    out += ["", "## Green's functions, G0 = -1/2|x-y| + Q(x,y)", ""]
    out.append(_md_table(["BC", "Q(x,y)"], [[b.name, repr(greens.green_kernel(b).g0.lower)] for b in bcs]))
    out += ["", "## Zero-mode kernels p(x,y)", ""]
    out.append(_md_table(["BC", "p(x,y)", "multiplicity"], [
        [b.name, repr(greens.green_kernel(b).p), greens.green_kernel(b).multiplicity] for b in bcs
    ]))
    out += ["", "## Perturbation matrices", ""]
    for b in bcs:
        spec = perturbation.perturbation_spectrum(b)
        if not spec.basis:
            continue
        out += [f"### {b.name}", "", "basis: " + ", ".join(repr(p) for p in spec.basis), "", "```", _matrix_md(spec.matrix), "```", ""]
        out.append("eigenvalues: " + ", ".join(e.lambda_exact or f"{_f15(e.lambda_float)}" for e in spec.eigen))
        out.append("")
    return "\n".join(out).rstrip() + "\n"


def cmd_tables(args):
    md = tables_markdown()
    return Result({"markdown": md}, markdown=md.rstrip("\n"))


# --- parser ----------------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="gsarc", description="Green's functions, resolvents and finite-rank perturbations for -u'' on [0,1].")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "md"), default="json")
    bcp = argparse.ArgumentParser(add_help=False)
    g = bcp.add_argument_group("boundary condition")
    g.add_argument("--named", choices=sorted(bcm.NAMED))
    g.add_argument("--kind", choices=bcm.KINDS)
    g.add_argument("--alpha", type=_rational)
    g.add_argument("--beta", type=_rational)
    g.add_argument("--delta", type=_rational)

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("classify", parents=[bcp, fmt], help="discriminant, zero-eigenvalue flag and rank")
    sub.add_parser("green", parents=[bcp, fmt], help="G0 and p for a boundary condition")
    sub.add_parser("riesz", parents=[bcp, fmt], help="zero-mode kernel p")
    p = sub.add_parser("resolvent-eval", parents=[bcp, fmt], help="G(z,x,y)")
    p.add_argument("--z", type=_complex, required=True)
    p.add_argument("--x", type=_unit, default=0.25)
    p.add_argument("--y", type=_unit, default=0.75)
    p.add_argument("--grid", type=int, help="sample an N x N grid instead of one point")
    p = sub.add_parser("roots", parents=[bcp, fmt], help="real eigenvalues of the boundary problem")
    p.add_argument("--zmax", type=float, default=1000.0)
    p.add_argument("--negative", action="store_true", help="also scan the negative axis")
    p = sub.add_parser("laurent", parents=[bcp, fmt], help="p, G0 and D samples by limits and contour integrals")
    p.add_argument("--points", type=_points)
    p.add_argument("--grid", type=int, default=5)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--nodes", type=int, default=256)
    sub.add_parser("perturb", parents=[bcp, fmt], help="perturbation kernel, matrix and spectrum")
    sub.add_parser("volterra", parents=[fmt], help="Volterra decomposition check and spectrum")
    p = sub.add_parser("validate", parents=[bcp, fmt], help="exact identities plus Nystrom cross-checks")
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--top", type=int, default=5)
    p = sub.add_parser("survey", parents=[fmt], help="ranks over random zero-discriminant (alpha, beta) pairs")
    p.add_argument("--count", type=_positive, default=200)
    p.add_argument("--seed", type=int, default=0)
    sub.add_parser("tables", parents=[fmt], help="Markdown tables of kernels, ranks and matrices")
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "green": cmd_green,
    "riesz": cmd_riesz,
    "resolvent-eval": cmd_resolvent_eval,
    "roots": cmd_roots,
    "laurent": cmd_laurent,
    "perturb": cmd_perturb,
    "validate": cmd_validate,
}


DOMAIN_ERRORS = (
    DomainError,
    bcm.BCError,
    greens.GreensError,
    resolvent.ResolventError,
    perturbation.PerturbationError,
    spectral.SpectralError,
    KernelError,
)


def run(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "volterra":
            result = cmd_volterra(args)
        elif args.command == "survey":
            result = cmd_survey(args)
        elif args.command == "tables":
            if args.format == "md":
                out.write(tables_markdown())
                return 0
            result = cmd_tables(args)
        else:
            try:
                bc = _bc_from_args(args, parser)
            except SystemExit as e:
                return int(e.code or 0)
            result = COMMANDS[args.command](bc, args)
        emit(result, args.format, out)
    except DOMAIN_ERRORS as e:
        err.write(f"gsarc: {type(e).__name__}: {e}\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
