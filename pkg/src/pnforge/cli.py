"""Command-line pipeline: ingest exact data, solve, certify, export.

Input JSON carries rationals as "num/den" strings (plain integers are
accepted); floats are refused unless --rationalize-floats is given.
Coefficient output is canonical and bit-exact: records sorted by
coordinate then graded-lex, every value serialized as num/den.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from . import mos, network, pn, syzygy
from .errors import Inconsistent, IrrationalIsotropics, PnforgeError
from .gaussfield import MOSHermitePoint, NormalField, PNHermitePoint
from .geometry import EUCLIDEAN3, MINKOWSKI31, inner
from .polyalg import (
    BiPoly,
    HomTriPoly,
    PolyVec,
    Q,
    format_rational,
    grlex_key,
    parse_rational,
    perfect_square_root,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INCONSISTENT = 3
EXIT_IRRATIONAL = 4
EXIT_INTERNAL = 5


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------
# exact value parsing and serialization


def _rat(value, rationalize=False):
    if isinstance(value, float):
        if not rationalize:
            raise InputError(
                f"float {value!r} in exact corner data; pass rationals or use "
                "--rationalize-floats"
            )
        return Q(Fraction(value).limit_denominator(10 ** 6))
    try:
        return parse_rational(value)
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad rational {value!r}: {exc}") from None


def _vec(values, dim, rationalize=False):
    if len(values) != dim:
        raise InputError(f"expected a {dim}-vector, got {values!r}")
    return tuple(_rat(x, rationalize) for x in values)


def poly_records(p, coord=0):
    """Canonical coefficient records of one polynomial."""
    recs = [
        {"coord": coord, "i": i, "j": j, "value": format_rational(val)}
        for (i, j), val in p.terms()
    ]
    recs.sort(key=lambda r: (r["coord"], grlex_key((r["i"], r["j"]))))
    return recs


def polyvec_records(x):
    recs = []
    for c, p in enumerate(x):
        recs.extend(poly_records(p, c))
    return recs


def poly_from_records(records, coord=0):
    coeffs = {}
    for r in records:
        if r.get("coord", 0) != coord:
            continue
        coeffs[(int(r["i"]), int(r["j"]))] = parse_rational(r["value"])
    return BiPoly(coeffs)


def polyvec_from_records(records, dim):
    return PolyVec([poly_from_records(records, c) for c in range(dim)])


def _field_from_spec(spec, rationalize=False):
    kind = spec.get("kind", "pythagorean3")
    dim = 3 if kind == "pythagorean3" else 4
    n = polyvec_from_records(spec["normal"], dim)
    if kind == "pythagorean3":
        sigma = perfect_square_root(inner(n, n, EUCLIDEAN3))
        if sigma is None:
            raise InputError("normal field is not Pythagorean: |n|^2 is not a square")
        return NormalField(n, sigma, kind)
    if not inner(n, n, MINKOWSKI31).is_zero():
        raise InputError("normal field is not isotropic")
    return NormalField(n, BiPoly.zero(), kind)


# ---------------------------------------------------------------------
# exports


def _domain_grid(domain, nu, nv):
    pts = []
    for i in range(nu + 1):
        for j in range(nv + 1):
            a, b = Q(i, nu), Q(j, nv)
            if domain == "tri" and a + b > 1:
                continue
            pts.append((a, b))
    return pts


def write_obj(path, x, normal_field=None, domain="quad", res=(16, 16)):
    """Sample the exact surface into an OBJ mesh with float vertices."""
    nu, nv = res
    lines = ["# pnforge mesh"]
    index = {}
    pts = _domain_grid(domain, nu, nv)
    for k, (a, b) in enumerate(pts):
        index[(a, b)] = k + 1
        px = x.evaluate_float(float(a), float(b))
        lines.append("v " + " ".join(f"{c:.17g}" for c in px))
    if normal_field is not None:
        for (a, b) in pts:
            nv3 = normal_field.n.evaluate_float(float(a), float(b))
            norm = math.sqrt(sum(c * c for c in nv3)) or 1.0
            lines.append("vn " + " ".join(f"{c / norm:.17g}" for c in nv3))
    for i in range(nu):
        for j in range(nv):
            corners = [
                (Q(i, nu), Q(j, nv)),
                (Q(i + 1, nu), Q(j, nv)),
                (Q(i + 1, nu), Q(j + 1, nv)),
                (Q(i, nu), Q(j + 1, nv)),
            ]
            present = [index.get(c) for c in corners]
            if all(present):
                a, b, c, d = present
                if normal_field is not None:
                    lines.append(f"f {a}//{a} {b}//{b} {c}//{c} {d}//{d}")
                else:
                    lines.append(f"f {a} {b} {c} {d}")
            elif present[0] and present[1] and present[3]:
                a, b, d = present[0], present[1], present[3]
                if normal_field is not None:
                    lines.append(f"f {a}//{a} {b}//{b} {d}//{d}")
                else:
                    lines.append(f"f {a} {b} {d}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_envelope_objs(out_dir, pair, domain="quad", res=(16, 16)):
    nu, nv = res
    paths = []
    for sign, name in ((1, "envelope_plus.obj"), (-1, "envelope_minus.obj")):
        lines = ["# pnforge envelope sheet"]
        pts = _domain_grid(domain, nu, nv)
        index = {}
        k = 0
        for (a, b) in pts:
            d = pair.denom.evaluate_float(float(a), float(b))
            if d == 0:
                continue
            k += 1
            index[(a, b)] = k
            px = pair.sheet_float(sign, float(a), float(b))
            lines.append("v " + " ".join(f"{c:.17g}" for c in px))
        for i in range(nu):
            for j in range(nv):
                quad = [
                    index.get((Q(i, nu), Q(j, nv))),
                    index.get((Q(i + 1, nu), Q(j, nv))),
                    index.get((Q(i + 1, nu), Q(j + 1, nv))),
                    index.get((Q(i, nu), Q(j + 1, nv))),
                ]
                if all(quad):
                    lines.append("f " + " ".join(str(q) for q in quad))
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        paths.append(path)
    return paths


def write_f_sign_grid(path, f, domain="quad", res=32):
    """Gnuplot-ready dump of sign(f) over the parameter domain."""
    with open(path, "w") as fh:
        fh.write("# u v f_sign\n")
        for i in range(res + 1):
            for j in range(res + 1):
                a, b = Q(i, res), Q(j, res)
                if domain == "tri" and a + b > 1:
                    continue
                val = f.evaluate(a, b)
                sign = 0 if val == 0 else (1 if val > 0 else -1)
                fh.write(f"{float(a):.6f} {float(b):.6f} {sign}\n")
            fh.write("\n")


# ---------------------------------------------------------------------
# job execution


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _report(out_dir, lines):
    path = os.path.join(out_dir, "report.txt")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    for line in lines:
        print(line)
    return path


def _run_pn(args, arrangement):
    payload = _load_json(args.input)
    rz = args.rationalize_floats
    try:
        pts = [
            PNHermitePoint(_vec(p, 3, rz), _vec(N, 3, rz))
            for p, N in zip(payload["points"], payload["normals"])
        ]
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    solver = pn.hermite_quad if arrangement == "quad" else pn.hermite_tri
    fam = solver(
        pts,
        degree=args.degree,
        center=args.center,
        near_threshold=args.near_center_threshold,
    )
    patch = fam.patch()
    cert = patch.certificate
    lines = [
        f"mode: pn-{arrangement}",
        f"surface degree: {fam.degree}",
        f"family dimension: {fam.dim}",
        f"normal field degree: {int(fam.field.degree)}",
        f"sigma_n: {fam.field.sigma}",
        f"f (representative): {cert.f}",
        f"sigma_area (representative): {cert.sigma_area}",
        f"degenerate locus in domain: {cert.degenerate_locus_nonempty}",
    ]
    for p, (cu, cv) in zip(pts, pn.corner_parameters(arrangement)):
        res = tuple(a - b for a, b in zip(patch.evaluate(cu, cv), p.point))
        lines.append(f"corner ({cu},{cv}) residual: {res}")
    with open(os.path.join(args.out_dir, "coefficients.json"), "w") as fh:
        json.dump(polyvec_records(patch.x), fh, indent=1)
    write_f_sign_grid(os.path.join(args.out_dir, "fsign.dat"), cert.f, arrangement)
    if args.mesh_res:
        write_obj(
            os.path.join(args.out_dir, "mesh.obj"),
            patch.x,
            fam.field,
            arrangement,
            args.mesh_res,
        )
        lines.append("mesh: mesh.obj")
    _report(args.out_dir, lines)
    return EXIT_OK


def _run_mos(args, arrangement):
    payload = _load_json(args.input)
    rz = args.rationalize_floats
    try:
        pts = [
            MOSHermitePoint(_vec(p, 4, rz), _vec(t1, 4, rz), _vec(t2, 4, rz))
            for p, (t1, t2) in zip(payload["points"], payload["tangents"])
        ]
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    if args.degree is None:
        raise InputError("--degree is required for MOS interpolation")
    solver = mos.hermite_quad_mos if arrangement == "quad" else mos.hermite_tri_mos
    fam = solver(pts, args.degree, branch=args.branch, center=args.center)
    patch = fam.patch()
    sigma = patch.sigma
    env = mos.envelope(patch)
    lines = [
        f"mode: mos-{arrangement}",
        f"surface degree: {fam.degree}",
        f"family dimension: {fam.dim}",
        f"sigma: {sigma}",
    ]
    with open(os.path.join(args.out_dir, "coefficients.json"), "w") as fh:
        json.dump(polyvec_records(patch.x), fh, indent=1)
    if args.mesh_res:
        paths = write_envelope_objs(args.out_dir, env, arrangement, args.mesh_res)
        lines.append("envelopes: " + ", ".join(os.path.basename(p) for p in paths))
    _report(args.out_dir, lines)
    return EXIT_OK


def _run_grid(args):
    payload = _load_json(args.input)
    rz = args.rationalize_floats
    try:
        rows = [
            [
                PNHermitePoint(_vec(cell["point"], 3, rz), _vec(cell["normal"], 3, rz))
                for cell in row
            ]
            for row in payload["grid"]
        ]
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    if args.degree is None:
        raise InputError("--degree is required for grid interpolation")
    grid = network.HermiteGrid(tuple(tuple(r) for r in rows))
    fam = network.interpolate_grid(
        grid, args.degree, center=args.center, near_threshold=args.near_center_threshold
    )
    net = fam.network()
    lines = [
        "mode: pn-grid",
        f"cells: {grid.cells[0]} x {grid.cells[1]}",
        f"surface degree: {args.degree}",
        f"network family dimension: {fam.dim}",
    ]
    recs = []
    for i, row in enumerate(net.patches):
        for j, patch in enumerate(row):
            for rec in polyvec_records(patch.x):
                rec["patch"] = [i, j]
                recs.append(rec)
    with open(os.path.join(args.out_dir, "coefficients.json"), "w") as fh:
        json.dump(recs, fh, indent=1)
    if args.mesh_res:
        for i, row in enumerate(net.patches):
            for j, patch in enumerate(row):
                write_obj(
                    os.path.join(args.out_dir, f"mesh_{i}_{j}.obj"),
                    patch.x,
                    patch.normal_field,
                    "quad",
                    args.mesh_res,
                )
        lines.append("meshes: mesh_<i>_<j>.obj")
    _report(args.out_dir, lines)
    return EXIT_OK


def _run_family(args):
    payload = _load_json(args.input)
    field = _field_from_spec(payload)
    ell = int(payload.get("ell", args.degree if args.degree is not None else 2))
    if field.kind == "pythagorean3":
        fam = pn.pn_family(field, ell)
    else:
        fam = mos.mos_family(field, ell=ell)
    lines = [
        "mode: family",
        f"field kind: {field.kind}",
        f"tangent degree: {ell}",
        f"family dimension: {fam.dim}",
    ]
    recs = []
    for k, x in enumerate(fam.surfaces):
        for rec in polyvec_records(x):
            rec["member"] = k
            recs.append(rec)
    with open(os.path.join(args.out_dir, "coefficients.json"), "w") as fh:
        json.dump(recs, fh, indent=1)
    _report(args.out_dir, lines)
    return EXIT_OK


def _run_syzygy(args):
    payload = _load_json(args.input)
    try:
        degree = int(payload["degree"])
        comps = []
        for coord in range(3):
            coeffs = {}
            for r in payload["N"]:
                if int(r.get("coord", 0)) == coord:
                    coeffs[(int(r["i"]), int(r["j"]), int(r["k"]))] = parse_rational(
                        r["value"]
                    )
            comps.append(HomTriPoly(coeffs, degree))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    field = syzygy.HomNormalField(tuple(comps))
    lmax = args.lmax if args.lmax is not None else 3 * degree
    lines = ["mode: syzygy-report", f"field degree: {degree}", f"scan up to: {lmax}"]
    verdict = "free"
    for ell in range(lmax + 1):
        dim = syzygy.syzygy_dim(field, ell)
        bound = syzygy.hilbert_bound(degree, ell)
        marker = ""
        if dim > bound:
            verdict = "has_base_points"
            marker = "  <- strict"
        lines.append(f"l={ell}: dim {dim}, bound {bound}{marker}")
    if verdict == "free":
        lines.append(f"verdict: basepoint-free (tested up to l={lmax})")
    else:
        strict = next(
            ell
            for ell in range(lmax + 1)
            if syzygy.syzygy_dim(field, ell) > syzygy.hilbert_bound(degree, ell)
        )
        dim = syzygy.syzygy_dim(field, strict)
        bound = syzygy.hilbert_bound(degree, strict)
        lines.append(
            f"verdict: base points detected (l={strict}: dim {dim} > bound {bound})"
        )
    _report(args.out_dir, lines)
    return EXIT_OK


def _run_certify(args):
    payload = _load_json(args.input)
    try:
        surface = polyvec_from_records(payload["surface"], 3)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    field = _field_from_spec(payload)
    domain = payload.get("domain", "quad")
    cert = pn.certify(surface, field, domain=domain)
    lines = [
        "mode: certify",
        f"f: {cert.f}",
        f"sigma_area: {cert.sigma_area}",
        f"degenerate locus in domain: {cert.degenerate_locus_nonempty}",
    ]
    write_f_sign_grid(os.path.join(args.out_dir, "fsign.dat"), cert.f, domain)
    _report(args.out_dir, lines)
    return EXIT_OK


# ---------------------------------------------------------------------
# argument handling


def _parse_center(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("center must be x,y,z")
    return tuple(parse_rational(p) for p in parts)


def _parse_res(text):
    try:
        a, b = text.lower().split("x")
        return (int(a), int(b))
    except ValueError:
        raise argparse.ArgumentTypeError("mesh resolution must look like 16x16")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="pnforge",
        description="polynomial PN/MOS surface construction and certification",
    )
    ap.add_argument(
        "--mode",
        required=True,
        choices=[
            "pn-quad",
            "pn-tri",
            "pn-grid",
            "mos-quad",
            "mos-tri",
            "family",
            "syzygy-report",
            "certify",
        ],
    )
    ap.add_argument("--input", required=True, help="input JSON path")
    ap.add_argument("--degree", type=int, default=None)
    ap.add_argument("--branch", choices=["plus", "minus"], default="plus")
    ap.add_argument("--center", type=_parse_center, default=(Q(0), Q(0), Q(1)))
    ap.add_argument(
        "--near-center-threshold", type=parse_rational, default=Q(1, 8)
    )
    ap.add_argument("--lmax", type=int, default=None)
    ap.add_argument("--mesh-res", type=_parse_res, default=None)
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--rationalize-floats", action="store_true")
    return ap


def run(argv=None):
    args = build_parser().parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    try:
        if args.mode == "pn-quad":
            return _run_pn(args, "quad")
        if args.mode == "pn-tri":
            return _run_pn(args, "tri")
        if args.mode == "pn-grid":
            return _run_grid(args)
        if args.mode == "mos-quad":
            return _run_mos(args, "quad")
        if args.mode == "mos-tri":
            return _run_mos(args, "tri")
        if args.mode == "family":
            return _run_family(args)
        if args.mode == "syzygy-report":
            return _run_syzygy(args)
        if args.mode == "certify":
            return _run_certify(args)
        raise InputError(f"unknown mode {args.mode}")
    except InputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except Inconsistent as exc:
        hint = (
            f"; try --degree {exc.suggested_degree}"
            if exc.suggested_degree is not None
            else ""
        )
        print(f"inconsistent: {exc}{hint}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except IrrationalIsotropics as exc:
        print(f"irrational isotropic directions: {exc}", file=sys.stderr)
        return EXIT_IRRATIONAL
    except (PnforgeError, ValueError, AssertionError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
