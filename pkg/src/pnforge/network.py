"""Multi-patch assemblies and free-parameter selection.

Grids of PN patches share corner normal images, so the per-cell bilinear
lifts agree along edges and the assembled networks are G1 wherever the
positions are stitched C0.  Stitching, symmetry-plane side constraints
and reflection extension are exact; only the implicit-surface fitting
objective is evaluated in floating point, and the selected member is
re-substituted exactly afterwards.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConstraintNotSatisfied, Inconsistent, OptimizerDiverged
from .exactla import AffineForm, LinPoly, LinearSystem, Registry, solve_affine
from .gaussfield import (
    DEFAULT_NEAR_THRESHOLD,
    NORTH,
    PNHermitePoint,
    apply_rotation,
    auto_rotate_frame,
    lift_pythagorean,
    planar_patch_quad,
    rotation_to_north,
    stereo_project,
    transpose,
)
from .pn import HermiteProblem, PNPatch, assemble_hermite
from .polyalg import BiPoly, PolyVec, Q

_IDENT_U = BiPoly.monomial(1, 0)
_IDENT_V = BiPoly.monomial(0, 1)

EDGES = {
    "u0": (BiPoly.const(0), _IDENT_V),
    "u1": (BiPoly.const(1), _IDENT_V),
    "v0": (_IDENT_U, BiPoly.const(0)),
    "v1": (_IDENT_U, BiPoly.const(1)),
    "diag": (_IDENT_U, BiPoly.const(1) - _IDENT_U),
}


def _workers():
    try:
        return max(1, int(os.environ.get("PNFORGE_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class HermiteGrid:
    """Rectangular (m+1) x (n+1) array of points with unit normals."""

    points: tuple

    def __post_init__(self):
        rows = tuple(tuple(p for p in row) for row in self.points)
        if len(rows) < 2 or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("grid must be rectangular with at least 2x2 points")
        for row in rows:
            for p in row:
                if not isinstance(p, PNHermitePoint):
                    raise TypeError("grid entries must be PNHermitePoint")
        object.__setattr__(self, "points", rows)

    @property
    def cells(self):
        return len(self.points) - 1, len(self.points[0]) - 1


@dataclass
class PatchNetwork:
    patches: list  # m x n nested lists of PNPatch


@dataclass
class GridFamily:
    grid: HermiteGrid
    degree: int
    cell_families: list          # m x n nested lists of HermiteFamily
    coupled: object              # SolutionFamily over stacked cell parameters
    offsets: list                # flat parameter offset per cell (row-major)

    @property
    def dim(self):
        return self.coupled.dim

    def network(self, params=None):
        vec = self.coupled.member(params)
        m, n = self.grid.cells
        patches = []
        flat = 0
        out = []
        for i in range(m):
            row = []
            for j in range(n):
                fam = self.cell_families[i][j]
                lo = self.offsets[flat]
                hi = self.offsets[flat + 1] if flat + 1 < len(self.offsets) else len(vec)
                local = vec[lo:hi]
                row.append(fam.patch(local))
                flat += 1
            out.append(row)
        return PatchNetwork(out)


def _edge_restrict(p, edge):
    eu, ev = EDGES[edge]
    return p.substitute(eu, ev)


def interpolate_grid(grid, degree, center=NORTH,
                     near_threshold=DEFAULT_NEAR_THRESHOLD):
    """G1 network family over a rectangular Hermite grid.

    One shared pre-rotation is chosen for the whole grid, each cell gets
    the bilinear-lift normal field of its four corners (C0 across edges
    by construction), the cells are solved independently, and the C0
    stitching equations couple the per-cell free parameters.
    """
    pts = grid.points
    m, n = grid.cells
    normals = [p.unit_normal for row in pts for p in row]
    rot = rotation_to_north(center)
    identity = rotation_to_north(NORTH)

    def margin(ctr):
        return min(1 - sum(a * b for a, b in zip(N, ctr)) for N in normals)

    if margin(center) < near_threshold:
        rot = auto_rotate_frame(normals, near_threshold)
    images = {}
    for a, row in enumerate(pts):
        for b, p in enumerate(row):
            images[(a, b)] = stereo_project(
                apply_rotation(rot, p.unit_normal), near_threshold=near_threshold
            )

    def cell_field(i, j):
        nhat = planar_patch_quad(
            [images[(i, j)], images[(i + 1, j)], images[(i + 1, j + 1)], images[(i, j + 1)]]
        )
        field = lift_pythagorean(nhat)
        if rot != identity:
            field = field.rotated(transpose(rot))
        return field

    def solve_cell(args):
        i, j = args
        data = [pts[i][j], pts[i + 1][j], pts[i + 1][j + 1], pts[i][j + 1]]
        problem = assemble_hermite(data, degree, cell_field(i, j), "quad")
        return problem.solve()

    cell_idx = [(i, j) for i in range(m) for j in range(n)]
    workers = _workers()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(solve_cell, cell_idx))
    else:
        solved = [solve_cell(ij) for ij in cell_idx]
    fams = [[solved[i * n + j] for j in range(n)] for i in range(m)]

    offsets = []
    total = 0
    for i, j in cell_idx:
        offsets.append(total)
        total += fams[i][j].dim
    reg_labels = [("cell", i, j) for i, j in cell_idx for _ in range(fams[i][j].dim)]
    sys = LinearSystem(ncols=total, labels=reg_labels)

    def add_stitch(fam_a, off_a, edge_a, fam_b, off_b, edge_b):
        for coord in range(3):
            diff = _edge_restrict(fam_a.particular[coord], edge_a) - _edge_restrict(
                fam_b.particular[coord], edge_b
            )
            coeffs = {}
            for e, val in diff.items():
                coeffs[e] = AffineForm(val)
            for k, bs in enumerate(fam_a.basis_surfaces):
                restricted = _edge_restrict(bs[coord], edge_a)
                for e, val in restricted.items():
                    coeffs.setdefault(e, AffineForm(0))
                    coeffs[e] = coeffs[e] + AffineForm(0, {off_a + k: val})
            for k, bs in enumerate(fam_b.basis_surfaces):
                restricted = _edge_restrict(bs[coord], edge_b)
                for e, val in restricted.items():
                    coeffs.setdefault(e, AffineForm(0))
                    coeffs[e] = coeffs[e] + AffineForm(0, {off_b + k: -val})
            sys.add_identity_zero(LinPoly(coeffs))

    for i in range(m):
        for j in range(n):
            flat = i * n + j
            if i + 1 < m:
                add_stitch(fams[i][j], offsets[flat], "u1",
                           fams[i + 1][j], offsets[(i + 1) * n + j], "u0")
            if j + 1 < n:
                add_stitch(fams[i][j], offsets[flat], "v1",
                           fams[i][j + 1], offsets[i * n + j + 1], "v0")
    coupled = solve_affine(sys)
    return GridFamily(grid, degree, fams, coupled, offsets)


def add_linear_side_constraints(problem, constraints):
    """Append boundary-plane rows (direction . x == 0 on an edge).

    constraints: iterable of (direction 3-vector, edge name); edges are
    'u0', 'u1', 'v0', 'v1' or 'diag' (the line u + v = 1).
    """
    if not isinstance(problem, HermiteProblem):
        raise TypeError("expected an assembled Hermite problem")
    for direction, edge in constraints:
        direction = [Q(x) for x in direction]
        expr = None
        for coord in range(3):
            if direction[coord] == 0:
                continue
            term = problem.xvec[coord].scale(direction[coord])
            expr = term if expr is None else expr + term
        if expr is None:
            continue
        eu, ev = EDGES[edge]
        problem.system.add_identity_zero(expr.substitute(eu, ev))
    return problem


# ---------------------------------------------------------------------
# implicit-surface objective


class TriPoly:
    """Small exact trivariate polynomial for implicit surfaces."""

    def __init__(self, coeffs):
        self.c = {}
        for e, val in coeffs.items():
            val = Q(val)
            if val != 0:
                self.c[tuple(int(x) for x in e)] = val

    def diff(self, axis):
        out = {}
        for e, val in self.c.items():
            if e[axis] == 0:
                continue
            ne = list(e)
            ne[axis] -= 1
            out[tuple(ne)] = val * e[axis]
        return TriPoly(out)

    def evaluate_float(self, x, y, z):
        return sum(
            float(val) * x ** i * y ** j * z ** k for (i, j, k), val in self.c.items()
        )

    def evaluate(self, x, y, z):
        x, y, z = Q(x), Q(y), Q(z)
        return sum(
            (val * x ** i * y ** j * z ** k for (i, j, k), val in self.c.items()),
            Q(0),
        )


def _quad_nodes(order, domain):
    """Quadrature nodes and weights on the unit square or triangle."""
    xs, ws = np.polynomial.legendre.leggauss(order)
    xs = (xs + 1.0) / 2.0
    ws = ws / 2.0
    nodes, weights = [], []
    for a, wa in zip(xs, ws):
        for b, wb in zip(xs, ws):
            if domain == "tri":
                u = (1.0 - b) * a
                nodes.append((u, b))
                weights.append(wa * wb * (1.0 - b))
            else:
                nodes.append((a, b))
                weights.append(wa * wb)
    return nodes, weights


@dataclass
class FitResult:
    params: list           # exact rationals, re-substituted
    params_float: list
    phi: float
    surface: PolyVec

    def patch(self, field, domain="tri"):
        return PNPatch(self.surface, field, domain)


def fit_to_implicit(family, f, order=16, max_iter=100, step_tol=1e-12):
    """Minimize the quadrature form of Phi(t) = integral f^2/|grad f|^2.

    family is an affine surface family (particular + basis); the surface
    is evaluated at tensor Gauss nodes and the free parameters are tuned
    by damped Gauss-Newton starting from the zero representative.  The
    minimizer is rationalized (denominator <= 1e12) so the returned
    member keeps every exact certificate of the family.
    """
    domain = "tri" if family.arrangement == "tri" else "quad"
    nodes, weights = _quad_nodes(order, domain)
    sqrtw = np.sqrt(np.array(weights))
    grads = [f.diff(axis) for axis in range(3)]
    hess = [[grads[a].diff(bx) for bx in range(3)] for a in range(3)]

    base = np.array([family.particular.evaluate_float(a, b) for a, b in nodes])
    basis = [
        np.array([bs.evaluate_float(a, b) for a, b in nodes])
        for bs in family.basis_surfaces
    ]
    # canonical basis vectors are primitive integers and can be huge;
    # rescale by exact powers of two so the float problem is conditioned
    scales = []
    for k, bk in enumerate(basis):
        mag = float(np.abs(bk).max())
        exp = int(np.floor(np.log2(mag))) if mag > 0 else 0
        scales.append(Fraction(1, 2 ** exp) if exp >= 0 else Fraction(2 ** (-exp)))
        basis[k] = bk * float(scales[-1])
    ndim = len(basis)

    def eval_state(t):
        pts = base.copy()
        for tk, bk in zip(t, basis):
            pts += tk * bk
        fv = np.array([f.evaluate_float(*p) for p in pts])
        gv = np.array([[g.evaluate_float(*p) for g in grads] for p in pts])
        gn2 = np.einsum("ij,ij->i", gv, gv)
        if np.any(gn2 <= 0):
            raise OptimizerDiverged("gradient of the implicit vanishes at a node")
        return pts, fv, gv, gn2

    def phi_of(t):
        _, fv, _, gn2 = eval_state(t)
        return float(np.sum(weights * fv * fv / gn2))

    t = np.zeros(ndim)
    if ndim == 0:
        return FitResult([], [], phi_of(t), family.surface())
    phi = phi_of(t)
    mu = 0.0
    for _ in range(max_iter):
        pts, fv, gv, gn2 = eval_state(t)
        gn = np.sqrt(gn2)
        rho = sqrtw * fv / gn
        J = np.zeros((len(nodes), ndim))
        for k, bk in enumerate(basis):
            gb = np.einsum("ij,ij->i", gv, bk)
            hb = np.array(
                [
                    sum(
                        gv[i, a] * hess[a][bx].evaluate_float(*pts[i]) * bk[i, bx]
                        for a in range(3)
                        for bx in range(3)
                    )
                    for i in range(len(nodes))
                ]
            )
            J[:, k] = sqrtw * (gb / gn - fv * hb / gn ** 3)
        gradient = J.T @ rho
        hessian = J.T @ J
        step = None
        for _attempt in range(30):
            try:
                delta = np.linalg.solve(hessian + mu * np.eye(ndim), -gradient)
            except np.linalg.LinAlgError:
                mu = max(mu * 10, 1e-10)
                continue
            cand = t + delta
            phi_cand = phi_of(cand)
            if not np.isfinite(phi_cand):
                raise OptimizerDiverged("objective became non-finite")
            if phi_cand < phi:
                step = delta
                t = cand
                phi = phi_cand
                mu = mu / 3 if mu > 1e-14 else 0.0
                break
            mu = max(mu * 10, 1e-10)
        if step is None:
            break
        if np.linalg.norm(step) < step_tol:
            break
    exact = [
        Q(Fraction(float(tk)).limit_denominator(10 ** 12) * sk)
        for tk, sk in zip(t, scales)
    ]
    surface = family.surface(exact)
    return FitResult(exact, [float(tk) * float(sk) for tk, sk in zip(t, scales)], phi, surface)


# ---------------------------------------------------------------------
# symmetry extension


_DOMAIN_EDGES = {"quad": ("u0", "u1", "v0", "v1"), "tri": ("u0", "v0", "diag")}


def reflect_extend(patch, axis):
    """Mirror a patch through the coordinate plane x_axis = 0.

    Requires some boundary edge of the patch to lie in that plane; the
    reflected patch then shares that boundary pointwise and the joined
    pair is C0, with matching tangent planes wherever the normal field's
    axis component vanishes on the edge.
    """
    x = patch.x
    found = False
    for edge in _DOMAIN_EDGES[patch.domain]:
        if _edge_restrict(x[axis], edge).is_zero():
            found = True
            break
    if not found:
        raise ConstraintNotSatisfied(
            f"no boundary edge lies in the plane x_{axis} = 0"
        )
    comps = [(-x[i] if i == axis else x[i]) for i in range(3)]
    nf = patch.normal_field
    ncomps = [(-nf.n[i] if i == axis else nf.n[i]) for i in range(3)]
    from .gaussfield import NormalField

    reflected_field = NormalField(PolyVec(ncomps), nf.sigma, nf.kind)
    return PNPatch(PolyVec(comps), reflected_field, patch.domain)
