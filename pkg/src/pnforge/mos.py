"""Polynomial MOS surfaces in R^{3,1} and their rational envelopes.

A medial surface transform (x, y, z, r) is MOS when the Minkowski area
element E*G - F^2 is a perfect polynomial square.  Prescribing isotropic
normal fields makes that automatic; the envelope of the carried sphere
family is then rational and is computed here in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import (
    DegenerateMedial,
    DimensionMismatch,
    Inconsistent,
    NotMOS,
    ZeroPolynomial,
)
from .exactla import LinearSystem, LinVec, Registry, nullspace, solve_affine
from .gaussfield import (
    MOSHermitePoint,
    NormalField,
    choose_projection_branch,
    isotropic_normals,
    lift_isotropic,
    planar_patch_quad,
    planar_patch_tri,
    sphere_image,
    stereo_project,
)
from .geometry import EUCLIDEAN3, MINKOWSKI31, cross3, inner
from .polyalg import BiPoly, PolyVec, Q, perfect_square_root

QUAD_CORNERS = ((Q(0), Q(0)), (Q(1), Q(0)), (Q(1), Q(1)), (Q(0), Q(1)))
TRI_CORNERS = ((Q(0), Q(0)), (Q(1), Q(0)), (Q(0), Q(1)))


def minkowski_first_form(x):
    """E, F, G of a surface in R^{3,1} under the indefinite inner product."""
    if x.dim != 4:
        raise DimensionMismatch("expected a 4-component surface")
    xu, xv = x.diff("u"), x.diff("v")
    return (
        inner(xu, xu, MINKOWSKI31),
        inner(xu, xv, MINKOWSKI31),
        inner(xv, xv, MINKOWSKI31),
    )


def euclidean_first_form(xhat):
    """E, F, G of the spatial part under the Euclidean inner product."""
    if xhat.dim != 3:
        raise DimensionMismatch("expected a 3-component surface")
    xu, xv = xhat.diff("u"), xhat.diff("v")
    return (
        inner(xu, xu, EUCLIDEAN3),
        inner(xu, xv, EUCLIDEAN3),
        inner(xv, xv, EUCLIDEAN3),
    )


def mos_certify(x):
    """Exact sigma with E*G - F^2 == sigma^2, or NotMOS."""
    E, F, G = minkowski_first_form(x)
    area = E * G - F * F
    sigma = perfect_square_root(area)
    if sigma is None:
        raise NotMOS("Minkowski area element is not a perfect square")
    return sigma


@dataclass(frozen=True)
class MOSPatch:
    """Medial surface transform with its isotropic normal data."""

    x: PolyVec
    nplus: NormalField = None
    nminus: NormalField = None
    domain: str = "quad"

    @cached_property
    def sigma(self):
        return mos_certify(self.x)

    @property
    def spatial(self):
        return PolyVec([self.x[0], self.x[1], self.x[2]])

    @property
    def radius(self):
        return self.x[3]

    def evaluate(self, a, b):
        return self.x.evaluate(a, b)


@dataclass(frozen=True)
class EnvelopePair:
    """Two rational envelope sheets b = x_hat - r * n with unit normals n.

    Numerators share the denominator E_hat*G_hat - F_hat^2.
    """

    bplus_num: PolyVec
    bminus_num: PolyVec
    nplus_num: PolyVec
    nminus_num: PolyVec
    denom: BiPoly

    def sheet_float(self, sign, a, b):
        num = self.bplus_num if sign > 0 else self.bminus_num
        d = self.denom.evaluate_float(a, b)
        return tuple(p.evaluate_float(a, b) / d for p in num)


def envelope(patch, validate=True):
    """Closed-form envelope pair of the sphere family carried by the MST.

    n_pm = [(r_u G^ - r_v F^) x^_u + (r_v E^ - r_u F^) x^_v -+ sigma (x^_u x x^_v)]
           / (E^ G^ - F^2), then b_pm = x^ - r n_pm.
    """
    xhat = patch.spatial
    r = patch.radius
    Eh, Fh, Gh = euclidean_first_form(xhat)
    denom = Eh * Gh - Fh * Fh
    if denom.is_zero():
        raise DegenerateMedial("spatial first form is degenerate")
    sigma = patch.sigma
    xu, xv = xhat.diff("u"), xhat.diff("v")
    ru, rv = r.diff("u"), r.diff("v")
    w = cross3(xu, xv)
    grad_part = PolyVec(
        [
            (ru * Gh - rv * Fh) * xu[i] + (rv * Eh - ru * Fh) * xv[i]
            for i in range(3)
        ]
    )
    sig_part = PolyVec([sigma * w[i] for i in range(3)])
    nplus_num = grad_part - sig_part
    nminus_num = grad_part + sig_part
    if validate:
        for num in (nplus_num, nminus_num):
            nn = inner(num, num, EUCLIDEAN3)
            if nn != denom * denom:
                raise NotMOS("envelope normal is not a unit rational vector")
    bplus = PolyVec([xhat[i] * denom - r * nplus_num[i] for i in range(3)])
    bminus = PolyVec([xhat[i] * denom - r * nminus_num[i] for i in range(3)])
    return EnvelopePair(bplus, bminus, nplus_num, nminus_num, denom)


# ---------------------------------------------------------------------
# free families from isotropic fields


@dataclass
class MOSFamily:
    fields: tuple
    ell: int
    family: object
    tangent_pairs: list
    surfaces: list

    @property
    def dim(self):
        return self.family.dim

    def surface(self, params):
        from .pn import integrate_tangent_pair

        vec = self.family.member(params)
        q, r = self._resolve(vec)
        return integrate_tangent_pair(q, r)

    def patch(self, params, domain="quad"):
        nplus = self.fields[0]
        nminus = self.fields[1] if len(self.fields) > 1 else None
        return MOSPatch(self.surface(params), nplus, nminus, domain)

    def _resolve(self, vec):
        from .polyalg import monomials_upto

        monos = monomials_upto(self.ell)
        ncoef = len(monos)

        def vec_from(offset):
            comps = []
            for c in range(4):
                base = (offset + c) * ncoef
                comps.append(BiPoly({monos[t]: vec[base + t] for t in range(ncoef)}))
            return PolyVec(comps)

        return vec_from(0), vec_from(4)


def _mink_rows(sys, vec, n):
    expr = vec[0].mul_poly(n[0])
    for i in (1, 2):
        expr = expr + vec[i].mul_poly(n[i])
    expr = expr - vec[3].mul_poly(n[3])
    sys.add_identity_zero(expr)


def mos_family(nplus, nminus=None, ell=1):
    """Compatible tangent pairs orthogonal to the prescribed normal space.

    One isotropic field is enough for the area-element certificate; a
    second field pins the full normal plane.
    """
    fields = [nplus] + ([nminus] if nminus is not None else [])
    for f in fields:
        if f.kind != "isotropic4":
            raise ValueError("mos_family expects isotropic4 normal fields")
        if f.n.is_zero():
            raise ZeroPolynomial("normal field must be nonzero")
    reg = Registry()
    qv = LinVec.unknown(reg, 4, ell, coord_offset=0)
    rv = LinVec.unknown(reg, 4, ell, coord_offset=4)
    sys = LinearSystem(ncols=len(reg), labels=reg.labels)
    for f in fields:
        _mink_rows(sys, qv, f.n)
        _mink_rows(sys, rv, f.n)
    for i in range(4):
        sys.add_identity_zero(qv[i].diff("v") - rv[i].diff("u"))
    fam = nullspace(sys)
    result = MOSFamily(tuple(fields), ell, fam, [], [])
    from .pn import integrate_tangent_pair

    for vec in fam.basis:
        q, r = result._resolve(vec)
        result.tangent_pairs.append((q, r))
        result.surfaces.append(integrate_tangent_pair(q, r))
    return result


# ---------------------------------------------------------------------
# Hermite interpolation


@dataclass
class MOSHermiteFamily:
    field: NormalField
    corner_other: list
    degree: int
    arrangement: str
    data: list
    family: object
    particular: PolyVec
    basis_surfaces: list

    @property
    def dim(self):
        return self.family.dim

    def surface(self, params=None):
        x = self.particular
        if params:
            for t, b in zip(params, self.basis_surfaces):
                t = Q(t)
                if t != 0:
                    x = x + b.scale(t)
        return x

    def patch(self, params=None):
        return MOSPatch(self.surface(params), self.field, None, self.arrangement)


def _hermite_mos(data, degree, arrangement, branch, center):
    corners = QUAD_CORNERS if arrangement == "quad" else TRI_CORNERS
    pts = [p if isinstance(p, MOSHermitePoint) else MOSHermitePoint(*p) for p in data]
    if len(pts) != len(corners):
        raise ValueError(f"{arrangement} patch needs {len(corners)} corner points")
    chosen, other = [], []
    for p in pts:
        pair = isotropic_normals(p.tangent1, p.tangent2)
        far, near = choose_projection_branch(pair, center)
        if branch == "plus":
            chosen.append(far)
            other.append(near)
        else:
            chosen.append(near)
            other.append(far)
    images = [stereo_project(sphere_image(vec), center) for vec in chosen]
    nhat = planar_patch_quad(images) if arrangement == "quad" else planar_patch_tri(images)
    field = lift_isotropic(nhat)

    reg = Registry()
    xv = LinVec.unknown(reg, 4, degree)
    sys = LinearSystem(ncols=len(reg), labels=reg.labels)
    for var in ("u", "v"):
        _mink_rows(sys, xv.diff(var), field.n)
    xu, xvv = xv.diff("u"), xv.diff("v")
    for p, vec, (cu, cv) in zip(pts, other, corners):
        for coord in range(4):
            sys.add_value_constraint(xv[coord].evaluate(cu, cv), p.point[coord])
        for dvec in (xu, xvv):
            form = dvec[0].evaluate(cu, cv).scale(vec[0])
            for i in (1, 2):
                form = form + dvec[i].evaluate(cu, cv).scale(vec[i])
            form = form - dvec[3].evaluate(cu, cv).scale(vec[3])
            sys.add_value_constraint(form, 0)
    try:
        fam = solve_affine(sys)
    except Inconsistent:
        raise Inconsistent(
            f"no MOS interpolant of degree {degree}", suggested_degree=degree + 1
        ) from None
    return MOSHermiteFamily(
        field=field,
        corner_other=other,
        degree=degree,
        arrangement=arrangement,
        data=pts,
        family=fam,
        particular=xv.resolve(fam.particular),
        basis_surfaces=[xv.resolve(b) for b in fam.basis],
    )


def hermite_quad_mos(data, degree, branch="plus", center=(0, 0, 1)):
    """Quad MOS Hermite family: the chosen isotropic branch is lifted to a
    field, the other branch is imposed pointwise at the corners."""
    return _hermite_mos(data, degree, "quad", branch, center)


def hermite_tri_mos(data, degree, branch="plus", center=(0, 0, 1)):
    """Triangular MOS Hermite family with corners (0,0), (1,0), (0,1)."""
    return _hermite_mos(data, degree, "tri", branch, center)
