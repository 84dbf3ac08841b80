"""Polynomial PN surfaces: free families, Hermite patches, certificates.

A PN surface of degree l+1 is produced either by integrating a pair of
compatible tangent fields orthogonal to a prescribed Pythagorean normal
field, or, for interpolation, by solving directly for the surface
coefficients.  Both routes reduce to exact linear systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import Inconsistent, NotProportional, ZeroPolynomial
from .exactla import LinearSystem, LinVec, Registry, nullspace, solve_affine
from .gaussfield import NormalField, PNHermitePoint, build_pn_field
from .geometry import EUCLIDEAN3, cross3, gram_det
from .polyalg import BiPoly, PolyVec, Q, exact_div

QUAD_CORNERS = ((Q(0), Q(0)), (Q(1), Q(0)), (Q(1), Q(1)), (Q(0), Q(1)))
TRI_CORNERS = ((Q(0), Q(0)), (Q(1), Q(0)), (Q(0), Q(1)))


def lambda_dim(ell, k):
    """Orthogonal-field dimension 3*C(l+2,2) - C(k+l+2,2), clamped at 0.

    Exact for basepoint-free fields of degree k; a lower bound otherwise.
    """
    if ell < 0 or k < 0:
        raise ValueError("degrees must be non-negative")
    val = 3 * math.comb(ell + 2, 2) - math.comb(k + ell + 2, 2)
    return max(val, 0)


def omega_dim(ell):
    """Dimension C(l+3,2) - 1 of compatible scalar pairs (q, r) of degree l."""
    if ell < 0:
        raise ValueError("degree must be non-negative")
    return math.comb(ell + 3, 2) - 1


def family_dim_bound(ell, k):
    """Zero-correction lower bound 2*Lambda + 3*Omega - 6*C(l+2,2).

    May be negative, in which case it guarantees nothing; base points of
    the normal field raise the true dimension above it.
    """
    return 2 * lambda_dim(ell, k) + 3 * omega_dim(ell) - 6 * math.comb(ell + 2, 2)


# ---------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class Certificate:
    f: BiPoly
    sigma_area: BiPoly
    degenerate_locus_nonempty: bool


def _domain_samples(domain, grid):
    if domain == "quad":
        box = ((Q(0), Q(1)), (Q(0), Q(1)))
    elif domain == "tri":
        pts = []
        for i in range(grid):
            for j in range(grid):
                a = Q(i, grid - 1)
                b = Q(j, grid - 1)
                if a + b <= 1:
                    pts.append((a, b))
        return pts
    else:
        box = domain
    (u0, u1), (v0, v1) = box
    u0, u1, v0, v1 = Q(u0), Q(u1), Q(v0), Q(v1)
    pts = []
    for i in range(grid):
        for j in range(grid):
            pts.append(
                (u0 + (u1 - u0) * Q(i, grid - 1), v0 + (v1 - v0) * Q(j, grid - 1))
            )
    return pts


def certify(x, field, domain="quad", grid=33):
    """Exact factor f with x_u x x_v == f * n, plus the area certificate.

    sigma_area = f * sigma_n, so that Gamma(x_u, x_v) == sigma_area^2.
    The degenerate-locus flag reports whether f vanishes somewhere on the
    closed domain; it is exact for constant f and sampled on a grid
    otherwise (sign changes and exact zeros both count).
    """
    n = field.n
    xu = x.diff("u")
    xv = x.diff("v")
    cr = cross3(xu, xv)
    f = None
    for i in range(3):
        if not n[i].is_zero():
            f = exact_div(cr[i], n[i])
            break
    if f is None:
        if cr.is_zero():
            f = BiPoly.zero()
        else:
            raise NotProportional("x_u x x_v is not a polynomial multiple of n")
    for i in range(3):
        if cr[i] != n[i] * f:
            raise NotProportional("x_u x x_v is not a polynomial multiple of n")
    sigma_area = f * field.sigma
    if f.is_zero():
        degenerate = True
    elif f.degree() == 0:
        degenerate = False
    else:
        signs = set()
        degenerate = False
        for (a, b) in _domain_samples(domain, grid):
            val = f.evaluate(a, b)
            if val == 0:
                degenerate = True
                break
            signs.add(val > 0)
            if len(signs) == 2:
                degenerate = True
                break
    return Certificate(f, sigma_area, degenerate)


@dataclass(frozen=True)
class PNPatch:
    """Polynomial surface carrying its normal field and certificates."""

    x: PolyVec
    normal_field: NormalField
    domain: str = "quad"

    @cached_property
    def certificate(self):
        return certify(self.x, self.normal_field, domain=self.domain)

    @property
    def f(self):
        return self.certificate.f

    @property
    def sigma_area(self):
        return self.certificate.sigma_area

    def evaluate(self, a, b):
        return self.x.evaluate(a, b)

    def area_element(self):
        """Gamma(x_u, x_v) as an exact polynomial."""
        xu = self.x.diff("u")
        xv = self.x.diff("v")
        return gram_det([xu, xv], EUCLIDEAN3)


# ---------------------------------------------------------------------
# free families from a normal field


def integrate_tangent_pair(q, r):
    """Surface x with x_u = q and x_v = r for a compatible pair.

    x = int q du + c(v) with c(v) = [int r dv - int q du] at u = 0.
    """
    zero = BiPoly.zero()
    ident_v = BiPoly.monomial(0, 1)
    int_q = q.integrate("u")
    int_r = r.integrate("v")
    c = (int_r - int_q).substitute(zero, ident_v)
    return int_q + c


@dataclass
class PNFamily:
    """Nullspace family of compatible tangent pairs plus integrated surfaces."""

    field: NormalField
    ell: int
    family: object
    tangent_pairs: list
    surfaces: list

    @property
    def dim(self):
        return self.family.dim

    def surface(self, params):
        """Integrated surface for the given nullspace coordinates."""
        vec = self.family.member(params)
        q, r = self._resolve(vec)
        return integrate_tangent_pair(q, r)

    def patch(self, params, domain="quad"):
        return PNPatch(self.surface(params), self.field, domain)

    def _resolve(self, vec):
        q = self._vec_from(vec, 0)
        r = self._vec_from(vec, 3)
        return q, r

    def _vec_from(self, vec, coord_offset):
        monos = self._monos
        ncoef = len(monos)
        comps = []
        for c in range(3):
            base = (coord_offset + c) * ncoef
            comps.append(
                BiPoly({monos[t]: vec[base + t] for t in range(ncoef)})
            )
        return PolyVec(comps)

    @property
    def _monos(self):
        from .polyalg import monomials_upto

        return monomials_upto(self.ell)

    def empirical_delta(self):
        """Observed dimension minus the zero-correction bound."""
        return self.dim - family_dim_bound(self.ell, int(self.field.degree))


def pn_family(field, ell):
    """All compatible tangent pairs of degree <= ell orthogonal to the field.

    Returns the exact nullspace of the assembled system together with
    the integrated surface for every basis element.  An empty family is
    a valid outcome at low degrees.
    """
    if not isinstance(field, NormalField):
        raise TypeError("pn_family needs a NormalField carrying its certificate")
    n = field.n
    if n.is_zero():
        raise ZeroPolynomial("normal field must be nonzero")
    reg = Registry()
    qv = LinVec.unknown(reg, 3, ell, coord_offset=0)
    rv = LinVec.unknown(reg, 3, ell, coord_offset=3)
    sys = LinearSystem(ncols=len(reg), labels=reg.labels)
    for vec in (qv, rv):
        expr = vec[0].mul_poly(n[0])
        for i in (1, 2):
            expr = expr + vec[i].mul_poly(n[i])
        sys.add_identity_zero(expr)
    for i in range(3):
        sys.add_identity_zero(qv[i].diff("v") - rv[i].diff("u"))
    fam = nullspace(sys)
    result = PNFamily(field, ell, fam, [], [])
    for vec in fam.basis:
        q, r = result._resolve(vec)
        result.tangent_pairs.append((q, r))
        result.surfaces.append(integrate_tangent_pair(q, r))
    return result


# ---------------------------------------------------------------------
# Hermite interpolation on surface coefficients


@dataclass
class HermiteProblem:
    """Assembled interpolation system over surface coefficients."""

    registry: Registry
    xvec: LinVec
    system: LinearSystem
    field: NormalField
    data: list
    arrangement: str
    degree: int

    def solve(self):
        fam = solve_affine(self.system)
        return HermiteFamily(
            field=self.field,
            degree=self.degree,
            arrangement=self.arrangement,
            data=self.data,
            family=fam,
            particular=self.xvec.resolve(fam.particular),
            basis_surfaces=[self.xvec.resolve(b) for b in fam.basis],
        )


@dataclass
class HermiteFamily:
    field: NormalField
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
        return PNPatch(self.surface(params), self.field, self.arrangement)


def corner_parameters(arrangement):
    return QUAD_CORNERS if arrangement == "quad" else TRI_CORNERS


def assemble_hermite(data, degree, field, arrangement):
    """Interpolation system: orthogonality identities plus point rows."""
    corners = corner_parameters(arrangement)
    if len(data) != len(corners):
        raise ValueError(f"{arrangement} patch needs {len(corners)} corner points")
    n = field.n
    reg = Registry()
    xv = LinVec.unknown(reg, 3, degree)
    sys = LinearSystem(ncols=len(reg), labels=reg.labels)
    for var in ("u", "v"):
        dx = xv.diff(var)
        expr = dx[0].mul_poly(n[0])
        for i in (1, 2):
            expr = expr + dx[i].mul_poly(n[i])
        sys.add_identity_zero(expr)
    for pt, (cu, cv) in zip(data, corners):
        for coord in range(3):
            sys.add_value_constraint(xv[coord].evaluate(cu, cv), pt.point[coord])
    return HermiteProblem(reg, xv, sys, field, list(data), arrangement, degree)


def _hermite(data, degree, arrangement, center, near_threshold, allow_rotation):
    pts = [p if isinstance(p, PNHermitePoint) else PNHermitePoint(*p) for p in data]
    field, _rot = build_pn_field(
        [p.unit_normal for p in pts],
        arrangement,
        center=center,
        near_threshold=near_threshold,
        allow_rotation=allow_rotation,
    )
    k = int(field.degree)
    if degree is not None:
        return assemble_hermite(pts, degree, field, arrangement).solve()
    lo, hi = max(k, 2), 2 * k + 6
    for d in range(lo, hi + 1):
        try:
            return assemble_hermite(pts, d, field, arrangement).solve()
        except Inconsistent:
            continue
    raise Inconsistent(
        f"no interpolant up to the degree cap {hi}", suggested_degree=hi + 1
    )


def hermite_quad(data, degree=None, center=(0, 0, 1),
                 near_threshold=Q(1, 8), allow_rotation=True):
    """Quad PN Hermite patch family; raises Inconsistent when the degree
    is too low (the error carries a suggested next degree)."""
    try:
        return _hermite(data, degree, "quad", center, near_threshold, allow_rotation)
    except Inconsistent as exc:
        if degree is not None and exc.suggested_degree is None:
            raise Inconsistent(str(exc), suggested_degree=degree + 1) from None
        raise


def hermite_tri(data, degree=None, center=(0, 0, 1),
                near_threshold=Q(1, 8), allow_rotation=True):
    """Triangular PN Hermite patch family with corners (0,0), (1,0), (0,1)."""
    try:
        return _hermite(data, degree, "tri", center, near_threshold, allow_rotation)
    except Inconsistent as exc:
        if degree is not None and exc.suggested_degree is None:
            raise Inconsistent(str(exc), suggested_degree=degree + 1) from None
        raise
