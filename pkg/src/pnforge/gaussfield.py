"""Normal field synthesis from discrete Hermite data.

Unit normals are projected stereographically to the plane, interpolated
by a bilinear (quad) or linear (tri) patch, and lifted back without the
denominator.  The lift (2*Nh, Nh.Nh - 1) is Pythagorean by construction;
appending Nh.Nh + 1 as a fourth component gives an isotropic field in
Minkowski space.  Everything stays in exact rational arithmetic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import (
    AtCenter,
    DimensionMismatch,
    IrrationalIsotropics,
    NearCenterWarning,
    NoRealIsotropics,
    NoSafeCenter,
)
from .exactla import LinearSystem, nullspace
from .geometry import EUCLIDEAN3, MINKOWSKI31, inner
from .polyalg import BiPoly, PolyVec, Q, rational_sqrt

NORTH = (Q(0), Q(0), Q(1))

DEFAULT_NEAR_THRESHOLD = Q(1, 8)


def _qvec(vec):
    return tuple(Q(x) for x in vec)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _mink_dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]


@dataclass(frozen=True)
class PNHermitePoint:
    """Corner point with an exactly unit rational normal."""

    point: tuple
    unit_normal: tuple

    def __post_init__(self):
        object.__setattr__(self, "point", _qvec(self.point))
        object.__setattr__(self, "unit_normal", _qvec(self.unit_normal))
        if len(self.point) != 3 or len(self.unit_normal) != 3:
            raise DimensionMismatch("PN Hermite data lives in R^3")
        if _dot(self.unit_normal, self.unit_normal) != 1:
            raise ValueError(f"normal {self.unit_normal} is not a unit vector")


@dataclass(frozen=True)
class MOSHermitePoint:
    """Medial point (x, y, z, r) with two independent tangent vectors."""

    point: tuple
    tangent1: tuple
    tangent2: tuple

    def __post_init__(self):
        object.__setattr__(self, "point", _qvec(self.point))
        object.__setattr__(self, "tangent1", _qvec(self.tangent1))
        object.__setattr__(self, "tangent2", _qvec(self.tangent2))
        for vec in (self.point, self.tangent1, self.tangent2):
            if len(vec) != 4:
                raise DimensionMismatch("MOS Hermite data lives in R^{3,1}")
        t1, t2 = self.tangent1, self.tangent2
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        if all(t1[i] * t2[j] - t1[j] * t2[i] == 0 for i, j in pairs):
            raise ValueError("tangent vectors must be linearly independent")


@dataclass(frozen=True)
class NormalField:
    """Polynomial normal field with its algebraic certificate.

    pythagorean3: <n, n> == sigma^2 exactly (Euclidean).
    isotropic4:   <n, n> == 0 exactly (Minkowski), sigma == 0.
    """

    n: PolyVec
    sigma: BiPoly
    kind: str

    def __post_init__(self):
        if self.kind == "pythagorean3":
            if self.n.dim != 3:
                raise DimensionMismatch("pythagorean3 field must have 3 components")
            if inner(self.n, self.n, EUCLIDEAN3) != self.sigma * self.sigma:
                raise ValueError("norm certificate violated: <n,n> != sigma^2")
        elif self.kind == "isotropic4":
            if self.n.dim != 4:
                raise DimensionMismatch("isotropic4 field must have 4 components")
            if not inner(self.n, self.n, MINKOWSKI31).is_zero():
                raise ValueError("field is not isotropic: <n,n> != 0")
            if not self.sigma.is_zero():
                raise ValueError("isotropic fields carry a zero certificate")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def degree(self):
        return self.n.degree()

    def rotated(self, rot):
        """Apply a rational orthogonal 3x3 map to a pythagorean3 field."""
        if self.kind != "pythagorean3":
            raise ValueError("rotation is only defined for Euclidean fields")
        comps = []
        for i in range(3):
            acc = BiPoly.zero()
            for j in range(3):
                if rot[i][j] != 0:
                    acc = acc + self.n[j].scale(rot[i][j])
            comps.append(acc)
        return NormalField(PolyVec(comps), self.sigma, self.kind)


# ---------------------------------------------------------------------
# stereographic projection


def stereo_project(N, center=NORTH, near_threshold=DEFAULT_NEAR_THRESHOLD):
    """Image of a unit vector under stereographic projection from center.

    (x1, x2, x3) -> (x1, x2) / (1 - x3) for the default center (0, 0, 1);
    a general rational center is handled by a pre-rotation sending it to
    the north pole.
    """
    N = _qvec(N)
    center = _qvec(center)
    if N == center:
        raise AtCenter(f"{N} coincides with the projection center")
    margin = 1 - _dot(N, center)
    if margin < near_threshold:
        warnings.warn(
            f"normal {N} is within {near_threshold} of the projection center",
            NearCenterWarning,
            stacklevel=2,
        )
    if center != NORTH:
        rot = rotation_to_north(center)
        N = apply_rotation(rot, N)
    denom = 1 - N[2]
    return (N[0] / denom, N[1] / denom)


def rotation_to_north(center):
    """Proper rational rotation R with R * center = (0, 0, 1)."""
    center = _qvec(center)
    if _dot(center, center) != 1:
        raise ValueError("projection center must be an exactly unit vector")
    if center == NORTH:
        return tuple(tuple(Q(1 if i == j else 0) for j in range(3)) for i in range(3))
    # Householder reflection sending center to e3, then a sign flip on y
    # to restore det = +1.
    w = tuple(center[i] - NORTH[i] for i in range(3))
    ww = _dot(w, w)
    refl = [
        [Q(i == j) - 2 * w[i] * w[j] / ww for j in range(3)]
        for i in range(3)
    ]
    refl[1] = [-x for x in refl[1]]
    return tuple(tuple(row) for row in refl)


def apply_rotation(rot, vec):
    return tuple(_dot(row, vec) for row in rot)


def transpose(rot):
    return tuple(tuple(rot[j][i] for j in range(3)) for i in range(3))


def _candidate_centers():
    """26 rational unit directions: axes, near-edge and near-corner."""
    out = []
    for axis in range(3):
        for s in (1, -1):
            c = [Q(0)] * 3
            c[axis] = Q(s)
            out.append(tuple(c))
    # 12 near-edge directions from the (20, 21, 29) triple
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for si in (1, -1):
            for sj in (1, -1):
                c = [Q(0)] * 3
                c[i] = Q(20 * si, 29)
                c[j] = Q(21 * sj, 29)
                out.append(tuple(c))
    # 8 near-corner directions from the (6, 6, 7, 11) quadruple
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                out.append((Q(6 * sx, 11), Q(6 * sy, 11), Q(7 * sz, 11)))
    return out


def auto_rotate_frame(normals, near_threshold=DEFAULT_NEAR_THRESHOLD):
    """Rotation moving the data away from the projection center.

    Identity when the default center (0, 0, 1) already clears the
    threshold; otherwise the best of a fixed list of 26 rational unit
    candidates is used.  Raises NoSafeCenter when nothing clears it.
    """
    normals = [_qvec(N) for N in normals]

    def margin(center):
        return min(1 - _dot(N, center) for N in normals)

    if margin(NORTH) >= near_threshold:
        return rotation_to_north(NORTH)
    best, best_margin = None, None
    for cand in _candidate_centers():
        m = margin(cand)
        if best_margin is None or m > best_margin:
            best, best_margin = cand, m
    if best_margin < near_threshold:
        raise NoSafeCenter(
            f"no candidate center clears the threshold {near_threshold} "
            f"(best margin {best_margin})"
        )
    return rotation_to_north(best)


# ---------------------------------------------------------------------
# planar interpolants


def planar_patch_quad(images):
    """Bilinear patch through four plane points at (u,v) in {0,1}^2.

    Corner order: p00, p10, p11, p01.
    """
    p00, p10, p11, p01 = [_qvec(pt) for pt in images]
    u = BiPoly.monomial(1, 0)
    v = BiPoly.monomial(0, 1)
    one = BiPoly.const(1)
    blend = [
        (one - u) * (one - v),
        u * (one - v),
        u * v,
        (one - u) * v,
    ]
    comps = []
    for k in range(2):
        acc = BiPoly.zero()
        for pt, b in zip((p00, p10, p11, p01), blend):
            acc = acc + b.scale(pt[k])
        comps.append(acc)
    return PolyVec(comps)


def planar_patch_tri(images):
    """Linear patch through three plane points at (0,0), (1,0), (0,1).

    Corner order: p00, p10, p01.
    """
    p00, p10, p01 = [_qvec(pt) for pt in images]
    u = BiPoly.monomial(1, 0)
    v = BiPoly.monomial(0, 1)
    one = BiPoly.const(1)
    blend = [one - u - v, u, v]
    comps = []
    for k in range(2):
        acc = BiPoly.zero()
        for pt, b in zip((p00, p10, p01), blend):
            acc = acc + b.scale(pt[k])
        comps.append(acc)
    return PolyVec(comps)


# ---------------------------------------------------------------------
# lifts


def lift_pythagorean(nhat):
    """Lift a planar polynomial patch to a Pythagorean field in R^3.

    n = (2*Nh, Nh.Nh - 1), sigma = Nh.Nh + 1.
    """
    dot = nhat[0] * nhat[0] + nhat[1] * nhat[1]
    n = PolyVec([nhat[0].scale(2), nhat[1].scale(2), dot - 1])
    return NormalField(n, dot + 1, "pythagorean3")


def lift_pythagorean_rational(numer, denom):
    """Lift a rational planar patch A/D, clearing the denominator.

    n = (2*A1*D, 2*A2*D, A.A - D^2), sigma = A.A + D^2.
    """
    dot = numer[0] * numer[0] + numer[1] * numer[1]
    dd = denom * denom
    n = PolyVec(
        [
            numer[0] * denom * 2,
            numer[1] * denom * 2,
            dot - dd,
        ]
    )
    return NormalField(n, dot + dd, "pythagorean3")


def lift_isotropic(nhat):
    """Lift a planar polynomial patch to an isotropic field in R^{3,1}.

    n = (2*Nh, Nh.Nh - 1, Nh.Nh + 1).
    """
    dot = nhat[0] * nhat[0] + nhat[1] * nhat[1]
    n = PolyVec([nhat[0].scale(2), nhat[1].scale(2), dot - 1, dot + 1])
    return NormalField(n, BiPoly.zero(), "isotropic4")


# ---------------------------------------------------------------------
# isotropic corner normals


def _primitive_int_vector(vec):
    den = 1
    for x in vec:
        den = den * int(x.denominator) // math.gcd(den, int(x.denominator))
    ints = [int(x.numerator) * (den // int(x.denominator)) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    return ints


def isotropic_normals(t1, t2, approximate=False, tol=Q(1, 10 ** 12)):
    """The two isotropic directions orthogonal to a spacelike tangent plane.

    Returns (nplus, nminus) as primitive integer vectors with positive
    last coordinate; the lexicographically smaller one is nminus.  The
    quadratic's discriminant must be a rational square, otherwise
    IrrationalIsotropics is raised (or, with approximate=True, a nearby
    rational root is used).
    """
    t1, t2 = _qvec(t1), _qvec(t2)
    sys = LinearSystem(ncols=4)
    sys.add_row({i: (t1[i] if i < 3 else -t1[i]) for i in range(4)})
    sys.add_row({i: (t2[i] if i < 3 else -t2[i]) for i in range(4)})
    fam = nullspace(sys)
    if fam.dim != 2:
        raise DimensionMismatch("tangent vectors do not span a plane")
    w1, w2 = fam.basis
    a = _mink_dot(w1, w1)
    b = _mink_dot(w1, w2)
    c = _mink_dot(w2, w2)
    # alpha^2 a + 2 alpha beta b + beta^2 c = 0
    roots = []
    if a == 0:
        roots.append((Q(1), Q(0)))
        if b != 0:
            roots.append((-c, 2 * b))
        elif c == 0:
            raise NoRealIsotropics("normal plane is totally degenerate")
    else:
        disc = b * b - a * c
        if disc < 0:
            raise NoRealIsotropics("tangent plane has no real isotropic normals")
        s = rational_sqrt(disc)
        if s is None:
            if not approximate:
                raise IrrationalIsotropics(
                    f"discriminant {disc} is not a rational square"
                )
            s = _approx_sqrt(disc, tol)
        roots.append(((-b + s), a))
        roots.append(((-b - s), a))
    if len(roots) < 2 or _cross_2d(roots[0], roots[1]) == 0:
        raise NoRealIsotropics("isotropic directions coincide; plane is lightlike")
    vecs = []
    for alpha, beta in roots:
        vec = [alpha * w1[i] + beta * w2[i] for i in range(4)]
        ints = _primitive_int_vector(vec)
        if ints[3] < 0:
            ints = [-x for x in ints]
        vecs.append(tuple(Q(x) for x in ints))
    vecs.sort()
    return vecs[1], vecs[0]  # (nplus, nminus): lexicographically smaller is nminus


def _cross_2d(r1, r2):
    return r1[0] * r2[1] - r1[1] * r2[0]


def _approx_sqrt(q, tol):
    scale = int(1 / tol) ** 2
    num = int(q.numerator) * scale
    den = int(q.denominator) * scale
    return Q(math.isqrt(num * den), den)


def sphere_image(n4):
    """Spherical point (n1, n2, n3) / n4 of an isotropic 4-vector."""
    n4 = _qvec(n4)
    if n4[3] == 0:
        raise ValueError("isotropic vector with vanishing last coordinate")
    return (n4[0] / n4[3], n4[1] / n4[3], n4[2] / n4[3])


def choose_projection_branch(pair, center=NORTH):
    """Order an isotropic pair as (field_branch, corner_branch).

    The branch whose spherical image lies farthest from the projection
    center is the one to interpolate by a lifted field; the other one is
    imposed pointwise.
    """
    center = _qvec(center)
    va, vb = pair
    da = _dot(sphere_image(va), center)
    db = _dot(sphere_image(vb), center)
    if da < db or (da == db and va <= vb):
        return va, vb
    return vb, va


# ---------------------------------------------------------------------
# full field construction from Hermite corners


def build_pn_field(normals, arrangement, center=NORTH,
                   near_threshold=DEFAULT_NEAR_THRESHOLD, allow_rotation=True):
    """Pythagorean field interpolating positive multiples of the normals.

    Returns (field, rotation); the rotation is the pre-rotation that was
    applied before projecting (identity in the common case).
    """
    normals = [_qvec(N) for N in normals]

    def margin(ctr):
        return min(1 - _dot(N, ctr) for N in normals)

    rot = rotation_to_north(center)
    if margin(center) < near_threshold:
        if not allow_rotation:
            raise NoSafeCenter("data too close to the projection center")
        rot = auto_rotate_frame(normals, near_threshold)
    rotated = [apply_rotation(rot, N) for N in normals]
    images = [stereo_project(N, near_threshold=near_threshold) for N in rotated]
    if arrangement == "quad":
        nhat = planar_patch_quad(images)
    elif arrangement == "tri":
        nhat = planar_patch_tri(images)
    else:
        raise ValueError(f"unknown arrangement {arrangement!r}")
    field = lift_pythagorean(nhat)
    identity = rotation_to_north(NORTH)
    if rot != identity:
        field = field.rotated(transpose(rot))
    return field, rot
