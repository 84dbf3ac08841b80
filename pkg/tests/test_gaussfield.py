"""Stereographic projection, planar patches, lifts, isotropic normals."""

import warnings

import pytest

from pnforge.errors import (
    AtCenter,
    IrrationalIsotropics,
    NearCenterWarning,
    NoSafeCenter,
)
from pnforge.gaussfield import (
    NormalField,
    PNHermitePoint,
    auto_rotate_frame,
    apply_rotation,
    build_pn_field,
    choose_projection_branch,
    isotropic_normals,
    lift_isotropic,
    lift_pythagorean,
    lift_pythagorean_rational,
    planar_patch_quad,
    planar_patch_tri,
    rotation_to_north,
    sphere_image,
    stereo_project,
    transpose,
)
from pnforge.geometry import EUCLIDEAN3, MINKOWSKI31, inner
from pnforge.polyalg import BiPoly, PolyVec, Q, u, v


def test_projection_of_south_pole():
    assert stereo_project((0, 0, -1)) == (Q(0), Q(0))


def test_projection_rational_points():
    assert stereo_project((Q(3, 5), 0, Q(-4, 5))) == (Q(1, 3), Q(0))
    assert stereo_project((Q(-3, 5), 0, Q(-4, 5))) == (Q(-1, 3), Q(0))


def test_projection_at_center_raises():
    with pytest.raises(AtCenter):
        stereo_project((0, 0, 1))


def test_projection_near_center_warns():
    # margin 1 - 12/13 = 1/13 < 1/8
    with pytest.warns(NearCenterWarning):
        stereo_project((Q(3, 13), Q(4, 13), Q(12, 13)))


def test_projection_with_moved_center():
    # center at the south pole: the north pole projects to the origin
    assert stereo_project((0, 0, 1), center=(0, 0, -1)) == (Q(0), Q(0))


def test_planar_patch_quad_interpolates():
    images = [(Q(-1, 3), 0), (Q(1, 3), 0), (Q(-1, 5), Q(-3, 5)), (Q(-2, 3), Q(-1, 3))]
    patch = planar_patch_quad(images)
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    for img, (a, b) in zip(images, corners):
        assert patch.evaluate(a, b) == tuple(Q(x) for x in img)


def test_planar_patch_quad_worked_example():
    images = [(Q(-1, 3), 0), (Q(1, 3), 0), (Q(-1, 5), Q(-3, 5)), (Q(-2, 3), Q(-1, 3))]
    patch = planar_patch_quad(images)
    expected = PolyVec(
        [
            BiPoly({(1, 1): Q(-3, 15), (1, 0): Q(10, 15), (0, 1): Q(-5, 15), (0, 0): Q(-5, 15)}),
            BiPoly({(1, 1): Q(-4, 15), (0, 1): Q(-5, 15)}),
        ]
    )
    assert patch == expected


def test_planar_patch_quad_constant():
    patch = planar_patch_quad([(1, 2)] * 4)
    assert patch == PolyVec([BiPoly.const(1), BiPoly.const(2)])


def test_planar_patch_tri_worked_example():
    images = [(0, 0), (Q(2, 5), Q(-1, 5)), (Q(-1, 10), Q(-3, 10))]
    patch = planar_patch_tri(images)
    expected = PolyVec(
        [
            BiPoly({(1, 0): Q(4, 10), (0, 1): Q(-1, 10)}),
            BiPoly({(1, 0): Q(-2, 10), (0, 1): Q(-3, 10)}),
        ]
    )
    assert patch == expected


def test_planar_patch_tri_barycentric():
    images = [(1, 1), (2, 0), (0, 3)]
    patch = planar_patch_tri(images)
    assert patch.evaluate(1, 0) == (Q(2), Q(0))
    assert patch.evaluate(0, 0) == (Q(1), Q(1))
    assert patch.evaluate(0, 1) == (Q(0), Q(3))
    const = planar_patch_tri([(5, 6)] * 3)
    assert const == PolyVec([BiPoly.const(5), BiPoly.const(6)])


def test_lift_pythagorean_tri_field():
    nhat = PolyVec(
        [
            BiPoly({(1, 0): Q(4, 10), (0, 1): Q(-1, 10)}),
            BiPoly({(1, 0): Q(-2, 10), (0, 1): Q(-3, 10)}),
        ]
    )
    field = lift_pythagorean(nhat)
    expected_n = PolyVec(
        [
            BiPoly({(1, 0): Q(4, 5), (0, 1): Q(-1, 5)}),
            BiPoly({(1, 0): Q(-2, 5), (0, 1): Q(-3, 5)}),
            BiPoly({(2, 0): Q(10, 50), (1, 1): Q(2, 50), (0, 2): Q(5, 50), (0, 0): Q(-50, 50)}),
        ]
    )
    assert field.n == expected_n
    expected_sigma = BiPoly(
        {(2, 0): Q(10, 50), (1, 1): Q(2, 50), (0, 2): Q(5, 50), (0, 0): Q(50, 50)}
    )
    assert field.sigma == expected_sigma


def test_lift_pythagorean_origin():
    field = lift_pythagorean(PolyVec([BiPoly.zero(), BiPoly.zero()]))
    assert field.n == PolyVec([0, 0, -1])
    assert field.sigma == BiPoly.const(1)


def test_lift_certificates_hold():
    nhat = PolyVec([u + 2 * v, v ** 2 - 1])
    field = lift_pythagorean(nhat)
    assert inner(field.n, field.n, EUCLIDEAN3) == field.sigma * field.sigma
    iso = lift_isotropic(nhat)
    assert inner(iso.n, iso.n, MINKOWSKI31).is_zero()


def test_lift_isotropic_examples():
    zero = lift_isotropic(PolyVec([BiPoly.zero(), BiPoly.zero()]))
    assert zero.n == PolyVec([0, 0, -1, 1])
    std = lift_isotropic(PolyVec([u, v]))
    assert std.n == PolyVec([2 * u, 2 * v, u ** 2 + v ** 2 - 1, u ** 2 + v ** 2 + 1])


def test_lift_rational_certificate():
    A = PolyVec([v * (u.scale(21) + 49), u * (v.scale(20) + 50)])
    D = BiPoly.const(49) + u - (u * v).scale(29)
    field = lift_pythagorean_rational(A, D)
    assert inner(field.n, field.n, EUCLIDEAN3) == field.sigma * field.sigma


def test_corner_reproduction_positive_multiple():
    pts = [
        (Q(-3, 5), 0, Q(-4, 5)),
        (Q(3, 5), 0, Q(-4, 5)),
        (Q(-2, 7), Q(-6, 7), Q(-3, 7)),
        (Q(-6, 7), Q(-3, 7), Q(-2, 7)),
    ]
    field, _ = build_pn_field(pts, "quad")
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    for N, (a, b) in zip(pts, corners):
        val = field.n.evaluate(a, b)
        lam = field.sigma.evaluate(a, b)
        assert lam > 0
        assert val == tuple(lam * x for x in N)


# -- isotropic corner normals ----------------------------------------------


MOS_QUAD_TABLE = [
    ((1, -1, 0, 0), (1, 1, 0, 0), {(0, 0, -1, 1), (0, 0, 1, 1)}),
    ((7, -7, 4, 1), (7, 7, 4, 1), {(3, 0, -4, 5), (-5, 0, 12, 13)}),
    ((53, -31, 1, -1), (-23, 15, 1, 1), {(4, 7, -4, 9), (-2, -3, 6, 7)}),
    ((9, -9, -7, -3), (9, 9, 7, 3), {(0, 4, -3, 5), (0, -5, 12, 13)}),
]

MOS_TRI_TABLE = [
    ((1, -1, 0, 0), (1, 1, 0, 0), {(0, 0, -1, 1), (0, 0, 1, 1)}),
    # the source table prints (2,-1,-2,1) here, which fails its own
    # defining equations; the solution of the system is (2,-1,-2,3)
    ((8, -8, 9, 2), (16, 16, 5, 2), {(2, -1, -2, 3), (-3, 2, 6, 7)}),
    ((41, -41, -15, -7), (41, 41, 61, 23), {(4, 7, -4, 9), (-2, -3, 6, 7)}),
]


def _mink(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]


@pytest.mark.parametrize("t1,t2,expected", MOS_QUAD_TABLE + MOS_TRI_TABLE)
def test_isotropic_normals_tables(t1, t2, expected):
    pair = isotropic_normals(t1, t2)
    got = {tuple(int(x) for x in vec) for vec in pair}
    assert got == expected
    for vec in pair:
        assert _mink(vec, vec) == 0
        assert _mink(vec, [Q(x) for x in t1]) == 0
        assert _mink(vec, [Q(x) for x in t2]) == 0
    # never proportional, positive last coordinate, lex labeling
    nplus, nminus = pair
    assert nplus[3] > 0 and nminus[3] > 0
    assert nminus < nplus


def test_isotropic_normals_irrational():
    # plane orthogonal to span{e1, e2 + e3}: discriminant not a square
    with pytest.raises(IrrationalIsotropics):
        isotropic_normals((1, 0, 0, 0), (0, 1, 1, 0))
    plus, minus = isotropic_normals((1, 0, 0, 0), (0, 1, 1, 0), approximate=True)
    assert _mink(plus, [1, 0, 0, 0]) == 0


def test_choose_projection_branch_prefers_far_side():
    pair = isotropic_normals((7, -7, 4, 1), (7, 7, 4, 1))
    far, near = choose_projection_branch(pair)
    assert tuple(int(x) for x in far) == (3, 0, -4, 5)
    assert tuple(int(x) for x in near) == (-5, 0, 12, 13)
    assert sphere_image(far)[2] < sphere_image(near)[2]


# -- rotations --------------------------------------------------------------


def test_rotation_to_north_properties():
    center = (Q(2, 3), Q(2, 3), Q(1, 3))
    rot = rotation_to_north(center)
    assert apply_rotation(rot, center) == (Q(0), Q(0), Q(1))
    # orthogonality: R R^T = I
    rt = transpose(rot)
    for i in range(3):
        for j in range(3):
            val = sum(rot[i][k] * rt[k][j] for k in range(3))
            assert val == (1 if i == j else 0)
    # proper rotation: det = +1
    det = (
        rot[0][0] * (rot[1][1] * rot[2][2] - rot[1][2] * rot[2][1])
        - rot[0][1] * (rot[1][0] * rot[2][2] - rot[1][2] * rot[2][0])
        + rot[0][2] * (rot[1][0] * rot[2][1] - rot[1][1] * rot[2][0])
    )
    assert det == 1


def test_auto_rotate_identity_for_lower_hemisphere():
    normals = [(0, 0, -1), (Q(3, 5), 0, Q(-4, 5)), (0, Q(-3, 5), Q(-4, 5))]
    rot = auto_rotate_frame(normals)
    assert rot == rotation_to_north((0, 0, 1))


def test_auto_rotate_flips_away_from_north():
    rot = auto_rotate_frame([(0, 0, 1)])
    moved = apply_rotation(rot, (Q(0), Q(0), Q(1)))
    assert 1 - moved[2] >= Q(1, 8)
    # 180-degree rotation about a coordinate axis
    assert all(abs(x) in (0, 1) for row in rot for x in row)


def test_auto_rotate_equator_data():
    normals = [
        (1, 0, 0),
        (0, 1, 0),
        (Q(-4, 5), Q(3, 5), 0),
        (Q(3, 5), Q(-4, 5), 0),
    ]
    rot = auto_rotate_frame(normals)
    for N in normals:
        moved = apply_rotation(rot, tuple(Q(x) for x in N))
        assert 1 - moved[2] >= Q(1, 8)


def test_auto_rotate_no_safe_center():
    # 26 data points sitting exactly on the 26 candidate centers leave no
    # margin anywhere
    from pnforge.gaussfield import _candidate_centers

    with pytest.raises(NoSafeCenter):
        auto_rotate_frame(_candidate_centers(), near_threshold=Q(7, 8))


def test_build_field_with_rotation_keeps_interpolation():
    pts = [
        (0, 0, 1),
        (Q(3, 5), 0, Q(4, 5)),
        (0, Q(3, 5), Q(4, 5)),
        (Q(-3, 5), 0, Q(4, 5)),
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearCenterWarning)
        field, rot = build_pn_field(pts, "quad")
    assert rot != rotation_to_north((0, 0, 1))
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    for N, (a, b) in zip(pts, corners):
        val = field.n.evaluate(a, b)
        lam = field.sigma.evaluate(a, b)
        assert lam > 0
        assert val == tuple(lam * Q(x) for x in N)
    assert inner(field.n, field.n, EUCLIDEAN3) == field.sigma * field.sigma


def test_normal_field_validation():
    with pytest.raises(ValueError):
        NormalField(PolyVec([u, v, BiPoly.const(1)]), BiPoly.const(1), "pythagorean3")
    with pytest.raises(ValueError):
        NormalField(PolyVec([u, v, u, v]), BiPoly.zero(), "isotropic4")


def test_hermite_point_validation():
    with pytest.raises(ValueError):
        PNHermitePoint((0, 0, 0), (1, 1, 0))
    PNHermitePoint((0, 0, 0), (Q(3, 5), Q(4, 5), 0))
