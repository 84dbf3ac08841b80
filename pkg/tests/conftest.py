"""Shared fixtures: worked example data and expensive solved families."""

import random
from fractions import Fraction

import pytest

from pnforge.gaussfield import MOSHermitePoint, NormalField, PNHermitePoint
from pnforge.mos import hermite_quad_mos, hermite_tri_mos
from pnforge.network import TriPoly, add_linear_side_constraints
from pnforge.pn import assemble_hermite, hermite_quad, hermite_tri
from pnforge.polyalg import BiPoly, PolyVec, Q, u, v


@pytest.fixture(scope="session")
def quad_pn_data():
    return [
        PNHermitePoint((-4, 3, 0), (Q(-3, 5), 0, Q(-4, 5))),
        PNHermitePoint((4, -3, 0), (Q(3, 5), 0, Q(-4, 5))),
        PNHermitePoint((4, 9, -8), (Q(-2, 7), Q(-6, 7), Q(-3, 7))),
        PNHermitePoint((-4, 15, -8), (Q(-6, 7), Q(-3, 7), Q(-2, 7))),
    ]


@pytest.fixture(scope="session")
def tri_pn_data():
    return [
        PNHermitePoint((0, 0, 0), (0, 0, -1)),
        PNHermitePoint((10, -2, 5), (Q(2, 3), Q(-1, 3), Q(-2, 3))),
        PNHermitePoint((4, 8, -3), (Q(-2, 11), Q(-6, 11), Q(-9, 11))),
    ]


@pytest.fixture(scope="session")
def quad_pn_family(quad_pn_data):
    return hermite_quad(quad_pn_data, degree=8)


@pytest.fixture(scope="session")
def tri_pn_family(tri_pn_data):
    return hermite_tri(tri_pn_data, degree=4)


@pytest.fixture(scope="session")
def mos_quad_data():
    return [
        MOSHermitePoint((0, 0, -3, 1), (1, -1, 0, 0), (1, 1, 0, 0)),
        MOSHermitePoint((10, 0, 0, 2), (7, -7, 4, 1), (7, 7, 4, 1)),
        MOSHermitePoint((10, 8, 3, 3), (53, -31, 1, -1), (-23, 15, 1, 1)),
        MOSHermitePoint((0, 8, 0, 2), (9, -9, -7, -3), (9, 9, 7, 3)),
    ]


@pytest.fixture(scope="session")
def mos_tri_data():
    return [
        MOSHermitePoint((0, 0, -4, 1), (1, -1, 0, 0), (1, 1, 0, 0)),
        MOSHermitePoint((8, -5, 0, 2), (8, -8, 9, 2), (16, 16, 5, 2)),
        MOSHermitePoint((3, 6, 0, 2), (41, -41, -15, -7), (41, 41, 61, 23)),
    ]


@pytest.fixture(scope="session")
def mos_quad_family(mos_quad_data):
    return hermite_quad_mos(mos_quad_data, 6)


@pytest.fixture(scope="session")
def mos_tri_family(mos_tri_data):
    return hermite_tri_mos(mos_tri_data, 4)


@pytest.fixture(scope="session")
def sphere_field():
    n = PolyVec([2 * u, 2 * v, u ** 2 + v ** 2 - 1])
    return NormalField(n, u ** 2 + v ** 2 + 1, "pythagorean3")


@pytest.fixture(scope="session")
def iso_field():
    n = PolyVec([2 * u, 2 * v, u ** 2 + v ** 2 - 1, u ** 2 + v ** 2 + 1])
    return NormalField(n, BiPoly.zero(), "isotropic4")


# -- ellipsoid octant -----------------------------------------------------


def octant_normal_field():
    """Rational sphere patch for the octant with normals (0,0,-1), (0,1,0),
    (1,0,0): numerators (v(21u+49), u(20v+50)), denominator 49 + u - 29uv.

    The patch maps the three triangle edges into the symmetry planes
    (x = 0, y = 0, z = 0 in normal space) and its edge restriction to
    u + v = 1 parameterizes the unit circle exactly.
    """
    from pnforge.gaussfield import lift_pythagorean_rational

    A = PolyVec([v * (u.scale(21) + 49), u * (v.scale(20) + 50)])
    D = BiPoly.const(49) + u - (u * v).scale(29)
    return lift_pythagorean_rational(A, D)


@pytest.fixture(scope="session")
def octant_data():
    return [
        PNHermitePoint((0, 0, -1), (0, 0, -1)),
        PNHermitePoint((0, 1, 0), (0, 1, 0)),
        PNHermitePoint((Q(3, 2), 0, 0), (1, 0, 0)),
    ]


@pytest.fixture(scope="session")
def ellipsoid():
    return TriPoly({(2, 0, 0): 4, (0, 2, 0): 9, (0, 0, 2): 9, (0, 0, 0): -9})


@pytest.fixture(scope="session")
def octant_family(octant_data):
    problem = assemble_hermite(octant_data, 12, octant_normal_field(), "tri")
    add_linear_side_constraints(
        problem,
        [((1, 0, 0), "v0"), ((0, 1, 0), "u0"), ((0, 0, 1), "diag")],
    )
    return problem.solve()


# -- synthetic grid -------------------------------------------------------


def synthetic_grid():
    """4x4 Hermite grid sampled from exact inverse-stereographic normals."""
    from pnforge.network import HermiteGrid

    rows = []
    for a in range(4):
        row = []
        for b in range(4):
            x1, x2 = Q(2 * a - 3, 10), Q(2 * b - 3, 10)
            s = x1 * x1 + x2 * x2
            normal = (2 * x1 / (s + 1), 2 * x2 / (s + 1), (s - 1) / (s + 1))
            z = Q((2 * a - 3) ** 2 + (2 * b - 3) ** 2, 40)
            row.append(PNHermitePoint((Q(a), Q(b), z), normal))
        rows.append(tuple(row))
    return HermiteGrid(tuple(rows))


@pytest.fixture(scope="session")
def grid_family():
    from pnforge.network import interpolate_grid

    return interpolate_grid(synthetic_grid(), 9)


# -- random generators and an independent elimination oracle --------------


def rand_bipoly(rng, deg, scale=4, density=0.8):
    coeffs = {}
    for i in range(deg + 1):
        for j in range(deg + 1 - i):
            if rng.random() < density:
                coeffs[(i, j)] = Fraction(rng.randint(-scale, scale), rng.randint(1, 3))
    return BiPoly(coeffs)


def rand_polyvec(rng, dim, deg, scale=4):
    return PolyVec([rand_bipoly(rng, deg, scale) for _ in range(dim)])


def naive_rank(rows, ncols):
    """Plain Fraction Gaussian elimination; oracle for the Bareiss path."""
    mat = [[Fraction(r.get(c, 0)) for c in range(ncols)] for r in rows]
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def row_space_rref(vectors):
    """Canonical reduced row echelon form of the span; Fraction arithmetic."""
    mat = [[Fraction(x.numerator, x.denominator) for x in vec] for vec in vectors]
    ncols = len(mat[0]) if mat else 0
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return [tuple(row) for row in mat[:rank]]


def polyvec_coeff_vector(x, degree, dim=3):
    """Flatten a PolyVec into coordinates over monomials of total degree <= degree."""
    from pnforge.polyalg import monomials_upto

    monos = monomials_upto(degree)
    out = []
    for c in range(dim):
        for e in monos:
            q = x[c].coeff(*e)
            out.append(Fraction(int(q.numerator), int(q.denominator)))
    return out
