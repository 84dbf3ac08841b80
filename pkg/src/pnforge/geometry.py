"""Inner products of signature (p, q), Gramians and complement duality.

The reduced Gram determinant keeps only the odd-multiplicity factors of
the Gramian.  Any change of basis multiplies the Gramian by the square
of the transition determinant, so the reduced form is a basis invariant
of the spanned family of subspaces, shared (up to a rational constant)
with the orthogonal complement.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateFrame, DimensionMismatch, NotOrthogonal
from .polyalg import BiPoly, PolyVec, Q, split_square_part


@dataclass(frozen=True)
class Metric:
    """diag(+1 x p, -1 x q) inner product signature."""

    p: int
    q: int

    @property
    def dim(self):
        return self.p + self.q

    def sign(self, i):
        return 1 if i < self.p else -1


EUCLIDEAN3 = Metric(3, 0)
MINKOWSKI31 = Metric(3, 1)


def inner(a, b, metric):
    """<a, b> under the metric; exact polynomial result."""
    if a.dim != metric.dim or b.dim != metric.dim:
        raise DimensionMismatch(f"vectors of dim {a.dim}, {b.dim} in metric dim {metric.dim}")
    total = BiPoly.zero()
    for i in range(metric.dim):
        term = a[i] * b[i]
        total = total + (term if metric.sign(i) > 0 else -term)
    return total


def cross3(a, b):
    """Euclidean cross product of 3-component polynomial fields."""
    if a.dim != 3 or b.dim != 3:
        raise DimensionMismatch("cross3 needs 3-vectors")
    return PolyVec(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def cross4(a, b, c, metric=MINKOWSKI31):
    """Generalized cross product in dim 4: <cross4(a,b,c), x> = det(x,a,b,c).

    The result is metric-orthogonal to a, b and c as an exact identity.
    """
    if not (a.dim == b.dim == c.dim == 4):
        raise DimensionMismatch("cross4 needs 4-vectors")
    comps = []
    cols = (a, b, c)
    for i in range(4):
        idx = [k for k in range(4) if k != i]
        m = [[cols[col][idx[r]] for col in range(3)] for r in range(3)]
        det = (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
        sign = (-1) ** i
        comps.append(det if sign > 0 else -det)
    # raise the index: orthogonality is w.r.t. the metric
    return PolyVec([comps[i] if metric.sign(i) > 0 else -comps[i] for i in range(4)])


def gram_matrix(fields, metric):
    return [[inner(a, b, metric) for b in fields] for a in fields]


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = BiPoly.zero()
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def gram_det(fields, metric):
    """det <v_i, v_j>; squared volume of the spanned parallelotope."""
    k = len(fields)
    if not 1 <= k <= metric.dim:
        raise DimensionMismatch(f"{k} fields in dimension {metric.dim}")
    return _det(gram_matrix(fields, metric))


def reduced_gram_det(fields, metric):
    """Canonical odd-multiplicity part of the Gramian.

    Primitive, positive leading coefficient; 1 whenever the Gramian is a
    rational multiple of a polynomial square.
    """
    g = gram_det(fields, metric)
    if g.is_zero():
        raise DegenerateFrame("Gramian vanishes identically")
    _, _, odd = split_square_part(g)
    return odd


def complement_duality_check(V, W, metric):
    """Constant c with Gamma_0(V) = c * Gamma_0(W), or None.

    Writes each Gramian as rho * square * Gamma_0 and compares the
    canonical Gamma_0 parts; c = rho_V / rho_W.  Preconditions: every
    pair (v, w) is metric-orthogonal and |V| + |W| equals the dimension.
    """
    if len(V) + len(W) != metric.dim:
        raise DimensionMismatch("|V| + |W| must equal the ambient dimension")
    for a in V:
        for b in W:
            if not inner(a, b, metric).is_zero():
                raise NotOrthogonal("frames are not orthogonal complements")
    gv = gram_det(V, metric)
    gw = gram_det(W, metric)
    if gv.is_zero() or gw.is_zero():
        return None
    rho_v, _, odd_v = split_square_part(gv)
    rho_w, _, odd_w = split_square_part(gw)
    if odd_v != odd_w:
        return None
    return Q(rho_v) / Q(rho_w)
