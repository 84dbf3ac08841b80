"""Homogeneous syzygy dimensions and the Hilbert-function lower bound.

Syzygies of a homogenized normal field are computed as exact nullspaces
of the coefficient-matching system a*N1 + b*N2 + c*N3 == 0.  The Koszul
bound 3*C(l-k+2, 2) - C(l-2k+2, 2) is attained exactly when the field
is basepoint-free; strict excess certifies base points.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .exactla import LinearSystem, nullspace, nullspace_dim
from .geometry import cross3
from .polyalg import HomTriPoly, PolyVec, Q


def _hom_monomials(degree):
    """Exponent triples (i, j, k) with i + j + k = degree, sorted."""
    out = []
    for i in range(degree, -1, -1):
        for j in range(degree - i, -1, -1):
            out.append((i, j, degree - i - j))
    return out


def binom2_dim(m):
    """C(m, 2) as a vector-space dimension: zero for m < 2."""
    return m * (m - 1) // 2 if m >= 2 else 0


def binom2_poly(m):
    """C(m, 2) = m(m-1)/2 as a polynomial in m, any integer argument."""
    return m * (m - 1) // 2


@dataclass(frozen=True)
class HomNormalField:
    """Triple of homogeneous trivariate polynomials of a common degree."""

    N: tuple

    def __post_init__(self):
        comps = tuple(self.N)
        if len(comps) != 3:
            raise ValueError("a homogeneous normal field has three components")
        degs = {P.hdeg for P in comps}
        if len(degs) != 1:
            raise ValueError("components must share one homogeneous degree")
        object.__setattr__(self, "N", comps)
        g = _content_gcd(comps)
        if g is not None:
            warnings.warn(
                f"components share the non-constant factor {g}; "
                "syzygy dimensions assume gcd(N_i) = 1",
                UserWarning,
                stacklevel=2,
            )

    @property
    def degree(self):
        return self.N[0].hdeg

    @classmethod
    def from_bipolys(cls, polys, degree):
        from .polyalg import homogenize

        return cls(tuple(homogenize(p, degree) for p in polys))


def _content_gcd(comps):
    """Non-constant common polynomial factor of the components, if any."""
    import sympy

    su, sv, sw = sympy.symbols("u v w")
    exprs = []
    for P in comps:
        if P.is_zero():
            continue
        expr = sympy.Integer(0)
        for (i, j, k), val in P.items():
            expr += sympy.Rational(int(val.numerator), int(val.denominator)) * su ** i * sv ** j * sw ** k
        exprs.append(expr)
    if len(exprs) < 2:
        return None
    g = exprs[0]
    for e in exprs[1:]:
        g = sympy.gcd(g, e)
    if g.is_number or g == 1:
        return None
    return g


def _syzygy_system(field, ell):
    """Coefficient rows of a*N1 + b*N2 + c*N3 == 0 for degree-ell (a,b,c)."""
    monos = _hom_monomials(ell)
    k = field.degree
    target = {e: idx for idx, e in enumerate(_hom_monomials(ell + k))}
    ncols = 3 * len(monos)
    labels = [(comp, i, j) for comp in range(3) for (i, j, _k) in monos]
    rows = [dict() for _ in target]
    for comp in range(3):
        for m_idx, (mi, mj, mk) in enumerate(monos):
            col = comp * len(monos) + m_idx
            for (ni, nj, nk), val in field.N[comp].items():
                r = target[(mi + ni, mj + nj, mk + nk)]
                rows[r][col] = rows[r].get(col, Q(0)) + val
    sys = LinearSystem(ncols=ncols, labels=labels)
    for row in rows:
        sys.add_row(row)
    return sys, monos


def syzygy_dim(field, ell):
    """Dimension of homogeneous degree-ell syzygies of the field."""
    sys, _ = _syzygy_system(field, ell)
    return nullspace_dim(sys)


def syzygy_basis(field, ell):
    """Exact basis of degree-ell syzygies as triples of HomTriPoly."""
    sys, monos = _syzygy_system(field, ell)
    fam = nullspace(sys)
    out = []
    for vec in fam.basis:
        triple = []
        for comp in range(3):
            coeffs = {}
            for m_idx, e in enumerate(monos):
                val = vec[comp * len(monos) + m_idx]
                if val != 0:
                    coeffs[e] = val
            triple.append(HomTriPoly(coeffs, ell))
        out.append(tuple(triple))
    return out


def hilbert_bound(k, ell):
    """Koszul lower bound for the degree-ell syzygy dimension.

    3*C(ell-k+2, 2) - C(ell-2k+2, 2) with dimension-style binomials
    (zero below m = 2), clamped at zero.
    """
    if k < 1 or ell < 0:
        raise ValueError("need k >= 1 and ell >= 0")
    val = 3 * binom2_dim(ell - k + 2) - binom2_dim(ell - 2 * k + 2)
    return max(val, 0)


def bound_forms_agree(k, ell):
    """The closed bound equals 3*C(l+2,2) - C(l+k+2,2) as polynomials.

    Both sides are evaluated with the polynomial binomial C(m,2) =
    m(m-1)/2, which is the reading under which the identity is exact for
    all integers.
    """
    lhs = 3 * binom2_poly(ell - k + 2) - binom2_poly(ell - 2 * k + 2)
    rhs = 3 * binom2_poly(ell + 2) - binom2_poly(ell + k + 2)
    return lhs == rhs


def basepoint_free_test(field, ell_max=None):
    """'free' or 'has_base_points' by scanning dimensions up to ell_max.

    Base points over C (including infinity) inflate the syzygy dimension
    above the Koszul bound at some degree.  The default scan range
    ell_max = 3k is a heuristic; the verdict is only valid up to it.
    """
    k = field.degree
    if ell_max is None:
        ell_max = 3 * k
    if ell_max < 2 * k:
        raise ValueError("scan range must reach 2k to be meaningful")
    for ell in range(ell_max + 1):
        if syzygy_dim(field, ell) > hilbert_bound(k, ell):
            return "has_base_points"
    return "free"


def syzygy_basis_check(q, r, n):
    """Constant c with cross(q, r) == c * n, or None.

    A nonzero c certifies that (q, r) is a module basis of the syzygies
    of n: every orthogonal field decomposes as a*q + b*r polynomially.
    """
    cr = cross3(q, r)
    if n.is_zero() or cr.is_zero():
        return None
    ratio = None
    for i in range(3):
        if n[i].is_zero():
            if not cr[i].is_zero():
                return None
            continue
        ni_terms = dict(n[i].items())
        lead_exp = next(iter(sorted(ni_terms)))
        cand = cr[i].coeff(*lead_exp) / ni_terms[lead_exp]
        if ratio is None:
            ratio = cand
    if ratio is None:
        return None
    for i in range(3):
        if cr[i] != n[i].scale(ratio):
            return None
    return ratio


def decompose_in_basis(p, q, r, registry_degree=None):
    """Polynomials (a, b) with p == a*q + b*r, or None.

    The coefficient degree defaults to deg(p), which is always enough
    when (q, r) is a genuine basis in the regime deg(q), deg(r) >= 1.
    """
    from .exactla import LinVec, LinearSystem, Registry, solve_affine
    from .errors import Inconsistent

    deg = registry_degree if registry_degree is not None else max(int(p.degree()), 0)
    reg = Registry()
    ab = LinVec.unknown(reg, 2, deg)
    sys = LinearSystem(ncols=len(reg), labels=reg.labels)
    for i in range(3):
        expr = ab[0].mul_poly(q[i]) + ab[1].mul_poly(r[i]) - p[i]
        sys.add_identity_zero(expr)
    try:
        fam = solve_affine(sys)
    except Inconsistent:
        return None
    values = fam.member()
    a = ab[0].resolve(values)
    b = ab[1].resolve(values)
    return a, b
