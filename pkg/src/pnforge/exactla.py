"""Exact linear algebra over the rationals.

Coefficient-matching constraints from polynomial identities are turned
into sparse rational rows; systems are solved by fraction-free Bareiss
elimination over arbitrary-precision integers.  Nullspace bases and
particular solutions come back exact and canonically normalized, so
families of surfaces can be compared coefficient by coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import Inconsistent, NonAffineDependence
from .polyalg import BiPoly, PolyVec, Q, grlex_key, monomials_upto

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    mpz = int


# ---------------------------------------------------------------------
# unknowns and affine forms


class Registry:
    """Allocates unknown indices and remembers their (coord, i, j) labels."""

    def __init__(self):
        self.labels = []

    def add(self, label):
        self.labels.append(label)
        return len(self.labels) - 1

    def __len__(self):
        return len(self.labels)


class AffineForm:
    """const + sum coeff_k * x_k, exact rational coefficients."""

    __slots__ = ("const", "terms")

    def __init__(self, const=0, terms=None):
        self.const = Q(const)
        self.terms = {k: Q(c) for k, c in (terms or {}).items() if c != 0}

    def is_const(self):
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, AffineForm):
            other = AffineForm(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, 0) + c
            if s == 0:
                terms.pop(k, None)
            else:
                terms[k] = s
        out = AffineForm.__new__(AffineForm)
        out.const = self.const + other.const
        out.terms = terms
        return out

    def __neg__(self):
        out = AffineForm.__new__(AffineForm)
        out.const = -self.const
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, AffineForm):
            other = AffineForm(other)
        return self + (-other)

    def scale(self, factor):
        factor = Q(factor)
        if factor == 0:
            return AffineForm(0)
        out = AffineForm.__new__(AffineForm)
        out.const = self.const * factor
        out.terms = {k: c * factor for k, c in self.terms.items()}
        return out

    def substitute(self, values):
        """Evaluate at a full assignment (list indexed by unknown)."""
        total = self.const
        for k, c in self.terms.items():
            total += c * values[k]
        return total

    def __repr__(self):
        bits = [str(self.const)] + [f"{c}*x{k}" for k, c in sorted(self.terms.items())]
        return " + ".join(bits)


class LinPoly:
    """Bivariate polynomial whose coefficients are affine in unknowns."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {}
        for e, form in (coeffs or {}).items():
            if not isinstance(form, AffineForm):
                form = AffineForm(form)
            if form.const != 0 or form.terms:
                self.c[e] = form

    @classmethod
    def from_bipoly(cls, p):
        return cls({e: AffineForm(val) for e, val in p.items()})

    @classmethod
    def unknown(cls, registry, coord, degree):
        """Fresh polynomial of the given total degree with one unknown per
        monomial, labels (coord, i, j), allocated in ascending grlex order."""
        coeffs = {}
        for (i, j) in monomials_upto(degree):
            k = registry.add((coord, i, j))
            coeffs[(i, j)] = AffineForm(0, {k: 1})
        return cls(coeffs)

    def __add__(self, other):
        if isinstance(other, BiPoly):
            other = LinPoly.from_bipoly(other)
        out = {}
        for e in set(self.c) | set(other.c):
            s = self.c.get(e, AffineForm(0)) + other.c.get(e, AffineForm(0))
            if s.const != 0 or s.terms:
                out[e] = s
        res = LinPoly.__new__(LinPoly)
        res.c = out
        return res

    def __neg__(self):
        res = LinPoly.__new__(LinPoly)
        res.c = {e: -f for e, f in self.c.items()}
        return res

    def __sub__(self, other):
        if isinstance(other, BiPoly):
            other = LinPoly.from_bipoly(other)
        return self + (-other)

    def mul_poly(self, p):
        """Multiply by a known polynomial."""
        if isinstance(p, LinPoly):
            raise NonAffineDependence("product of two unknown-bearing polynomials")
        out = {}
        for (i1, j1), form in self.c.items():
            for (i2, j2), val in p.items():
                e = (i1 + i2, j1 + j2)
                scaled = form.scale(val)
                if e in out:
                    out[e] = out[e] + scaled
                else:
                    out[e] = scaled
        res = LinPoly.__new__(LinPoly)
        res.c = {e: f for e, f in out.items() if f.const != 0 or f.terms}
        return res

    def scale(self, factor):
        res = LinPoly.__new__(LinPoly)
        res.c = {e: f.scale(factor) for e, f in self.c.items()}
        return res

    def diff(self, var):
        k = 0 if var == "u" else 1
        out = {}
        for (i, j), form in self.c.items():
            e = (i, j)[k]
            if e == 0:
                continue
            ne = (i - 1, j) if k == 0 else (i, j - 1)
            out[ne] = form.scale(e)
        res = LinPoly.__new__(LinPoly)
        res.c = out
        return res

    def evaluate(self, a, b):
        a, b = Q(a), Q(b)
        total = AffineForm(0)
        for (i, j), form in self.c.items():
            total = total + form.scale(a ** i * b ** j)
        return total

    def substitute(self, pu, pv):
        """Compose with known polynomials for u and v."""
        if not isinstance(pu, BiPoly):
            pu = BiPoly.const(pu)
        if not isinstance(pv, BiPoly):
            pv = BiPoly.const(pv)
        pow_u, pow_v = {0: BiPoly.const(1)}, {0: BiPoly.const(1)}

        def power(cache, base, n):
            if n not in cache:
                cache[n] = power(cache, base, n - 1) * base
            return cache[n]

        total = LinPoly()
        for (i, j), form in sorted(self.c.items()):
            mono = power(pow_u, pu, i) * power(pow_v, pv, j)
            term = LinPoly({e: form.scale(val) for e, val in mono.items()})
            total = total + term
        return total

    def resolve(self, values):
        """Substitute a full unknown assignment, producing a BiPoly."""
        return BiPoly({e: form.substitute(values) for e, form in self.c.items()})


class LinVec:
    """Vector of LinPoly components."""

    def __init__(self, components):
        self.components = list(components)

    @classmethod
    def unknown(cls, registry, dim, degree, coord_offset=0):
        return cls([LinPoly.unknown(registry, coord_offset + c, degree) for c in range(dim)])

    @property
    def dim(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def diff(self, var):
        return LinVec([p.diff(var) for p in self.components])

    def resolve(self, values):
        return PolyVec([p.resolve(values) for p in self.components])


def constrain_identity_zero(expr):
    """Equations forcing a LinPoly to vanish identically.

    One equation per monomial: sum coeff_k * x_k = -const.  The solution
    set is exactly the set of assignments making expr the zero polynomial.
    """
    if isinstance(expr, BiPoly):
        expr = LinPoly.from_bipoly(expr)
    rows = []
    for e in sorted(expr.c, key=grlex_key):
        form = expr.c[e]
        rows.append((dict(form.terms), -form.const))
    return rows


# ---------------------------------------------------------------------
# systems and solutions


@dataclass
class LinearSystem:
    ncols: int
    labels: list = None
    rows: list = field(default_factory=list)   # sparse dicts index -> Q
    rhs: list = field(default_factory=list)

    def add_row(self, row, b=0):
        self.rows.append({k: Q(c) for k, c in row.items() if c != 0})
        self.rhs.append(Q(b))

    def add_equations(self, eqs):
        for row, b in eqs:
            self.add_row(row, b)

    def add_identity_zero(self, expr):
        self.add_equations(constrain_identity_zero(expr))

    def add_value_constraint(self, form, value):
        """AffineForm == value."""
        self.add_row(dict(form.terms), Q(value) - form.const)

    @property
    def nrows(self):
        return len(self.rows)

    def is_homogeneous(self):
        return all(b == 0 for b in self.rhs)

    def residual(self, vector):
        """Exact residuals A x - b for a candidate solution."""
        out = []
        for row, b in zip(self.rows, self.rhs):
            out.append(sum((c * vector[k] for k, c in row.items()), -b))
        return out


@dataclass
class SolutionFamily:
    particular: list
    basis: list
    labels: list = None

    @property
    def dim(self):
        return len(self.basis)

    def member(self, params=None):
        """particular + sum params[i] * basis[i] as a coefficient vector."""
        vec = list(self.particular)
        if params:
            for t, b in zip(params, self.basis):
                t = Q(t)
                if t != 0:
                    for k, val in enumerate(b):
                        if val != 0:
                            vec[k] = vec[k] + t * val
        return vec


# ---------------------------------------------------------------------
# fraction-free elimination


def _scaled_int_rows(system):
    """Integer-scaled dense rows [a_0 .. a_{n-1} | b], row gcd removed."""
    n = system.ncols
    out = []
    for row, b in zip(system.rows, system.rhs):
        if not row and b == 0:
            continue
        den = 1
        for c in row.values():
            den = den * int(c.denominator) // math.gcd(den, int(c.denominator))
        den = den * int(b.denominator) // math.gcd(den, int(b.denominator))
        ints = [0] * (n + 1)
        g = 0
        for k, c in row.items():
            val = int(c.numerator) * (den // int(c.denominator))
            ints[k] = val
            g = math.gcd(g, abs(val))
        bval = int(b.numerator) * (den // int(b.denominator))
        ints[n] = bval
        g = math.gcd(g, abs(bval))
        if g > 1:
            ints = [x // g for x in ints]
        out.append([mpz(x) for x in ints])
    return out


def _bareiss_echelon(rows, ncols):
    """Fraction-free row echelon over the first ncols columns.

    Pivot choice: smallest absolute value bit length, ties broken by the
    lowest row index.  Returns (echelon_rows, pivot_cols); trailing
    columns (such as an augmented right-hand side) ride along.
    """
    nrows = len(rows)
    width = len(rows[0]) if rows else ncols
    prev = mpz(1)
    pr = 0
    pivot_cols = []
    for col in range(ncols):
        if pr >= nrows:
            break
        best = -1
        best_bits = None
        for r in range(pr, nrows):
            val = rows[r][col]
            if val:
                bits = abs(val).bit_length()
                if best_bits is None or bits < best_bits:
                    best, best_bits = r, bits
        if best < 0:
            continue
        if best != pr:
            rows[pr], rows[best] = rows[best], rows[pr]
        p = rows[pr][col]
        live = []
        for r in range(pr + 1, nrows):
            row = rows[r]
            f = row[col]
            prow = rows[pr]
            if f:
                for cc in range(col, width):
                    row[cc] = (p * row[cc] - f * prow[cc]) // prev
            else:
                for cc in range(col, width):
                    if row[cc]:
                        row[cc] = (p * row[cc]) // prev
            if any(row[cc] for cc in range(col + 1, width)):
                live.append(row)
        rows[pr + 1:] = live
        nrows = len(rows)
        prev = p
        pivot_cols.append(col)
        pr += 1
    return rows[:pr] + rows[pr:], pivot_cols


def _back_substitute(ech, pivot_cols, ncols, free_assign):
    """Solve the echelon system with the given values on free columns."""
    sol = [Q(0)] * ncols
    free_cols = [c for c in range(ncols) if c not in set(pivot_cols)]
    for c, val in zip(free_cols, free_assign):
        sol[c] = Q(val)
    for r in range(len(pivot_cols) - 1, -1, -1):
        pc = pivot_cols[r]
        row = ech[r]
        acc = Q(int(row[ncols]))
        for c in range(pc + 1, ncols):
            if row[c]:
                acc -= Q(int(row[c])) * sol[c]
        sol[pc] = acc / Q(int(row[pc]))
    return sol


def _normalize_vector(vec):
    """Primitive integer form, first nonzero entry positive."""
    num_gcd, den_lcm = 0, 1
    for val in vec:
        num_gcd = math.gcd(num_gcd, abs(int(val.numerator)))
        den_lcm = den_lcm * int(val.denominator) // math.gcd(den_lcm, int(val.denominator))
    if num_gcd == 0:
        return vec
    scale = Q(den_lcm, num_gcd)
    out = [val * scale for val in vec]
    for val in out:
        if val != 0:
            if val < 0:
                out = [-x for x in out]
            break
    return out


def _eliminated(system):
    rows = _scaled_int_rows(system)
    if not rows:
        return [], []
    return _bareiss_echelon(rows, system.ncols)


def rank(system):
    ech, pivots = _eliminated(system)
    return len(pivots)


def nullspace_dim(system):
    return system.ncols - rank(system)


def nullspace(system):
    """Exact nullspace basis of a homogeneous system."""
    if not system.is_homogeneous():
        raise ValueError("nullspace requires a homogeneous system")
    ech, pivots = _eliminated(system)
    n = system.ncols
    piv_set = set(pivots)
    free_cols = [c for c in range(n) if c not in piv_set]
    basis = []
    for fc in free_cols:
        assign = [Q(1) if c == fc else Q(0) for c in free_cols]
        vec = _back_substitute(ech, pivots, n, assign)
        basis.append(_normalize_vector(vec))
    return SolutionFamily([Q(0)] * n, basis, system.labels)


def solve_affine(system):
    """Particular solution plus nullspace, or Inconsistent."""
    ech, pivots = _eliminated(system)
    n = system.ncols
    for r in range(len(pivots), len(ech)):
        if ech[r][n]:
            raise Inconsistent("no solution at this degree")
    ech = ech[: len(pivots)]
    piv_set = set(pivots)
    free_cols = [c for c in range(n) if c not in piv_set]
    particular = _back_substitute(ech, pivots, n, [Q(0)] * len(free_cols))
    basis = []
    for fc in free_cols:
        assign = [Q(1) if c == fc else Q(0) for c in free_cols]
        hom = _back_substitute(
            [row[:n] + [mpz(0)] for row in ech], pivots, n, assign
        )
        basis.append(_normalize_vector(hom))
    return SolutionFamily(particular, basis, system.labels)
