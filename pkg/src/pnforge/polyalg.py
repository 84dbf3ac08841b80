"""Exact polynomial arithmetic over the rationals.

Bivariate polynomials are the universal carrier for normal fields,
tangent fields, surfaces and certificates.  They are stored sparsely as
exponent maps ``(i, j) -> rational`` and every operation is exact; no
floating point value ever enters this module.

The canonical monomial order is graded lexicographic with u > v.  The
canonical scale of a polynomial is its primitive integer form with a
positive leading coefficient, which makes "equal up to a constant"
comparisons plain equality tests.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import DegreeTooSmall, DimensionMismatch, ZeroPolynomial

try:
    from gmpy2 import mpq as _mpq

    _RAT_TYPES = (int, Fraction, type(_mpq(0)))

    def Q(a=0, b=None):
        """Exact rational constructor. Rejects floats on purpose."""
        if isinstance(a, float) or isinstance(b, float):
            raise TypeError("floats are not exact; pass int, Fraction or 'p/q' string")
        if b is None:
            return _mpq(a)
        return _mpq(a, b)

except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    _RAT_TYPES = (int, Fraction)

    def Q(a=0, b=None):
        if isinstance(a, float) or isinstance(b, float):
            raise TypeError("floats are not exact; pass int, Fraction or 'p/q' string")
        if b is None:
            return Fraction(a)
        return Fraction(a, b)


def parse_rational(text):
    """Parse '3', '-3/4' (or an int) into an exact rational."""
    if isinstance(text, str):
        return Q(text.strip())
    if isinstance(text, _RAT_TYPES):
        return Q(text)
    raise TypeError(f"cannot parse rational from {text!r}")


def format_rational(q) -> str:
    """Canonical 'num/den' form, denominator always present."""
    q = Q(q)
    return f"{q.numerator}/{q.denominator}"


def rational_sqrt(q):
    """Exact square root of a rational, or None if it is not a square."""
    q = Q(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return Q(rn, rd)


def grlex_key(exp):
    """Sort key realizing graded-lex with u > v; bigger key = bigger monomial."""
    i, j = exp
    return (i + j, i)


def monomials_upto(degree):
    """All exponent pairs of total degree <= degree in ascending grlex order."""
    out = [(i, d - i) for d in range(degree + 1) for i in range(d + 1)]
    out.sort(key=grlex_key)
    return out


class BiPoly:
    """Sparse bivariate polynomial with exact rational coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for (i, j), val in coeffs.items():
                val = Q(val)
                if val != 0:
                    c[(int(i), int(j))] = val
        self._c = c

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def const(cls, value):
        return cls({(0, 0): Q(value)})

    @classmethod
    def monomial(cls, i, j, coeff=1):
        return cls({(i, j): Q(coeff)})

    # -- structure ---------------------------------------------------

    def items(self):
        return self._c.items()

    def terms(self):
        """(exponent, coefficient) pairs in ascending grlex order."""
        return sorted(self._c.items(), key=lambda t: grlex_key(t[0]))

    def coeff(self, i, j):
        return self._c.get((i, j), Q(0))

    def is_zero(self):
        return not self._c

    def degree(self):
        """Total degree; -inf for the zero polynomial."""
        if not self._c:
            return float("-inf")
        return max(i + j for i, j in self._c)

    def degree_in(self, var):
        if not self._c:
            return float("-inf")
        k = 0 if var == "u" else 1
        return max(e[k] for e in self._c)

    def leading(self):
        """Graded-lex leading (exponent, coefficient)."""
        if not self._c:
            raise ZeroPolynomial("zero polynomial has no leading term")
        exp = max(self._c, key=grlex_key)
        return exp, self._c[exp]

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, _RAT_TYPES):
            other = BiPoly.const(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    # -- ring arithmetic ----------------------------------------------

    def __add__(self, other):
        if isinstance(other, _RAT_TYPES):
            other = BiPoly.const(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        c = dict(self._c)
        for e, val in other._c.items():
            s = c.get(e, 0) + val
            if s == 0:
                c.pop(e, None)
            else:
                c[e] = s
        out = BiPoly.__new__(BiPoly)
        out._c = c
        return out

    __radd__ = __add__

    def __neg__(self):
        out = BiPoly.__new__(BiPoly)
        out._c = {e: -v for e, v in self._c.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, _RAT_TYPES):
            other = BiPoly.const(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _RAT_TYPES):
            return self.scale(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        c = {}
        for (i1, j1), v1 in self._c.items():
            for (i2, j2), v2 in other._c.items():
                e = (i1 + i2, j1 + j2)
                s = c.get(e, 0) + v1 * v2
                if s == 0:
                    c.pop(e, None)
                else:
                    c[e] = s
        out = BiPoly.__new__(BiPoly)
        out._c = c
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = BiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def scale(self, factor):
        factor = Q(factor)
        if factor == 0:
            return BiPoly.zero()
        out = BiPoly.__new__(BiPoly)
        out._c = {e: v * factor for e, v in self._c.items()}
        return out

    # -- calculus -----------------------------------------------------

    def diff(self, var):
        k = 0 if var == "u" else 1
        c = {}
        for (i, j), val in self._c.items():
            e = (i, j)[k]
            if e == 0:
                continue
            ne = (i - 1, j) if k == 0 else (i, j - 1)
            c[ne] = val * e
        out = BiPoly.__new__(BiPoly)
        out._c = c
        return out

    def integrate(self, var):
        """Antiderivative with zero constant term in var."""
        k = 0 if var == "u" else 1
        c = {}
        for (i, j), val in self._c.items():
            ne = (i + 1, j) if k == 0 else (i, j + 1)
            c[ne] = val / Q(ne[k])
        out = BiPoly.__new__(BiPoly)
        out._c = c
        return out

    # -- evaluation and substitution -----------------------------------

    def evaluate(self, a, b):
        a, b = Q(a), Q(b)
        total = Q(0)
        pu, pv = {0: Q(1)}, {0: Q(1)}
        for (i, j), val in self._c.items():
            if i not in pu:
                pu[i] = a ** i
            if j not in pv:
                pv[j] = b ** j
            total += val * pu[i] * pv[j]
        return total

    def evaluate_float(self, a, b):
        return sum(float(val) * (a ** i) * (b ** j) for (i, j), val in self._c.items())

    def substitute(self, pu, pv):
        """Compose with polynomials (or constants) for u and v."""
        if not isinstance(pu, BiPoly):
            pu = BiPoly.const(pu)
        if not isinstance(pv, BiPoly):
            pv = BiPoly.const(pv)
        pow_u, pow_v = {0: BiPoly.const(1)}, {0: BiPoly.const(1)}

        def power(cache, base, n):
            if n not in cache:
                cache[n] = power(cache, base, n - 1) * base
            return cache[n]

        total = BiPoly.zero()
        for (i, j), val in self.terms():
            total = total + power(pow_u, pu, i) * power(pow_v, pv, j) * val
        return total

    # -- normalization --------------------------------------------------

    def content(self):
        """Signed rational content: p = content * primitive_part, the
        primitive part having integer coefficients with gcd 1 and a
        positive graded-lex leading coefficient."""
        if not self._c:
            return Q(0)
        num_gcd = 0
        den_lcm = 1
        for v in self._c.values():
            num_gcd = math.gcd(num_gcd, abs(int(v.numerator)))
            den_lcm = den_lcm * int(v.denominator) // math.gcd(den_lcm, int(v.denominator))
        c = Q(num_gcd, den_lcm)
        _, lead = self.leading()
        return c if lead > 0 else -c

    def primitive_part(self):
        c = self.content()
        if c == 0:
            return BiPoly.zero()
        return self.scale(1 / c)

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for (i, j), val in reversed(self.terms()):
            mono = ""
            if i:
                mono += "u" if i == 1 else f"u^{i}"
            if j:
                mono += "v" if j == 1 else f"v^{j}"
            coeff = str(val)
            if mono and val == 1:
                coeff = ""
            elif mono and val == -1:
                coeff = "-"
            parts.append(f"{coeff}{mono}" if mono else coeff)
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


u = BiPoly.monomial(1, 0)
v = BiPoly.monomial(0, 1)


def arith(p, q, op):
    """Dispatch ring arithmetic by name: add, sub, mul, scale."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(q)
    raise ValueError(f"unknown operation {op!r}")


def diff(p, var):
    return p.diff(var)


def integrate(p, var):
    return p.integrate(var)


def exact_div(p, d):
    """Exact quotient p / d in Q[u,v], or None when d does not divide p."""
    if d.is_zero():
        raise ZeroPolynomial("division by the zero polynomial")
    if p.is_zero():
        return BiPoly.zero()
    (di, dj), dc = d.leading()
    quotient = {}
    rem = p
    dp = int(p.degree())
    max_steps = (dp + 1) * (dp + 2) // 2 + 2
    for _ in range(max_steps):
        if rem.is_zero():
            out = BiPoly.__new__(BiPoly)
            out._c = quotient
            return out
        (ri, rj), rc = rem.leading()
        qi, qj = ri - di, rj - dj
        if qi < 0 or qj < 0:
            return None
        qc = rc / dc
        quotient[(qi, qj)] = qc
        rem = rem - d * BiPoly.monomial(qi, qj, qc)
    return None


def perfect_square_root(p):
    """Return s with s*s == p (positive leading coefficient), else None.

    Works by peeling graded-lex leading terms: if p = s^2 then the terms
    of s are recovered greedily from p - (partial s)^2.
    """
    if p.is_zero():
        return BiPoly.zero()
    deg = p.degree()
    if deg % 2 != 0:
        return None
    (li, lj), lc = p.leading()
    if li % 2 or lj % 2:
        return None
    root_lc = rational_sqrt(lc)
    if root_lc is None:
        return None
    s = BiPoly.monomial(li // 2, lj // 2, root_lc)
    lead_mono = (li // 2, lj // 2)
    # at most C(deg/2 + 2, 2) terms in s
    max_terms = (deg // 2 + 1) * (deg // 2 + 2) // 2
    for _ in range(max_terms):
        r = p - s * s
        if r.is_zero():
            return s
        (ri, rj), rc = r.leading()
        ni, nj = ri - lead_mono[0], rj - lead_mono[1]
        if ni < 0 or nj < 0 or grlex_key((ni, nj)) >= grlex_key(lead_mono):
            return None
        s = s + BiPoly.monomial(ni, nj, rc / (2 * root_lc))
    return s if (p - s * s).is_zero() else None


# -- gcd and square-free structure (sympy-backed) ----------------------

_SYMPY = None


def _sym():
    global _SYMPY
    if _SYMPY is None:
        import sympy

        _SYMPY = (sympy, sympy.symbols("u v"))
    return _SYMPY


def _to_sympy(p):
    sympy, (su, sv) = _sym()
    expr = {(i, j): sympy.Rational(int(c.numerator), int(c.denominator)) for (i, j), c in p.items()}
    return sympy.Poly.from_dict(expr or {(0, 0): 0}, su, sv, domain="QQ")


def _from_sympy(poly):
    c = {}
    for exp, val in poly.as_dict().items():
        c[(int(exp[0]), int(exp[1]))] = Q(int(val.numerator), int(val.denominator))
    return BiPoly(c)


def gcd(p, q):
    """Polynomial gcd, normalized to primitive form with positive lead."""
    if p.is_zero():
        return q.primitive_part()
    if q.is_zero():
        return p.primitive_part()
    sympy, _ = _sym()
    g = _to_sympy(p).gcd(_to_sympy(q))
    return _from_sympy(g).primitive_part()


def squarefree_decomposition(p):
    """Write p = content * prod(g_m ** m) with the g_m primitive,
    square-free, pairwise coprime and positive-leading.

    Returns (content, [(g_m, m), ...]) with multiplicities ascending.
    """
    if p.is_zero():
        raise ZeroPolynomial("square-free decomposition of 0")
    content = p.content()
    prim = p.scale(1 / content)
    chain = [prim]
    while chain[-1].degree() > 0:
        cur = chain[-1]
        g = gcd(gcd(cur, cur.diff("u")), cur.diff("v"))
        if g.degree() <= 0:
            break
        chain.append(g)
    # chain[t] = prod f ** max(e - t, 0); w_t = chain[t-1]/chain[t] = prod_{e >= t} f
    ws = []
    for t in range(1, len(chain) + 1):
        upper = chain[t] if t < len(chain) else BiPoly.const(1)
        w = exact_div(chain[t - 1], upper)
        assert w is not None, "square-free chain division must be exact"
        ws.append(w)
    parts = []
    for m in range(1, len(ws) + 1):
        nxt = ws[m] if m < len(ws) else BiPoly.const(1)
        g = exact_div(ws[m - 1], nxt)
        assert g is not None
        if g.degree() > 0:
            parts.append((g.primitive_part(), m))
            content *= g.content() ** m
    return content, parts


def gcd_and_squarefree(p):
    """Content of p plus the product of its distinct irreducible factors."""
    content, parts = squarefree_decomposition(p)
    radical = BiPoly.const(1)
    for g, _ in parts:
        radical = radical * g
    return p.content(), radical


def split_square_part(p):
    """Split p = rho * half**2 * odd with odd square-free and canonical.

    `odd` collects the factors of odd multiplicity; it is the exact
    obstruction to p being a rational multiple of a polynomial square.
    """
    content, parts = squarefree_decomposition(p)
    half = BiPoly.const(1)
    odd = BiPoly.const(1)
    for g, m in parts:
        if m // 2:
            half = half * g ** (m // 2)
        if m % 2:
            odd = odd * g
    return content, half, odd


# -- homogeneous trivariate layer --------------------------------------


class HomTriPoly:
    """Homogeneous polynomial in u, v, w with exact rational coefficients."""

    __slots__ = ("_c", "hdeg")

    def __init__(self, coeffs, hdeg=None):
        c = {}
        for (i, j, k), val in (coeffs or {}).items():
            val = Q(val)
            if val != 0:
                c[(int(i), int(j), int(k))] = val
        degs = {sum(e) for e in c}
        if len(degs) > 1:
            raise ValueError("exponent triples must share a common total degree")
        if hdeg is None:
            if not degs:
                raise ValueError("degree required for the zero polynomial")
            hdeg = degs.pop()
        elif degs and degs.pop() != hdeg:
            raise ValueError("stored exponents do not sum to the stated degree")
        self._c = c
        self.hdeg = hdeg

    def items(self):
        return self._c.items()

    def is_zero(self):
        return not self._c

    def coeff(self, i, j, k):
        return self._c.get((i, j, k), Q(0))

    def __eq__(self, other):
        if not isinstance(other, HomTriPoly):
            return NotImplemented
        return self._c == other._c and (self._c or self.hdeg == other.hdeg)

    def __hash__(self):
        return hash((self.hdeg, frozenset(self._c.items())))

    def __add__(self, other):
        if self.hdeg != other.hdeg:
            raise ValueError("cannot add homogeneous polynomials of different degrees")
        c = dict(self._c)
        for e, val in other._c.items():
            s = c.get(e, 0) + val
            if s == 0:
                c.pop(e, None)
            else:
                c[e] = s
        return HomTriPoly(c, self.hdeg)

    def __neg__(self):
        return HomTriPoly({e: -val for e, val in self._c.items()}, self.hdeg)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, _RAT_TYPES):
            return HomTriPoly({e: val * Q(other) for e, val in self._c.items()}, self.hdeg)
        c = {}
        for (a1, b1, c1), v1 in self._c.items():
            for (a2, b2, c2), v2 in other._c.items():
                e = (a1 + a2, b1 + b2, c1 + c2)
                s = c.get(e, 0) + v1 * v2
                if s == 0:
                    c.pop(e, None)
                else:
                    c[e] = s
        return HomTriPoly(c, self.hdeg + other.hdeg)

    __rmul__ = __mul__

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for (i, j, k), val in sorted(self._c.items(), reverse=True):
            mono = "".join(
                n if e == 1 else f"{n}^{e}"
                for n, e in (("u", i), ("v", j), ("w", k))
                if e
            )
            parts.append(f"{val}*{mono}" if mono else str(val))
        return " + ".join(parts)

    __repr__ = __str__


def homogenize(p, d):
    """Lift p(u, v) to degree d with the auxiliary variable w."""
    if p.degree() > d:
        raise DegreeTooSmall(f"degree {d} is below deg p = {p.degree()}")
    c = {(i, j, d - i - j): val for (i, j), val in p.items()}
    return HomTriPoly(c, d)


def dehomogenize(P):
    """Set w = 1."""
    c = {}
    for (i, j, _k), val in P.items():
        c[(i, j)] = c.get((i, j), 0) + val
    return BiPoly(c)


# -- vectors ------------------------------------------------------------


class PolyVec:
    """Fixed-dimension tuple of BiPoly; a polynomial vector field."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = []
        for p in components:
            comps.append(p if isinstance(p, BiPoly) else BiPoly.const(p))
        self.components = tuple(comps)

    @property
    def dim(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        if not isinstance(other, PolyVec):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __add__(self, other):
        self._check(other)
        return PolyVec([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        self._check(other)
        return PolyVec([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return PolyVec([-a for a in self])

    def scale(self, factor):
        return PolyVec([a.scale(factor) for a in self])

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionMismatch(f"{self.dim} != {other.dim}")

    def diff(self, var):
        return PolyVec([a.diff(var) for a in self])

    def integrate(self, var):
        return PolyVec([a.integrate(var) for a in self])

    def evaluate(self, a, b):
        return tuple(p.evaluate(a, b) for p in self)

    def evaluate_float(self, a, b):
        return tuple(p.evaluate_float(a, b) for p in self)

    def substitute(self, pu, pv):
        return PolyVec([p.substitute(pu, pv) for p in self])

    def degree(self):
        return max(p.degree() for p in self.components)

    def is_zero(self):
        return all(p.is_zero() for p in self.components)

    def primitive_scaled(self):
        """Common rational c and primitive integer vector V with self = c*V.

        The sign of c is chosen so the first nonzero component of V has a
        positive leading coefficient.
        """
        num_gcd, den_lcm = 0, 1
        for p in self.components:
            for val in dict(p.items()).values():
                num_gcd = math.gcd(num_gcd, abs(int(val.numerator)))
                den_lcm = den_lcm * int(val.denominator) // math.gcd(den_lcm, int(val.denominator))
        if num_gcd == 0:
            return Q(0), self
        c = Q(num_gcd, den_lcm)
        for p in self.components:
            if not p.is_zero():
                if p.leading()[1] < 0:
                    c = -c
                break
        return c, self.scale(1 / c)

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.components) + ")"

    __repr__ = __str__
