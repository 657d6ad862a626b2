"""Exact rational linear algebra kernel.

Everything here is computed over `fractions.Fraction`; there is no floating
point anywhere, so every identity downstream can be certified with literal
equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import InputError

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '2/3', and Fractions; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InputError(f"not an exact rational: {x!r}")


# ---------------------------------------------------------------------------
# vectors: plain lists of Fraction
# ---------------------------------------------------------------------------

def vzero(n):
    return [ZERO] * n


def vadd(u, v):
    return [a + b for a, b in zip(u, v)]


def vsub(u, v):
    return [a - b for a, b in zip(u, v)]


def vscale(t, u):
    return [t * a for a in u]


def vdot(u, v):
    return sum((a * b for a, b in zip(u, v)), ZERO)


def vis_zero(u):
    return all(a == 0 for a in u)


def basis_vector(n, i):
    v = vzero(n)
    v[i] = ONE
    return v


class Matrix:
    """Dense matrix of Fractions, row major.  Treated as immutable by convention."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, cols=None):
        data = [[frac(x) for x in row] for row in data]
        self.rows = len(data)
        if self.rows == 0:
            if cols is None:
                raise InputError("empty matrix needs an explicit column count")
            self.cols = cols
        else:
            self.cols = len(data[0])
            if any(len(row) != self.cols for row in data):
                raise InputError("ragged matrix data")
        self.data = data

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n):
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows, cols):
        return cls([[ZERO] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def diagonal(cls, entries):
        entries = [frac(e) for e in entries]
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns, rows=None):
        if not columns:
            if rows is None:
                raise InputError("empty column list needs an explicit row count")
            return cls.zeros(rows, 0)
        n = len(columns[0])
        return cls([[frac(col[i]) for col in columns] for i in range(n)])

    @classmethod
    def from_rows(cls, rows, cols=None):
        return cls([list(r) for r in rows], cols=cols)

    # -- basic access -------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_square(self):
        return self.rows == self.cols

    def row(self, i):
        return list(self.data[i])

    def col(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def entry(self, i, j):
        return self.data[i][j]

    def to_lists(self):
        return [list(row) for row in self.data]

    def copy(self):
        return Matrix(self.data, cols=self.cols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.data)
        return f"Matrix({self.rows}x{self.cols}: {body})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)],
            cols=self.cols,
        )

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)],
            cols=self.cols,
        )

    def __neg__(self):
        return Matrix([[-a for a in row] for row in self.data], cols=self.cols)

    def scale(self, t):
        t = frac(t)
        return Matrix([[t * a for a in row] for row in self.data], cols=self.cols)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise InputError(f"cannot multiply {self.shape} by {other.shape}")
            if self.cols == 0 or other.cols == 0 or self.rows == 0:
                return Matrix.zeros(self.rows, other.cols)
            cols = list(zip(*other.data))
            out = [
                [sum((a * b for a, b in zip(row, col)), ZERO) for col in cols]
                for row in self.data
            ]
            return Matrix(out, cols=other.cols)
        return self.scale(other)

    def __rmul__(self, t):
        return self.scale(t)

    def __pow__(self, k):
        if not self.is_square():
            raise InputError("matrix power needs a square matrix")
        if k < 0:
            raise InputError("negative matrix powers are not supported; invert first")
        result = Matrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def apply(self, v):
        if len(v) != self.cols:
            raise InputError("vector length does not match column count")
        return [sum((a * x for a, x in zip(row, v)), ZERO) for row in self.data]

    def transpose(self):
        return Matrix(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def trace(self):
        if not self.is_square():
            raise InputError("trace needs a square matrix")
        return sum((self.data[i][i] for i in range(self.rows)), ZERO)

    def is_zero(self):
        return all(vis_zero(row) for row in self.data)

    def hstack(self, other):
        if self.rows != other.rows:
            raise InputError("hstack row mismatch")
        return Matrix(
            [r1 + r2 for r1, r2 in zip(self.data, other.data)],
            cols=self.cols + other.cols,
        )

    def vstack(self, other):
        if self.cols != other.cols:
            raise InputError("vstack column mismatch")
        return Matrix(self.data + other.data, cols=self.cols)

    def submatrix(self, row_idx, col_idx):
        return Matrix(
            [[self.data[i][j] for j in col_idx] for i in row_idx],
            cols=len(col_idx),
        )

    # -- solved quantities --------------------------------------------------

    def rank(self):
        return len(rref(self)[1])

    def det(self):
        if not self.is_square():
            raise InputError("determinant needs a square matrix")
        n = self.rows
        m = [row[:] for row in self.data]
        det = ONE
        for c in range(n):
            pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
            if pivot is None:
                return ZERO
            if pivot != c:
                m[c], m[pivot] = m[pivot], m[c]
                det = -det
            det *= m[c][c]
            inv = ONE / m[c][c]
            for r in range(c + 1, n):
                if m[r][c] != 0:
                    f = m[r][c] * inv
                    for j in range(c, n):
                        m[r][j] -= f * m[c][j]
        return det

    def inverse(self):
        if not self.is_square():
            raise InputError("inverse needs a square matrix")
        n = self.rows
        aug, pivots = rref(self.hstack(Matrix.identity(n)))
        if list(pivots) != list(range(n)):
            raise InputError("matrix is singular")
        return aug.submatrix(range(n), range(n, 2 * n))

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise InputError(f"shape mismatch: {self.shape} vs {other.shape}")


def rref(m: Matrix):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    data = [row[:] for row in m.data]
    rows, cols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if data[i][c] != 0), None)
        if pivot is None:
            continue
        data[r], data[pivot] = data[pivot], data[r]
        inv = ONE / data[r][c]
        data[r] = [x * inv for x in data[r]]
        for i in range(rows):
            if i != r and data[i][c] != 0:
                f = data[i][c]
                data[i] = [x - f * y for x, y in zip(data[i], data[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return Matrix(data, cols=cols), tuple(pivots)


def kernel(m: Matrix):
    """Basis of the right null space, in the canonical rref parametrisation."""
    red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = vzero(m.cols)
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -red.data[r][f]
        basis.append(v)
    return basis


def solve(a: Matrix, b):
    """Solve a x = b exactly.

    Returns (particular, kernel_basis) or None when inconsistent.  The
    particular solution is the canonical one with all free variables zero.
    """
    b = [frac(x) for x in b]
    if len(b) != a.rows:
        raise InputError("right hand side length does not match row count")
    aug = a.hstack(Matrix.from_columns([b], rows=a.rows))
    red, pivots = rref(aug)
    if a.cols in pivots:
        return None
    x = vzero(a.cols)
    for r, p in enumerate(pivots):
        x[p] = red.data[r][a.cols]
    return x, kernel(a)


def solve_unique(a: Matrix, b):
    res = solve(a, b)
    if res is None:
        raise InputError("inconsistent linear system")
    x, ker = res
    if ker:
        raise InputError("linear system is underdetermined")
    return x


# ---------------------------------------------------------------------------
# polynomials: dense descending coefficient lists over Fraction
# ---------------------------------------------------------------------------

def poly_trim(p):
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return list(p[i:])


def poly_degree(p):
    p = poly_trim(p)
    return len(p) - 1 if p else -1


def poly_eval(p, x):
    x = frac(x)
    acc = ZERO
    for c in p:
        acc = acc * x + c
    return acc


def poly_derivative(p):
    p = poly_trim(p)
    n = len(p) - 1
    return poly_trim([c * (n - i) for i, c in enumerate(p[:-1])])


def poly_divmod(p, q):
    p, q = poly_trim(p), poly_trim(q)
    if not q:
        raise InputError("polynomial division by zero")
    quot = []
    rem = list(p)
    while len(rem) >= len(q) and rem:
        f = rem[0] / q[0]
        quot.append(f)
        rem = [a - f * b for a, b in zip(rem[1:], q[1:])] + rem[len(q):]
    return poly_trim(quot), poly_trim(rem)


def poly_gcd(p, q):
    p, q = poly_trim(p), poly_trim(q)
    while q:
        p, q = q, poly_divmod(p, q)[1]
    if p:
        lead = p[0]
        p = [c / lead for c in p]
    return p


def poly_eval_matrix(p, m: Matrix):
    if not m.is_square():
        raise InputError("polynomial evaluation needs a square matrix")
    acc = Matrix.zeros(m.rows, m.cols)
    for c in poly_trim(p) or [ZERO]:
        acc = acc * m + Matrix.identity(m.rows).scale(c)
    return acc


def char_poly(m: Matrix):
    """Monic characteristic polynomial, descending coefficients (Faddeev-LeVerrier)."""
    if not m.is_square():
        raise InputError("characteristic polynomial needs a square matrix")
    n = m.rows
    coeffs = [ONE]
    mk = Matrix.zeros(n, n)
    for k in range(1, n + 1):
        mk = m * mk + Matrix.identity(n).scale(coeffs[-1])
        ck = -(m * mk).trace() / k
        coeffs.append(ck)
    return coeffs


def _divisors(n):
    n = abs(n)
    if n == 0:
        raise InputError("divisors of zero requested")
    small, large = [], []
    d = 1
    while d <= isqrt(n):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


@dataclass
class RootReport:
    roots: list  # (root, multiplicity) pairs, ascending
    splits: bool


def rational_roots(p):
    """All rational roots with multiplicities, plus whether they exhaust the degree."""
    p = poly_trim([frac(c) for c in p])
    if not p:
        raise InputError("zero polynomial has no well-defined roots")
    degree = len(p) - 1
    if degree == 0:
        return RootReport(roots=[], splits=True)
    denom_lcm = 1
    for c in p:
        denom_lcm = denom_lcm * c.denominator // gcd(denom_lcm, c.denominator)
    ip = [int(c * denom_lcm) for c in p]
    roots = []
    zero_mult = 0
    while ip and ip[-1] == 0:
        ip = ip[:-1]
        zero_mult += 1
    if zero_mult:
        roots.append((ZERO, zero_mult))
    if len(ip) > 1:
        candidates = set()
        for num in _divisors(ip[-1]):
            for den in _divisors(ip[0]):
                candidates.add(Fraction(num, den))
                candidates.add(Fraction(-num, den))
        cur = [Fraction(c) for c in ip]
        for r in sorted(candidates):
            mult = 0
            while len(cur) > 1 and poly_eval(cur, r) == 0:
                cur, rem = poly_divmod(cur, [ONE, -r])
                assert not rem
                mult += 1
            if mult:
                roots.append((r, mult))
    roots.sort(key=lambda rm: rm[0])
    return RootReport(roots=roots, splits=sum(m for _, m in roots) == degree)


def generalized_eigenspace(m: Matrix, lam):
    """Kernel of (m - lam id)^dim; exhausts the algebraic multiplicity."""
    if not m.is_square():
        raise InputError("generalized eigenspace needs a square matrix")
    lam = frac(lam)
    shifted = m - Matrix.identity(m.rows).scale(lam)
    return kernel(shifted ** m.rows)


def minimal_polynomial(m: Matrix):
    """Monic minimal polynomial via the first linear dependence among powers."""
    if not m.is_square():
        raise InputError("minimal polynomial needs a square matrix")
    n = m.rows
    if n == 0:
        return [ONE]
    power = Matrix.identity(n)
    flat_cols = []
    for k in range(n + 1):
        flat = [power.data[i][j] for i in range(n) for j in range(n)]
        if flat_cols:
            res = solve(Matrix.from_columns(flat_cols, rows=n * n), flat)
            if res is not None:
                x = res[0]
                return [ONE] + [-x[i] for i in range(k - 1, -1, -1)]
        flat_cols.append(flat)
        power = power * m
    raise AssertionError("no dependence among matrix powers up to the dimension")


def minpoly_squarefree(m: Matrix) -> bool:
    """True iff the minimal polynomial is squarefree (diagonalisable over the closure)."""
    mp = minimal_polynomial(m)
    return poly_degree(poly_gcd(mp, poly_derivative(mp))) <= 0
