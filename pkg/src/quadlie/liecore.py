"""Structure-constant Lie algebras and their basic anatomy.

A LieAlgebra stores the full bracket tensor c with [e_i, e_j] = sum_k c[i][j][k] e_k.
Construction certifies antisymmetry and the Jacobi identity, so downstream
code can assume both.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CertificationError, InputError
from .ratlin import (
    Matrix,
    frac,
    kernel,
    rref,
    solve,
    vadd,
    vis_zero,
    vscale,
    vzero,
)


class LieAlgebra:
    __slots__ = ("dim", "basis_names", "c")

    def __init__(self, c, basis_names=None, certify=True):
        self.dim = len(c)
        self.c = [[[frac(x) for x in cell] for cell in row] for row in c]
        for row in self.c:
            if len(row) != self.dim or any(len(cell) != self.dim for cell in row):
                raise InputError("structure tensor must be dim x dim x dim")
        if basis_names is None:
            basis_names = [f"x{i + 1}" for i in range(self.dim)]
        if len(basis_names) != self.dim:
            raise InputError("basis name count does not match dimension")
        if len(set(basis_names)) != self.dim:
            raise InputError("basis names must be unique")
        self.basis_names = list(basis_names)
        if certify:
            self.certify()

    # -- constructors -------------------------------------------------------

    @classmethod
    def abelian(cls, n, basis_names=None):
        c = [[vzero(n) for _ in range(n)] for _ in range(n)]
        return cls(c, basis_names)

    @classmethod
    def from_brackets(cls, dim, brackets, basis_names=None):
        """Build from sparse brackets {(i, j): {k: coeff}} given for i < j."""
        c = [[vzero(dim) for _ in range(dim)] for _ in range(dim)]
        for (i, j), comps in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim) or i == j:
                raise InputError(f"bad bracket index pair ({i}, {j})")
            for k, v in comps.items():
                v = frac(v)
                c[i][j][k] = v
                c[j][i][k] = -v
        return cls(c, basis_names)

    # -- bracket machinery --------------------------------------------------

    def bracket_basis(self, i, j):
        return list(self.c[i][j])

    def bracket(self, u, v):
        out = vzero(self.dim)
        for i, a in enumerate(u):
            if a == 0:
                continue
            ci = self.c[i]
            for j, b in enumerate(v):
                if b == 0:
                    continue
                ab = a * b
                cij = ci[j]
                for k in range(self.dim):
                    if cij[k] != 0:
                        out[k] += ab * cij[k]
        return out

    def ad_basis(self, i):
        """Matrix of ad(e_i); column j holds [e_i, e_j]."""
        return Matrix(
            [[self.c[i][j][k] for j in range(self.dim)] for k in range(self.dim)],
            cols=self.dim,
        )

    def ad(self, v):
        cols = [self.bracket(v, _e(self.dim, j)) for j in range(self.dim)]
        return Matrix.from_columns(cols, rows=self.dim)

    def structure_equal(self, other):
        return self.dim == other.dim and self.c == other.c

    def rename(self, basis_names):
        return LieAlgebra(self.c, basis_names, certify=False)

    def certify(self):
        for i in range(self.dim):
            for j in range(i, self.dim):
                for k in range(self.dim):
                    if self.c[i][j][k] != -self.c[j][i][k]:
                        raise CertificationError(
                            f"bracket tensor is not antisymmetric at ({i}, {j}, {k})"
                        )
        ok, witness = jacobi_check(self)
        if not ok:
            raise CertificationError(f"Jacobi identity fails on triple {witness[:3]}")
        return self

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, basis={self.basis_names})"


def _e(n, i):
    v = vzero(n)
    v[i] = frac(1)
    return v


def jacobi_check(g):
    """Exhaustive Jacobi test; returns (ok, witness) with the first bad triple."""
    n = g.dim
    for i in range(n):
        for j in range(i + 1, n):
            cij = g.c[i][j]
            for k in range(j + 1, n):
                acc = g.bracket(cij, _e(n, k))
                acc = vadd(acc, g.bracket(g.c[j][k], _e(n, i)))
                acc = vadd(acc, g.bracket(g.c[k][i], _e(n, j)))
                if not vis_zero(acc):
                    return False, (i, j, k, acc)
    return True, None


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

class Subspace:
    """A subspace of K^n given by an independent list of coordinate vectors."""

    __slots__ = ("parent_dim", "basis")

    def __init__(self, parent_dim, vectors):
        self.parent_dim = parent_dim
        vectors = [[frac(x) for x in v] for v in vectors]
        for v in vectors:
            if len(v) != parent_dim:
                raise InputError("subspace vector has wrong length")
        if vectors:
            red, pivots = rref(Matrix(vectors, cols=parent_dim))
            if len(pivots) != len(vectors):
                raise InputError("subspace basis is linearly dependent")
        self.basis = vectors

    @classmethod
    def span(cls, parent_dim, vectors):
        """Span of an arbitrary generating set, reduced to the canonical rref basis."""
        vectors = [v for v in vectors if not vis_zero(v)]
        if not vectors:
            return cls(parent_dim, [])
        red, pivots = rref(Matrix(vectors, cols=parent_dim))
        return cls(parent_dim, [red.row(r) for r in range(len(pivots))])

    @classmethod
    def zero(cls, parent_dim):
        return cls(parent_dim, [])

    @classmethod
    def full(cls, parent_dim):
        return cls(parent_dim, [_e(parent_dim, i) for i in range(parent_dim)])

    @classmethod
    def coordinate(cls, parent_dim, indices):
        return cls(parent_dim, [_e(parent_dim, i) for i in indices])

    @property
    def dim(self):
        return len(self.basis)

    def is_zero(self):
        return not self.basis

    def matrix(self):
        """Basis vectors as columns."""
        return Matrix.from_columns(self.basis, rows=self.parent_dim)

    def row_matrix(self):
        return Matrix(self.basis, cols=self.parent_dim)

    def rref_basis(self):
        if not self.basis:
            return []
        red, pivots = rref(self.row_matrix())
        return [red.row(r) for r in range(len(pivots))]

    def pivot_columns(self):
        if not self.basis:
            return ()
        return rref(self.row_matrix())[1]

    def coordinates_of(self, v):
        """Coordinates of v in this basis, or None when v lies outside."""
        if self.is_zero():
            return None if not vis_zero(v) else []
        res = solve(self.matrix(), v)
        return None if res is None else res[0]

    def contains_vector(self, v):
        if vis_zero(v):
            return True
        return self.coordinates_of(v) is not None

    def contains(self, other):
        return all(self.contains_vector(v) for v in other.basis)

    def equals(self, other):
        return (
            self.parent_dim == other.parent_dim
            and self.dim == other.dim
            and self.rref_basis() == other.rref_basis()
        )

    def plus(self, other):
        return Subspace.span(self.parent_dim, self.basis + other.basis)

    def intersect(self, other):
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.parent_dim)
        a, b = self.matrix(), other.matrix()
        joint = a.hstack(-b)
        out = [a.apply(k[: self.dim]) for k in kernel(joint)]
        return Subspace.span(self.parent_dim, out)

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.parent_dim})"


# ---------------------------------------------------------------------------
# anatomy
# ---------------------------------------------------------------------------

def center(g):
    """Kernel of the stacked adjoint matrices."""
    rows = []
    for j in range(g.dim):
        for k in range(g.dim):
            rows.append([g.c[i][j][k] for i in range(g.dim)])
    if not rows:
        return Subspace.full(g.dim)
    return Subspace.span(g.dim, kernel(Matrix(rows, cols=g.dim)))


def derived_subspace(g):
    gens = [g.c[i][j] for i in range(g.dim) for j in range(i + 1, g.dim)]
    return Subspace.span(g.dim, gens)


@dataclass
class LowerCentralSeries:
    derived: Subspace
    terms: list  # C^1, C^2, ... until stabilisation (last term 0 iff nilpotent)
    nilpotent: bool
    nil_class: object  # int when nilpotent, else None
    profile: tuple  # dims (dim C^0, dim C^1, ...) ending in 0 iff nilpotent


def derived_and_lcs(g):
    derived = derived_subspace(g)
    terms = [derived]
    dims = [g.dim, derived.dim]
    while terms[-1].dim > 0:
        prev = terms[-1]
        gens = []
        for i in range(g.dim):
            for v in prev.basis:
                gens.append(g.bracket(_e(g.dim, i), v))
        nxt = Subspace.span(g.dim, gens)
        if nxt.dim == prev.dim:
            return LowerCentralSeries(derived, terms, False, None, tuple(dims))
        terms.append(nxt)
        dims.append(nxt.dim)
    nil_class = len(dims) - 1 if g.dim else 0
    if g.dim == 0:
        dims = [0]
    return LowerCentralSeries(derived, terms, True, nil_class, tuple(dims))


def is_ideal(g, s):
    for i in range(g.dim):
        for v in s.basis:
            if not s.contains_vector(g.bracket(_e(g.dim, i), v)):
                return False
    return True


def is_subalgebra(g, s):
    for a in range(s.dim):
        for b in range(a + 1, s.dim):
            if not s.contains_vector(g.bracket(s.basis[a], s.basis[b])):
                return False
    return True


def quotient(g, ideal):
    """Quotient by an ideal plus the projection matrix onto the chosen complement.

    The complement is spanned by the lexicographically earliest standard basis
    vectors completing the ideal's rref pivot set, which makes the structure
    constants reproducible.
    """
    if not is_ideal(g, ideal):
        raise InputError("quotient requires an ideal")
    pivots = set(ideal.pivot_columns())
    comp = [j for j in range(g.dim) if j not in pivots]
    cols = ideal.rref_basis() + [_e(g.dim, j) for j in comp]
    m = Matrix.from_columns(cols, rows=g.dim)
    minv = m.inverse()
    r = ideal.dim
    proj = minv.submatrix(range(r, g.dim), range(g.dim))
    qdim = len(comp)
    c = [[vzero(qdim) for _ in range(qdim)] for _ in range(qdim)]
    for a in range(qdim):
        for b in range(a + 1, qdim):
            w = proj.apply(g.bracket(_e(g.dim, comp[a]), _e(g.dim, comp[b])))
            c[a][b] = w
            c[b][a] = vscale(frac(-1), w)
    names = [g.basis_names[j] for j in comp]
    return LieAlgebra(c, names), proj, comp


def direct_sum(g1, g2):
    n1, n2 = g1.dim, g2.dim
    n = n1 + n2
    c = [[vzero(n) for _ in range(n)] for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            for k in range(n1):
                c[i][j][k] = g1.c[i][j][k]
    for i in range(n2):
        for j in range(n2):
            for k in range(n2):
                c[n1 + i][n1 + j][n1 + k] = g2.c[i][j][k]
    names = list(g1.basis_names)
    for name in g2.basis_names:
        names.append(name if name not in names else f"{name}_2")
    return LieAlgebra(c, names)


def change_basis(g, cmat, basis_names=None, certify=True):
    """Structure constants in the basis given by the columns of cmat."""
    if cmat.shape != (g.dim, g.dim):
        raise InputError("change of basis matrix must be square of the algebra dimension")
    cinv = cmat.inverse()
    n = g.dim
    cols = cmat.columns()
    c = [[vzero(n) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w = cinv.apply(g.bracket(cols[i], cols[j]))
            c[i][j] = w
            c[j][i] = vscale(frac(-1), w)
    return LieAlgebra(c, basis_names, certify=certify)


def fingerprint(g):
    """(dim, center dim, derived dim, nilpotency class, lcs dimension profile).

    Isomorphism invariant but explicitly not an isomorphism test; equal
    fingerprints only mean "indistinguishable by fingerprint".
    """
    lcs = derived_and_lcs(g)
    return (g.dim, center(g).dim, lcs.derived.dim, lcs.nil_class, lcs.profile)
