"""Invariant scalar products, symplectic forms, and the derivation correspondence.

A quadratic structure B and a symplectic structure w on the same algebra are
linked by w(x, y) = B(Dx, y) for a unique invertible derivation D that is
skew with respect to B; both directions of that correspondence live here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CheckReport, InputError
from .liecore import Subspace, center, derived_and_lcs, derived_subspace, is_ideal
from .ratlin import Matrix, frac, kernel

SYMMETRIC = "symmetric"
SKEW = "skew"


@dataclass(frozen=True)
class BilinearForm:
    matrix: Matrix
    kind: str

    def __post_init__(self):
        if self.kind not in (SYMMETRIC, SKEW):
            raise InputError(f"unknown form kind {self.kind!r}")
        if not self.matrix.is_square():
            raise InputError("bilinear form matrix must be square")
        t = self.matrix.transpose()
        if self.kind == SYMMETRIC and t != self.matrix:
            raise InputError("matrix is not symmetric")
        if self.kind == SKEW and t != -self.matrix:
            raise InputError("matrix is not skew")

    @property
    def dim(self):
        return self.matrix.rows

    def value(self, u, v):
        mv = self.matrix.apply(v)
        return sum((a * b for a, b in zip(u, mv)), frac(0))

    def is_nondegenerate(self):
        return self.matrix.det() != 0

    def gram(self, subspace: Subspace):
        vecs = subspace.basis
        return Matrix(
            [[self.value(u, v) for v in vecs] for u in vecs],
            cols=len(vecs),
        )

    @classmethod
    def hyperbolic(cls, n):
        """Pairing of a space with its dual on coordinates (x_1..x_n, x_1*..x_n*)."""
        m = Matrix.zeros(2 * n, 2 * n).to_lists()
        for i in range(n):
            m[i][n + i] = frac(1)
            m[n + i][i] = frac(1)
        return cls(Matrix(m), SYMMETRIC)

    @classmethod
    def standard_skew(cls, n):
        m = Matrix.zeros(2 * n, 2 * n).to_lists()
        for i in range(n):
            m[i][n + i] = frac(1)
            m[n + i][i] = frac(-1)
        return cls(Matrix(m), SKEW)


def is_invariant_scalar_product(g, b: BilinearForm) -> CheckReport:
    """Nondegenerate + B([x,y],z) = B(x,[y,z]) on all basis triples."""
    if b.kind != SYMMETRIC:
        raise InputError("invariant scalar products must be symmetric")
    if b.dim != g.dim:
        raise InputError("form dimension does not match the algebra")
    report = CheckReport("invariant_scalar_product")
    if not b.is_nondegenerate():
        report.fail("nondegenerate", detail="det = 0")
    bm = b.matrix
    n = g.dim
    for i in range(n):
        for j in range(n):
            cij = g.c[i][j]
            for k in range(n):
                lhs = sum((cij[l] * bm.data[l][k] for l in range(n) if cij[l] != 0), frac(0))
                cjk = g.c[j][k]
                rhs = sum((bm.data[i][l] * cjk[l] for l in range(n) if cjk[l] != 0), frac(0))
                if lhs != rhs:
                    report.fail("invariance", where=(i, j, k), detail=f"{lhs} != {rhs}")
                    return report
    return report


def is_symplectic(g, w: BilinearForm) -> CheckReport:
    """Nondegenerate skew 2-cocycle: cyclic sum of w over brackets vanishes."""
    if w.kind != SKEW:
        raise InputError("symplectic candidates must be skew")
    if w.dim != g.dim:
        raise InputError("form dimension does not match the algebra")
    report = CheckReport("symplectic")
    if g.dim % 2 == 1:
        report.fail("even_dimension", detail=f"dimension {g.dim} is odd")
        return report
    if not w.is_nondegenerate():
        report.fail("nondegenerate", detail="det = 0")
    wm = w.matrix
    n = g.dim

    def w_bracket(i, j, k):
        cij = g.c[i][j]
        return sum((cij[l] * wm.data[l][k] for l in range(n) if cij[l] != 0), frac(0))

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                total = w_bracket(i, j, k) + w_bracket(j, k, i) + w_bracket(k, i, j)
                if total != 0:
                    report.fail("cocycle", where=(i, j, k), detail=f"cyclic sum {total}")
                    return report
    return report


def derivation_from_pair(g, b: BilinearForm, w: BilinearForm):
    """The unique D with B(Dx, y) = w(x, y), certified invertible skew derivation."""
    if b.kind != SYMMETRIC or w.kind != SKEW:
        raise InputError("need a symmetric B and a skew w")
    if not b.is_nondegenerate():
        raise InputError("B must be nondegenerate")
    # B(De_i, e_j) = (D^T B)[i][j], so D = (w B^{-1})^T.
    d = (w.matrix * b.matrix.inverse()).transpose()
    from .deriv import certify_derivation

    return certify_derivation(g, d, b, require_invertible=True, require_skew=True)


def symplectic_from_derivation(g, b: BilinearForm, d):
    """w(x, y) = B(Dx, y) for an invertible B-skew derivation D; certified symplectic."""
    dm = getattr(d, "matrix", d)
    from .deriv import certify_derivation

    certify_derivation(g, dm, b, require_invertible=True, require_skew=True)
    w = BilinearForm(dm.transpose() * b.matrix, SKEW)
    is_symplectic(g, w).raise_if_failed()
    return w


def orthogonal(g, b: BilinearForm, s: Subspace) -> Subspace:
    if s.is_zero():
        return Subspace.full(g.dim)
    rows = [b.matrix.apply(u) for u in s.basis]
    return Subspace.span(g.dim, kernel(Matrix(rows, cols=g.dim)))


NONDEGENERATE = "nondegenerate"
COMPLETELY_ISOTROPIC = "completely-isotropic"
LAGRANGIAN = "lagrangian"
MIXED = "mixed"


def isotropy_class(g, b: BilinearForm, s: Subspace) -> str:
    gram = b.gram(s)
    if gram.is_zero():
        if orthogonal(g, b, s).equals(s):
            return LAGRANGIAN
        return COMPLETELY_ISOTROPIC
    if gram.det() != 0:
        return NONDEGENERATE
    return MIXED


def find_nondegenerate_ideal(g, b: BilinearForm):
    """Heuristic reducibility probe over characteristic ideals.

    Only inspects the center, the lower central series, their orthogonals, and
    the nondegenerate part of the center.  Returning None is not a proof of
    irreducibility.
    """
    z = center(g)
    lcs = derived_and_lcs(g)
    candidates = [z, lcs.derived] + list(lcs.terms)
    candidates += [orthogonal(g, b, s) for s in list(candidates)]
    # the B-nondegenerate part of the center is always an ideal
    rad_rows = [b.matrix.apply(u) for u in z.basis]
    if z.dim:
        rad = z.intersect(Subspace.span(g.dim, kernel(Matrix(rad_rows, cols=g.dim))))
        comp = []
        cur = rad
        for v in z.basis:
            if not cur.contains_vector(v):
                comp.append(v)
                cur = cur.plus(Subspace(g.dim, [v]))
        if comp:
            candidates.append(Subspace(g.dim, comp))
    for s in candidates:
        if 0 < s.dim < g.dim and is_ideal(g, s) and b.gram(s).det() != 0:
            return s
    return None


def certify_quadratic(g, b: BilinearForm):
    report = is_invariant_scalar_product(g, b)
    report.raise_if_failed()
    return report


def center_orthogonal_is_derived(g, b: BilinearForm) -> bool:
    """For quadratic algebras the orthogonal of the center is the derived ideal."""
    return orthogonal(g, b, center(g)).equals(derived_subspace(g))
