"""Derivation spaces, invertible-derivation search, and the induced side structures.

An invertible derivation D of g induces the left-symmetric product
x.y = D^{-1}[x, Dy], and when D is additionally skew for an invariant scalar
product, R = D^{-1} solves the classical Yang-Baxter equation.  All of those
identities are certified exactly here.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .errors import CertificationError, CheckReport, InputError
from .liecore import _e
from .ratlin import (
    Matrix,
    frac,
    kernel,
    minpoly_squarefree,
    vadd,
    vis_zero,
    vsub,
    vzero,
)


@dataclass
class DerivationMatrix:
    matrix: Matrix
    flags: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.matrix.rows


def leibniz_residual(g, m: Matrix, i, j):
    """M[e_i,e_j] - [Me_i,e_j] - [e_i,Me_j]."""
    lhs = m.apply(g.c[i][j])
    rhs = vadd(g.bracket(m.col(i), _e(g.dim, j)), g.bracket(_e(g.dim, i), m.col(j)))
    return vsub(lhs, rhs)


def is_derivation(g, m: Matrix):
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            res = leibniz_residual(g, m, i, j)
            if not vis_zero(res):
                return False, (i, j, res)
    return True, None


def is_skew_for(b, m: Matrix) -> bool:
    bm = b.matrix
    return (m.transpose() * bm + bm * m).is_zero()


def certify_derivation(g, m, b=None, require_invertible=False, require_skew=False):
    """Re-verifiable flags: derivation, invertible, skew (w.r.t. b), semisimple."""
    m = getattr(m, "matrix", m)
    if m.shape != (g.dim, g.dim):
        raise InputError("derivation matrix shape does not match the algebra")
    ok, witness = is_derivation(g, m)
    if not ok:
        raise CertificationError(
            f"not a derivation: Leibniz identity fails on pair {witness[:2]}"
        )
    flags = {"derivation": True}
    flags["invertible"] = m.det() != 0
    if require_invertible and not flags["invertible"]:
        raise CertificationError("derivation is not invertible")
    if b is not None:
        flags["skew"] = is_skew_for(b, m)
        if require_skew and not flags["skew"]:
            raise CertificationError("derivation is not skew-symmetric for the given form")
    flags["semisimple"] = minpoly_squarefree(m)
    return DerivationMatrix(m, flags)


# ---------------------------------------------------------------------------
# derivation spaces as solution spaces of linear systems
# ---------------------------------------------------------------------------

def _leibniz_rows(g):
    n = g.dim
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                row = vzero(n * n)
                # coefficient of M[k][l] from M([e_i, e_j])
                for l in range(n):
                    row[k * n + l] += g.c[i][j][l]
                # -[Me_i, e_j]: M[l][i] carries c[l][j][k]
                for l in range(n):
                    row[l * n + i] -= g.c[l][j][k]
                # -[e_i, Me_j]: M[l][j] carries c[i][l][k]
                for l in range(n):
                    row[l * n + j] -= g.c[i][l][k]
                rows.append(row)
    return rows


def _skew_rows(g, b):
    n = g.dim
    bm = b.matrix
    rows = []
    for i in range(n):
        for j in range(i, n):
            row = vzero(n * n)
            # (M^T B + B M)[i][j] = sum_l M[l][i] B[l][j] + B[i][l] M[l][j]
            for l in range(n):
                row[l * n + i] += bm.data[l][j]
                row[l * n + j] += bm.data[i][l]
            rows.append(row)
    return rows


def _unflatten(flat, n):
    return Matrix([flat[r * n : (r + 1) * n] for r in range(n)], cols=n)


def derivation_space(g):
    """Basis of the full derivation algebra Der(g)."""
    n = g.dim
    rows = _leibniz_rows(g)
    if not rows:
        return [_unflatten(v, n) for v in (Matrix.identity(n * n).data if n else [])]
    return [_unflatten(v, n) for v in kernel(Matrix(rows, cols=n * n))]


def skew_derivation_space(g, b):
    """Basis of the derivations that are additionally skew for b."""
    n = g.dim
    rows = _leibniz_rows(g) + _skew_rows(g, b)
    if not rows:
        return []
    return [_unflatten(v, n) for v in kernel(Matrix(rows, cols=n * n))]


# ---------------------------------------------------------------------------
# invertible element search inside a space of matrices
# ---------------------------------------------------------------------------

@dataclass
class FindReport:
    element: object  # DerivationMatrix or None
    definitive: bool
    tried: int
    note: str


def _shell_points(k, bound):
    """Integer points ordered by sup-norm shells, lexicographic inside a shell."""
    for r in range(bound + 1):
        for point in itertools.product(range(-r, r + 1), repeat=k):
            if point and max(abs(t) for t in point) == r:
                yield point


def _symbolic_det_is_zero(space):
    import sympy

    k = len(space)
    n = space[0].rows
    ts = sympy.symbols(f"t0:{k}")
    m = sympy.zeros(n, n)
    for t, mat in zip(ts, space):
        m += t * sympy.Matrix(
            [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in mat.data]
        )
    return sympy.expand(m.det()) == 0


def find_invertible(g, space, b=None, seed=0, trials=200, grid_cap=20000):
    """Search a matrix space for an element with nonzero determinant.

    Deterministic sup-norm grid first (bound = dim g, the degree of the
    determinant polynomial), then seeded random samples.  Absence is
    definitive only when the whole grid was exhausted, or for at most four
    generators when the symbolic determinant expands to zero; otherwise it is
    reported as "not a proof".
    """
    if not space:
        return FindReport(None, True, 0, "empty space: no invertible element exists")
    k = len(space)
    n = space[0].rows
    bound = max(n, 1)

    def combine(coeffs):
        acc = Matrix.zeros(n, n)
        for t, mat in zip(coeffs, space):
            if t:
                acc = acc + mat.scale(t)
        return acc

    tried = 0
    grid_size = (2 * bound + 1) ** k
    exhausted = grid_size - 1 <= grid_cap
    for point in itertools.islice(_shell_points(k, bound), grid_cap):
        tried += 1
        m = combine([frac(t) for t in point])
        if m.det() != 0:
            return FindReport(certify_derivation(g, m, b), False, tried, "found on grid")
    rng = random.Random(seed)
    for _ in range(trials):
        tried += 1
        coeffs = [frac(rng.randint(-bound * bound, bound * bound)) for _ in range(k)]
        m = combine(coeffs)
        if m.det() != 0:
            return FindReport(
                certify_derivation(g, m, b), False, tried, "found by random sampling"
            )
    if k <= 4 and n <= 8 and _symbolic_det_is_zero(space):
        return FindReport(None, True, tried, "determinant is identically zero on the space")
    if exhausted:
        # a polynomial of per-variable degree <= bound cannot vanish on the full grid
        return FindReport(None, True, tried, "grid exhausted: determinant vanishes identically")
    return FindReport(None, False, tried, "no invertible element found (not a proof)")


# ---------------------------------------------------------------------------
# left-symmetric product from an invertible derivation
# ---------------------------------------------------------------------------

@dataclass
class LeftSymmetricProduct:
    p: list  # p[i][j] = coordinates of e_i . e_j

    @property
    def dim(self):
        return len(self.p)

    def product(self, u, v):
        n = self.dim
        out = vzero(n)
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in enumerate(v):
                if b == 0:
                    continue
                ab = a * b
                pij = self.p[i][j]
                for k in range(n):
                    if pij[k] != 0:
                        out[k] += ab * pij[k]
        return out


def left_symmetric(g, d):
    """x.y = D^{-1}[x, Dy]; certifies left symmetry, Lie admissibility, and
    that D is a derivation of the product."""
    dm = getattr(d, "matrix", d)
    certify_derivation(g, dm, require_invertible=True)
    dinv = dm.inverse()
    n = g.dim
    p = [
        [dinv.apply(g.bracket(_e(n, i), dm.col(j))) for j in range(n)]
        for i in range(n)
    ]
    prod = LeftSymmetricProduct(p)
    for i in range(n):
        for j in range(n):
            if vsub(p[i][j], p[j][i]) != g.c[i][j]:
                raise CertificationError(
                    f"commutator of the product differs from the bracket at ({i}, {j})"
                )
            lhs = dm.apply(p[i][j])
            rhs = vadd(prod.product(dm.col(i), _e(n, j)), prod.product(_e(n, i), dm.col(j)))
            if lhs != rhs:
                raise CertificationError(
                    f"derivation property of the product fails at ({i}, {j})"
                )
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a1 = vsub(prod.product(p[i][j], _e(n, k)), prod.product(_e(n, i), p[j][k]))
                a2 = vsub(prod.product(p[j][i], _e(n, k)), prod.product(_e(n, j), p[i][k]))
                if a1 != a2:
                    raise CertificationError(
                        f"left-symmetry of the associator fails at ({i}, {j}, {k})"
                    )
    return prod


def metric_connection_check(g, b, d) -> CheckReport:
    """Checks that x.y is torsion free and compatible with <x,y> = B(Dx, Dy)."""
    dm = getattr(d, "matrix", d)
    certify_derivation(g, dm, require_invertible=True)
    prod = None
    report = CheckReport("metric_connection")
    try:
        prod = left_symmetric(g, dm)
    except CertificationError as exc:  # pragma: no cover - theorem guard
        report.fail("left_symmetric", detail=str(exc))
        return report
    n = g.dim
    bm = b.matrix

    def inner(u, v):
        return sum(
            (a * x for a, x in zip(dm.apply(u), bm.apply(dm.apply(v)))), frac(0)
        )

    for i in range(n):
        for j in range(n):
            torsion = vsub(vsub(prod.p[i][j], prod.p[j][i]), g.c[i][j])
            if not vis_zero(torsion):
                report.fail("torsion_free", where=(i, j), detail=str(torsion))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = inner(prod.p[i][j], _e(n, k)) + inner(_e(n, j), prod.p[i][k])
                if s != 0:
                    report.fail("metric_compatibility", where=(i, j, k), detail=str(s))
                    return report
    return report


# ---------------------------------------------------------------------------
# Yang-Baxter checks
# ---------------------------------------------------------------------------

def _ybe_residual(g, r: Matrix, i, j, modified):
    n = g.dim
    rei, rej = r.col(i), r.col(j)
    res = g.bracket(rei, rej)
    res = vsub(res, r.apply(g.bracket(rei, _e(n, j))))
    res = vsub(res, r.apply(g.bracket(_e(n, i), rej)))
    if modified:
        res = vadd(res, g.c[i][j])
    return res


def cybe_check(g, r):
    """[Rx,Ry] - R[Rx,y] - R[x,Ry] = 0 on all basis pairs."""
    rm = getattr(r, "matrix", r)
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            res = _ybe_residual(g, rm, i, j, modified=False)
            if not vis_zero(res):
                return False, (i, j, res)
    return True, None


def mcybe_check(g, r):
    """[Rx,Ry] - R[Rx,y] - R[x,Ry] + [x,y] = 0 on all basis pairs."""
    rm = getattr(r, "matrix", r)
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            res = _ybe_residual(g, rm, i, j, modified=True)
            if not vis_zero(res):
                return False, (i, j, res)
    return True, None
