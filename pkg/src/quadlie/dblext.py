"""Quadratic double extensions and their symplectic refinement.

A double extension glues b + g + b* with a central extension by b* and a
semidirect action of b through skew derivations.  The one-dimensional case,
equipped with data (delta, lambda, c) satisfying [delta, D] - lambda delta =
ad(c), lifts an invertible skew derivation D of the core to the extension and
therefore transports symplectic structures; descent reverses the step along a
central eigenvector of the lifted derivation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .deriv import DerivationMatrix, certify_derivation
from .errors import AbsenceError, CertificationError, InputError
from .forms import BilinearForm, SYMMETRIC, is_invariant_scalar_product, symplectic_from_derivation
from .liecore import (
    LieAlgebra,
    Subspace,
    _e,
    center,
    change_basis,
    derived_and_lcs,
)
from .ratlin import (
    Matrix,
    ONE,
    ZERO,
    char_poly,
    frac,
    kernel,
    rational_roots,
    solve,
    vscale,
    vzero,
)
from .tstar import build_tstar, lift_derivation


@dataclass
class DoubleExtensionSpec:
    core: LieAlgebra
    core_form: BilinearForm
    extender: LieAlgebra
    psi: list  # matrices psi(b_i) acting on the core

    def certify(self):
        g, b = self.core, self.core_form
        if b.kind != SYMMETRIC:
            raise InputError("core form must be a symmetric invariant scalar product")
        is_invariant_scalar_product(g, b).raise_if_failed()
        if len(self.psi) != self.extender.dim:
            raise InputError("need one representing matrix per extender basis vector")
        for m in self.psi:
            certify_derivation(g, m, b, require_skew=True)
        for i in range(self.extender.dim):
            for j in range(i + 1, self.extender.dim):
                lhs = Matrix.zeros(g.dim, g.dim)
                for k, coeff in enumerate(self.extender.c[i][j]):
                    if coeff != 0:
                        lhs = lhs + self.psi[k].scale(coeff)
                rhs = self.psi[i] * self.psi[j] - self.psi[j] * self.psi[i]
                if lhs != rhs:
                    raise CertificationError(
                        f"psi is not a homomorphism on extender pair ({i}, {j})"
                    )
        for z in range(self.extender.dim):
            paired = self.psi[z].transpose() * b.matrix
            if not (paired + paired.transpose()).is_zero():
                raise CertificationError("pairing phi is not antisymmetric")
        return self


def double_extend(spec: DoubleExtensionSpec):
    """The extension on extender + core + extender* with its scalar product."""
    spec.certify()
    g, bform, b = spec.core, spec.core_form, spec.extender
    m, n = b.dim, g.dim
    N = m + n + m
    c = [[vzero(N) for _ in range(N)] for _ in range(N)]

    def put(i, j, vec):
        c[i][j] = vec
        c[j][i] = vscale(-ONE, vec)

    for i in range(m):
        for j in range(i + 1, m):
            vec = vzero(N)
            for k in range(m):
                vec[k] = b.c[i][j][k]
            put(i, j, vec)
    for i in range(m):
        for j in range(m):
            # coadjoint twist: [y_i, y_j*] = -y_j* o ad(y_i) = -sum_d c_b[i][d][j] y_d*
            vec = vzero(N)
            for d in range(m):
                vec[m + n + d] = -b.c[i][d][j]
            c[i][m + n + j] = vec
            c[m + n + j][i] = vscale(-ONE, vec)
    for i in range(m):
        for x in range(n):
            vec = vzero(N)
            col = spec.psi[i].col(x)
            for k in range(n):
                vec[m + k] = col[k]
            c[i][m + x] = vec
            c[m + x][i] = vscale(-ONE, vec)
    for x in range(n):
        for y in range(x + 1, n):
            vec = vzero(N)
            for k in range(n):
                vec[m + k] = g.c[x][y][k]
            for z in range(m):
                vec[m + n + z] = bform.value(spec.psi[z].col(x), _e(n, y))
            put(m + x, m + y, vec)
    names = (
        list(b.basis_names)
        + [f"{nm}^" if nm in b.basis_names else nm for nm in g.basis_names]
        + [f"{nm}*" for nm in b.basis_names]
    )
    ext = LieAlgebra(c, names)
    t = Matrix.zeros(N, N).to_lists()
    for x in range(n):
        for y in range(n):
            t[m + x][m + y] = bform.matrix.data[x][y]
    for i in range(m):
        t[i][m + n + i] = ONE
        t[m + n + i][i] = ONE
    tform = BilinearForm(Matrix(t), SYMMETRIC)
    is_invariant_scalar_product(ext, tform).raise_if_failed()
    return ext, tform


def double_extend_line(g: LieAlgebra, bform: BilinearForm, delta):
    """One-dimensional double extension on coordinates (e, core, e*)."""
    dm = getattr(delta, "matrix", delta)
    certify_derivation(g, dm, bform, require_skew=True)
    line = LieAlgebra.abelian(1, ["e"])
    ext, tform = double_extend(DoubleExtensionSpec(g, bform, line, [dm]))
    return ext, tform


@dataclass
class SymplecticDextData:
    core: LieAlgebra
    core_form: BilinearForm
    d: DerivationMatrix
    delta: Matrix
    lam: object
    c: list

    def certify(self):
        g, b = self.core, self.core_form
        self.lam = frac(self.lam)
        if self.lam == 0:
            raise InputError("extension parameter lambda must be nonzero")
        if len(self.c) != g.dim:
            raise InputError("vector c has the wrong length")
        dm = self.d.matrix
        certify_derivation(g, dm, b, require_invertible=True, require_skew=True)
        certify_derivation(g, self.delta, b, require_skew=True)
        residual = (self.delta * dm - dm * self.delta) - self.delta.scale(self.lam) - g.ad(self.c)
        if not residual.is_zero():
            raise CertificationError(
                "compatibility [delta, D] - lambda delta = ad(c) fails",
                failures=[{"check": "compatibility", "where": None, "detail": residual.to_lists()}],
            )
        return self


@dataclass
class SdextBundle:
    algebra: LieAlgebra
    form: BilinearForm
    dtilde: DerivationMatrix
    omega: BilinearForm
    data: SymplecticDextData


def lifted_derivation_matrix(data: SymplecticDextData) -> Matrix:
    """D~ on (e, core, e*): D~|g = D + B(c, .) e*, D~ e* = lam e*, D~ e = -lam e - c."""
    g, b = data.core, data.core_form
    n = g.dim
    N = n + 2
    dm = data.d.matrix
    out = [[ZERO] * N for _ in range(N)]
    out[0][0] = -data.lam
    for i in range(n):
        out[1 + i][0] = -data.c[i]
    for j in range(n):
        for i in range(n):
            out[1 + i][1 + j] = dm.data[i][j]
        out[N - 1][1 + j] = b.value(data.c, _e(n, j))
    out[N - 1][N - 1] = data.lam
    return Matrix(out)


def symplectic_double_extend(data: SymplecticDextData) -> SdextBundle:
    data.certify()
    ext, tform = double_extend_line(data.core, data.core_form, data.delta)
    dt = certify_derivation(
        ext, lifted_derivation_matrix(data), tform, require_invertible=True, require_skew=True
    )
    omega = symplectic_from_derivation(ext, tform, dt)
    return SdextBundle(algebra=ext, form=tform, dtilde=dt, omega=omega, data=data)


@dataclass
class DescentCertificate:
    adapted_basis: Matrix  # columns (e, core basis, e*) inside the input algebra
    eigenvalue: object
    rebuilt: SdextBundle
    adapted: LieAlgebra


def _restriction_matrix(m: Matrix, basis):
    lift = Matrix.from_columns(basis, rows=m.rows)
    cols = []
    for v in basis:
        res = solve(lift, m.apply(v))
        if res is None:
            raise InputError("subspace is not stable under the operator")
        cols.append(res[0])
    return Matrix.from_columns(cols, rows=len(basis))


def _central_line_candidates(g, dt: Matrix):
    """Rational eigenlines of the derivation inside the center, eigenvalues ascending."""
    z = center(g)
    if z.is_zero():
        return []
    zbasis = z.rref_basis()
    restricted = _restriction_matrix(dt, zbasis)
    roots = rational_roots(char_poly(restricted))
    out = []
    for lam, _mult in roots.roots:
        for vec in kernel(restricted - Matrix.identity(len(zbasis)).scale(lam)):
            lifted = vzero(g.dim)
            for s, coeff in enumerate(vec):
                if coeff != 0:
                    for t in range(g.dim):
                        lifted[t] += coeff * zbasis[s][t]
            out.append((lam, lifted))
    return out


def symplectic_descend(gt: LieAlgebra, tform: BilinearForm, dtilde):
    """Undo a one-dimensional symplectic double extension along a central eigenline.

    Chooses the smallest rational eigenvalue and the lexicographically earliest
    eigenvector; raises AbsenceError when the center carries no rational
    eigenline (the spectrum may simply not be rational).
    """
    dt = getattr(dtilde, "matrix", dtilde)
    certify_derivation(gt, dt, tform, require_invertible=True, require_skew=True)
    candidates = _central_line_candidates(gt, dt)
    if any(lam == 0 for lam, _ in candidates):
        raise CertificationError("invertible derivation acquired a zero eigenvalue")
    if not candidates:
        raise AbsenceError(
            "no rational central eigenline: descent unavailable over the rationals"
        )
    lam, estar = candidates[0]
    if tform.value(estar, estar) != 0:
        raise CertificationError("central eigenvector for nonzero eigenvalue is not isotropic")
    n2 = gt.dim
    res = solve(Matrix([[tform.value(estar, _e(n2, j)) for j in range(n2)]]), [ONE])
    if res is None:
        raise CertificationError("pairing against the eigenvector is degenerate")
    e = res[0]
    ee = tform.value(e, e)
    if ee != 0:
        e = [x - ee / 2 * y for x, y in zip(e, estar)]
    plane = Subspace(n2, [estar, e])
    rows = [[tform.value(u, _e(n2, j)) for j in range(n2)] for u in plane.basis]
    gvecs = Subspace.span(n2, kernel(Matrix(rows, cols=n2))).rref_basis()
    if len(gvecs) != n2 - 2:
        raise CertificationError("orthogonal of the hyperbolic plane has wrong dimension")
    cols = [e] + gvecs + [estar]
    cmat = Matrix.from_columns(cols, rows=n2)
    names = ["e"] + [f"g{i + 1}" for i in range(n2 - 2)] + ["e*"]
    adapted = change_basis(gt, cmat, basis_names=names)
    tprime = BilinearForm(cmat.transpose() * tform.matrix * cmat, SYMMETRIC)
    dprime = cmat.inverse() * dt * cmat

    n = n2 - 2
    core_c = [[[adapted.c[1 + i][1 + j][1 + k] for k in range(n)] for j in range(n)] for i in range(n)]
    core = LieAlgebra(core_c, [f"g{i + 1}" for i in range(n)])
    bcore = BilinearForm(tprime.matrix.submatrix(range(1, 1 + n), range(1, 1 + n)), SYMMETRIC)
    dcore = Matrix([[dprime.data[1 + i][1 + j] for j in range(n)] for i in range(n)], cols=n)
    delta = Matrix([[adapted.c[0][1 + j][1 + i] for j in range(n)] for i in range(n)], cols=n)
    cvec = [-dprime.data[1 + i][0] for i in range(n)]
    if dprime.data[0][0] != -lam or dprime.data[n2 - 1][n2 - 1] != lam:
        raise CertificationError("adapted derivation lost its eigenvalue structure")
    data = SymplecticDextData(
        core=core,
        core_form=bcore,
        d=certify_derivation(core, dcore, bcore, require_invertible=True, require_skew=True),
        delta=delta,
        lam=lam,
        c=cvec,
    )
    rebuilt = symplectic_double_extend(data)
    if not rebuilt.algebra.structure_equal(adapted):
        raise CertificationError("rebuilt extension does not match the adapted algebra")
    if rebuilt.form.matrix != tprime.matrix:
        raise CertificationError("rebuilt scalar product does not match the adapted one")
    if rebuilt.dtilde.matrix != dprime:
        raise CertificationError("rebuilt derivation does not match the adapted one")
    return data, DescentCertificate(
        adapted_basis=cmat, eigenvalue=lam, rebuilt=rebuilt, adapted=adapted
    )


@dataclass
class SymplecticTower:
    steps: list  # (data, certificate) pairs from the top down
    base: LieAlgebra
    base_form: BilinearForm
    base_derivation: DerivationMatrix
    complete: bool
    failure_reason: str = ""


def symplectic_tower(gt, tform, dtilde) -> SymplecticTower:
    """Iterate descents down to the two-dimensional abelian algebra."""
    steps = []
    cur_g, cur_t, cur_d = gt, tform, dtilde
    while cur_g.dim > 2:
        try:
            data, cert = symplectic_descend(cur_g, cur_t, cur_d)
        except AbsenceError as exc:
            return SymplecticTower(steps, cur_g, cur_t, cur_d, False, str(exc))
        steps.append((data, cert))
        cur_g, cur_t, cur_d = data.core, data.core_form, data.d
    if cur_g.dim == 2 and derived_and_lcs(cur_g).derived.dim != 0:
        raise CertificationError("two-dimensional base is not abelian")
    return SymplecticTower(steps, cur_g, cur_t, cur_d, True)


# ---------------------------------------------------------------------------
# nilpotent towers from a tensor-truncation construction
# ---------------------------------------------------------------------------

@dataclass
class TowerBundle:
    algebra: LieAlgebra  # the nilpotent tower g (x) t K[t] / t^n
    derivation: DerivationMatrix  # grading derivation, x (x) t^p -> p x (x) t^p
    extension: object  # TStarData of the trivial extension
    dbar: DerivationMatrix
    omega: BilinearForm


def tower_example1(g: LieAlgebra, n: int) -> TowerBundle:
    """Tensor a Lie algebra with the truncated polynomial algebra t K[t]/t^n.

    The result is nilpotent and carries the invertible grading derivation, so
    its trivial extension is quadratic symplectic.
    """
    if n <= 1:
        raise InputError("truncation order must be at least 2")
    m = g.dim
    dim = m * (n - 1)

    def idx(i, p):
        return (p - 1) * m + i

    c = [[vzero(dim) for _ in range(dim)] for _ in range(dim)]
    for p in range(1, n):
        for q in range(1, n):
            if p + q >= n:
                continue
            for i in range(m):
                for j in range(m):
                    for k in range(m):
                        if g.c[i][j][k] != 0:
                            c[idx(i, p)][idx(j, q)][idx(k, p + q)] = g.c[i][j][k]
    names = [f"{g.basis_names[i]}.t{p}" for p in range(1, n) for i in range(m)]
    ln = LieAlgebra(c, names)
    lcs = derived_and_lcs(ln)
    if not lcs.nilpotent:
        raise CertificationError("tensor truncation failed to be nilpotent")
    d = Matrix.diagonal([frac(p) for p in range(1, n) for _ in range(m)])
    dmat = certify_derivation(ln, d, require_invertible=True)
    data = build_tstar(ln)
    dbar = lift_derivation(data, dmat)
    omega = symplectic_from_derivation(data.algebra, data.form, dbar)
    return TowerBundle(algebra=ln, derivation=dmat, extension=data, dbar=dbar, omega=omega)
