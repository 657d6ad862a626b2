"""T*-extensions: construction, derivation lifts, descent, and base reduction.

The extension of a base algebra `a` by a cyclic 2-cocycle theta lives on
a + a* with bracket

    [x + f, y + g] = [x, y] + theta(x, y) + f o ad(y) - g o ad(x)

and the hyperbolic pairing B(x + f, y + g) = f(y) + g(x).  The scalar
Chevalley-Eilenberg differential on 2-forms is fixed as

    dF(x, y, z) = -F([x,y], z) + F([x,z], y) - F([y,z], x)

which is the convention under which a derivation lift exists exactly when the
twisted 3-form built from (D, theta) equals dF.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CertificationError, CheckReport, InputError
from .forms import (
    BilinearForm,
    LAGRANGIAN,
    is_invariant_scalar_product,
    isotropy_class,
    orthogonal,
)
from .liecore import (
    LieAlgebra,
    Subspace,
    _e,
    center,
    change_basis,
    derived_subspace,
    is_ideal,
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
    vadd,
    vis_zero,
    vscale,
    vsub,
    vzero,
)


# ---------------------------------------------------------------------------
# cyclic cocycles
# ---------------------------------------------------------------------------

class CyclicCocycle:
    """3-index tensor t[i][j][k] = theta(e_i, e_j)(e_k), alternating overall."""

    __slots__ = ("dim", "t")

    def __init__(self, t):
        self.dim = len(t)
        self.t = [[[frac(x) for x in cell] for cell in row] for row in t]
        for row in self.t:
            if len(row) != self.dim or any(len(cell) != self.dim for cell in row):
                raise InputError("cocycle tensor must be dim x dim x dim")

    @classmethod
    def zero(cls, dim):
        return cls([[vzero(dim) for _ in range(dim)] for _ in range(dim)])

    @classmethod
    def from_three_form(cls, dim, entries):
        """Build the alternating tensor from values on strictly increasing triples."""
        t = [[vzero(dim) for _ in range(dim)] for _ in range(dim)]
        for (i, j, k), v in entries.items():
            if not (0 <= i < j < k < dim):
                raise InputError(f"three-form entries need i < j < k, got {(i, j, k)}")
            v = frac(v)
            for (a, b, c), sign in _permutations_with_sign(i, j, k):
                t[a][b][c] = sign * v
        return cls(t)

    def value(self, i, j, k):
        return self.t[i][j][k]

    def is_zero(self):
        return all(x == 0 for row in self.t for cell in row for x in cell)

    def three_form_entries(self):
        out = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    if self.t[i][j][k] != 0:
                        out[(i, j, k)] = self.t[i][j][k]
        return out

    def transform(self, cmat: Matrix):
        """Tensor in the basis given by the columns of cmat."""
        n = self.dim
        cols = cmat.columns()
        entries = {}
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    acc = ZERO
                    for p in range(n):
                        cpi = cols[i][p]
                        if cpi == 0:
                            continue
                        for q in range(n):
                            cqj = cols[j][q]
                            if cqj == 0:
                                continue
                            tpq = self.t[p][q]
                            f = cpi * cqj
                            for r in range(n):
                                if tpq[r] != 0 and cols[k][r] != 0:
                                    acc += f * tpq[r] * cols[k][r]
                    if acc != 0:
                        entries[(i, j, k)] = acc
        return CyclicCocycle.from_three_form(n, entries)

    def __eq__(self, other):
        return isinstance(other, CyclicCocycle) and self.t == other.t


def _permutations_with_sign(i, j, k):
    return [
        ((i, j, k), ONE),
        ((j, k, i), ONE),
        ((k, i, j), ONE),
        ((j, i, k), -ONE),
        ((i, k, j), -ONE),
        ((k, j, i), -ONE),
    ]


def two_form_value(f: Matrix, u, v):
    return sum((a * x for a, x in zip(u, f.apply(v))), ZERO)


def two_form_differential(a: LieAlgebra, f: Matrix) -> CyclicCocycle:
    """dF as an alternating 3-tensor under the pinned sign convention."""
    n = a.dim
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                v = (
                    -two_form_value(f, a.c[i][j], _e(n, k))
                    + two_form_value(f, a.c[i][k], _e(n, j))
                    - two_form_value(f, a.c[j][k], _e(n, i))
                )
                if v != 0:
                    entries[(i, j, k)] = v
    return CyclicCocycle.from_three_form(n, entries)


def cocycle_from_two_form(a: LieAlgebra, phi: Matrix) -> CyclicCocycle:
    """The coboundary theta with theta(x, y)(z) = d(phi)(x, y, z)."""
    if not (phi.transpose() + phi).is_zero():
        raise InputError("two-form must be skew")
    return two_form_differential(a, phi)


def three_form_differential_residuals(a: LieAlgebra, theta: CyclicCocycle):
    """Values of d(theta~) on strictly increasing quadruples; all zero iff closed."""
    n = a.dim

    def t_on(u, k, l):
        return sum((u[p] * theta.t[p][k][l] for p in range(n) if u[p] != 0), ZERO)

    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(k + 1, n):
                    v = (
                        -t_on(a.c[i][j], k, l)
                        + t_on(a.c[i][k], j, l)
                        - t_on(a.c[i][l], j, k)
                        - t_on(a.c[j][k], i, l)
                        + t_on(a.c[j][l], i, k)
                        - t_on(a.c[k][l], i, j)
                    )
                    if v != 0:
                        out[(i, j, k, l)] = v
    return out


def check_cocycle(a: LieAlgebra, theta: CyclicCocycle) -> CheckReport:
    """Antisymmetry, cyclicity, the coadjoint 2-cocycle identity, and closedness
    of the associated scalar 3-form."""
    if theta.dim != a.dim:
        raise InputError("cocycle dimension does not match the algebra")
    report = CheckReport("cyclic_cocycle")
    n = a.dim
    t = theta.t
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if t[i][j][k] != -t[j][i][k]:
                    report.fail("antisymmetry", where=(i, j, k))
                    return report
                if t[i][j][k] != t[j][k][i]:
                    report.fail("cyclicity", where=(i, j, k))
                    return report
    # coadjoint 2-cocycle identity, evaluated against every basis vector
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(n):
                    acc = ZERO
                    for m in range(n):
                        acc -= a.c[i][l][m] * t[j][k][m]
                        acc += a.c[j][l][m] * t[i][k][m]
                        acc -= a.c[k][l][m] * t[i][j][m]
                        acc -= a.c[i][j][m] * t[m][k][l]
                        acc += a.c[i][k][m] * t[m][j][l]
                        acc -= a.c[j][k][m] * t[m][i][l]
                    if acc != 0:
                        report.fail("module_cocycle", where=(i, j, k, l), detail=str(acc))
                        return report
    residuals = three_form_differential_residuals(a, theta)
    if residuals:
        where = next(iter(residuals))
        report.fail("scalar_three_cocycle", where=where, detail=str(residuals[where]))
    return report


def cyclic_cocycle_space(a: LieAlgebra):
    """Basis of the space of cyclic cocycles, i.e. of closed scalar 3-forms."""
    n = a.dim
    triples = [(i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)]
    index = {t: s for s, t in enumerate(triples)}

    def coeff_row(row, u, k, l, sign):
        for p in range(n):
            if u[p] == 0:
                continue
            key = tuple(sorted((p, k, l)))
            if len(set(key)) < 3:
                continue
            s = _triple_sign((p, k, l))
            row[index[key]] += sign * s * u[p]

    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(k + 1, n):
                    row = vzero(len(triples))
                    coeff_row(row, a.c[i][j], k, l, -ONE)
                    coeff_row(row, a.c[i][k], j, l, ONE)
                    coeff_row(row, a.c[i][l], j, k, -ONE)
                    coeff_row(row, a.c[j][k], i, l, -ONE)
                    coeff_row(row, a.c[j][l], i, k, ONE)
                    coeff_row(row, a.c[k][l], i, j, -ONE)
                    rows.append(row)
    if not triples:
        return []
    if rows:
        vectors = kernel(Matrix(rows, cols=len(triples)))
    else:
        vectors = [_e(len(triples), s) for s in range(len(triples))]
    out = []
    for v in vectors:
        entries = {triples[s]: v[s] for s in range(len(triples)) if v[s] != 0}
        out.append(CyclicCocycle.from_three_form(n, entries))
    return out


def _triple_sign(triple):
    i, j, k = triple
    sign = ONE
    seq = [i, j, k]
    for (a, b) in ((0, 1), (1, 2), (0, 1)):
        if seq[a] > seq[b]:
            seq[a], seq[b] = seq[b], seq[a]
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# the extension itself
# ---------------------------------------------------------------------------

@dataclass
class TStarData:
    base: LieAlgebra
    theta: CyclicCocycle
    algebra: LieAlgebra
    form: BilinearForm
    base_indices: tuple
    dual_indices: tuple
    certificate: dict = field(default_factory=dict)

    @property
    def dual_block(self):
        return Subspace.coordinate(self.algebra.dim, self.dual_indices)

    @property
    def base_block(self):
        return Subspace.coordinate(self.algebra.dim, self.base_indices)


def _expected_center(a: LieAlgebra, theta: CyclicCocycle) -> Subspace:
    """Central elements visible from the base data: x in z(a) annihilating theta,
    plus functionals vanishing on [a, a].  Always contained in the true center,
    and equal to it for the trivial cocycle."""
    n = a.dim
    rows = []
    for j in range(n):
        for k in range(n):
            rows.append([a.c[i][j][k] for i in range(n)])
            rows.append([theta.t[i][j][k] for i in range(n)])
    x_part = kernel(Matrix(rows, cols=n)) if rows else [_e(n, i) for i in range(n)]
    der = derived_subspace(a)
    if der.dim:
        f_part = kernel(Matrix(der.basis, cols=n))
    else:
        f_part = [_e(n, i) for i in range(n)]
    vectors = [v + vzero(n) for v in x_part] + [vzero(n) + f for f in f_part]
    return Subspace.span(2 * n, vectors)


def build_tstar(a: LieAlgebra, theta: CyclicCocycle | None = None) -> TStarData:
    """The extension of `a` by `theta` with its canonical hyperbolic pairing."""
    n = a.dim
    if theta is None:
        theta = CyclicCocycle.zero(n)
    check_cocycle(a, theta).raise_if_failed()
    N = 2 * n
    c = [[vzero(N) for _ in range(N)] for _ in range(N)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                c[i][j][k] = a.c[i][j][k]
                c[i][j][n + k] = theta.t[i][j][k]
                # [e_i, f_j] = -f_j o ad(e_i)
                c[i][n + j][n + k] = -a.c[i][k][j]
                c[n + j][i][n + k] = a.c[i][k][j]
    names = list(a.basis_names) + [f"{name}*" for name in a.basis_names]
    ext = LieAlgebra(c, names)
    form = BilinearForm.hyperbolic(n)
    cert = {}
    cert["invariant"] = is_invariant_scalar_product(ext, form).raise_if_failed().ok
    dual = Subspace.coordinate(N, range(n, N))
    if not is_ideal(ext, dual):
        raise CertificationError("dual block is not an ideal of the extension")
    if isotropy_class(ext, form, dual) != LAGRANGIAN:
        raise CertificationError("dual block is not a lagrangian ideal")
    expected = _expected_center(a, theta)
    true_center = center(ext)
    if not true_center.contains(expected):
        raise CertificationError("computed center misses base-visible central elements")
    if theta.is_zero() and not true_center.equals(expected):
        raise CertificationError("center of a trivial extension differs from the base formula")
    cert["center_dim"] = true_center.dim
    cert["center_formula_dim"] = expected.dim
    return TStarData(
        base=a,
        theta=theta,
        algebra=ext,
        form=form,
        base_indices=tuple(range(n)),
        dual_indices=tuple(range(n, N)),
        certificate=cert,
    )


# ---------------------------------------------------------------------------
# derivation lift through a compatible cocycle
# ---------------------------------------------------------------------------

@dataclass
class ThetaCompatibility:
    d: Matrix
    theta_twist: CyclicCocycle  # Theta(x,y,z) = theta(Dx,y)z + theta(Dy,z)x + theta(Dz,x)y
    f: Matrix  # skew two-form with dF = Theta, minimal in the rref parametrisation
    h: Matrix  # H x = F(x, .) as a map into dual coordinates


def theta_twist(a: LieAlgebra, theta: CyclicCocycle, d: Matrix) -> CyclicCocycle:
    n = a.dim
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                acc = ZERO
                for l in range(n):
                    acc += d.data[l][i] * theta.t[l][j][k]
                    acc += d.data[l][j] * theta.t[l][k][i]
                    acc += d.data[l][k] * theta.t[l][i][j]
                if acc != 0:
                    entries[(i, j, k)] = acc
    return CyclicCocycle.from_three_form(n, entries)


def solve_two_form_primitive(a: LieAlgebra, target: CyclicCocycle) -> Matrix:
    """A skew F with dF = target, or an InputError carrying the obstruction."""
    n = a.dim
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    index = {p: s for s, p in enumerate(pairs)}

    def add_f_coeff(row, u, k, sign):
        # F(u, e_k) = sum_p u_p F(e_p, e_k) with F(e_p, e_k) = +-coordinate
        for p in range(n):
            if u[p] == 0 or p == k:
                continue
            if p < k:
                row[index[(p, k)]] += sign * u[p]
            else:
                row[index[(k, p)]] -= sign * u[p]

    rows, rhs = [], []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                row = vzero(len(pairs))
                add_f_coeff(row, a.c[i][j], k, -ONE)
                add_f_coeff(row, a.c[i][k], j, ONE)
                add_f_coeff(row, a.c[j][k], i, -ONE)
                rows.append(row)
                rhs.append(target.t[i][j][k])
    if not pairs:
        if any(x != 0 for x in rhs):
            raise InputError("nonzero three-form on a space with no two-forms")
        return Matrix.zeros(n, n)
    if not rows:
        return Matrix.zeros(n, n)
    res = solve(Matrix(rows, cols=len(pairs)), rhs)
    if res is None:
        raise InputError(
            "the twisted three-form is not a coboundary: dF = Theta has no solution"
        )
    x = res[0]
    f = [[ZERO] * n for _ in range(n)]
    for (i, j), s in index.items():
        f[i][j] = x[s]
        f[j][i] = -x[s]
    return Matrix(f)


def theta_compatibility(a: LieAlgebra, theta: CyclicCocycle, d: Matrix) -> ThetaCompatibility:
    twist = theta_twist(a, theta, d)
    f = solve_two_form_primitive(a, twist)
    if not two_form_differential(a, f) == twist:
        raise CertificationError("solved primitive does not reproduce the twist")
    n = a.dim
    # H e_i = F(e_i, .), stored dual-coordinate-wise: H[j][i] = F(e_i, e_j)
    h = Matrix([[f.data[i][j] for i in range(n)] for j in range(n)])
    return ThetaCompatibility(d=d, theta_twist=twist, f=f, h=h)


def lift_derivation(data: TStarData, d, compat: ThetaCompatibility | None = None):
    """Lift an invertible base derivation to the extension.

    The lift acts as x + f |-> Dx - Hx - f o D and is certified to be an
    invertible derivation, skew for the hyperbolic pairing, with symplectic
    B(Dbar ., .).
    """
    from .deriv import certify_derivation
    from .forms import symplectic_from_derivation

    dm = getattr(d, "matrix", d)
    a = data.base
    certify_derivation(a, dm, require_invertible=True)
    if compat is None:
        compat = theta_compatibility(a, data.theta, dm)
    n = a.dim
    N = 2 * n
    dbar = [[ZERO] * N for _ in range(N)]
    for i in range(n):
        for j in range(n):
            dbar[i][j] = dm.data[i][j]
            dbar[n + i][j] = -compat.h.data[i][j]
            dbar[n + i][n + j] = -dm.data[j][i]
    lifted = certify_derivation(
        data.algebra, Matrix(dbar), data.form, require_invertible=True, require_skew=True
    )
    symplectic_from_derivation(data.algebra, data.form, lifted)
    return lifted


def shift_isomorphism(n: int, phi: Matrix) -> Matrix:
    """Matrix of x + f |-> x + f + phi(x, .) on extension coordinates."""
    out = [[ZERO] * (2 * n) for _ in range(2 * n)]
    for i in range(2 * n):
        out[i][i] = ONE
    for i in range(n):
        for j in range(n):
            # phi(e_i, .) = sum_j phi[i][j] f_j
            out[n + j][i] = phi.data[i][j]
    return Matrix(out)


def certify_coboundary_equivalence(a: LieAlgebra, theta: CyclicCocycle, phi: Matrix):
    """Certify that the extension by theta = d(phi) and the trivial extension are
    isometrically isomorphic via the explicit shift x + f |-> x + f + phi(x, .)."""
    if two_form_differential(a, phi) != theta:
        raise InputError("phi is not a primitive of theta")
    twisted = build_tstar(a, theta)
    trivial = build_tstar(a, CyclicCocycle.zero(a.dim))
    smat = shift_isomorphism(a.dim, phi)
    moved = change_basis(trivial.algebra, smat, basis_names=twisted.algebra.basis_names)
    if not moved.structure_equal(twisted.algebra):
        raise CertificationError("shift map is not an isomorphism onto the twisted extension")
    if smat.transpose() * trivial.form.matrix * smat != twisted.form.matrix:
        raise CertificationError("shift map is not an isometry")
    return smat


# ---------------------------------------------------------------------------
# descent: recognising an algebra as an extension
# ---------------------------------------------------------------------------

@dataclass
class ExtractResult:
    base: LieAlgebra
    theta: CyclicCocycle
    iso: Matrix  # columns express the extension basis inside the ambient algebra
    data: TStarData
    projected: object = None  # DerivationMatrix of the base when dbar was supplied
    f: Matrix | None = None


def extract_tstar(g: LieAlgebra, b: BilinearForm, ideal: Subspace, dbar=None) -> ExtractResult:
    """Present (g, B) as an extension of g/I for a lagrangian isotropic ideal I.

    The complement of I is the lexicographically earliest coordinate
    completion, re-centred so that it is isotropic; the returned change of
    basis is certified to match structure constants and pairing exactly.
    """
    n2 = g.dim
    if n2 % 2:
        raise InputError("only even-dimensional algebras split as extensions")
    n = n2 // 2
    if ideal.dim != n:
        raise InputError(f"ideal must have half dimension {n}, got {ideal.dim}")
    if not is_ideal(g, ideal):
        raise InputError("given subspace is not an ideal")
    if isotropy_class(g, b, ideal) != LAGRANGIAN:
        raise InputError("ideal is not completely isotropic of half dimension")
    dm = getattr(dbar, "matrix", dbar) if dbar is not None else None
    if dm is not None:
        for v in ideal.basis:
            if not ideal.contains_vector(dm.apply(v)):
                raise InputError("derivation does not stabilise the ideal")

    ibasis = ideal.rref_basis()
    pivots = set(ideal.pivot_columns())
    comp_idx = [j for j in range(n2) if j not in pivots]
    w0 = [_e(n2, j) for j in comp_idx]
    # dual basis of the ideal against the complement: coefficients solve alpha P = id
    pairing = Matrix([[b.value(iv, wv) for wv in w0] for iv in ibasis])
    dual_coeff = pairing.inverse()
    idual = [
        [sum((dual_coeff.data[j][r] * ibasis[r][s] for r in range(n)), ZERO) for s in range(n2)]
        for j in range(n)
    ]
    # re-centre the complement so it becomes isotropic
    w = []
    for i, wi in enumerate(w0):
        shift = vzero(n2)
        for j, wj in enumerate(w0):
            val = b.value(wi, wj)
            if val != 0:
                shift = vadd(shift, vscale(val / 2, idual[j]))
        w.append(vsub(wi, shift))
    for i in range(n):
        for j in range(n):
            if b.value(w[i], w[j]) != 0:
                raise CertificationError("complement re-centring failed to be isotropic")

    wmat = Matrix.from_columns(w + idual, rows=n2)
    winv = wmat.inverse()
    base_c = [[vzero(n) for _ in range(n)] for _ in range(n)]
    theta_entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            br = g.bracket(w[i], w[j])
            coords = winv.apply(br)
            base_c[i][j] = coords[:n]
            base_c[j][i] = vscale(-ONE, coords[:n])
            for k in range(j + 1, n):
                v = b.value(br, w[k])
                if v != 0:
                    theta_entries[(i, j, k)] = v
    base_names = [g.basis_names[j] for j in comp_idx]
    base = LieAlgebra(base_c, base_names)
    theta = CyclicCocycle.from_three_form(n, theta_entries)
    check_cocycle(base, theta).raise_if_failed()
    data = build_tstar(base, theta)
    moved = change_basis(g, wmat, basis_names=data.algebra.basis_names)
    if not moved.structure_equal(data.algebra):
        raise CertificationError("extension presentation does not match the algebra")
    if wmat.transpose() * b.matrix * wmat != data.form.matrix:
        raise CertificationError("extension presentation is not an isometry")

    projected = None
    fmat = None
    if dm is not None:
        from .deriv import certify_derivation

        dprime = winv * dm * wmat
        for i in range(n):
            for j in range(n):
                if dprime.data[i][n + j] != 0:
                    raise CertificationError("stabilised ideal leaks into the complement")
        d11 = dprime.submatrix(range(n), range(n))
        projected = certify_derivation(base, d11, require_invertible=True)
        # dual block must be the negative transpose of the base block
        d22 = dprime.submatrix(range(n, n2), range(n, n2))
        if d22 != -d11.transpose():
            raise CertificationError("dual block of the stabilised derivation is inconsistent")
        fmat = Matrix(
            [[-dprime.data[n + j][i] for j in range(n)] for i in range(n)]
        )
        # F(x, y) = -B(Hx, y) with H = -D21: check dF equals the twist
        if two_form_differential(base, fmat) != theta_twist(base, theta, d11):
            raise CertificationError("projected derivation is not compatible with theta")
    return ExtractResult(base=base, theta=theta, iso=wmat, data=data, projected=projected, f=fmat)


# ---------------------------------------------------------------------------
# heuristic search for a stable lagrangian ideal
# ---------------------------------------------------------------------------

def _ideal_membership_projector(g, ideal: Subspace):
    if ideal.is_zero():
        return Matrix.identity(g.dim)
    pivots = set(ideal.pivot_columns())
    comp = [j for j in range(g.dim) if j not in pivots]
    m = Matrix.from_columns(ideal.rref_basis() + [_e(g.dim, j) for j in comp], rows=g.dim)
    return m.inverse().submatrix(range(ideal.dim, g.dim), range(g.dim))


def _extension_candidates(g, b, dm, ideal):
    n = g.dim
    proj = _ideal_membership_projector(g, ideal)
    rows = []
    for i in range(n):
        rows.extend((proj * g.ad_basis(i)).data)
    a_space = Subspace.span(n, kernel(Matrix(rows, cols=n))) if rows else Subspace.full(n)
    p_space = a_space.intersect(orthogonal(g, b, ideal)) if not ideal.is_zero() else a_space
    comp = []
    cur = ideal
    for v in p_space.rref_basis():
        if not cur.contains_vector(v):
            comp.append(v)
            cur = cur.plus(Subspace(n, [v]))
    if not comp:
        return []
    lift = Matrix.from_columns(comp + ideal.basis, rows=n) if ideal.basis else Matrix.from_columns(comp, rows=n)
    induced_cols = []
    for v in comp:
        res = solve(lift, dm.apply(v))
        if res is None:
            raise CertificationError("candidate layer is not stable under the derivation")
        induced_cols.append(res[0][: len(comp)])
    induced = Matrix.from_columns(induced_cols, rows=len(comp))
    roots = rational_roots(char_poly(induced))
    candidates = []
    for lam, _mult in roots.roots:
        eig = kernel(induced - Matrix.identity(len(comp)).scale(lam))
        vecs = []
        for kvec in eig:
            v = vzero(n)
            for s, coeff in enumerate(kvec):
                if coeff != 0:
                    v = vadd(v, vscale(coeff, comp[s]))
            vecs.append(v)
        extra = []
        if lam == 0:
            for s in range(len(vecs)):
                for t in range(s + 1, len(vecs)):
                    extra.append(vadd(vecs[s], vecs[t]))
                    extra.append(vsub(vecs[s], vecs[t]))
        for v in vecs + extra:
            if b.value(v, v) == 0:
                candidates.append(v)
    return candidates


def find_isotropic_stable_ideal(g, b, dbar, max_nodes=500):
    """Grow a stable completely isotropic ideal of half dimension.

    Greedy depth-first growth from the isotropic core of the center; an empty
    result is an absence report, not a nonexistence proof (except in trivial
    dimensions where stable lines are exhausted).
    """
    dm = getattr(dbar, "matrix", dbar)
    n = g.dim
    if n % 2:
        raise InputError("only even dimensions can carry a lagrangian ideal")
    target = n // 2
    z = center(g)
    der = derived_subspace(g)
    queue = []
    seen = set()
    for s in (z.intersect(der), Subspace.zero(n)):
        key = tuple(map(tuple, s.rref_basis()))
        if key not in seen:
            seen.add(key)
            queue.append(s)
    nodes = 0
    while queue and nodes < max_nodes:
        ideal = queue.pop(0)
        nodes += 1
        if ideal.dim == target:
            if (
                is_ideal(g, ideal)
                and b.gram(ideal).is_zero()
                and all(ideal.contains_vector(dm.apply(v)) for v in ideal.basis)
            ):
                return ideal
            continue
        for v in _extension_candidates(g, b, dm, ideal):
            grown = ideal.plus(Subspace(n, [v]))
            key = tuple(map(tuple, grown.rref_basis()))
            if key not in seen:
                seen.add(key)
                queue.append(grown)
    return None


# ---------------------------------------------------------------------------
# abelian-summand reduction and base normalisation
# ---------------------------------------------------------------------------

@dataclass
class SplitOutcome:
    sub_extension: TStarData  # extension of the complement of the split line
    plane_indices: tuple  # coordinates of the hyperbolic plane spanned by e, e*


@dataclass
class ReducedOutcome:
    base: LieAlgebra
    theta: CyclicCocycle
    extraction: ExtractResult
    relations: dict


def reduce_abelian_summand(a: LieAlgebra, theta: CyclicCocycle, e_index=None):
    """One reduction step for a base with an abelian direct summand spanned by e.

    When theta never touches e the extension splits off a hyperbolic plane;
    otherwise the summand is absorbed and the center relations are asserted.
    """
    n = a.dim
    if e_index is None:
        e_index = n - 1
    if not (0 <= e_index < n):
        raise InputError("summand index out of range")
    for j in range(n):
        if not vis_zero(a.c[e_index][j]):
            raise InputError("distinguished summand vector is not central")
    h_idx = [i for i in range(n) if i != e_index]
    for i in h_idx:
        for j in h_idx:
            if a.c[i][j][e_index] != 0:
                raise InputError("complement of the summand is not a subalgebra")
    touches_e = any(
        theta.t[i][j][e_index] != 0 for i in range(n) for j in range(i + 1, n)
    )
    if not touches_e:
        hc = [[[a.c[i][j][k] for k in h_idx] for j in h_idx] for i in h_idx]
        h = LieAlgebra(hc, [a.basis_names[i] for i in h_idx])
        entries = {}
        for si, i in enumerate(h_idx):
            for sj, j in enumerate(h_idx):
                for sk, k in enumerate(h_idx):
                    if si < sj < sk and theta.t[i][j][k] != 0:
                        entries[(si, sj, sk)] = theta.t[i][j][k]
        sub = build_tstar(h, CyclicCocycle.from_three_form(n - 1, entries))
        return SplitOutcome(sub_extension=sub, plane_indices=(e_index, n + e_index))

    data = build_tstar(a, theta)
    ideal = Subspace.coordinate(2 * n, [n + i for i in h_idx] + [e_index])
    extraction = extract_tstar(data.algebra, data.form, ideal)
    a1, theta1 = extraction.base, extraction.theta
    z_a, z_a1 = center(a), center(a1)
    dz = derived_subspace(a).intersect(z_a).dim
    dz1 = derived_subspace(a1).intersect(z_a1).dim
    relations = {
        "center_dim": (z_a1.dim, z_a.dim),
        "derived_center_dim": (dz1, dz),
    }
    if z_a1.dim > z_a.dim:
        raise CertificationError(
            f"center grew from {z_a.dim} to {z_a1.dim} during reduction", failures=[relations]
        )
    if dz1 != dz + 1:
        raise CertificationError(
            f"derived-center overlap moved from {dz} to {dz1}, expected {dz + 1}",
            failures=[relations],
        )
    return ReducedOutcome(base=a1, theta=theta1, extraction=extraction, relations=relations)


def _admissible_summand_vectors(a: LieAlgebra, theta: CyclicCocycle):
    """Candidate central vectors outside the derived ideal, preferring ones the
    cocycle actually touches."""
    z = center(a)
    der = derived_subspace(a)
    zbasis = z.rref_basis()
    raw = list(zbasis)
    for i in range(len(zbasis)):
        for j in range(i + 1, len(zbasis)):
            raw.append(vadd(zbasis[i], zbasis[j]))
    outside = [v for v in raw if not der.contains_vector(v)]

    def touched(v):
        n = a.dim
        for i in range(n):
            for j in range(i + 1, n):
                acc = ZERO
                for p in range(n):
                    if v[p] != 0:
                        acc += v[p] * theta.t[i][j][p]
                if acc != 0:
                    return True
        return False

    return [v for v in outside if touched(v)], outside


def normalize_base(a: LieAlgebra, theta: CyclicCocycle, max_steps=64):
    """Iterate summand reduction until the center sits inside the derived ideal."""
    steps = []
    for _ in range(max_steps):
        z = center(a)
        der = derived_subspace(a)
        if der.contains(z):
            return a, theta, steps
        touched, outside = _admissible_summand_vectors(a, theta)
        if not outside:
            raise InputError("no central vector outside the derived ideal is available")
        if not touched:
            raise InputError(
                "extension splits off a hyperbolic plane: base is reducible, not normalisable"
            )
        e = touched[0]
        # new basis: derived ideal, then a lexicographic completion, then e
        span = der.plus(Subspace(a.dim, [e]))
        completion = []
        cur = span
        for j in range(a.dim):
            v = _e(a.dim, j)
            if not cur.contains_vector(v):
                completion.append(v)
                cur = cur.plus(Subspace(a.dim, [v]))
        cols = der.rref_basis() + completion + [e]
        cmat = Matrix.from_columns(cols, rows=a.dim)
        names = [f"y{i + 1}" for i in range(a.dim - 1)] + ["e"]
        a_adapted = change_basis(a, cmat, basis_names=names)
        theta_adapted = theta.transform(cmat)
        outcome = reduce_abelian_summand(a_adapted, theta_adapted, e_index=a.dim - 1)
        l_before = z.dim - der.intersect(z).dim
        a, theta = outcome.base, outcome.theta
        z_after = center(a)
        l_after = z_after.dim - derived_subspace(a).intersect(z_after).dim
        if l_after >= l_before:
            raise CertificationError("normalisation invariant failed to decrease")
        steps.append(outcome)
    raise CertificationError("normalisation did not terminate")
