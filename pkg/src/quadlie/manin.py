"""Manin decompositions, their double extensions, and eigenvalue splittings.

A Manin algebra is a quadratic algebra splitting into two completely
isotropic subalgebras U and V; it is special symplectic when an invertible
skew derivation preserves both halves, equivalently when the associated
symplectic form vanishes on U x U and V x V.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .deriv import DerivationMatrix, certify_derivation
from .dblext import (
    SdextBundle,
    SymplecticDextData,
    double_extend_line,
    lifted_derivation_matrix,
    symplectic_double_extend,
)
from .errors import AbsenceError, CertificationError, InputError
from .forms import (
    BilinearForm,
    SYMMETRIC,
    is_invariant_scalar_product,
    symplectic_from_derivation,
)
from .liecore import (
    LieAlgebra,
    Subspace,
    _e,
    center,
    change_basis,
    derived_and_lcs,
    is_subalgebra,
)
from .ratlin import (
    Matrix,
    ONE,
    char_poly,
    generalized_eigenspace,
    kernel,
    rational_roots,
    solve,
    vadd,
    vscale,
    vzero,
)


@dataclass
class ManinDecomposition:
    g: LieAlgebra
    b: BilinearForm
    u: Subspace
    v: Subspace
    nilpotent: bool = field(default=False)

    @property
    def dim(self):
        return self.g.dim


def certify_manin(g, b, u, v) -> ManinDecomposition:
    """Verify every decomposition axiom, reporting all violations together."""
    failures = []
    if b.kind != SYMMETRIC:
        raise InputError("Manin pairing must be symmetric")
    rep = is_invariant_scalar_product(g, b)
    if not rep.ok:
        failures.append({"check": "invariant_scalar_product", "where": None, "detail": rep.first})
    if u.dim + v.dim != g.dim or u.intersect(v).dim != 0:
        failures.append({"check": "complementary", "where": None,
                         "detail": f"dims {u.dim}+{v.dim} vs {g.dim}"})
    for name, s in (("U", u), ("V", v)):
        if not b.gram(s).is_zero():
            failures.append({"check": "isotropic", "where": name, "detail": "gram nonzero"})
        if not is_subalgebra(g, s):
            failures.append({"check": "subalgebra", "where": name, "detail": "not closed"})
    if failures:
        raise CertificationError("Manin decomposition certification failed", failures=failures)
    decomposition = ManinDecomposition(g, b, u, v, nilpotent=derived_and_lcs(g).nilpotent)
    nilman_check(decomposition)
    return decomposition


@dataclass
class NilmanReport:
    nilpotent: bool
    dim_center_u: int
    dim_center_v: int
    theorem_applies: bool
    holds: object  # True when checked, None when not applicable


def nilman_check(m: ManinDecomposition) -> NilmanReport:
    """For nonzero nilpotent Manin algebras the center must meet both halves."""
    z = center(m.g)
    zu, zv = z.intersect(m.u).dim, z.intersect(m.v).dim
    nil = derived_and_lcs(m.g).nilpotent
    applies = nil and m.g.dim > 0
    if applies and (zu == 0 or zv == 0):
        raise CertificationError(
            "nilpotent Manin algebra with a trivial center intersection: "
            f"dim z n U = {zu}, dim z n V = {zv} (this indicates a bug)"
        )
    return NilmanReport(nil, zu, zv, applies, True if applies else None)


def _embed(vec, offset, total):
    out = vzero(total)
    for i, x in enumerate(vec):
        out[offset + i] = x
    return out


def _half_core(b, half: Subspace, pair_vec):
    """Basis of {x in half : B(x, pair_vec) = 0}."""
    row = Matrix([[b.value(col, pair_vec) for col in half.basis]])
    mat = Matrix.from_columns(half.basis, rows=half.parent_dim)
    return [mat.apply(k) for k in kernel(row)]


def manin_double_extend(m: ManinDecomposition, delta) -> ManinDecomposition:
    """One-dimensional double extension of a Manin algebra along delta with
    delta(V) inside V; the halves grow by e* and e respectively."""
    dm = getattr(delta, "matrix", delta)
    certify_derivation(m.g, dm, m.b, require_skew=True)
    for vec in m.v.basis:
        if not m.v.contains_vector(dm.apply(vec)):
            raise CertificationError(
                "delta does not preserve V",
                failures=[{"check": "stability", "where": "V", "detail": vec}],
            )
    ext, tform = double_extend_line(m.g, m.b, dm)
    total = ext.dim
    u_vecs = [_embed(vec, 1, total) for vec in m.u.basis] + [_e(total, total - 1)]
    v_vecs = [_embed(vec, 1, total) for vec in m.v.basis] + [_e(total, 0)]
    return certify_manin(ext, tform, Subspace(total, u_vecs), Subspace(total, v_vecs))


@dataclass
class ManinDescent:
    core: ManinDecomposition
    delta: Matrix
    swapped: bool
    adapted_basis: Matrix
    adapted: LieAlgebra
    rebuilt: ManinDecomposition


def manin_descend(m: ManinDecomposition) -> ManinDescent:
    """Strip one hyperbolic pair (e*, e) with e* central in U (or V, swapping roles).

    The adapted basis is (e, U-core, V-core, e*); rebuilding by double
    extension must match the adapted structure constants exactly.
    """
    z = center(m.g)
    swapped = False
    zu = z.intersect(m.u)
    if zu.is_zero():
        zu = z.intersect(m.v)
        swapped = True
    if zu.is_zero():
        raise InputError(
            "center meets neither half; descent needs a central vector in U or V "
            "(always available when the algebra is nilpotent)"
        )
    uu, vv = (m.v, m.u) if swapped else (m.u, m.v)
    estar = zu.rref_basis()[0]
    n2 = m.g.dim
    vmat = Matrix.from_columns(vv.basis, rows=n2)
    pair_row = Matrix([[m.b.value(estar, col) for col in vv.basis]])
    res = solve(pair_row, [ONE])
    if res is None:
        raise CertificationError("central vector pairs to zero against the opposite half")
    e = vmat.apply(res[0])
    ucore_vecs = _half_core(m.b, uu, e)
    vcore_vecs = _half_core(m.b, vv, estar)
    n = n2 - 2
    if len(ucore_vecs) != n // 2 or len(vcore_vecs) != n // 2:
        raise CertificationError("isotropic halves did not reduce by exactly one line")
    cols = [e] + ucore_vecs + vcore_vecs + [estar]
    cmat = Matrix.from_columns(cols, rows=n2)
    names = ["e"] + [f"u{i + 1}" for i in range(n // 2)] + [f"v{i + 1}" for i in range(n // 2)] + ["e*"]
    adapted = change_basis(m.g, cmat, basis_names=names)
    tprime = BilinearForm(cmat.transpose() * m.b.matrix * cmat, SYMMETRIC)
    core_c = [[[adapted.c[1 + i][1 + j][1 + k] for k in range(n)] for j in range(n)] for i in range(n)]
    core_g = LieAlgebra(core_c, names[1 : 1 + n])
    core_b = BilinearForm(tprime.matrix.submatrix(range(1, 1 + n), range(1, 1 + n)), SYMMETRIC)
    delta = Matrix([[adapted.c[0][1 + j][1 + i] for j in range(n)] for i in range(n)], cols=n)
    core = certify_manin(
        core_g,
        core_b,
        Subspace.coordinate(n, range(n // 2)),
        Subspace.coordinate(n, range(n // 2, n)),
    )
    rebuilt = manin_double_extend(core, delta)
    if not rebuilt.g.structure_equal(adapted):
        raise CertificationError("rebuilt double extension differs from the adapted algebra")
    if rebuilt.b.matrix != tprime.matrix:
        raise CertificationError("rebuilt pairing differs from the adapted one")
    return ManinDescent(
        core=core, delta=delta, swapped=swapped, adapted_basis=cmat, adapted=adapted, rebuilt=rebuilt
    )


# ---------------------------------------------------------------------------
# special symplectic Manin structure
# ---------------------------------------------------------------------------

@dataclass
class SpecialSymplecticManin:
    decomposition: ManinDecomposition
    d: DerivationMatrix
    omega: BilinearForm

    @property
    def g(self):
        return self.decomposition.g

    @property
    def b(self):
        return self.decomposition.b

    @property
    def u(self):
        return self.decomposition.u

    @property
    def v(self):
        return self.decomposition.v


def certify_special(decomposition: ManinDecomposition, d) -> SpecialSymplecticManin:
    """Invertible skew derivation preserving both halves; omega vanishes there."""
    dm = getattr(d, "matrix", d)
    g, b = decomposition.g, decomposition.b
    dd = certify_derivation(g, dm, b, require_invertible=True, require_skew=True)
    for name, s in (("U", decomposition.u), ("V", decomposition.v)):
        for vec in s.basis:
            if not s.contains_vector(dm.apply(vec)):
                raise CertificationError(f"derivation does not preserve {name}")
    omega = symplectic_from_derivation(g, b, dd)
    for name, s in (("U", decomposition.u), ("V", decomposition.v)):
        for x in s.basis:
            for y in s.basis:
                if omega.value(x, y) != 0:
                    raise CertificationError(f"symplectic form does not vanish on {name} x {name}")
    return SpecialSymplecticManin(decomposition=decomposition, d=dd, omega=omega)


def eigen_split(g, b, d) -> SpecialSymplecticManin:
    """Split along generalized eigenspaces of an invertible skew derivation.

    Requires a rational spectrum; positive eigenvalues span U, negative ones
    span V.  Certifies the pairing orthogonality B(g(a), g(b)) = 0 for
    a + b != 0 and the bracket grading [g(a), g(b)] inside g(a + b).
    """
    dm = getattr(d, "matrix", d)
    dd = certify_derivation(g, dm, b, require_invertible=True, require_skew=True)
    roots = rational_roots(char_poly(dm))
    if not roots.splits:
        raise InputError("spectrum not rational: extend scalars or supply an ordering")
    spaces = {}
    for lam, _mult in roots.roots:
        if lam == 0:
            raise CertificationError("invertible derivation with zero eigenvalue")
        spaces[lam] = Subspace.span(g.dim, generalized_eigenspace(dm, lam))
    if sum(s.dim for s in spaces.values()) != g.dim:
        raise CertificationError("generalized eigenspaces do not fill the algebra")
    lams = sorted(spaces)
    for a_val in lams:
        for b_val in lams:
            if a_val + b_val != 0:
                for x in spaces[a_val].basis:
                    for y in spaces[b_val].basis:
                        if b.value(x, y) != 0:
                            raise CertificationError(
                                f"eigenspaces for {a_val} and {b_val} are not orthogonal"
                            )
            target = spaces.get(a_val + b_val, Subspace.zero(g.dim))
            for x in spaces[a_val].basis:
                for y in spaces[b_val].basis:
                    w = g.bracket(x, y)
                    if not target.contains_vector(w):
                        raise CertificationError(
                            f"bracket grading fails: [g({a_val}), g({b_val})]"
                        )
    u_vecs = [vec for lam in lams if lam > 0 for vec in spaces[lam].basis]
    v_vecs = [vec for lam in lams if lam < 0 for vec in spaces[lam].basis]
    decomposition = certify_manin(g, b, Subspace(g.dim, u_vecs), Subspace(g.dim, v_vecs))
    return certify_special(decomposition, dd)


def special_double_extend(s: SpecialSymplecticManin, delta, lam, c) -> SpecialSymplecticManin:
    """Double extension carrying the special structure along (delta, lam, c in V)."""
    dm = getattr(delta, "matrix", delta)
    if not s.v.contains_vector(c):
        raise InputError("vector c must lie in V")
    data = SymplecticDextData(core=s.g, core_form=s.b, d=s.d, delta=dm, lam=lam, c=list(c))
    bundle = symplectic_double_extend(data)
    extended = manin_double_extend(s.decomposition, dm)
    if not extended.g.structure_equal(bundle.algebra):
        raise CertificationError("Manin and symplectic extensions disagree")
    return certify_special(extended, bundle.dtilde)


@dataclass
class SpecialDescent:
    core: SpecialSymplecticManin
    delta: Matrix
    lam: object
    c: list
    swapped: bool
    adapted_basis: Matrix
    rebuilt: SpecialSymplecticManin  # equal to the adapted original
    adapted_algebra: LieAlgebra


def _rational_eigvec_in(dm: Matrix, sub: Subspace):
    """Smallest rational eigenvalue and earliest eigenvector of dm inside sub."""
    if sub.is_zero():
        return None
    basis = sub.rref_basis()
    lift = Matrix.from_columns(basis, rows=sub.parent_dim)
    cols = []
    for vec in basis:
        res = solve(lift, dm.apply(vec))
        if res is None:
            raise CertificationError("subspace is not stable under the derivation")
        cols.append(res[0])
    restricted = Matrix.from_columns(cols, rows=len(basis))
    roots = rational_roots(char_poly(restricted))
    for lam, _mult in roots.roots:
        vecs = kernel(restricted - Matrix.identity(len(basis)).scale(lam))
        if vecs:
            lifted = vzero(sub.parent_dim)
            for sidx, coeff in enumerate(vecs[0]):
                if coeff != 0:
                    lifted = vadd(lifted, vscale(coeff, basis[sidx]))
            return lam, lifted
    return None


def special_descend(s: SpecialSymplecticManin) -> SpecialDescent:
    """Undo one special double extension along a central eigenvector in U or V."""
    z = center(s.g)
    dm = s.d.matrix
    swapped = False
    found = _rational_eigvec_in(dm, z.intersect(s.u))
    if found is None:
        found = _rational_eigvec_in(dm, z.intersect(s.v))
        swapped = True
    if found is None:
        raise AbsenceError(
            "no rational eigenvector in the central parts of U or V: descent unavailable"
        )
    lam, estar = found
    if lam == 0:
        raise CertificationError("invertible derivation with zero central eigenvalue")
    uu, vv = (s.v, s.u) if swapped else (s.u, s.v)
    n2 = s.g.dim
    pair_row = Matrix([[s.b.value(estar, col) for col in vv.basis]])
    res = solve(pair_row, [ONE])
    if res is None:
        raise CertificationError("central eigenvector pairs to zero against the opposite half")
    e = Matrix.from_columns(vv.basis, rows=n2).apply(res[0])
    ucore = _half_core(s.b, uu, e)
    vcore = _half_core(s.b, vv, estar)
    n = n2 - 2
    if len(ucore) != n // 2 or len(vcore) != n // 2:
        raise CertificationError("isotropic halves did not reduce by exactly one line")
    cols = [e] + ucore + vcore + [estar]
    cmat = Matrix.from_columns(cols, rows=n2)
    names = ["e"] + [f"u{i + 1}" for i in range(n // 2)] + [f"v{i + 1}" for i in range(n // 2)] + ["e*"]
    adapted = change_basis(s.g, cmat, basis_names=names)
    tprime = BilinearForm(cmat.transpose() * s.b.matrix * cmat, SYMMETRIC)
    dprime = cmat.inverse() * dm * cmat
    if dprime.data[0][0] != -lam or dprime.data[n2 - 1][n2 - 1] != lam:
        raise CertificationError("adapted derivation lost its eigenvalue structure")
    core_c = [[[adapted.c[1 + i][1 + j][1 + k] for k in range(n)] for j in range(n)] for i in range(n)]
    core_g = LieAlgebra(core_c, names[1 : 1 + n])
    core_b = BilinearForm(tprime.matrix.submatrix(range(1, 1 + n), range(1, 1 + n)), SYMMETRIC)
    core_d = Matrix([[dprime.data[1 + i][1 + j] for j in range(n)] for i in range(n)], cols=n)
    delta = Matrix([[adapted.c[0][1 + j][1 + i] for j in range(n)] for i in range(n)], cols=n)
    cvec = [-dprime.data[1 + i][0] for i in range(n)]
    core_decomposition = certify_manin(
        core_g,
        core_b,
        Subspace.coordinate(n, range(n // 2)),
        Subspace.coordinate(n, range(n // 2, n)),
    )
    core = certify_special(core_decomposition, core_d)
    rebuilt = special_double_extend(core, delta, lam, cvec)
    if not rebuilt.g.structure_equal(adapted):
        raise CertificationError("special rebuild differs from the adapted algebra")
    if rebuilt.b.matrix != tprime.matrix:
        raise CertificationError("special rebuild pairing differs from the adapted one")
    if rebuilt.d.matrix != dprime:
        raise CertificationError("special rebuild derivation differs from the adapted one")
    return SpecialDescent(
        core=core,
        delta=delta,
        lam=lam,
        c=cvec,
        swapped=swapped,
        adapted_basis=cmat,
        rebuilt=rebuilt,
        adapted_algebra=adapted,
    )


@dataclass
class TowerStep:
    delta: Matrix
    lam: object
    c: list
    swapped: bool
    adapted_algebra: LieAlgebra
    adapted_form: Matrix
    adapted_derivation: Matrix


@dataclass
class TowerDecomposition:
    base: SpecialSymplecticManin
    steps: list  # top-down TowerStep entries
    complete: bool
    failure_level: object = None
    top_fingerprint: tuple = ()


def tower_decompose(s: SpecialSymplecticManin) -> TowerDecomposition:
    """Iterate special descents down to the two-dimensional abelian base."""
    from .liecore import fingerprint

    top_fp = fingerprint(s.g)
    steps = []
    cur = s
    level = 0
    while cur.g.dim > 2:
        try:
            descent = special_descend(cur)
        except AbsenceError:
            return TowerDecomposition(cur, steps, False, failure_level=level, top_fingerprint=top_fp)
        steps.append(
            TowerStep(
                delta=descent.delta,
                lam=descent.lam,
                c=descent.c,
                swapped=descent.swapped,
                adapted_algebra=descent.adapted_algebra,
                adapted_form=descent.adapted.form.matrix,
                adapted_derivation=descent.adapted.dtilde.matrix,
            )
        )
        cur = descent.core
        level += 1
    if derived_and_lcs(cur.g).derived.dim != 0:
        raise CertificationError("two-dimensional tower base is not abelian")
    return TowerDecomposition(cur, steps, True, top_fingerprint=top_fp)


def replay_tower(tower: TowerDecomposition) -> SpecialSymplecticManin:
    """Rebuild the tower from its base, re-verifying every level exactly."""
    from .liecore import fingerprint

    cur = tower.base
    for step in reversed(tower.steps):
        cur = special_double_extend(cur, step.delta, step.lam, step.c)
        if not cur.g.structure_equal(step.adapted_algebra):
            raise CertificationError("tower replay diverged from the recorded level")
        if cur.b.matrix != step.adapted_form or cur.d.matrix != step.adapted_derivation:
            raise CertificationError("tower replay form or derivation mismatch")
    if tower.complete and fingerprint(cur.g) != tower.top_fingerprint:
        raise CertificationError("tower replay changed the fingerprint")
    return cur
