"""Derivations, centroids, and the exact almost-inner membership decision.

A derivation D of a minimal Q-graded subalgebra is almost inner iff
``D(x) in [x, L]`` for every single x.  The decision runs in three exact
steps: (i) the torus precondition - ``D(h) in [h, L]`` for all torus h, which
reduces to "no torus component" plus "each root-coefficient functional is a
scalar multiple c_i of beta_i"; (ii) subtracting ``ad(sum c_i x_i)`` to reach
an operator that kills the torus and scales each root vector by some a_i;
(iii) solvability of ``beta_i(h) = a_i`` over the torus.  Solvable means the
derivation is ``ad`` of an explicit witness; unsolvable means the almost-inner
condition already fails at ``sum x_i``.  Seeded random falsification is a
cross-check only, never the verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .chevalley import DistinguishedBasis, LieAlgebra, SubalgebraSpec, build_semisimple, extract_subalgebra
from .exact import MatQ, Rat, kernel_basis, rref, solve
from .qgraded import is_closed, is_minimal, spans_q

__all__ = [
    "DerivationBasis",
    "CentroidBasis",
    "AidVerdict",
    "leibniz_violation",
    "derivation_space",
    "centroid_space",
    "aid_precondition",
    "aid_reduce",
    "aid_membership",
    "aid_falsify_random",
    "verify_aid_eq_inn",
    "AidEqInnCertificate",
    "diagonal_map",
    "scalar_derivation_verdict",
    "diagonal_toral_algebra",
]

Vec = tuple[Rat, ...]


@dataclass(frozen=True)
class DerivationBasis:
    algebra: LieAlgebra
    der_basis: tuple[MatQ, ...]
    inn_basis: tuple[MatQ, ...]
    complement_basis: tuple[MatQ, ...]

    @property
    def dim_der(self) -> int:
        return len(self.der_basis)

    @property
    def dim_inn(self) -> int:
        return len(self.inn_basis)


@dataclass(frozen=True)
class CentroidBasis:
    algebra: LieAlgebra
    basis: tuple[MatQ, ...]


@dataclass(frozen=True)
class AidVerdict:
    """status: "inner" | "not-aid" | "not-derivation".

    For "inner", ``witness`` is z with D = ad(z) exactly.  For "not-aid",
    ``reason`` is "precondition" (with the failing torus element) or
    "scalar-system" (with the infeasible system data and the element
    ``sum x_i`` at which the almost-inner condition fails).
    """

    status: str
    witness: Vec | None = None
    reason: str | None = None
    data: dict | None = None

    @property
    def is_inner(self) -> bool:
        return self.status == "inner"


def _apply(mat: MatQ, v: Vec) -> Vec:
    return mat.mul_vec(v)


def leibniz_violation(g: LieAlgebra, d: MatQ) -> tuple[int, int] | None:
    """First basis pair where D[x,y] != [Dx,y] + [x,Dy], else None."""
    for i in range(g.dim):
        bi = g.basis_vector(i)
        dbi = _apply(d, bi)
        for j in range(i + 1, g.dim):
            bj = g.basis_vector(j)
            lhs = _apply(d, g.bracket(bi, bj))
            rhs = tuple(a + b for a, b in zip(g.bracket(dbi, bj), g.bracket(bi, _apply(d, bj))))
            if lhs != rhs:
                return (i, j)
    return None


def _unknown(r: int, c: int, dim: int) -> int:
    return r * dim + c


def derivation_space(g: LieAlgebra) -> DerivationBasis:
    """All derivations as the kernel of the Leibniz system in dim^2 unknowns."""
    dim = g.dim
    rows: list[list[Rat]] = []
    for i in range(dim):
        for j in range(i + 1, dim):
            sij = g.bracket_basis(i, j)
            for r in range(dim):
                row = [Fraction(0)] * (dim * dim)
                for k, c in sij:
                    row[_unknown(r, k, dim)] += c
                # -[D b_i, b_j]: D b_i = sum_s D[s][i] b_s
                for s in range(dim):
                    for k, c in g.bracket_basis(s, j):
                        if k == r:
                            row[_unknown(s, i, dim)] -= c
                # -[b_i, D b_j]
                for s in range(dim):
                    for k, c in g.bracket_basis(i, s):
                        if k == r:
                            row[_unknown(s, j, dim)] -= c
                if any(row):
                    rows.append(row)
    if rows:
        der_vecs = kernel_basis(MatQ.from_rows(rows))
    else:
        der_vecs = [tuple(Fraction(1 if t == u else 0) for t in range(dim * dim)) for u in range(dim * dim)]
    der = tuple(MatQ(dim, dim, v) for v in der_vecs)

    # inner derivations: greedy maximal independent subset of the ad images
    inn: list[MatQ] = []
    stacked: list[list[Rat]] = []
    rank = 0
    for i in range(dim):
        m = g.ad(g.basis_vector(i))
        cand = stacked + [list(m.entries)]
        r = rref(MatQ.from_rows(cand)).rank
        if r > rank:
            inn.append(m)
            stacked = cand
            rank = r
    # extend by derivation basis vectors to span Der, deterministically
    comp: list[MatQ] = []
    for m in der:
        cand = stacked + [list(m.entries)]
        r = rref(MatQ.from_rows(cand)).rank
        if r > rank:
            comp.append(m)
            stacked = cand
            rank = r
    return DerivationBasis(algebra=g, der_basis=der, inn_basis=tuple(inn), complement_basis=tuple(comp))


def centroid_space(g: LieAlgebra) -> CentroidBasis:
    """Maps commuting with all brackets: phi[x,y] = [phi x, y] = [x, phi y]."""
    dim = g.dim
    rows: list[list[Rat]] = []
    # i == j is not vacuous here: [phi(x), x] must vanish for every x
    for i in range(dim):
        for j in range(i, dim):
            sij = g.bracket_basis(i, j)
            for side in ("left", "right"):
                for r in range(dim):
                    row = [Fraction(0)] * (dim * dim)
                    for k, c in sij:
                        row[_unknown(r, k, dim)] += c
                    if side == "left":
                        for s in range(dim):
                            for k, c in g.bracket_basis(s, j):
                                if k == r:
                                    row[_unknown(s, i, dim)] -= c
                    else:
                        for s in range(dim):
                            for k, c in g.bracket_basis(i, s):
                                if k == r:
                                    row[_unknown(s, j, dim)] -= c
                    if any(row):
                        rows.append(row)
    vecs = kernel_basis(MatQ.from_rows(rows)) if rows else []
    basis = tuple(MatQ(dim, dim, v) for v in vecs)
    for a in basis:
        for b in basis:
            assert a.mul(b) == b.mul(a), "centroid elements must commute"
    return CentroidBasis(algebra=g, basis=basis)


def ad_matrix(g: LieAlgebra, z: Vec) -> MatQ:
    return g.ad(z)


def _torus_kernel_vector(info: DistinguishedBasis, i: int, psi_row: Vec) -> Vec | None:
    """A torus vector in ker(beta_i) where the functional psi_row is nonzero."""
    l = info.l
    beta = [info.beta_of_h.at(i, j) for j in range(l)]
    for v in kernel_basis(MatQ.from_rows([beta])):
        if sum(psi_row[j] * v[j] for j in range(l)) != 0:
            return v
    return None


def aid_precondition(
    g: LieAlgebra, info: DistinguishedBasis, d: MatQ, check_derivation: bool = True
) -> tuple[bool, dict]:
    """Decide ``D(h) in [h, L]`` for every torus element h, exactly.

    On success returns the scalars c_i with (x_i-coefficient of D(h)) =
    c_i * beta_i(h).  On failure returns a concrete torus witness h with
    ``D(h)`` outside ``[h, L]`` and the offending component.
    """
    if check_derivation:
        viol = leibniz_violation(g, d)
        if viol is not None:
            return False, {"not_derivation": viol}
    l, m = info.l, info.m
    # torus component of D(h_j) must vanish identically
    for j in range(l):
        col = [d.at(r, j) for r in range(l)]
        if any(col):
            return False, {"witness_h": tuple(Fraction(1 if k == j else 0) for k in range(l)), "component": "torus"}
    scalars: list[Rat] = []
    for i in range(m):
        psi_row = tuple(d.at(l + i, j) for j in range(l))  # h_j -> x_i coefficient
        beta_row = tuple(info.beta_of_h.at(i, j) for j in range(l))
        j0 = next(j for j in range(l) if beta_row[j] != 0)
        c = psi_row[j0] / beta_row[j0]
        if any(psi_row[j] != c * beta_row[j] for j in range(l)):
            witness = _torus_kernel_vector(info, i, psi_row)
            assert witness is not None
            return False, {"witness_h": witness, "component": i}
        scalars.append(c)
    return True, {"scalars": tuple(scalars)}


def aid_reduce(g: LieAlgebra, info: DistinguishedBasis, d: MatQ) -> tuple[Vec, MatQ, tuple[Rat, ...]]:
    """Subtract an inner derivation so the result kills H and scales each x_i.

    Returns ``(z, Dt, a)`` with ``Dt = D + ad(z)``, ``Dt(H) = 0`` and
    ``Dt(x_i) = a_i x_i``; z is the closed form ``sum c_i x_i``.
    """
    ok, data = aid_precondition(g, info, d)
    if not ok:
        raise ValueError(f"almost-inner precondition fails: {data}")
    l, m = info.l, info.m
    scalars = data["scalars"]
    z = tuple(Fraction(0) for _ in range(l)) + tuple(scalars)
    adz = g.ad(z)
    dt = MatQ(g.dim, g.dim, tuple(a + b for a, b in zip(d.entries, adz.entries)))
    for j in range(l):
        assert not any(dt.at(r, j) for r in range(g.dim)), "reduction failed to kill the torus"
    a: list[Rat] = []
    for i in range(m):
        col = [dt.at(r, l + i) for r in range(g.dim)]
        for r in range(g.dim):
            if r != l + i:
                assert col[r] == 0, "reduced derivation is not diagonal on the root vectors"
        a.append(col[l + i])
    return z, dt, tuple(a)


def aid_membership(g: LieAlgebra, info: DistinguishedBasis, d: MatQ) -> AidVerdict:
    """Exact decision procedure for almost-inner membership on a minimal L."""
    viol = leibniz_violation(g, d)
    if viol is not None:
        return AidVerdict(status="not-derivation", data={"pair": viol})
    ok, data = aid_precondition(g, info, d, check_derivation=False)
    if not ok:
        return AidVerdict(status="not-aid", reason="precondition", data=data)
    z, dt, a = aid_reduce(g, info, d)
    l, m = info.l, info.m
    system = MatQ.from_rows([[info.beta_of_h.at(i, j) for j in range(l)] for i in range(m)])
    h = solve(system, list(a))
    if h is None:
        # the almost-inner condition fails at x = sum_i x_i
        x = tuple(Fraction(0) for _ in range(l)) + tuple(Fraction(1) for _ in range(m))
        return AidVerdict(
            status="not-aid",
            reason="scalar-system",
            data={"system": system, "rhs": a, "fails_at": x, "reduction_z": z},
        )
    witness = tuple(hh - zz for hh, zz in zip(tuple(h) + (Fraction(0),) * m, z))
    assert g.ad(witness) == d, "inner witness does not reproduce the derivation"
    return AidVerdict(status="inner", witness=witness, data={"reduction_z": z, "scalars": a, "torus_part": h})


def aid_falsify_random(
    g: LieAlgebra, d: MatQ, trials: int = 64, seed: int = 2024
) -> Vec | None:
    """Seeded search for x with D(x) outside the column space of ad(x).

    Sound for refuting almost-innerness; exhausting the trials proves nothing.
    """
    rng = random.Random(seed)
    for _ in range(trials):
        x = tuple(Fraction(rng.randint(-3, 3)) for _ in range(g.dim))
        if not any(x):
            continue
        adx = g.ad(x)
        target = d.mul_vec(x)
        base_rank = rref(adx).rank
        aug = MatQ.from_rows([list(adx.row(r)) + [target[r]] for r in range(g.dim)])
        if rref(aug).rank > base_rank:
            return x
    return None


@dataclass(frozen=True)
class AidEqInnCertificate:
    spec: SubalgebraSpec
    dim_l: int
    dim_der: int
    dim_inn: int
    inner_verdicts: tuple[AidVerdict, ...]
    complement_verdicts: tuple[AidVerdict, ...]
    falsified: int
    ok: bool

    def to_json(self) -> dict:
        return {
            "psi": [list(r) for r in self.spec.psi],
            "dim_l": self.dim_l,
            "dim_der": self.dim_der,
            "dim_inn": self.dim_inn,
            "inner_all_inner": all(v.is_inner for v in self.inner_verdicts),
            "complement_all_not_aid": all(v.status == "not-aid" for v in self.complement_verdicts),
            "complement_count": len(self.complement_verdicts),
            "falsified_not_aid": self.falsified,
            "ok": self.ok,
        }


def verify_aid_eq_inn(
    spec: SubalgebraSpec,
    ambient: LieAlgebra | None = None,
    trials: int = 64,
    seed: int = 2024,
) -> AidEqInnCertificate:
    """Certificate that the almost-inner derivations are exactly the inner ones.

    Requires a minimal Q-graded spec.  Every inner basis element must get an
    exact inner witness; every complement direction must come back not almost
    inner, cross-checked by seeded random falsification.
    """
    if not is_closed(spec)[0] or not spans_q(spec)[0]:
        raise ValueError("spec must be closed and Q-spanning")
    if not is_minimal(spec)[0]:
        raise ValueError("the procedure applies to minimal Q-graded subalgebras only")
    if ambient is None:
        ambient = build_semisimple(spec.system)
    g, info = extract_subalgebra(ambient, spec)
    basis = derivation_space(g)
    inner_verdicts = tuple(aid_membership(g, info, m) for m in basis.inn_basis)
    complement_verdicts = tuple(aid_membership(g, info, m) for m in basis.complement_basis)
    falsified = 0
    for m, verdict in zip(basis.complement_basis, complement_verdicts):
        if verdict.status == "not-aid" and aid_falsify_random(g, m, trials, seed) is not None:
            falsified += 1
    ok = all(v.is_inner for v in inner_verdicts) and all(
        v.status == "not-aid" for v in complement_verdicts
    )
    return AidEqInnCertificate(
        spec=spec,
        dim_l=g.dim,
        dim_der=basis.dim_der,
        dim_inn=basis.dim_inn,
        inner_verdicts=inner_verdicts,
        complement_verdicts=complement_verdicts,
        falsified=falsified,
        ok=ok,
    )


def diagonal_map(g: LieAlgebra, info: DistinguishedBasis, scalars) -> MatQ:
    """The map killing H and scaling x_i by scalars[i] (a derivation iff the
    scalars are additive across the closed sums in Psi)."""
    if len(scalars) != info.m:
        raise ValueError("need one scalar per root in Psi")
    rows = [[Fraction(0)] * g.dim for _ in range(g.dim)]
    for i, a in enumerate(scalars):
        rows[info.l + i][info.l + i] = Fraction(a)
    return MatQ.from_rows(rows)


def scalar_derivation_verdict(g: LieAlgebra, info: DistinguishedBasis, scalars) -> dict:
    """Dichotomy certificate for a candidate diagonal map.

    Reports whether the map is a derivation (with a witness pair when not),
    whether the scalar system ``beta_i(z) = a_i`` is solvable over the torus,
    and the combined verdict: it is an almost-inner derivation iff both hold,
    in which case it is inner via the solved z.
    """
    d = diagonal_map(g, info, scalars)
    viol = leibniz_violation(g, d)
    l, m = info.l, info.m
    system = MatQ.from_rows([[info.beta_of_h.at(i, j) for j in range(l)] for i in range(m)])
    z = solve(system, [Fraction(a) for a in scalars])
    feasible = z is not None
    inner = feasible and viol is None
    if inner:
        witness = tuple(z) + (Fraction(0),) * m
        assert g.ad(witness) == d
    else:
        witness = None
    return {
        "is_derivation": viol is None,
        "leibniz_witness": viol,
        "scalar_system_feasible": feasible,
        "witness": witness,
        "almost_inner": inner,  # for diagonal derivations, almost inner iff inner
        "inner": inner,
    }


def diagonal_toral_algebra(beta_rows) -> tuple[LieAlgebra, DistinguishedBasis]:
    """The solvable model ``[h_j, x_i] = beta_i(h_j) x_i`` with abelian span of
    the x_i.  Every minimal Q-graded subalgebra with ``|Psi| = rank`` is of
    this shape; with more weight rows than torus dimensions it realises the
    ``dim [L,L] > dim H`` situation exactly."""
    m = len(beta_rows)
    l = len(beta_rows[0])
    dim = l + m
    structure = {}
    for i in range(m):
        for j in range(l):
            c = Fraction(beta_rows[i][j])
            if c:
                structure[(j, l + i)] = ((l + i, c),)
    labels = tuple(f"h{j + 1}" for j in range(l)) + tuple(f"x{i + 1}" for i in range(m))
    g = LieAlgebra(dim=dim, labels=labels, structure=structure, form=None, root_system=None)
    info = DistinguishedBasis(
        psi=tuple(tuple(int(x) for x in row) for row in beta_rows),  # weights stand in for roots
        torus_ambient=tuple(g.basis_vector(j) for j in range(l)),
        roots_ambient=tuple(g.basis_vector(l + i) for i in range(m)),
        beta_of_h=MatQ.from_rows([[Fraction(x) for x in row] for row in beta_rows]),
        dual_torus_local=None,
        gram=None,
        torus_is_dual=False,
    )
    return g, info
