"""Q-graded subalgebra decisions: closure, lattice span, minimality,
enumeration, and the abelian-derived-algebra certificate.

A subset Psi of the roots designates ``L = H + sum_{beta in Psi} L_beta``.
``L`` is a subalgebra iff Psi is closed under root addition, and Q-graded iff
additionally Psi spans the root lattice over Z (all Smith invariant factors 1
at full rank).  Minimality means no proper subset is simultaneously closed and
spanning; it is decided by exhaustive subset search, which is sound and
complete at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .chevalley import LieAlgebra, SubalgebraSpec, build_semisimple, closure_violation, extract_subalgebra
from .exact import MatQ, MatZ, rref, smith_normal_form
from .rootsys import Root, RootSystem

__all__ = [
    "QGradedCertificate",
    "is_closed",
    "spans_q",
    "is_minimal",
    "enumerate_minimal",
    "verify_metabelian",
    "certify",
    "EnumerationCapExceeded",
]


class EnumerationCapExceeded(ValueError):
    """2^|roots| exceeds the enumeration cap; certify subsets individually."""


@dataclass(frozen=True)
class QGradedCertificate:
    spec: SubalgebraSpec
    closed: bool
    closure_witness: tuple[Root, Root, Root] | None
    spans: bool
    invariant_factors: tuple[int, ...]
    minimal: bool | None
    minimal_counterexample: tuple[Root, ...] | None
    metabelian: bool | None
    metabelian_witness: tuple[Root, Root] | None
    dims: tuple[int, int, int] | None  # (dim H, dim [L,L], dim L)

    def all_positive(self) -> bool:
        return bool(self.closed and self.spans and self.minimal and self.metabelian)

    def to_json(self) -> dict:
        return {
            "psi": [list(r) for r in self.spec.psi],
            "family": self.spec.system.family,
            "rank": self.spec.system.rank,
            "closed": self.closed,
            "closure_witness": [list(r) for r in self.closure_witness] if self.closure_witness else None,
            "spans_q": self.spans,
            "invariant_factors": list(self.invariant_factors),
            "minimal": self.minimal,
            "minimal_counterexample": (
                [list(r) for r in self.minimal_counterexample] if self.minimal_counterexample else None
            ),
            "metabelian": self.metabelian,
            "metabelian_witness": (
                [list(r) for r in self.metabelian_witness] if self.metabelian_witness else None
            ),
            "dims": list(self.dims) if self.dims else None,
        }


def is_closed(spec: SubalgebraSpec) -> tuple[bool, tuple[Root, Root, Root] | None]:
    """True iff Psi is closed under root addition; else a violating triple."""
    w = closure_violation(spec.system, spec.psi)
    return (w is None), w


def spans_q(spec: SubalgebraSpec) -> tuple[bool, tuple[int, ...]]:
    """True iff Psi spans the root lattice over Z, with the invariant factors."""
    l = spec.system.rank
    if not spec.psi:
        return False, ()
    mat = MatZ.from_rows(spec.psi_coordinate_matrix())
    _, d, _ = smith_normal_form(mat)
    factors = tuple(x for x in d.diagonal() if x != 0)
    return (len(factors) == l and all(x == 1 for x in factors)), factors


def is_minimal(spec: SubalgebraSpec) -> tuple[bool, tuple[Root, ...] | None]:
    """Exhaustively check that no proper subset of Psi is closed and spanning.

    Precondition: the spec itself is closed and spanning.
    """
    closed, w = is_closed(spec)
    if not closed:
        raise ValueError(f"Psi is not closed: {w[0]} + {w[1]} = {w[2]} lies outside Psi")
    spanning, _ = spans_q(spec)
    if not spanning:
        raise ValueError("Psi does not span the root lattice")
    rs = spec.system
    psi = spec.psi
    l = rs.rank
    for size in range(l, len(psi)):  # spanning needs at least rank elements
        for subset in combinations(psi, size):
            sub = SubalgebraSpec(rs, subset)
            if is_closed(sub)[0] and spans_q(sub)[0]:
                return False, sub.psi
    return True, None


def enumerate_minimal(rs: RootSystem, cap: int = 1 << 24) -> list[SubalgebraSpec]:
    """All minimal Q-graded subsets, canonically ordered.

    Scans subsets by increasing size; a closed spanning subset is minimal iff
    it contains no previously found closed spanning subset.
    """
    n = len(rs.roots)
    if 1 << n > cap:
        raise EnumerationCapExceeded(
            f"2^{n} subsets exceed the cap {cap}; certify individual subsets instead"
        )
    roots = list(rs.roots)
    idx = {r: i for i, r in enumerate(roots)}
    # addition table over root indices: i + j -> index or None
    add = [[None] * n for _ in range(n)]
    for i, a in enumerate(roots):
        for j, b in enumerate(roots):
            s = tuple(x + y for x, y in zip(a, b))
            if s in idx:
                add[i][j] = idx[s]

    def closed_mask(mask: int, members: tuple[int, ...]) -> bool:
        for i in members:
            row = add[i]
            for j in members:
                t = row[j]
                if t is not None and not (mask >> t) & 1:
                    return False
        return True

    found_spanning: list[int] = []
    minimal: list[SubalgebraSpec] = []
    l = rs.rank
    for size in range(l, n + 1):
        for members in combinations(range(n), size):
            mask = 0
            for i in members:
                mask |= 1 << i
            if not closed_mask(mask, members):
                continue
            spec = SubalgebraSpec(rs, tuple(roots[i] for i in members))
            if not spans_q(spec)[0]:
                continue
            if all((mask & prev) != prev for prev in found_spanning):
                minimal.append(spec)
            found_spanning.append(mask)
    minimal.sort(key=lambda s: (len(s.psi), s.psi))
    return minimal


def derived_algebra_dim(g: LieAlgebra) -> int:
    """dim [L, L] from the structure constants."""
    rows = []
    for (i, j), entry in g.structure.items():
        vec = [0] * g.dim
        for k, c in entry:
            vec[k] = c
        rows.append(vec)
    if not rows:
        return 0
    return rref(MatQ.from_rows(rows)).rank


def verify_metabelian(
    spec: SubalgebraSpec, ambient: LieAlgebra | None = None
) -> QGradedCertificate:
    """Check [L,L] = sum of the root spaces and that it is abelian.

    Precondition: spec closed and spanning.  The certificate records the
    derived-algebra dimensions and, on failure, a nonzero bracket pair.
    """
    closed, cw = is_closed(spec)
    spanning, factors = spans_q(spec)
    if not closed:
        raise ValueError(f"Psi is not closed: {cw[0]} + {cw[1]} = {cw[2]} lies outside Psi")
    if not spanning:
        raise ValueError("Psi does not span the root lattice")
    rs = spec.system
    if ambient is None:
        ambient = build_semisimple(rs)
    sub, _ = extract_subalgebra(ambient, spec)
    l, m = rs.rank, len(spec.psi)
    ddim = derived_algebra_dim(sub)

    witness = None
    for a in range(m):
        for b in range(a + 1, m):
            if any(sub.bracket(sub.basis_vector(l + a), sub.basis_vector(l + b))):
                witness = (spec.psi[a], spec.psi[b])
                break
        if witness:
            break
    abelian = witness is None and ddim == m

    minimal, counter = is_minimal(spec)
    return QGradedCertificate(
        spec=spec,
        closed=True,
        closure_witness=None,
        spans=True,
        invariant_factors=factors,
        minimal=minimal,
        minimal_counterexample=counter,
        metabelian=abelian,
        metabelian_witness=witness,
        dims=(l, ddim, sub.dim),
    )


def certify(spec: SubalgebraSpec, ambient: LieAlgebra | None = None) -> QGradedCertificate:
    """Full certificate: closure, span, minimality, metabelian, dimensions.

    Minimality and the metabelian check are only run once their
    preconditions hold; the corresponding fields stay None otherwise.
    """
    closed, cw = is_closed(spec)
    spanning, factors = spans_q(spec)
    minimal = counter = None
    metabelian = witness = dims = None
    if closed and spanning:
        cert = verify_metabelian(spec, ambient)
        minimal, counter = cert.minimal, cert.minimal_counterexample
        metabelian, witness, dims = cert.metabelian, cert.metabelian_witness, cert.dims
    return QGradedCertificate(
        spec=spec,
        closed=closed,
        closure_witness=cw,
        spans=spanning,
        invariant_factors=factors,
        minimal=minimal,
        minimal_counterexample=counter,
        metabelian=metabelian,
        metabelian_witness=witness,
        dims=dims,
    )
