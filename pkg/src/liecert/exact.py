"""Exact rational and integer linear algebra.

Everything runs over arbitrary-precision integers and ``fractions.Fraction``;
no floating point anywhere.  The routines fix deterministic conventions
(pivot choice, free variables zeroed in pivot order, sign normalisation in
the Smith form) so that downstream certificates are reproducible
byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Rat = Fraction

__all__ = [
    "Rat",
    "MatQ",
    "MatZ",
    "RrefResult",
    "rref",
    "kernel_basis",
    "solve",
    "solve_sparse",
    "smith_normal_form",
    "rat_to_str",
    "rat_from_str",
]


def rat_to_str(x: Rat | int) -> str:
    """Serialize a rational as ``"p"`` or ``"p/q"`` in lowest terms."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_from_str(s: str) -> Rat:
    # Fraction normalises to lowest terms with positive denominator.
    return Fraction(s)


def _as_rat_tuple(values: Sequence[Rat | int]) -> tuple[Rat, ...]:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class MatQ:
    """Dense rational matrix, row-major, immutable."""

    rows: int
    cols: int
    entries: tuple[Rat, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match rows*cols")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[Rat | int]]) -> "MatQ":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat: list[Rat] = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(Fraction(v) for v in row)
        return MatQ(r, c, tuple(flat))

    @staticmethod
    def identity(n: int) -> "MatQ":
        return MatQ(n, n, tuple(Fraction(1 if i == j else 0) for i in range(n) for j in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "MatQ":
        return MatQ(rows, cols, (Fraction(0),) * (rows * cols))

    def at(self, i: int, j: int) -> Rat:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Rat, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[Rat, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Rat]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "MatQ":
        return MatQ(self.cols, self.rows, tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows)))

    def mul(self, other: "MatQ") -> "MatQ":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out: list[Rat] = []
        orows = other.to_rows()
        for i in range(self.rows):
            ri = self.row(i)
            acc = [Fraction(0)] * other.cols
            for k, a in enumerate(ri):
                if a:
                    rk = orows[k]
                    for j in range(other.cols):
                        if rk[j]:
                            acc[j] += a * rk[j]
            out.extend(acc)
        return MatQ(self.rows, other.cols, tuple(out))

    def mul_vec(self, v: Sequence[Rat | int]) -> tuple[Rat, ...]:
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        vv = _as_rat_tuple(v)
        return tuple(sum((a * b for a, b in zip(self.row(i), vv) if a and b), Fraction(0)) for i in range(self.rows))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.at(i, j) == self.at(j, i) for i in range(self.rows) for j in range(i)
        )

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [rat_to_str(e) for e in self.entries]}

    @staticmethod
    def from_json(obj: dict) -> "MatQ":
        return MatQ(int(obj["rows"]), int(obj["cols"]), tuple(rat_from_str(e) for e in obj["entries"]))


@dataclass(frozen=True)
class MatZ:
    """Dense integer matrix, row-major, immutable."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match rows*cols")
        if not all(isinstance(e, int) for e in self.entries):
            raise ValueError("MatZ entries must be ints")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "MatZ":
        r = len(rows)
        c = len(rows[0]) if r else 0
        flat: list[int] = []
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
            flat.extend(int(v) for v in row)
        return MatZ(r, c, tuple(flat))

    @staticmethod
    def identity(n: int) -> "MatZ":
        return MatZ(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols : (i + 1) * self.cols]) for i in range(self.rows)]

    def mul(self, other: "MatZ") -> "MatZ":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        out = [
            [sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
            for i in range(self.rows)
        ]
        return MatZ.from_rows(out)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.at(i, i) for i in range(min(self.rows, self.cols)))

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [str(e) for e in self.entries]}

    @staticmethod
    def from_json(obj: dict) -> "MatZ":
        return MatZ(int(obj["rows"]), int(obj["cols"]), tuple(int(e) for e in obj["entries"]))


@dataclass(frozen=True)
class RrefResult:
    reduced: MatQ
    rank: int
    pivots: tuple[int, ...]


def rref(m: MatQ) -> RrefResult:
    """Unique reduced row-echelon form, with rank and pivot columns.

    Pivot selection is deterministic: leftmost column, topmost nonzero row.
    """
    rows = m.to_rows()
    nr, nc = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        pr = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [y - f * x for x, y in zip(rows[r], rows[i])]
        pivots.append(c)
        r += 1
    return RrefResult(MatQ.from_rows(rows) if nr else m, r, tuple(pivots))


def kernel_basis(m: MatQ) -> list[tuple[Rat, ...]]:
    """Basis of the right null space, one vector per free column, ascending."""
    res = rref(m)
    pivset = set(res.pivots)
    free = [c for c in range(m.cols) if c not in pivset]
    basis: list[tuple[Rat, ...]] = []
    red = res.reduced
    for fc in free:
        v = [Fraction(0)] * m.cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(res.pivots):
            v[pc] = -red.at(r, fc)
        basis.append(tuple(v))
    return basis


def solve(m: MatQ, b: Sequence[Rat | int]) -> tuple[Rat, ...] | None:
    """One exact solution of ``m x = b``, or None when inconsistent.

    Deterministic: free variables are set to zero, so repeated runs (and
    reorderings of untouched data) give the identical witness vector.
    """
    if len(b) != m.rows:
        raise ValueError("right-hand side length mismatch")
    bb = _as_rat_tuple(b)
    aug = MatQ.from_rows([list(m.row(i)) + [bb[i]] for i in range(m.rows)]) if m.rows else MatQ.zeros(0, m.cols + 1)
    res = rref(aug)
    if m.cols in res.pivots:
        return None
    x = [Fraction(0)] * m.cols
    red = res.reduced
    for r, pc in enumerate(res.pivots):
        x[pc] = red.at(r, m.cols)
    return tuple(x)


def solve_sparse(rows: list[dict[int, Rat]], rhs: Sequence[Rat | int], ncols: int) -> tuple[Rat, ...] | None:
    """Sparse companion to :func:`solve` for systems with few entries per row.

    Deterministic (fixed elimination order, non-pivot unknowns zeroed); the
    witness it returns may differ from the dense solver's, but both satisfy
    the system exactly.
    """
    pivots: dict[int, tuple[dict[int, Rat], Rat]] = {}
    for row, b in zip(rows, rhs):
        row = {c: Fraction(v) for c, v in row.items() if v}
        b = Fraction(b)
        while row:
            c = min(row)
            if c in pivots:
                prow, pb = pivots[c]
                f = row.pop(c)
                for cc, v in prow.items():
                    if cc == c:
                        continue
                    nv = row.get(cc, Fraction(0)) - f * v
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
                b -= f * pb
            else:
                f = row[c]
                prow = {cc: v / f for cc, v in row.items()}
                pivots[c] = (prow, b / f)
                row = {}
                b = Fraction(0)
        if b != 0:
            return None
    x = [Fraction(0)] * ncols
    for c in sorted(pivots, reverse=True):
        prow, pb = pivots[c]
        acc = pb
        for cc, v in prow.items():
            if cc != c:
                acc -= v * x[cc]
        x[c] = acc
    return tuple(x)


def _snf_min_entry(rows: list[list[int]], t: int, nr: int, nc: int) -> tuple[int, int] | None:
    best = None
    for i in range(t, nr):
        for j in range(t, nc):
            v = rows[i][j]
            if v != 0 and (best is None or abs(v) < abs(rows[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(a: MatZ) -> tuple[MatZ, MatZ, MatZ]:
    """Smith normal form ``u * a * v = d`` with unimodular ``u``, ``v``.

    ``d`` is diagonal with nonnegative entries and ``d_i | d_{i+1}``.
    """
    nr, nc = a.rows, a.cols
    m = a.to_rows()
    u = MatZ.identity(nr).to_rows()
    v = MatZ.identity(nc).to_rows()

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        m[dst] = [x + k * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for row in m:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    t = 0
    while t < min(nr, nc):
        pos = _snf_min_entry(m, t, nr, nc)
        if pos is None:
            break
        while True:
            pos = _snf_min_entry(m, t, nr, nc)
            i, j = pos
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            pivot = m[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if m[i][t] != 0:
                    q = m[i][t] // pivot
                    add_row(i, t, -q)
                    if m[i][t] != 0:
                        dirty = True
            for j in range(t + 1, nc):
                if m[t][j] != 0:
                    q = m[t][j] // pivot
                    add_col(j, t, -q)
                    if m[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            # pivot must divide every remaining entry; if not, fold the
            # offending row in and restart the reduction of this corner
            offender = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if m[i][j] % pivot != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    um, dm, vm = MatZ.from_rows(u), MatZ.from_rows(m), MatZ.from_rows(v)
    assert um.mul(a).mul(vm).entries == dm.entries
    return um, dm, vm
