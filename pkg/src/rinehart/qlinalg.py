"""Exact linear algebra over the rationals.

Everything here is deterministic: row reduction walks columns left to
right, so reduced row echelon forms (and hence kernels, solutions and
coset representatives) are canonical for a given input.  Coefficients
are `fractions.Fraction` throughout; no floats ever appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Q = Fraction

# A dense vector is a tuple of Fractions; internally rows are sparse
# dicts {column: value} with no stored zeros.


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class QMatrix:
    """Sparse rational matrix with explicit shape.

    Entries live in a dict {(i, j): Fraction}; zeros are never stored.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[dict] = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], Fraction] = {}
        if entries:
            for (i, j), v in entries.items():
                self[i, j] = v

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "QMatrix":
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        m = cls(nrows, ncols)
        for i, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                m[i, j] = v
        return m

    def __getitem__(self, ij) -> Fraction:
        return self.entries.get(ij, Q(0))

    def __setitem__(self, ij, value) -> None:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        v = _to_fraction(value)
        if v == 0:
            self.entries.pop(ij, None)
        else:
            self.entries[ij] = v

    def __eq__(self, other) -> bool:
        return (isinstance(other, QMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "QMatrix":
        t = QMatrix(self.cols, self.rows)
        for (i, j), v in self.entries.items():
            t.entries[(j, i)] = v
        return t

    def mul_vector(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        vv = [_to_fraction(x) for x in v]
        acc = [Q(0)] * self.rows
        for (i, j), a in self.entries.items():
            if vv[j]:
                acc[i] += a * vv[j]
        return tuple(acc)

    def is_zero(self) -> bool:
        return not self.entries

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _rref_rows(rows: list[dict[int, Fraction]], ncols: int,
               col_order: Optional[Sequence[int]] = None):
    """Reduced row echelon form of sparse rows.

    Columns are eliminated in `col_order` (default 0..ncols-1); within a
    column the pivot row is the one with the largest |numerator| to keep
    fractions small.  The result is the unique RREF for that column
    order, so pivot-row choice cannot affect the output.

    Returns (reduced_rows, pivots) where pivots is a list of
    (column, row_index) in elimination order.
    """
    work = [dict(r) for r in rows]
    order = list(col_order) if col_order is not None else list(range(ncols))
    pivots: list[tuple[int, int]] = []
    used: set[int] = set()
    for col in order:
        best = -1
        best_mag = None
        for i, r in enumerate(work):
            if i in used or col not in r:
                continue
            mag = abs(r[col].numerator)
            if best_mag is None or mag > best_mag:
                best, best_mag = i, mag
        if best < 0:
            continue
        used.add(best)
        pivots.append((col, best))
        prow = work[best]
        inv = 1 / prow[col]
        if inv != 1:
            for j in list(prow):
                prow[j] *= inv
        for i, r in enumerate(work):
            if i == best or col not in r:
                continue
            factor = r[col]
            for j, v in prow.items():
                nv = r.get(j, Q(0)) - factor * v
                if nv == 0:
                    r.pop(j, None)
                else:
                    r[j] = nv
    return work, pivots


def _sorted_echelon(rows: list[dict[int, Fraction]], ncols: int):
    """RREF rows sorted by pivot column, zero rows dropped."""
    work, pivots = _rref_rows(rows, ncols)
    out = [(col, work[i]) for col, i in pivots]
    out.sort(key=lambda t: t[0])
    return [r for _, r in out]


def _densify(row: dict[int, Fraction], ncols: int) -> tuple[Fraction, ...]:
    return tuple(row.get(j, Q(0)) for j in range(ncols))


def rank(m: QMatrix) -> int:
    _, pivots = _rref_rows(m.row_dicts(), m.cols)
    return len(pivots)


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n, stored with its canonical RREF basis."""

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise ValueError("wrong ambient dimension")
            rows.append({j: _to_fraction(x) for j, x in enumerate(v) if _to_fraction(x) != 0})
        ech = _sorted_echelon(rows, ambient_dim)
        return cls(ambient_dim, tuple(_densify(r, ambient_dim) for r in ech))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        row = {j: _to_fraction(x) for j, x in enumerate(v) if _to_fraction(x) != 0}
        r = _reduce_against(row, self._basis_rows())
        return not r

    def _basis_rows(self) -> list[dict[int, Fraction]]:
        return [{j: x for j, x in enumerate(b) if x != 0} for b in self.basis]

    def verify(self) -> bool:
        m = QMatrix.from_rows(self.basis) if self.basis else QMatrix(0, self.ambient_dim)
        return rank(m) == len(self.basis)


def _reduce_against(row: dict[int, Fraction], echelon: list[dict[int, Fraction]]):
    """Subtract multiples of echelon rows (pivot = first nonzero) from row."""
    r = dict(row)
    for b in echelon:
        if not b:
            continue
        piv = min(b)
        c = r.get(piv)
        if c:
            for j, v in b.items():
                nv = r.get(j, Q(0)) - c * v
                if nv == 0:
                    r.pop(j, None)
                else:
                    r[j] = nv
    return r


def kernel_basis(m: QMatrix) -> Subspace:
    """Canonical basis of {v : m v = 0}.

    Each free column yields one generator: 1 in the free slot, minus
    the pivot-column coefficients elsewhere (the standard RREF kernel).
    """
    work, pivots = _rref_rows(m.row_dicts(), m.cols)
    pivot_cols = {col: i for col, i in pivots}
    free_cols = [j for j in range(m.cols) if j not in pivot_cols]
    gens = []
    for f in free_cols:
        v = [Q(0)] * m.cols
        v[f] = Q(1)
        for col, i in pivot_cols.items():
            c = work[i].get(f)
            if c:
                v[col] = -c
        gens.append(tuple(v))
    return Subspace.from_vectors(gens, m.cols)


def solve_linear(m: QMatrix, b: Sequence) -> Optional[tuple[Fraction, ...]]:
    """Canonical particular solution of m x = b, or None if inconsistent.

    The solution comes from the RREF of [m | b] with all free variables
    set to zero, so equal inputs always give the identical tuple.
    """
    if len(b) != m.rows:
        raise ValueError("shape mismatch")
    rows = m.row_dicts()
    for i, x in enumerate(b):
        v = _to_fraction(x)
        if v != 0:
            rows[i][m.cols] = v
    work, pivots = _rref_rows(rows, m.cols + 1, col_order=range(m.cols))
    sol = [Q(0)] * m.cols
    for col, i in pivots:
        sol[col] = work[i].get(m.cols, Q(0))
    # rows with support only in the b column witness inconsistency
    piv_rows = {i for _, i in pivots}
    for i, r in enumerate(work):
        if i not in piv_rows and r.get(m.cols):
            return None
    return tuple(sol)


class ContainmentError(ValueError):
    """Raised when the alleged subspace is not contained in the ambient one."""


def subquotient_dim(z: Subspace, b: Subspace):
    """Dimension and canonical representatives of z / b.

    Requires b <= z (checked).  Representatives are the RREF basis of z
    reduced modulo b's RREF basis, re-echelonized; they lie in z, their
    cosets are a basis of the quotient, and they depend only on the two
    subspaces.
    """
    if z.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    for v in b.basis:
        if not z.contains(v):
            raise ContainmentError(f"vector {v} not in the ambient subspace")
    b_rows = b._basis_rows()
    reduced = []
    for v in z.basis:
        row = {j: x for j, x in enumerate(v) if x != 0}
        r = _reduce_against(row, b_rows)
        if r:
            reduced.append(r)
    ech = _sorted_echelon(reduced, z.ambient_dim)
    reps = [_densify(r, z.ambient_dim) for r in ech]
    return len(reps), reps


def sum_subspaces(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return Subspace.from_vectors(list(a.basis) + list(b.basis), a.ambient_dim)


def image_basis(m: QMatrix) -> Subspace:
    """Canonical basis of the column space, as vectors in Q^rows."""
    return Subspace.from_vectors(
        [_densify(r, m.rows) for r in m.transpose().row_dicts()], m.rows)


def restrict_to_coordinates(space: Subspace, included: Sequence[int]) -> Subspace:
    """Intersection of `space` with the span of the given coordinates.

    Eliminating the excluded coordinates first puts every intersection
    vector into the echelon rows supported purely on `included`.
    """
    inc = set(included)
    excluded = [j for j in range(space.ambient_dim) if j not in inc]
    order = excluded + sorted(inc)
    rows = space._basis_rows()
    work, pivots = _rref_rows(rows, space.ambient_dim, col_order=order)
    keep = []
    for col, i in pivots:
        if col in inc and all(j in inc for j in work[i]):
            keep.append(_densify(work[i], space.ambient_dim))
    return Subspace.from_vectors(keep, space.ambient_dim)
