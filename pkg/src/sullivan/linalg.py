"""Exact linear algebra over the rationals.

Vectors are sparse dicts ``key -> Fraction`` with zero entries never stored.
Keys only need to be hashable and totally ordered (ints or tuples of ints).
Everything here is exact; there is no floating point anywhere in the package.
"""

from __future__ import annotations

from fractions import Fraction
from heapq import heapify, heappop, heappush
from typing import Hashable, Iterable, Sequence

Q = Fraction


class NoSolution:
    """Returned by :func:`solve` when the right-hand side is not in the image."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NoSolution"

    def __bool__(self):
        return False


NO_SOLUTION = NoSolution()


def add_scaled(target: dict, source: dict, c) -> dict:
    """In place ``target += c * source``; returns target."""
    if not c:
        return target
    for k, x in source.items():
        v = target.get(k, 0) + c * x
        if v:
            target[k] = v
        else:
            target.pop(k, None)
    return target


def scaled(v: dict, c) -> dict:
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


class EchelonSpace:
    """Incrementally built subspace kept in semi-echelon form.

    Each stored row has pivot equal to its smallest key, normalized to 1.
    When ``track`` is set, every row remembers how it was obtained from the
    tagged vectors passed to :meth:`add`, so reductions can be expressed as
    combinations of the original inputs.
    """

    def __init__(self, track: bool = True):
        self.track = track
        self.rows: dict = {}
        self.tags: list = []

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self):
        return sorted(self.rows)

    def reduce(self, vec: dict):
        """Return ``(residual, combination)`` with vec = residual + sum(comb[t] * input[t])."""
        v = dict(vec)
        comb: dict = {}
        rows = self.rows
        heap = [k for k in v if k in rows]
        heapify(heap)
        while heap:
            p = heappop(heap)
            c = v.get(p)
            if not c:
                continue
            row, rcomb = rows[p]
            for k, x in row.items():
                nv = v.get(k, 0) - c * x
                if nv:
                    if k not in v and k in rows:
                        heappush(heap, k)
                    v[k] = nv
                else:
                    v.pop(k, None)
            if self.track:
                add_scaled(comb, rcomb, c)
        return v, comb

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)[0]

    def add(self, vec: dict, tag: Hashable = None):
        """Add a vector; returns ``(independent, residual, combination)``.

        If the vector is dependent, ``combination`` expresses it through the
        tags of earlier inputs (a linear relation among the inputs).
        """
        residual, comb = self.reduce(vec)
        if not residual:
            return False, residual, comb
        p = min(residual)
        inv = 1 / Fraction(residual[p])
        row = {k: x * inv for k, x in residual.items()}
        rcomb = {}
        if self.track:
            rcomb = {t: -x * inv for t, x in comb.items()}
            rcomb[tag] = rcomb.get(tag, 0) + inv
            rcomb = {t: x for t, x in rcomb.items() if x}
        self.rows[p] = (row, rcomb)
        self.tags.append(tag)
        return True, residual, comb


class ScalarMatrix:
    """Sparse rational matrix stored as a list of row dicts ``col -> value``."""

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise ValueError("row count mismatch")
        self.rows = []
        for r in rows:
            clean = {}
            for c, x in r.items():
                if not 0 <= c < ncols:
                    raise ValueError(f"column {c} out of range")
                if x:
                    clean[c] = Fraction(x)
            self.rows.append(clean)

    @classmethod
    def from_lists(cls, data: Sequence[Sequence]) -> "ScalarMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        return cls(nrows, ncols, [{j: Fraction(x) for j, x in enumerate(r) if x} for r in data])

    @classmethod
    def identity(cls, n: int) -> "ScalarMatrix":
        return cls(n, n, [{i: Fraction(1)} for i in range(n)])

    def to_lists(self) -> list:
        return [[r.get(j, Fraction(0)) for j in range(self.ncols)] for r in self.rows]

    def columns(self) -> list:
        cols = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def apply(self, x: Sequence) -> list:
        return [sum((v * x[j] for j, v in r.items()), Fraction(0)) for r in self.rows]

    def __eq__(self, other):
        return (
            isinstance(other, ScalarMatrix)
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.rows == other.rows
        )

    def __repr__(self):
        return f"ScalarMatrix({self.to_lists()!r})"


def rref(m: ScalarMatrix):
    """Reduced row echelon form and pivot columns (first nonzero in column order)."""
    rows = [dict(r) for r in m.rows]
    pivots = []
    prow = 0
    for col in range(m.ncols):
        sel = next((i for i in range(prow, len(rows)) if rows[i].get(col)), None)
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        inv = 1 / rows[prow][col]
        rows[prow] = {k: x * inv for k, x in rows[prow].items()}
        for i in range(len(rows)):
            if i != prow and rows[i].get(col):
                add_scaled(rows[i], rows[prow], -rows[i][col])
        pivots.append(col)
        prow += 1
    return ScalarMatrix(m.nrows, m.ncols, rows), pivots


def rank(m: ScalarMatrix) -> int:
    space = EchelonSpace(track=False)
    for r in m.rows:
        space.add(r)
    return len(space)


def kernel_basis(m: ScalarMatrix) -> list:
    """Basis of ``{x : m x = 0}`` as dense lists, one vector per free column."""
    red, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * m.ncols
        v[free] = Fraction(1)
        for r, p in zip(red.rows, pivots):
            v[p] = -r.get(free, Fraction(0))
        basis.append(v)
    return basis


def solve(m: ScalarMatrix, b: Sequence):
    """A particular solution of ``m x = b`` (free variables zero) or ``NO_SOLUTION``."""
    if len(b) != m.nrows:
        raise ValueError("right-hand side has wrong length")
    aug = ScalarMatrix(
        m.nrows, m.ncols + 1,
        [{**r, m.ncols: Fraction(x)} if x else dict(r) for r, x in zip(m.rows, b)],
    )
    red, pivots = rref(aug)
    if pivots and pivots[-1] == m.ncols:
        return NO_SOLUTION
    x = [Fraction(0)] * m.ncols
    for r, p in zip(red.rows, pivots):
        x[p] = r.get(m.ncols, Fraction(0))
    return x


def solve_columns(columns: Iterable[tuple], target: dict):
    """Solve ``sum x_t * col_t = target`` for sparse tagged columns.

    Returns a dict ``tag -> coefficient`` or ``NO_SOLUTION``.
    """
    space = EchelonSpace()
    for tag, col in columns:
        space.add(col, tag)
    residual, comb = space.reduce(target)
    if residual:
        return NO_SOLUTION
    return comb


def column_kernel(columns: Sequence[dict]) -> list:
    """Kernel of the map whose j-th column is ``columns[j]``, as sparse dicts."""
    space = EchelonSpace()
    basis = []
    for j, col in enumerate(columns):
        independent, _, comb = space.add(col, j)
        if not independent:
            v = {t: -x for t, x in comb.items()}
            v[j] = v.get(j, 0) + 1
            basis.append({t: x for t, x in v.items() if x})
    return basis
