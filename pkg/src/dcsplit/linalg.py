"""Exact sparse Gauss-Jordan elimination over the rationals."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from gmpy2 import mpq

SparseRow = dict[int, mpq]

ZERO = mpq(0)
ONE = mpq(1)


def sparse(row: Iterable) -> SparseRow:
    return {j: mpq(v) for j, v in enumerate(row) if v}


class Echelon:
    """Reduced row echelon form that grows one row at a time.

    Column ``ncols`` is reserved for a right-hand side and is never chosen as
    a pivot. With ``track=True`` each stored row remembers which combination
    of inserted rows produced it, which is what infeasibility certificates need.
    """

    def __init__(self, ncols: int, track: bool = False):
        self.ncols = ncols
        self.track = track
        self.pivots: dict[int, SparseRow] = {}
        self.combos: dict[int, SparseRow] = {}
        self._count = 0
        self.conflict: SparseRow | None = None

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: SparseRow, combo: SparseRow | None = None) -> tuple[SparseRow, SparseRow | None]:
        row = dict(row)
        for col in [c for c in row if c in self.pivots]:
            factor = row.get(col)
            if not factor:
                continue
            _axpy(row, -factor, self.pivots[col])
            if combo is not None:
                _axpy(combo, -factor, self.combos[col])
        return row, combo

    def add(self, row: SparseRow) -> bool:
        """Insert ``row``; return True when it raised the rank."""
        index = self._count
        self._count += 1
        combo = {index: ONE} if self.track else None
        row, combo = self.reduce(row, combo)
        candidates = [c for c in row if c < self.ncols]
        if not candidates:
            if row and self.conflict is None:
                # 0 = nonzero: the system is inconsistent
                self.conflict = combo if combo is not None else {}
            return False
        col = min(candidates)
        inv = ONE / row[col]
        row = {c: v * inv for c, v in row.items()}
        if combo is not None:
            combo = {c: v * inv for c, v in combo.items()}
        for pcol, prow in self.pivots.items():
            factor = prow.get(col)
            if factor:
                _axpy(prow, -factor, row)
                if combo is not None:
                    _axpy(self.combos[pcol], -factor, combo)
        self.pivots[col] = row
        if combo is not None:
            self.combos[col] = combo
        return True

    def free_columns(self) -> list[int]:
        return [c for c in range(self.ncols) if c not in self.pivots]

    def nullspace(self) -> list[list[mpq]]:
        basis = []
        for free in self.free_columns():
            v = [ZERO] * self.ncols
            v[free] = ONE
            for pcol, prow in self.pivots.items():
                entry = prow.get(free)
                if entry:
                    v[pcol] = -entry
            basis.append(v)
        return basis

    def particular(self) -> list[mpq]:
        x = [ZERO] * self.ncols
        for pcol, prow in self.pivots.items():
            x[pcol] = prow.get(self.ncols, ZERO)
        return x


def _axpy(target: SparseRow, alpha: mpq, source: SparseRow) -> None:
    for c, v in source.items():
        new = target.get(c, ZERO) + alpha * v
        if new:
            target[c] = new
        else:
            target.pop(c, None)


def rank(rows: Iterable[Sequence]) -> int:
    rows = list(rows)
    if not rows:
        return 0
    ech = Echelon(len(rows[0]))
    for r in rows:
        ech.add(sparse(r))
    return ech.rank


def nullspace(rows: Iterable[Sequence], ncols: int) -> list[list[mpq]]:
    ech = Echelon(ncols)
    for r in rows:
        ech.add(sparse(r))
    return ech.nullspace()


@dataclass
class AffineSolution:
    """Solution set ``{x0 + basis^T z}`` of a linear system, or a certificate.

    When inconsistent, ``certificate`` holds multipliers ``y`` with
    ``y^T A = 0`` and ``y^T b = 1``.
    """

    x0: list[mpq] | None
    basis: list[list[mpq]]
    certificate: list[mpq] | None = None

    @property
    def consistent(self) -> bool:
        return self.certificate is None


def solve_affine(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> AffineSolution:
    ech = Echelon(ncols, track=True)
    for r, b in zip(rows, rhs):
        sr = sparse(r)
        if b:
            sr[ncols] = mpq(b)
        ech.add(sr)
    if ech.conflict is not None:
        y = [ZERO] * len(rows)
        for i, v in ech.conflict.items():
            y[i] = v
        value = sum((yi * mpq(b) for yi, b in zip(y, rhs)), ZERO)
        return AffineSolution(None, [], [yi / value for yi in y])
    return AffineSolution(ech.particular(), ech.nullspace())


def solve_linear(rows: Sequence[Sequence], rhs: Sequence, ncols: int) -> list[mpq] | None:
    sol = solve_affine(rows, rhs, ncols)
    return sol.x0 if sol.consistent else None


def matvec(rows: Sequence[Sequence], x: Sequence) -> list:
    return [sum((a * b for a, b in zip(r, x) if a and b), ZERO) for r in rows]
