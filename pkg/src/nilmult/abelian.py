"""Exact Smith normal form and finite abelian group bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


@dataclass(frozen=True)
class AbelianInvariants:
    """Invariant factors d_1 | d_2 | ... | d_r (each >= 2) plus free rank."""

    torsion: tuple
    free_rank: int = 0

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"not a divisor chain: {self.torsion}")
        if any(t < 2 for t in self.torsion):
            raise ValueError(f"torsion entries must be >= 2: {self.torsion}")
        if self.free_rank < 0:
            raise ValueError("free rank must be >= 0")

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def order(self) -> int | None:
        """Group order; None when infinite (positive free rank)."""
        if self.free_rank:
            return None
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def __str__(self) -> str:
        if self.is_trivial:
            return "trivial"
        parts = [f"Z{t}" for t in self.torsion]
        parts.extend("Z" for _ in range(self.free_rank))
        return " + ".join(parts)

    def to_json(self) -> list[str]:
        """Invariant factors as strings; free factors rendered as "0"."""
        return [str(t) for t in self.torsion] + ["0"] * self.free_rank

    @classmethod
    def from_json(cls, data) -> "AbelianInvariants":
        torsion = tuple(int(s) for s in data if int(s) != 0)
        free = sum(1 for s in data if int(s) == 0)
        return cls(torsion, free)


def smith_diagonal(matrix: list) -> list:
    """Nonnegative SNF diagonal d_1 | d_2 | ... of an integer matrix.

    Gcd-driven elimination with the minimal nonzero |entry| as pivot;
    exact arithmetic throughout.
    """
    m = [list(row) for row in matrix]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if rows and any(len(row) != cols for row in m):
        raise ValueError("matrix is not rectangular")
    diag = []
    top = 0
    while top < rows and top < cols:
        pivot = None
        best = None
        for i in range(top, rows):
            for j in range(top, cols):
                v = abs(m[i][j])
                if v and (best is None or v < best):
                    best = v
                    pivot = (i, j)
        if pivot is None:
            break
        pi, pj = pivot
        m[top], m[pi] = m[pi], m[top]
        for row in m:
            row[top], row[pj] = row[pj], row[top]
        while True:
            # clear the pivot column
            reduced = False
            for i in range(top + 1, rows):
                if m[i][top]:
                    q = m[i][top] // m[top][top]
                    if q:
                        m[i] = [a - q * b for a, b in zip(m[i], m[top])]
                    if m[i][top]:
                        m[top], m[i] = m[i], m[top]
                        reduced = True
            if reduced:
                continue
            # clear the pivot row
            for j in range(top + 1, cols):
                if m[top][j]:
                    q = m[top][j] // m[top][top]
                    if q:
                        for row in m:
                            row[j] -= q * row[top]
                    if m[top][j]:
                        for row in m:
                            row[top], row[j] = row[j], row[top]
                        reduced = True
                        break
            if reduced:
                continue
            break
        d = abs(m[top][top])
        # enforce divisibility: fold in any entry the pivot does not divide
        offender = None
        for i in range(top + 1, rows):
            for j in range(top + 1, cols):
                if m[i][j] % d:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            m[top] = [a + b for a, b in zip(m[top], m[offender])]
            continue
        diag.append(d)
        top += 1
    return diag


def smith_invariants(matrix: list, n_generators: int) -> AbelianInvariants:
    """Invariants of the abelian group on n_generators generators modulo
    the relations given by the matrix rows."""
    if n_generators < 0:
        raise ValueError("generator count must be >= 0")
    matrix = [row for row in matrix if any(row)]
    if matrix and any(len(row) != n_generators for row in matrix):
        raise ValueError("relation rows must have one entry per generator")
    diag = smith_diagonal(matrix) if matrix else []
    torsion = tuple(d for d in diag if d > 1)
    free = n_generators - len(diag)
    return AbelianInvariants(torsion, free)


def direct_sum(a: AbelianInvariants, b: AbelianInvariants) -> AbelianInvariants:
    """Invariants of the direct sum, renormalized to a divisor chain."""
    entries = list(a.torsion) + list(b.torsion)
    matrix = [
        [entries[i] if i == j else 0 for j in range(len(entries))]
        for i in range(len(entries))
    ]
    merged = smith_invariants(matrix, len(entries))
    return AbelianInvariants(merged.torsion, a.free_rank + b.free_rank)


def quotient_dominates(g: AbelianInvariants, q: AbelianInvariants) -> bool:
    """Whether q can be a quotient of g.

    Criterion for finitely generated abelian groups: align both invariant
    chains from the largest factor (free factors count as 0, the most
    divisible entry) and require componentwise divisibility.
    """
    g_chain = list(g.torsion) + [0] * g.free_rank
    q_chain = list(q.torsion) + [0] * q.free_rank
    if len(q_chain) > len(g_chain):
        return False
    for qv, gv in zip(reversed(q_chain), reversed(g_chain)):
        if qv == 0:
            if gv != 0:
                return False
        elif gv % qv:
            return False
    return True


def order(a: AbelianInvariants) -> int | None:
    return a.order()
