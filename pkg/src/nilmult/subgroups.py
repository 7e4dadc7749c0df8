"""Subgroups of a free nilpotent group as canonical induced sequences.

A subgroup is stored as an echelonized generating sequence: rows with
strictly increasing leading basis index, positive leading exponent, and
entries above a leader Hermite-reduced into [0, leader).  Because the
basis order refines the weight grading, the leading coordinate of a
product u*v with v supported at or beyond index k satisfies
(u*v)[m] = u[m] + v[m] for m <= k; that additivity is what makes integer
row reduction (sifting) valid inside a nonabelian group.

A sequence is kept closed: the commutator of any two rows sifts to the
identity.  That certificate makes the set of ordered row-power products
a subgroup, so membership testing by sifting is exact.
"""

from __future__ import annotations

from .abelian import AbelianInvariants, smith_invariants
from .engine import FreeNilpotentGroup, GroupElement
from .errors import PreconditionError


class InducedSequence:
    """Canonical echelonized generating sequence for a subgroup of Q."""

    __slots__ = ("group", "rows")

    def __init__(self, group: FreeNilpotentGroup, rows: tuple):
        self.group = group
        self.rows = rows

    # -- structure ---------------------------------------------------------

    @property
    def leaders(self) -> tuple:
        return tuple(_lead(v) for v in self.rows)

    @property
    def leader_exponents(self) -> tuple:
        return tuple(v[_lead(v)] for v in self.rows)

    @property
    def is_trivial(self) -> bool:
        return not self.rows

    def elements(self) -> list[GroupElement]:
        return [GroupElement(self.group, v) for v in self.rows]

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InducedSequence):
            return NotImplemented
        return self.group.basis == other.group.basis and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.group.d, self.group.L, self.rows))

    def __repr__(self) -> str:
        return f"InducedSequence({len(self.rows)} rows, d={self.group.d}, L={self.group.L})"

    def dump(self) -> str:
        """One row per line in word syntax (debug aid)."""
        return "\n".join(repr(e) for e in self.elements())

    # -- membership ----------------------------------------------------------

    def sift(self, vec: tuple) -> tuple:
        """Residue of vec after clearing every reachable leader."""
        group = self.group
        table = {_lead(v): v for v in self.rows}
        while True:
            k = _lead(vec)
            if k is None:
                return vec
            row = table.get(k)
            if row is None:
                return vec
            q = vec[k] // row[k]
            if q == 0:
                return vec
            vec = group._mul(group._pow(row, -q), vec)

    def coordinates(self, vec: tuple) -> list[int] | None:
        """Exponents e with vec = prod rows[i]^e[i] (ascending), or None.

        Replaying the certificate reproduces vec exactly, not just up to
        higher-weight error.
        """
        group = self.group
        index_of = {_lead(v): i for i, v in enumerate(self.rows)}
        coords = [0] * len(self.rows)
        while True:
            k = _lead(vec)
            if k is None:
                return coords
            i = index_of.get(k)
            if i is None:
                return None
            row = self.rows[i]
            q = vec[k] // row[k]
            if q == 0:
                return None
            coords[i] = q
            vec = group._mul(group._pow(row, -q), vec)


def _lead(vec: tuple) -> int | None:
    for k, e in enumerate(vec):
        if e:
            return k
    return None


def _min_weight(group: FreeNilpotentGroup, vec: tuple) -> int:
    k = _lead(vec)
    return group.L + 1 if k is None else group.basis.weight(k)


# -- construction ------------------------------------------------------------


def _add(group: FreeNilpotentGroup, table: dict, vec: tuple) -> bool:
    """Sift vec into the echelon table, Euclid-swapping at matched leaders."""
    changed = False
    while True:
        k = _lead(vec)
        if k is None:
            return changed
        row = table.get(k)
        if row is None:
            if vec[k] < 0:
                vec = group._inv(vec)
            table[k] = vec
            return True
        q = vec[k] // row[k]
        if q:
            vec = group._mul(group._pow(row, -q), vec)
        if vec[k] == 0:
            continue
        # positive remainder below the current leader: swap and recycle
        table[k] = vec
        changed = True
        vec = row


def _close_pass(group: FreeNilpotentGroup, table: dict, conjugation: bool) -> bool:
    """One closure sweep: pairwise row commutators, plus ambient conjugates
    when building a normal closure.  Returns whether the table changed."""
    L = group.L
    zero = group._zero
    letters = group._letters
    gens = [((k, s),) for k in range(group.d) for s in (1, -1)]
    changed = False
    rows = [table[k] for k in sorted(table)]
    weights = [group.basis.weight(_lead(v)) for v in rows]
    for i, vi in enumerate(rows):
        li = letters(vi)
        for j in range(i + 1, len(rows)):
            if weights[i] + weights[j] > L:
                break
            c = group._comm(li, letters(rows[j]))
            if c != zero and _add(group, table, c):
                changed = True
    if conjugation:
        for i, vi in enumerate(rows):
            if weights[i] + 1 > L:
                continue
            li = letters(vi)
            for g in gens:
                c = group._comm(li, g)
                if c != zero and _add(group, table, c):
                    changed = True
    return changed


def _reduce_table(group: FreeNilpotentGroup, table: dict) -> None:
    """Hermite-reduce every entry above a deeper leader into [0, leader).

    Keeping rows reduced at all times bounds the integers handled during
    closure; unreduced entries feed back into collection corrections and
    grow without bound otherwise.
    """
    leaders = sorted(table)
    for pos in range(len(leaders) - 1, -1, -1):
        k = leaders[pos]
        v = table[k]
        for kj in leaders[pos + 1 :]:
            a = table[kj][kj]
            q = v[kj] // a
            if q:
                v = group._mul(v, group._pow(table[kj], -q))
        table[k] = v


def _build(
    group: FreeNilpotentGroup, vectors, conjugation: bool
) -> InducedSequence:
    table: dict = {}
    for vec in vectors:
        _add(group, table, vec)
    _reduce_table(group, table)
    while _close_pass(group, table, conjugation):
        _reduce_table(group, table)
    return InducedSequence(group, tuple(table[k] for k in sorted(table)))


def _vectors(group: FreeNilpotentGroup, generators) -> list:
    vecs = []
    for g in generators:
        if isinstance(g, GroupElement):
            if g.group is not group and g.group.basis != group.basis:
                raise ValueError("generator from a different basis")
            vecs.append(g.vec)
        else:
            vecs.append(tuple(g))
    return vecs


def subgroup(group: FreeNilpotentGroup, generators) -> InducedSequence:
    """Induced sequence of the subgroup generated by the given elements."""
    return _build(group, _vectors(group, generators), conjugation=False)


def normal_closure(group: FreeNilpotentGroup, generators) -> InducedSequence:
    """Smallest subgroup containing the generators and stable under
    conjugation by the ambient generators."""
    return _build(group, _vectors(group, generators), conjugation=True)


def whole_group(group: FreeNilpotentGroup) -> InducedSequence:
    rows = tuple(group.basic(k).vec for k in range(group.size))
    return InducedSequence(group, rows)


def gamma_tail(group: FreeNilpotentGroup, j: int) -> InducedSequence:
    """gamma_j(Q): generated by all basis elements of weight >= j."""
    if j < 1:
        raise ValueError(f"gamma index must be >= 1, got {j}")
    rows = tuple(
        group.basic(k).vec
        for k in range(group.size)
        if group.basis.weight(k) >= j
    )
    return InducedSequence(group, rows)


def intersect_with_tail(H: InducedSequence, j: int) -> InducedSequence:
    """H intersected with gamma_j(Q).

    Valid row filter: an ordered product of rows has its leading
    coordinate at the first row used, so it lies in the tail iff every
    row used does.
    """
    group = H.group
    rows = tuple(v for v in H.rows if _min_weight(group, v) >= j)
    return InducedSequence(group, rows)


def mutual_commutator(H: InducedSequence, K: InducedSequence) -> InducedSequence:
    """[H, K] for H, K normal in Q: the normal closure of the pairwise
    row commutators."""
    group = H.group
    L = group.L
    zero = group._zero
    gens = []
    for vh in H.rows:
        wh = _min_weight(group, vh)
        for vk in K.rows:
            if wh + _min_weight(group, vk) > L:
                continue
            c = group._comm(group._letters(vh), group._letters(vk))
            if c != zero:
                gens.append(c)
    return _build(group, gens, conjugation=True)


def commutator_with_ambient(H: InducedSequence) -> InducedSequence:
    """[H, Q] for H normal: normal closure of row commutators with the
    ambient generators (which generate Q)."""
    group = H.group
    zero = group._zero
    gens = []
    for v in H.rows:
        if _min_weight(group, v) + 1 > group.L:
            continue
        lv = group._letters(v)
        for k in range(group.d):
            c = group._comm(lv, ((k, 1),))
            if c != zero:
                gens.append(c)
    return _build(group, gens, conjugation=True)


def iterated_commutator_with_ambient(H: InducedSequence, c: int) -> InducedSequence:
    """[H, Q, ..., Q] with c ambient factors, left-normed."""
    if c < 0:
        raise ValueError(f"iteration count must be >= 0, got {c}")
    cur = H
    for _ in range(c):
        cur = commutator_with_ambient(cur)
    return cur


def product(H: InducedSequence, K: InducedSequence) -> InducedSequence:
    """HK, valid as a subgroup when at least one factor is normal in Q."""
    return _build(H.group, H.rows + K.rows, conjugation=False)


def equal(H: InducedSequence, K: InducedSequence) -> bool:
    return H == K


def contains(H: InducedSequence, K: InducedSequence) -> bool:
    return all(H.coordinates(v) is not None for v in K.rows)


def membership(g: GroupElement, H: InducedSequence):
    """(True, certificate) if g in H else (False, None); the certificate
    lists exponents over H's rows whose ordered product replays g."""
    coords = H.coordinates(g.vec)
    return (coords is not None), coords


def index_in_ambient(H: InducedSequence) -> int | None:
    """Index [Q : H], or None when infinite."""
    if len(H.rows) < H.group.size:
        return None
    index = 1
    for v in H.rows:
        index *= v[_lead(v)]
    return index


def verify_normal(H: InducedSequence) -> bool:
    group = H.group
    for v in H.rows:
        if _min_weight(group, v) + 1 > group.L:
            continue
        lv = group._letters(v)
        for k in range(group.d):
            for s in (1, -1):
                c = group._comm(lv, ((k, s),))
                if _lead(H.sift(c)) is not None:
                    return False
    return True


def quotient_invariants(H: InducedSequence, K: InducedSequence) -> AbelianInvariants:
    """Abelian invariants of H/K.

    Requires K <= H and [H,H] <= K (both checked).  H/K is then the
    abelian group on H's rows subject to the relations given by K's rows
    and by the pairwise row commutators of H, all written in sifting
    coordinates over H.
    """
    group = H.group
    relations = []
    for v in K.rows:
        coords = H.coordinates(v)
        if coords is None:
            raise PreconditionError("quotient_invariants: K is not contained in H")
        relations.append(coords)
    rows = H.rows
    weights = [_min_weight(group, v) for v in rows]
    for i in range(len(rows)):
        li = group._letters(rows[i])
        for j in range(i + 1, len(rows)):
            if weights[i] + weights[j] > group.L:
                break
            c = group._comm(li, group._letters(rows[j]))
            if _lead(c) is None:
                continue
            if _lead(K.sift(c)) is not None:
                raise PreconditionError(
                    "quotient_invariants: [H,H] is not contained in K"
                )
            coords = H.coordinates(c)
            assert coords is not None, "commutator of rows escaped H"
            relations.append(coords)
    return smith_invariants(relations, len(rows))
