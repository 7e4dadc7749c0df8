"""Truncated free associative algebra over Z (internal).

The free group on d letters maps into the units of Z<X1..Xd>/(degree > L)
via x_k -> 1 + X_k.  By Magnus' theorem the kernel of the induced map on
the free group is exactly gamma_{L+1}, so this algebra is a faithful,
trivially-associative model of the free nilpotent group of class L.  The
collection engine uses it in one place only: to compute, once per basis
pair, the exact normal form of a commutator of two basic commutators.

A polynomial is stored as a list of dicts indexed by degree 0..L; keys are
words over the alphabet packed as plain base-d integers (the degree fixes
the word length), values are nonzero Python ints.
"""

from __future__ import annotations

from fractions import Fraction

Poly = list  # list[dict[int, int]], one dict per degree


class TruncatedAlgebra:
    """Arithmetic in Z<X1..Xd> truncated beyond total degree L."""

    def __init__(self, d: int, L: int):
        self.d = d
        self.L = L
        self._powers = [d ** k for k in range(L + 1)]

    def one(self) -> Poly:
        p: Poly = [dict() for _ in range(self.L + 1)]
        p[0][0] = 1
        return p

    def generator(self, k: int) -> Poly:
        """The image 1 + X_k of generator k (0-based)."""
        p = self.one()
        p[1][k] = 1
        return p

    def is_one(self, p: Poly) -> bool:
        if p[0] != {0: 1}:
            return False
        return all(not p[w] for w in range(1, self.L + 1))

    def equal(self, p: Poly, q: Poly) -> bool:
        return all(p[w] == q[w] for w in range(self.L + 1))

    def mul(self, p: Poly, q: Poly) -> Poly:
        out: Poly = [dict() for _ in range(self.L + 1)]
        L = self.L
        powers = self._powers
        for da in range(L + 1):
            pa = p[da]
            if not pa:
                continue
            for db in range(L + 1 - da):
                qb = q[db]
                if not qb:
                    continue
                bucket = out[da + db]
                shift = powers[db]
                for ka, va in pa.items():
                    base = ka * shift
                    for kb, vb in qb.items():
                        key = base + kb
                        c = bucket.get(key, 0) + va * vb
                        if c:
                            bucket[key] = c
                        elif key in bucket:
                            del bucket[key]
        return out

    def inverse(self, p: Poly) -> Poly:
        """Inverse of a unit 1 + u via the (finite) geometric series."""
        assert p[0] == {0: 1}, "only group elements (constant term 1) are inverted"
        u: Poly = [dict(level) for level in p]
        del u[0][0]
        # Horner form: (1 + u)^-1 = 1 - u(1 - u(1 - ...))
        acc = self.one()
        for _ in range(self.L):
            acc = self.mul(u, acc)
            for level in acc:
                for k in list(level):
                    level[k] = -level[k]
            acc[0][0] = acc[0].get(0, 0) + 1
            if acc[0][0] == 0:
                del acc[0][0]
        return acc

    def commutator(self, p: Poly, q: Poly) -> Poly:
        pi = self.inverse(p)
        qi = self.inverse(q)
        return self.mul(self.mul(pi, qi), self.mul(p, q))

    def power(self, p: Poly, e: int) -> Poly:
        if e < 0:
            return self.power(self.inverse(p), -e)
        acc = self.one()
        sq = p
        while e:
            if e & 1:
                acc = self.mul(acc, sq)
            e >>= 1
            if e:
                sq = self.mul(sq, sq)
        return acc

    def min_degree(self, p: Poly) -> int:
        """Smallest degree >= 1 carrying a nonzero coefficient (L+1 if none)."""
        for w in range(1, self.L + 1):
            if p[w]:
                return w
        return self.L + 1


def lie_monomial(algebra: TruncatedAlgebra, tree) -> dict[int, int]:
    """Homogeneous Lie element of a bracket tree, as {packed word: coeff}.

    ``tree`` is an int (generator index) or a pair (left, right) of trees.
    """
    if isinstance(tree, int):
        return {tree: 1}
    left, right = tree
    a = lie_monomial(algebra, left)
    b = lie_monomial(algebra, right)
    da = _tree_weight(left)
    db = _tree_weight(right)
    out: dict[int, int] = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k1 = ka * algebra._powers[db] + kb
            k2 = kb * algebra._powers[da] + ka
            for key, val in ((k1, va * vb), (k2, -va * vb)):
                c = out.get(key, 0) + val
                if c:
                    out[key] = c
                elif key in out:
                    del out[key]
    return out


def _tree_weight(tree) -> int:
    if isinstance(tree, int):
        return 1
    return _tree_weight(tree[0]) + _tree_weight(tree[1])


class LieBlockSolver:
    """Expresses a homogeneous degree-w Lie element over given basis columns.

    Columns are the Lie monomials of the weight-w basic commutators; they
    are linearly independent over Q, so a reduced column cache solves each
    right-hand side by elimination.  Solutions are asserted integral: a
    non-integral or inconsistent solve would mean the input was not the
    degree-w part of an element of gamma_w, i.e. an engine bug.
    """

    def __init__(self, columns: list[dict[int, int]]):
        self.n = len(columns)
        self._pivots: list[tuple[int, dict[int, Fraction], list[Fraction]]] = []
        for idx, col in enumerate(columns):
            cur = {k: Fraction(v) for k, v in col.items()}
            combo = [Fraction(0)] * self.n
            combo[idx] = Fraction(1)
            self._reduce(cur, combo)
            assert cur, "basic Lie monomials must be linearly independent"
            pivot_key = min(cur)
            self._pivots.append((pivot_key, cur, combo))

    def _reduce(self, cur: dict[int, Fraction], combo: list[Fraction]) -> None:
        for pivot_key, pcol, pcombo in self._pivots:
            coeff = cur.get(pivot_key)
            if not coeff:
                continue
            factor = coeff / pcol[pivot_key]
            for k, v in pcol.items():
                c = cur.get(k, Fraction(0)) - factor * v
                if c:
                    cur[k] = c
                elif k in cur:
                    del cur[k]
            for i, v in enumerate(pcombo):
                if v:
                    combo[i] -= factor * v

    def solve(self, rhs: dict[int, int]) -> list[int]:
        cur = {k: Fraction(v) for k, v in rhs.items()}
        combo = [Fraction(0)] * self.n
        self._reduce(cur, combo)
        assert not cur, "right-hand side outside the Lie span: collection bug"
        coeffs = [-c for c in combo]
        assert all(c.denominator == 1 for c in coeffs), (
            "non-integral Mal'cev coordinate: collection bug"
        )
        return [int(c) for c in coeffs]
