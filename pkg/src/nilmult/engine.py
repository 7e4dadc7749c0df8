"""Exact arithmetic in finitely generated free nilpotent groups.

A ``FreeNilpotentGroup`` models Q = F/gamma_{L+1}(F) for the free group F
on d generators.  Every element has a unique normal form as an ordered
product of powers of basic commutators (Mal'cev coordinates), stored as a
tuple of arbitrary-precision integer exponents parallel to the Hall basis.

Multiplication is collection from the left.  The only group-theoretic
input it needs is the normal form of [z_j, z_i] for basis elements with
compatible weights; those pair rules are computed once per pair, exactly,
through the Magnus embedding into a truncated free associative algebra,
then everything else is driven by commutator identities that hold in any
group:

    [xy, z] = [x, z]^y [y, z]      [x, yz] = [x, z] [x, y]^z
    a^b = a [a, b]                 [x^-1, y] = ([x, y]^(x^-1))^-1

All corrections land in strictly higher weight, so the recursion bottoms
out at the nilpotency class L.
"""

from __future__ import annotations

from .errors import (
    BasisMismatchError,
    ExponentLimitError,
    ParseError,
    max_basis_size,
    max_exponent_bits,
)
from .hall import HallBasis, generate_hall_basis
from ._magnus import LieBlockSolver, TruncatedAlgebra, lie_monomial

Letter = tuple  # (basis index, exponent)
Vector = tuple  # exponent per basis element


class FreeNilpotentGroup:
    """Free nilpotent group of rank d and class L with exact arithmetic."""

    def __init__(
        self,
        d: int,
        L: int,
        max_basis: int | None = None,
        max_exp_bits: int | None = None,
    ):
        if d < 1:
            raise ValueError(f"rank must be >= 1, got {d}")
        if L < 1:
            raise ValueError(f"class must be >= 1, got {L}")
        self.d = d
        self.L = L
        self.max_exp_bits = max_exponent_bits(max_exp_bits)
        self.basis = generate_hall_basis(d, L, max_size=max_basis_size(max_basis))
        self.size = len(self.basis)
        self._algebra = TruncatedAlgebra(d, L)
        self._polys: list = [None] * self.size
        self._solvers: dict[int, LieBlockSolver] = {}
        self._pair_nf_cache: dict[tuple[int, int], Vector] = {}
        self._comm_cache: dict[tuple[tuple, tuple], Vector] = {}
        self._zero: Vector = (0,) * self.size

    # -- public element constructors -------------------------------------

    def identity(self) -> "GroupElement":
        return GroupElement(self, self._zero)

    def generator(self, k: int) -> "GroupElement":
        """Generator x_{k+1} (k is 0-based)."""
        if not 0 <= k < self.d:
            raise ValueError(f"generator index {k} out of range 0..{self.d - 1}")
        return self.basic(k)

    def generators(self) -> list["GroupElement"]:
        return [self.basic(k) for k in range(self.d)]

    def basic(self, idx: int) -> "GroupElement":
        """Basis element z_idx as a group element (unit coordinate vector)."""
        if not 0 <= idx < self.size:
            raise ValueError(f"basis index {idx} out of range 0..{self.size - 1}")
        vec = [0] * self.size
        vec[idx] = 1
        return GroupElement(self, tuple(vec))

    def element(self, vec) -> "GroupElement":
        vec = tuple(vec)
        if len(vec) != self.size:
            raise ValueError(f"vector length {len(vec)} != basis size {self.size}")
        return GroupElement(self, vec)

    def collect(self, word: str) -> "GroupElement":
        """Parse a word in the generators and return its normal form."""
        return GroupElement(self, _eval_word(self, _parse_word(word)))

    # -- vector-level arithmetic ------------------------------------------

    def _letters(self, vec: Vector) -> tuple:
        return tuple((k, e) for k, e in enumerate(vec) if e)

    def _mul_letter(self, vec: Vector, letter: Letter) -> Vector:
        i, e = letter
        if e == 0:
            return vec
        new_exp = vec[i] + e
        if new_exp.bit_length() > self.max_exp_bits:
            raise ExponentLimitError(
                f"exponent exceeds {self.max_exp_bits} bits during collection"
            )
        tail = tuple((k, v) for k, v in enumerate(vec[i + 1 :], i + 1) if v)
        bumped = vec[:i] + (new_exp,) + vec[i + 1 :]
        if not tail:
            return bumped
        correction = self._comm(tail, (letter,))
        return self._mul_letters(bumped, self._letters(correction))

    def _mul_letters(self, vec: Vector, letters) -> Vector:
        for letter in letters:
            vec = self._mul_letter(vec, letter)
        return vec

    def _mul(self, u: Vector, v: Vector) -> Vector:
        return self._mul_letters(u, self._letters(v))

    def _inv(self, v: Vector) -> Vector:
        out = self._zero
        for k, e in reversed(self._letters(v)):
            out = self._mul_letter(out, (k, -e))
        return out

    def _pow(self, v: Vector, e: int) -> Vector:
        if e.bit_length() > self.max_exp_bits:
            raise ExponentLimitError(f"exponent exceeds {self.max_exp_bits} bits")
        if e < 0:
            return self._pow(self._inv(v), -e)
        acc = self._zero
        sq = v
        while e:
            if e & 1:
                acc = self._mul(acc, sq)
            e >>= 1
            if e:
                sq = self._mul(sq, sq)
        return acc

    def _conj(self, v: Vector, letters: tuple) -> Vector:
        """v^w = v [v, w] for the word w given as letters."""
        if not letters or v == self._zero:
            return v
        return self._mul(v, self._comm(self._letters(v), letters))

    def _min_weight(self, letters: tuple) -> int:
        return min(self.basis.weight(k) for k, _ in letters)

    def _comm(self, a: tuple, b: tuple) -> Vector:
        """Normal form of [A, B] for words given as letter tuples."""
        if not a or not b:
            return self._zero
        if self._min_weight(a) + self._min_weight(b) > self.L:
            return self._zero
        key = (a, b)
        cached = self._comm_cache.get(key)
        if cached is not None:
            return cached
        result = self._comm_uncached(a, b)
        self._comm_cache[key] = result
        return result

    def _comm_uncached(self, a: tuple, b: tuple) -> Vector:
        if len(a) > 1:
            x, y = (a[0],), a[1:]
            left = self._conj(self._comm(x, b), y)
            return self._mul(left, self._comm(y, b))
        if len(b) > 1:
            y, z = (b[0],), b[1:]
            return self._mul(self._comm(a, z), self._conj(self._comm(a, y), z))
        (i, e), (j, f) = a[0], b[0]
        if i == j:
            return self._zero
        if e not in (1, -1):
            half = e // 2
            return self._comm(((i, half), (i, e - half)), b)
        if f not in (1, -1):
            half = f // 2
            return self._comm(a, ((j, half), (j, f - half)))
        if e == -1:
            inner = self._conj(self._comm(((i, 1),), b), a)
            return self._inv(inner)
        if f == -1:
            inner = self._conj(self._comm(a, ((j, 1),)), b)
            return self._inv(inner)
        if i > j:
            return self._pair_nf(i, j)
        return self._inv(self._pair_nf(j, i))

    # -- Magnus bootstrap --------------------------------------------------

    def _poly(self, k: int):
        """Image of basis element z_k in the truncated algebra."""
        p = self._polys[k]
        if p is None:
            bc = self.basis.elements[k]
            if bc.is_generator:
                p = self._algebra.generator(bc.letter)
            else:
                p = self._algebra.commutator(self._poly(bc.left), self._poly(bc.right))
            self._polys[k] = p
        return p

    def _tree(self, k: int):
        bc = self.basis.elements[k]
        if bc.is_generator:
            return bc.letter
        return (self._tree(bc.left), self._tree(bc.right))

    def _solver(self, w: int) -> LieBlockSolver:
        solver = self._solvers.get(w)
        if solver is None:
            columns = [
                lie_monomial(self._algebra, self._tree(k))
                for k in self.basis.weight_block(w)
            ]
            solver = LieBlockSolver(columns)
            self._solvers[w] = solver
        return solver

    def _extract(self, poly) -> Vector:
        """Peel a unit of the algebra into Mal'cev coordinates, weight by weight."""
        alg = self._algebra
        vec = [0] * self.size
        p = poly
        while True:
            w = alg.min_degree(p)
            if w > self.L:
                break
            block = self.basis.weight_block(w)
            coeffs = self._solver(w).solve(p[w])
            q = alg.one()
            for off, e in enumerate(coeffs):
                if e:
                    k = block.start + off
                    vec[k] = e
                    q = alg.mul(q, alg.power(self._poly(k), e))
            p = alg.mul(alg.inverse(q), p)
        assert alg.is_one(p), "Magnus extraction left a residue: engine bug"
        return tuple(vec)

    def _pair_nf(self, j: int, i: int) -> Vector:
        """Normal form of [z_j, z_i] for basis indices j > i."""
        assert j > i
        cached = self._pair_nf_cache.get((j, i))
        if cached is None:
            comm = self._algebra.commutator(self._poly(j), self._poly(i))
            cached = self._extract(comm)
            self._pair_nf_cache[(j, i)] = cached
        return cached

    def poly_image(self, g: "GroupElement"):
        """Exact image of g under x_k -> 1 + X_k (independent of collection)."""
        alg = self._algebra
        acc = alg.one()
        for k, e in self._letters(g.vec):
            acc = alg.mul(acc, alg.power(self._poly(k), e))
        return acc

    def poly_equal(self, p, q) -> bool:
        return self._algebra.equal(p, q)

    def poly_mul(self, p, q):
        return self._algebra.mul(p, q)

    def __repr__(self) -> str:
        return f"FreeNilpotentGroup(d={self.d}, L={self.L}, basis={self.size})"


class GroupElement:
    """Immutable element of a FreeNilpotentGroup in Mal'cev normal form."""

    __slots__ = ("group", "vec")

    def __init__(self, group: FreeNilpotentGroup, vec: Vector):
        self.group = group
        self.vec = vec

    def _check(self, other: "GroupElement") -> None:
        if self.group is not other.group and self.group.basis != other.group.basis:
            raise BasisMismatchError(
                "elements belong to groups with different Hall bases"
            )

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.group, self.group._mul(self.vec, other.vec))

    def __pow__(self, e: int) -> "GroupElement":
        return GroupElement(self.group, self.group._pow(self.vec, e))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.group._inv(self.vec))

    def __invert__(self) -> "GroupElement":
        return self.inverse()

    def commutator(self, other: "GroupElement") -> "GroupElement":
        """[self, other] = self^-1 other^-1 self other."""
        self._check(other)
        g = self.group
        return GroupElement(
            g, g._comm(g._letters(self.vec), g._letters(other.vec))
        )

    def conjugate(self, other: "GroupElement") -> "GroupElement":
        """self^other = other^-1 self other."""
        self._check(other)
        g = self.group
        return GroupElement(g, g._conj(self.vec, g._letters(other.vec)))

    @property
    def is_identity(self) -> bool:
        return self.vec == self.group._zero

    def min_weight(self) -> int | None:
        """Weight of the lowest nonzero coordinate, None for the identity."""
        for k, e in enumerate(self.vec):
            if e:
                return self.group.basis.weight(k)
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        self._check(other)
        return self.vec == other.vec

    def __hash__(self) -> int:
        return hash((self.group.d, self.group.L, self.vec))

    def __repr__(self) -> str:
        if self.is_identity:
            return "1"
        parts = []
        for k, e in enumerate(self.vec):
            if not e:
                continue
            name = self.group.basis.name(k)
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)


_ENGINE_CACHE: dict[tuple, FreeNilpotentGroup] = {}


def get_group(
    d: int,
    L: int,
    max_basis: int | None = None,
    max_exp_bits: int | None = None,
) -> FreeNilpotentGroup:
    """Process-wide cache of engines; pair tables are expensive to rebuild."""
    key = (d, L, max_basis, max_exp_bits)
    group = _ENGINE_CACHE.get(key)
    if group is None:
        group = FreeNilpotentGroup(d, L, max_basis=max_basis, max_exp_bits=max_exp_bits)
        _ENGINE_CACHE[key] = group
    return group


# -- word parsing ----------------------------------------------------------
#
# word   := factor*
# factor := atom ('^' integer)?
# atom   := 'x' digits | '[' word (',' word)+ ']'
#
# A bracket with more than two arguments is left-normed:
# [u, v, w] means [[u, v], w].


def _tokenize(text: str) -> list:
    tokens = []
    n = len(text)
    pos = 0
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in "[],^":
            tokens.append((ch, pos))
            pos += 1
            continue
        if ch == "x":
            start = pos
            pos += 1
            if pos >= n or not text[pos].isdigit():
                raise ParseError(f"expected digits after 'x' at position {start}")
            while pos < n and text[pos].isdigit():
                pos += 1
            tokens.append(("gen", int(text[start + 1 : pos]), start))
            continue
        if ch == "-" or ch.isdigit():
            start = pos
            pos += 1
            while pos < n and text[pos].isdigit():
                pos += 1
            body = text[start:pos]
            if body == "-":
                raise ParseError(f"expected digits after '-' at position {start}")
            tokens.append(("int", int(body), start))
            continue
        raise ParseError(f"unexpected character {ch!r} at position {pos}")
    return tokens


class _Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of word")
        self.pos += 1
        return tok

    def word(self):
        factors = []
        while True:
            tok = self.peek()
            if tok is None or tok[0] in (",", "]"):
                return ("word", factors)
            factors.append(self.factor())

    def factor(self):
        atom = self.atom()
        tok = self.peek()
        if tok is not None and tok[0] == "^":
            self.next()
            exp = self.next()
            if exp[0] != "int":
                raise ParseError(f"expected integer exponent at position {exp[-1]}")
            return ("pow", atom, exp[1])
        return atom

    def atom(self):
        tok = self.next()
        if tok[0] == "gen":
            return ("gen", tok[1], tok[2])
        if tok[0] == "[":
            args = [self.word()]
            while True:
                sep = self.next()
                if sep[0] == ",":
                    args.append(self.word())
                elif sep[0] == "]":
                    break
                else:
                    raise ParseError(f"expected ',' or ']' at position {sep[-1]}")
            if len(args) < 2:
                raise ParseError("bracket needs at least two arguments")
            return ("comm", args)
        raise ParseError(f"unexpected token {tok[0]!r} at position {tok[-1]}")


def _parse_word(text: str):
    parser = _Parser(_tokenize(text))
    tree = parser.word()
    if parser.peek() is not None:
        tok = parser.peek()
        raise ParseError(f"unexpected token {tok[0]!r} at position {tok[-1]}")
    return tree


def _eval_word(group: FreeNilpotentGroup, node) -> Vector:
    kind = node[0]
    if kind == "word":
        vec = group._zero
        for factor in node[1]:
            vec = group._mul(vec, _eval_word(group, factor))
        return vec
    if kind == "pow":
        return group._pow(_eval_word(group, node[1]), node[2])
    if kind == "gen":
        k = node[1]
        if not 1 <= k <= group.d:
            raise ParseError(
                f"generator x{k} out of range (group has x1..x{group.d})"
            )
        vec = list(group._zero)
        vec[k - 1] = 1
        return tuple(vec)
    if kind == "comm":
        args = [_eval_word(group, arg) for arg in node[1]]
        acc = args[0]
        for arg in args[1:]:
            acc = group._comm(group._letters(acc), group._letters(arg))
        return acc
    raise AssertionError(f"unknown node kind {kind}")
