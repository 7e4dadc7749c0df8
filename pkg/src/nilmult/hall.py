"""Hall basis of basic commutators on d letters up to a weight bound.

A basic commutator is either a generator x1..xd (weight 1) or a bracket
[u, v] of earlier basic commutators with weight(u) + weight(v), subject to
the Hall condition: u > v in the basis order, and if u = [a, b] then b <= v.
The images of the weight-w basic commutators form a basis of the free
abelian section gamma_w/gamma_{w+1} of the free group, which is what makes
them usable as Mal'cev coordinates for the free nilpotent quotients.

The basis order is total and reproducible: elements are sorted by weight,
and within a weight block by discovery order of the inductive construction,
which scans candidate pairs in increasing (right, left) id order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BasisSizeError, InvalidSpecError, max_basis_size

__all__ = ["BasicCommutator", "HallBasis", "generate_hall_basis", "witt", "mobius"]


def mobius(n: int) -> int:
    """Moebius function by trial division (n is tiny here)."""
    if n < 1:
        raise InvalidSpecError(f"mobius undefined for {n}")
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def witt(d: int, w: int) -> int:
    """Number of basic commutators of weight w on d letters.

    Computed exactly as (1/w) * sum_{k | w} mobius(k) * d^(w/k).
    """
    if d < 1 or w < 1:
        raise InvalidSpecError(f"witt requires d >= 1 and w >= 1, got ({d}, {w})")
    total = 0
    for k in range(1, w + 1):
        if w % k == 0:
            total += mobius(k) * d ** (w // k)
    assert total % w == 0, "Witt sum must be divisible by the weight"
    return total // w


@dataclass(frozen=True)
class BasicCommutator:
    """One node of the Hall basis.

    Leaves carry ``letter`` (0-based generator index) and have weight 1.
    Brackets carry the ids of their left and right subtrees.
    """

    id: int
    weight: int
    left: int | None = None
    right: int | None = None
    letter: int | None = None

    @property
    def is_generator(self) -> bool:
        return self.letter is not None


class HallBasis:
    """Ordered Hall basis on ``d`` letters up to weight ``L``."""

    def __init__(self, d: int, L: int, elements: list[BasicCommutator],
                 weight_offsets: list[int]):
        self.d = d
        self.L = L
        self.elements = elements
        # weight_offsets[w] = index of the first element of weight w+1,
        # with weight_offsets[0] = 0 and a final sentinel len(elements).
        self.weight_offsets = weight_offsets
        self._weights = [bc.weight for bc in elements]
        self._names: list[str] | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HallBasis):
            return NotImplemented
        return (self.d, self.L, self.elements) == (other.d, other.L, other.elements)

    def __repr__(self) -> str:
        return f"HallBasis(d={self.d}, L={self.L}, size={len(self)})"

    def weight(self, idx: int) -> int:
        return self._weights[idx]

    def weight_block(self, w: int) -> range:
        """Ids of the basis elements of weight w (empty beyond L)."""
        if w < 1:
            raise InvalidSpecError(f"weight must be >= 1, got {w}")
        if w > self.L:
            return range(len(self.elements), len(self.elements))
        return range(self.weight_offsets[w - 1], self.weight_offsets[w])

    def first_of_weight(self, w: int) -> int:
        """Index of the first element of weight >= w (len() if none)."""
        if w <= 1:
            return 0
        if w > self.L:
            return len(self.elements)
        return self.weight_offsets[w - 1]

    def name(self, idx: int) -> str:
        """Stable textual rendering, e.g. ``x1`` or ``[x2,x1,x1]``.

        Left-normed chains are flattened: [[a,b],c] prints as [a,b,c].
        """
        if self._names is None:
            self._names = [self._render(i) for i in range(len(self.elements))]
        return self._names[idx]

    def _render(self, idx: int) -> str:
        bc = self.elements[idx]
        if bc.is_generator:
            return f"x{bc.letter + 1}"
        left = self._render(bc.left)
        right = self._render(bc.right)
        if left.startswith("["):
            left = left[1:-1]
        return f"[{left},{right}]"

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "L": self.L,
            "elements": [
                {"id": bc.id, "weight": bc.weight, "left": bc.left,
                 "right": bc.right, "letter": bc.letter}
                for bc in self.elements
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HallBasis":
        rebuilt = generate_hall_basis(data["d"], data["L"])
        stored = [
            BasicCommutator(e["id"], e["weight"], e["left"], e["right"], e["letter"])
            for e in data["elements"]
        ]
        if stored != rebuilt.elements:
            raise InvalidSpecError("serialized basis does not match its parameters")
        return rebuilt


def generate_hall_basis(d: int, L: int, max_size: int | None = None) -> HallBasis:
    """Construct the Hall basis on d letters up to weight L.

    Deterministic: within each weight block, brackets are discovered by
    scanning (right, left) candidate pairs in increasing id order.
    """
    if d < 1:
        raise InvalidSpecError(f"need at least one generator, got d={d}")
    if L < 1:
        raise InvalidSpecError(f"class bound must be >= 1, got L={L}")
    cap = max_basis_size(max_size)
    predicted = sum(witt(d, w) for w in range(1, L + 1))
    if predicted > cap:
        raise BasisSizeError(
            f"Hall basis for d={d}, L={L} has {predicted} elements, "
            f"exceeding the cap of {cap}"
        )

    elements = [BasicCommutator(id=k, weight=1, letter=k) for k in range(d)]
    offsets = [0, d]
    for w in range(2, L + 1):
        start = len(elements)
        for right in range(start):
            wr = elements[right].weight
            wl = w - wr
            if wl < wr:
                # left must outweigh or equal right since left > right in order
                # and the order is weight-monotone
                continue
            for left in range(right + 1, start):
                node = elements[left]
                if node.weight != wl:
                    continue
                if node.letter is None and node.right > right:
                    continue  # Hall condition: inner right component <= right
                elements.append(
                    BasicCommutator(id=len(elements), weight=w, left=left, right=right)
                )
        offsets.append(len(elements))

    basis = HallBasis(d, L, elements, offsets)
    for w in range(1, L + 1):
        assert len(basis.weight_block(w)) == witt(d, w), (
            f"weight-{w} block size disagrees with the Witt formula"
        )
    return basis
