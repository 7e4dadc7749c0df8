"""Nilpotent products of finite cyclic groups and their named subgroups.

A product spec fixes cyclic factor orders (m_1, ..., m_k) and a
nilpotency degree n.  Inside the free nilpotent group Q on k generators
the nth nilpotent product of the Z_{m_i} is Q/L_n, where L_n is the
kernel subgroup assembled here together with the rest of the cast:

    R_closure  normal closure of {x_i^{m_i}}
    K_n        cartesian subgroup intersected with gamma_{n+1}
    L_n        R_closure * K_n
    D_1        normal closure of {[x_i^{m_i}, x_j] : i != j}
    D_c        normal closure of left-normed [x_i^{m_i}, x_{u_1}, .., x_{u_c}]
               over all letter tuples with some u_j != i
    E_c        D_1 intersected with gamma_{c+1}

For one-generator (cyclic) factors the cartesian subgroup is the whole
derived subgroup, so K_n collapses to gamma_{n+1}(Q); the constructors
assert that collapse instead of assuming it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product as iter_product

from .engine import FreeNilpotentGroup, get_group
from .errors import InvalidSpecError
from . import subgroups as sg
from .subgroups import InducedSequence


@dataclass(frozen=True)
class NilpotentProductSpec:
    """Factor orders, nilpotency degree, optional variety class."""

    factor_orders: tuple
    n: int
    c: int | None = None

    def __post_init__(self):
        if not self.factor_orders:
            raise InvalidSpecError("at least one cyclic factor is required")
        for m in self.factor_orders:
            if m == 1:
                raise InvalidSpecError(
                    "factor of order 1 is degenerate; drop the factor instead"
                )
            if m < 1:
                raise InvalidSpecError(f"factor orders must be >= 2, got {m}")
        if self.n < 1:
            raise InvalidSpecError(f"nilpotency degree must be >= 1, got {self.n}")
        if self.c is not None and self.c < 1:
            raise InvalidSpecError(f"variety class must be >= 1, got {self.c}")

    @property
    def k(self) -> int:
        return len(self.factor_orders)

    def serialize(self) -> str:
        text = "factors={};n={}".format(
            ",".join(str(m) for m in self.factor_orders), self.n
        )
        if self.c is not None:
            text += f";c={self.c}"
        return text

    @classmethod
    def parse(cls, text: str) -> "NilpotentProductSpec":
        fields = {}
        for part in text.split(";"):
            if "=" not in part:
                raise InvalidSpecError(f"malformed spec field: {part!r}")
            key, value = part.split("=", 1)
            fields[key.strip()] = value.strip()
        try:
            factors = tuple(int(s) for s in fields["factors"].split(","))
            n = int(fields["n"])
            c = int(fields["c"]) if "c" in fields else None
        except (KeyError, ValueError) as err:
            raise InvalidSpecError(f"malformed spec {text!r}: {err}") from None
        return cls(factors, n, c)

    def to_json(self) -> dict:
        data = {"factors": list(self.factor_orders), "n": self.n}
        if self.c is not None:
            data["c"] = self.c
        return data

    @classmethod
    def from_json(cls, data: dict) -> "NilpotentProductSpec":
        return cls(tuple(data["factors"]), data["n"], data.get("c"))

    def __str__(self) -> str:
        return self.serialize()


@dataclass(frozen=True)
class NamedSubgroups:
    spec: NilpotentProductSpec
    ambient: FreeNilpotentGroup
    R_closure: InducedSequence
    K_n: InducedSequence
    L_n: InducedSequence
    D_1: InducedSequence
    D_c: InducedSequence | None
    E_c: InducedSequence | None


def ambient_group(spec: NilpotentProductSpec, L: int, **caps) -> FreeNilpotentGroup:
    return get_group(spec.k, L, **caps)


def cartesian_subgroup(
    spec: NilpotentProductSpec, group: FreeNilpotentGroup
) -> InducedSequence:
    """Kernel of the free product onto the direct product: the normal
    closure of the cross-factor commutators [x_i, x_j]."""
    k = spec.k
    gens = []
    for i in range(k):
        for j in range(k):
            if i != j:
                xi = group.basic(i).vec
                xj = group.basic(j).vec
                gens.append(group._comm(group._letters(xi), group._letters(xj)))
    seq = sg.normal_closure(group, gens)
    # one-generator factors make the cartesian the full derived subgroup
    assert seq == sg.gamma_tail(group, 2), (
        "cartesian subgroup of cyclic factors must be gamma_2"
    )
    return seq


def relator_powers(spec: NilpotentProductSpec, group: FreeNilpotentGroup) -> list:
    return [group.generator(i) ** m for i, m in enumerate(spec.factor_orders)]


def build_named_subgroups(
    spec: NilpotentProductSpec,
    group: FreeNilpotentGroup,
    c: int | None = None,
) -> NamedSubgroups:
    """Construct R_closure, K_n, L_n, D_1 and (when c is given) D_c, E_c."""
    if c is None:
        c = spec.c
    n = spec.n
    R_closure = sg.normal_closure(group, relator_powers(spec, group))
    cartesian = cartesian_subgroup(spec, group)
    K_n = sg.intersect_with_tail(cartesian, n + 1)
    assert K_n == sg.gamma_tail(group, n + 1), (
        "K_n must collapse to gamma_{n+1} for cyclic factors"
    )
    L_n = sg.product(R_closure, K_n)
    D_1 = sg.normal_closure(group, _d_c_generators(spec, group, 1))
    D_c = E_c = None
    if c is not None:
        D_c = (
            D_1
            if c == 1
            else sg.normal_closure(group, _d_c_generators(spec, group, c))
        )
        E_c = sg.intersect_with_tail(D_1, c + 1)
        assert sg.contains(E_c, D_c), "D_c must be contained in E_c = D_1 n gamma_{c+1}"
    return NamedSubgroups(spec, group, R_closure, K_n, L_n, D_1, D_c, E_c)


def _d_c_generators(
    spec: NilpotentProductSpec, group: FreeNilpotentGroup, c: int
) -> list:
    """Left-normed brackets [x_i^{m_i}, x_{u_1}, ..., x_{u_c}] over all
    ambient-letter tuples with at least one u_j != i."""
    gens = []
    k = spec.k
    for i, m in enumerate(spec.factor_orders):
        base = group._pow(group.basic(i).vec, m)
        for tup in iter_product(range(k), repeat=c):
            if all(u == i for u in tup):
                continue
            cur = base
            for u in tup:
                cur = group._comm(group._letters(cur), ((u, 1),))
            if cur != group._zero:
                gens.append(cur)
    return gens


def group_order(spec: NilpotentProductSpec, **caps) -> int:
    """Order of the nth nilpotent product, computed in Q of class exactly n
    (enough because L_n contains the whole gamma_{n+1} tail)."""
    group = ambient_group(spec, spec.n, **caps)
    named = build_named_subgroups(spec, group, c=None)
    order = sg.index_in_ambient(named.L_n)
    assert order is not None, "nilpotent product of finite cyclic groups is finite"
    return order


def unique_normal_form_check(
    spec: NilpotentProductSpec, trials: int, rng, L: int | None = None
) -> bool:
    """Randomized check of the regular-product normal form in G = Q/L_n:
    every coset decomposes uniquely as x_1^{a_1} ... x_k^{a_k} * u with
    0 <= a_i < m_i and u in the image of the cartesian subgroup."""
    group = ambient_group(spec, spec.n if L is None else L)
    named = build_named_subgroups(spec, group, c=None)
    cartesian = cartesian_subgroup(spec, group)
    cart_mod_L = sg.product(cartesian, named.L_n)
    k = spec.k
    for _ in range(trials):
        vec = [rng.randint(-6, 6) for _ in range(group.size)]
        g = group.element(vec)
        exps = [vec[i] % m for i, m in enumerate(spec.factor_orders)]
        head = group.identity()
        for i, a in enumerate(exps):
            head = head * group.generator(i) ** a
        u = head.inverse() * g
        if not sg.membership(u, cart_mod_L)[0]:
            return False
        # any other residue tuple must fail
        perturbed = list(exps)
        j = rng.randrange(k)
        shift = rng.randrange(1, spec.factor_orders[j])
        perturbed[j] = (perturbed[j] + shift) % spec.factor_orders[j]
        head2 = group.identity()
        for i, a in enumerate(perturbed):
            head2 = head2 * group.generator(i) ** a
        u2 = head2.inverse() * g
        if sg.membership(u2, cart_mod_L)[0]:
            return False
    return True


def result_record(spec: NilpotentProductSpec, c: int, invariants, order: int,
                  ambient_class: int, basis_size: int) -> dict:
    """The documented JSON shape for one Baer-invariant computation."""
    return {
        "factors": list(spec.factor_orders),
        "n": spec.n,
        "c": c,
        "invariants": invariants.to_json(),
        "group_order": str(order),
        "ambient_class": ambient_class,
        "basis_size": basis_size,
    }


def record_to_json(record: dict) -> str:
    return json.dumps(record, sort_keys=True)
