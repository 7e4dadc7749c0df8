"""Baer-invariants of nilpotent products of cyclic groups.

For G presented as F/R, the Baer-invariant with respect to the variety
of class-c nilpotent groups is

    N_c M(G) = (R n gamma_{c+1}(F)) / [R, F, ..., F]   (c ambient factors).

Here G is the nth nilpotent product of cyclic groups, R is realized as
L_n inside the free nilpotent group Q of class exactly L = n + c.  The
truncation is exact: R contains gamma_{n+1}(F), hence [R, cF] contains
gamma_{n+c+1}(F), so nothing below the quotient is lost by working in
F/gamma_{L+1}(F).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from math import gcd

from .abelian import AbelianInvariants
from .errors import PreconditionError
from .groups import (
    NilpotentProductSpec,
    ambient_group,
    build_named_subgroups,
    group_order,
    result_record,
)
from .hall import witt
from . import subgroups as sg


@dataclass(frozen=True)
class BaerResult:
    spec: NilpotentProductSpec
    c: int
    invariants: AbelianInvariants
    group_order: int
    ambient_class: int
    basis_size: int
    elapsed: float

    def to_record(self) -> dict:
        return result_record(
            self.spec,
            self.c,
            self.invariants,
            self.group_order,
            self.ambient_class,
            self.basis_size,
        )


def baer_invariant(
    spec: NilpotentProductSpec, c: int | None = None, **caps
) -> BaerResult:
    """N_c M(G) for G the nth nilpotent product given by the spec."""
    if c is None:
        c = spec.c
    if c is None or c < 1:
        raise PreconditionError(f"variety class must be >= 1, got {c}")
    start = time.perf_counter()
    L = spec.n + c
    group = ambient_group(spec, L, **caps)
    named = build_named_subgroups(spec, group, c=None)
    numerator = sg.intersect_with_tail(named.L_n, c + 1)
    denominator = sg.iterated_commutator_with_ambient(named.L_n, c)
    assert sg.contains(numerator, denominator), (
        "[R, cF] must lie inside R n gamma_{c+1}: engine bug"
    )
    invariants = sg.quotient_invariants(numerator, denominator)
    assert invariants.free_rank == 0, (
        "Baer-invariant of a finite group must be finite"
    )
    elapsed = time.perf_counter() - start
    return BaerResult(
        spec=spec,
        c=c,
        invariants=invariants,
        group_order=group_order(spec, **caps),
        ambient_class=L,
        basis_size=group.size,
        elapsed=elapsed,
    )


def schur_multiplier(spec: NilpotentProductSpec, **caps) -> BaerResult:
    """The classical multiplier M(G): the c = 1 Baer-invariant."""
    return baer_invariant(spec, 1, **caps)


def moghaddam_section(
    spec: NilpotentProductSpec, n: int | None = None, **caps
) -> AbelianInvariants:
    """The section [A,B, (n-1)A*B] / [A,B, nA*B] of the two-factor
    multiplier decomposition, computed inside Q of class n + 2.

    With S the closure of the relator powers and C the closure of
    [x1, x2], the section is (C_(n-1) S) / (C_n S) where C_j is the
    j-fold ambient commutator of C.  Class n + 2 is enough because the
    gamma tail beyond it already lies in C_n S, and the quotient is
    abelian there.
    """
    if spec.k != 2:
        raise PreconditionError(
            f"the section is defined for exactly two factors, got {spec.k}"
        )
    if n is None:
        n = spec.n
    if n < 1:
        raise PreconditionError(f"nilpotency degree must be >= 1, got {n}")
    group = ambient_group(spec, n + 2, **caps)
    relators = [group.generator(i) ** m for i, m in enumerate(spec.factor_orders)]
    S = sg.normal_closure(group, relators)
    x1, x2 = group.generators()
    C = sg.normal_closure(group, [x1.commutator(x2)])
    N1 = sg.product(sg.iterated_commutator_with_ambient(C, n - 1), S)
    N2 = sg.product(sg.iterated_commutator_with_ambient(C, n), S)
    return sg.quotient_invariants(N1, N2)


def gupta_moghaddam_oracle(n: int, c: int) -> AbelianInvariants:
    """Closed form for N_c M(Z2 star-n Z2): a cyclic group of order 2^c
    when c < n, and otherwise r(c+1) - 1 copies of Z2 ahead of Z_{2^n},
    where r counts weight-(c+1) basic commutators on two letters."""
    if n < 1 or c < 1:
        raise ValueError("n and c must be >= 1")
    if c < n:
        return AbelianInvariants((2 ** c,))
    twos = witt(2, c + 1) - 1
    return AbelianInvariants((2,) * twos + (2 ** n,))


def schur_baer_check(result: BaerResult) -> bool:
    """Finiteness plus prime support: every prime dividing the invariant
    order must divide the group order."""
    order = result.invariants.order()
    if order is None:
        return False
    remaining = order
    g = result.group_order
    while remaining > 1:
        common = gcd(remaining, g)
        if common == 1:
            return False
        while remaining % common == 0:
            remaining //= common
    return True


# -- results cache -----------------------------------------------------------


def cache_key(record: dict) -> tuple:
    return (tuple(record["factors"]), record["n"], record["c"])


def load_cache(path) -> dict:
    """Read a JSON-lines result cache; later lines win on duplicate keys."""
    cache: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                cache[cache_key(record)] = record
    except FileNotFoundError:
        pass
    return cache


def append_cache(path, record: dict) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def cached_baer_invariant(
    spec: NilpotentProductSpec,
    c: int,
    cache_path=None,
    verify_cache: bool = False,
    **caps,
) -> dict:
    """Baer-invariant record, served from the cache when possible.

    With verify_cache, hits are recomputed and must match bit for bit;
    a mismatch raises, since results are deterministic.
    """
    key = (tuple(spec.factor_orders), spec.n, c)
    cache = load_cache(cache_path) if cache_path else {}
    hit = cache.get(key)
    if hit is not None and not verify_cache:
        return hit
    record = baer_invariant(spec, c, **caps).to_record()
    if hit is not None:
        if hit != record:
            raise PreconditionError(
                f"cache mismatch for {key}: cached {hit} vs recomputed {record}"
            )
        return hit
    if cache_path:
        append_cache(cache_path, record)
    return record
