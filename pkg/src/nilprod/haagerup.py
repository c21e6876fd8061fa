"""Exact kernel certificates on shift products.

Given a nonnegative kernel phi on the two-copy product H *2 H with
phi(e) = 0, the weighted sum over ordered index pairs

    u(x) = sum_{h != k} 2^(-psi(h^-1 k)) * phi(pair projection of x at (h, k))

is the conditionally negative definite function whose restrictions to
fixed-support subsets are proper.  Everything here is computed in exact
rational arithmetic (fractions.Fraction); with the default 0/1 kernel and
a bijective enumeration psi with psi(e) = 0 every value is dyadic, even
over an infinite index group, thanks to the closed-form tail
sum_{g != e} 2^(-psi(g)) = 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .groups import Group
from .nilfam import FamElement, FamilyGroup, GroupIndexSet
from .nilprod2 import Nil2Element, Nil2Group, nil2


@dataclass(frozen=True)
class PairKernel:
    """A kernel on H *2 H: zero at the identity, nonnegative, symmetric."""

    pair_group: Nil2Group
    values: Callable[[Nil2Element], Fraction]
    proper: bool = True
    label: str = "delta"

    def __call__(self, w: Nil2Element) -> Fraction:
        return self.values(w)


def delta_kernel(fiber: Group) -> PairKernel:
    """phi = 1 - delta_e; conditionally negative definite on any group and
    proper here because the pair group is finite."""
    if fiber.order is None:
        raise ValueError("the 0/1 kernel is proper only for finite fibers")
    pair = nil2(fiber, fiber)
    e = pair.identity

    def values(w: Nil2Element) -> Fraction:
        return Fraction(0) if w == e else Fraction(1)

    return PairKernel(pair, values, proper=True, label="delta")


def table_kernel(fiber: Group, table: dict) -> PairKernel:
    """A user-supplied kernel given as a full table on H *2 H."""
    pair = nil2(fiber, fiber)
    mapping = {w: Fraction(v) for w, v in table.items()}
    if mapping[pair.identity] != 0:
        raise ValueError("kernel must vanish at the identity")
    if any(v < 0 for v in mapping.values()):
        raise ValueError("kernel must be nonnegative")
    return PairKernel(pair, mapping.__getitem__, proper=True, label="table")


def _check_shift_family(fam: FamilyGroup) -> GroupIndexSet:
    if not isinstance(fam.index_set, GroupIndexSet):
        raise ValueError("weighted sums are defined over group-indexed families")
    return fam.index_set


def default_psi(actor: Group) -> Callable:
    """The canonical enumeration of the index group; psi(e) = 0."""
    return actor.enum_index


def weight(psi: Callable, g) -> Fraction:
    return Fraction(1, 1 << psi(g))


def total_weight(actor: Group, psi: Callable | None = None) -> Fraction:
    """sum_g 2^(-psi(g)), exactly.

    For an infinite group a bijective psi onto the naturals gives exactly 2
    (the whole geometric series); for finite groups the sum is computed
    term by term, so custom enumerations stay exact.
    """
    if actor.order is None:
        return Fraction(2)
    psi = psi or default_psi(actor)
    return sum((weight(psi, g) for g in actor.elements()), Fraction(0))


def pair_value(fam: FamilyGroup, kernel: PairKernel, h, k, x: FamElement) -> Fraction:
    """The kernel read through the pair projection with the h slot first."""
    if h == k:
        raise ValueError("pair value needs two distinct indices")
    return kernel(fam.proj_pair(x, h, k))


def u_value(
    fam: FamilyGroup, kernel: PairKernel, x: FamElement, psi: Callable | None = None
) -> Fraction:
    """The weighted pair sum, exactly, via the three-part support split.

    Pairs inside the support are a finite sum.  Pairs with exactly one
    index inside contribute the kernel of the lone letter times a tail
    weight, exact because psi enumerates the whole index group.
    """
    idx = _check_shift_family(fam)
    actor = idx.index_group
    psi = psi or default_psi(actor)
    support = sorted(fam.support(x), key=idx.key)
    if not support:
        return Fraction(0)
    if psi(actor.identity) != 0:
        raise ValueError("enumeration must send the identity to 0")
    comps = dict(x.comps)
    fiber = idx.fiber
    pair = kernel.pair_group
    total = total_weight(actor, psi)

    out = Fraction(0)
    for h, k in itertools.permutations(support, 2):
        out += weight(psi, actor.mul(actor.inv(h), k)) * pair_value(fam, kernel, h, k, x)
    for h in support:
        lone = pair.embed_a(comps.get(h, fiber.identity))
        tail = total - sum(weight(psi, actor.mul(actor.inv(h), k)) for k in support)
        out += kernel(lone) * tail
    for k in support:
        lone = pair.embed_b(comps.get(k, fiber.identity))
        tail = total - sum(weight(psi, actor.mul(actor.inv(h), k)) for h in support)
        out += kernel(lone) * tail
    return out


def u_value_direct(
    fam: FamilyGroup, kernel: PairKernel, x: FamElement, psi: Callable | None = None
) -> Fraction:
    """The same sum with no splitting, over every ordered pair of a finite
    index group.  Exists to cross-check the split form."""
    idx = _check_shift_family(fam)
    actor = idx.index_group
    if actor.order is None:
        raise ValueError("direct summation needs a finite index group")
    psi = psi or default_psi(actor)
    out = Fraction(0)
    for h, k in itertools.permutations(actor.elements(), 2):
        out += weight(psi, actor.mul(actor.inv(h), k)) * pair_value(fam, kernel, h, k, x)
    return out


def gram_value(
    fam: FamilyGroup,
    kernel: PairKernel,
    points: Sequence[FamElement],
    coeffs: Sequence[Fraction],
    psi: Callable | None = None,
) -> Fraction:
    """sum_ij c_i c_j u(x_i^-1 x_j); certified nonpositive when coeffs sum to 0."""
    coeffs = [Fraction(c) for c in coeffs]
    if sum(coeffs) != 0:
        raise ValueError("coefficients must sum to zero")
    cache: dict = {}

    def u_of(a: FamElement, b: FamElement) -> Fraction:
        z = fam.mul(fam.inv(a), b)
        if z not in cache:
            cache[z] = u_value(fam, kernel, z, psi)
        return cache[z]

    out = Fraction(0)
    for (ci, xi), (cj, xj) in itertools.product(zip(coeffs, points), repeat=2):
        out += ci * cj * u_of(xi, xj)
    return out


def enumerate_supported(fam: FamilyGroup, subset: Iterable) -> list[FamElement]:
    """Every element whose support lies inside the given finite index subset."""
    idx = _check_shift_family(fam)
    members = sorted(set(subset), key=idx.key)
    fiber = idx.fiber
    if fiber.order is None:
        raise ValueError("enumeration needs a finite fiber")
    pairs = list(itertools.combinations(members, 2))
    comp_choices = [fiber.elements() for _ in members]
    tens_choices = [list(fam.pair_grid(i, j).group.elements()) for i, j in pairs]
    out = []
    for combo in itertools.product(*comp_choices):
        comps = dict(zip(members, combo))
        for tcombo in itertools.product(*tens_choices):
            tens = dict(zip(pairs, tcombo))
            out.append(fam.element(comps, tens))
    return out


def sublevel_set(
    fam: FamilyGroup,
    kernel: PairKernel,
    subset: Iterable,
    bound: Fraction,
    psi: Callable | None = None,
) -> list[FamElement]:
    """{x : supp(x) in subset, u(x) <= bound}, enumerated exactly."""
    return [
        x
        for x in enumerate_supported(fam, subset)
        if u_value(fam, kernel, x, psi) <= bound
    ]


def properness_box_check(
    fam: FamilyGroup,
    kernel: PairKernel,
    subset: Sequence,
    bound: Fraction,
    psi: Callable | None = None,
) -> tuple[list[FamElement], bool]:
    """The sublevel set, plus verification that it sits inside the box
    {v_(a,b) <= 2^N bound for all pairs in the subset}, N the largest
    weight exponent over the subset."""
    idx = _check_shift_family(fam)
    actor = idx.index_group
    psi = psi or default_psi(actor)
    members = sorted(set(subset), key=idx.key)
    level = sublevel_set(fam, kernel, members, bound, psi)
    exponents = [
        psi(actor.mul(actor.inv(h), k)) for h, k in itertools.permutations(members, 2)
    ]
    cap = (1 << max(exponents, default=0)) * bound
    contained = all(
        pair_value(fam, kernel, a, b, x) <= cap
        for x in level
        for a, b in itertools.permutations(members, 2)
    )
    return level, contained
