"""The restricted second nilpotent wreath product (*2_G H) |x G.

The acting group shifts the index of the base family; the shift re-keys
component letters and tensor entries, applying the swap-negate rule when
the images of a pair land in reversed canonical order.  The semidirect
multiplication is then the usual one.  When the fiber is abelian,
forgetting the tensor coordinates is a surjective morphism onto the
classical restricted wreath product, which is materialized independently
here so cardinality and kernel checks do not lean on the main code path.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

from .groups import Group, split_top_level
from .nilfam import FamElement, FamilyGroup, GroupIndexSet


class WreathElement(NamedTuple):
    base: FamElement
    act: object


class WreathGroup(Group):
    """(*2_G H) |x G on pairs (family element, acting element)."""

    def __init__(self, fiber: Group, actor: Group):
        self.H = fiber
        self.G = actor
        self.base = FamilyGroup(GroupIndexSet(actor, fiber))
        self.name = f"wreath({fiber.name}, {actor.name})"

    def shift(self, g, x: FamElement) -> FamElement:
        """The index shift i -> g i, an automorphism of the base."""
        key = self.base.index_set.key
        comps = {self.G.mul(g, i): h for i, h in x.comps}
        tens = {}
        for (i, j), t in x.tens:
            i2, j2 = self.G.mul(g, i), self.G.mul(g, j)
            if key(i2) < key(j2):
                tens[(i2, j2)] = t
            else:
                tens[(j2, i2)] = -self.base.pair_grid(i, j).transpose_elem(t)
        return self.base.element(comps, tens)

    # -- group interface -----------------------------------------------------

    @property
    def identity(self) -> WreathElement:
        return WreathElement(self.base.identity, self.G.identity)

    def mul(self, x: WreathElement, y: WreathElement) -> WreathElement:
        return WreathElement(
            self.base.mul(x.base, self.shift(x.act, y.base)),
            self.G.mul(x.act, y.act),
        )

    def inv(self, x: WreathElement) -> WreathElement:
        g_inv = self.G.inv(x.act)
        return WreathElement(self.shift(g_inv, self.base.inv(x.base)), g_inv)

    @property
    def order(self) -> int | None:
        if self.base.order is None or self.G.order is None:
            return None
        return self.base.order * self.G.order

    def _elements(self) -> list[WreathElement]:
        return [
            WreathElement(b, g) for b in self.base.elements() for g in self.G.elements()
        ]

    @property
    def generators(self) -> tuple:
        gens = [WreathElement(b, self.G.identity) for b in self.base.generators]
        gens += [WreathElement(self.base.identity, g) for g in self.G.generators]
        return tuple(gens)

    @property
    def signature(self) -> tuple:
        return ("wreath", self.H.signature, self.G.signature)

    def sample(self, rng, max_support: int = 3) -> WreathElement:
        return WreathElement(self.base.sample(rng, max_support), self.G.sample(rng))

    def format_element(self, x: WreathElement) -> str:
        return f"({self.base.format_element(x.base)} | {self.G.format_element(x.act)})"

    def parse_element(self, text: str) -> WreathElement:
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise ValueError(f"bad wreath literal {text!r}")
        parts = split_top_level(text[1:-1], "|")
        if len(parts) != 2:
            raise ValueError(f"expected 'base | actor' in {text!r}")
        return WreathElement(self.base.parse_element(parts[0]), self.G.parse_element(parts[1]))


class ClassicalWreathGroup(Group):
    """The classical restricted wreath product (sum_G A) |x G, kept separate.

    Elements are (sorted sparse map G -> A, acting element); no central
    coordinates at all.
    """

    def __init__(self, fiber: Group, actor: Group):
        if not fiber.is_abelian():
            raise ValueError("classical comparison target expects an abelian fiber")
        self.A = fiber
        self.G = actor
        self.name = f"classical_wreath({fiber.name}, {actor.name})"

    def _norm(self, comps: dict) -> tuple:
        items = [(i, h) for i, h in comps.items() if h != self.A.identity]
        items.sort(key=lambda item: self.G.enum_index(item[0]))
        return tuple(items)

    @property
    def identity(self):
        return ((), self.G.identity)

    def shift(self, g, comps: tuple) -> tuple:
        return self._norm({self.G.mul(g, i): h for i, h in comps})

    def mul(self, x, y):
        xc, xg = x
        yc, yg = y
        shifted = dict(self.shift(xg, yc))
        merged = dict(xc)
        for i, h in shifted.items():
            merged[i] = self.A.mul(merged.get(i, self.A.identity), h)
        return (self._norm(merged), self.G.mul(xg, yg))

    def inv(self, x):
        xc, xg = x
        g_inv = self.G.inv(xg)
        negated = {i: self.A.inv(h) for i, h in xc}
        return (self.shift(g_inv, tuple(negated.items())), g_inv)

    @property
    def order(self) -> int | None:
        if self.A.order is None or self.G.order is None:
            return None
        return self.A.order ** self.G.order * self.G.order

    def _elements(self) -> list:
        idx = self.G.elements()
        out = []
        for combo in itertools.product(self.A.elements(), repeat=len(idx)):
            comps = self._norm(dict(zip(idx, combo)))
            for g in idx:
                out.append((comps, g))
        return out

    @property
    def generators(self) -> tuple:
        gens = [
            (self._norm({self.G.identity: a}), self.G.identity) for a in self.A.generators
        ]
        gens += [((), g) for g in self.G.generators]
        return tuple(gens)

    @property
    def signature(self) -> tuple:
        return ("classical_wreath", self.A.signature, self.G.signature)

    def format_element(self, x) -> str:
        comps, g = x
        inner = ", ".join(
            f"{self.G.format_element(i)}: {self.A.format_element(h)}" for i, h in comps
        )
        return "({" + inner + "} | " + self.G.format_element(g) + ")"

    def parse_element(self, text: str):
        raise NotImplementedError("parse via the nilpotent wreath and project")


def quotient_to_classical(w: WreathGroup):
    """The quotient map onto the classical wreath product (abelian fiber only).

    Drops every tensor coordinate; returns (target group, map).
    """
    target = ClassicalWreathGroup(w.H, w.G)

    def q(x: WreathElement):
        return (target._norm(dict(x.base.comps)), x.act)

    return target, q
