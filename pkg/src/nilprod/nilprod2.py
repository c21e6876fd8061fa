"""The second nilpotent product of two groups, on explicit normal forms.

An element of ``A *2 B`` is a triple ``(a, b, t)``: the A-letter, the
B-letter, and the central word ``t`` living in the generator-pair grid of
``Ab(A) (x) Ab(B)``.  Multiplication concatenates and re-sorts the two
words; the only cost of sorting is the central cross term picked up when
the right factor's A-letter moves left past the left factor's B-letter:

    (a1, b1, t1)(a2, b2, t2) = (a1 a2, b1 b2, t1 + t2 - ab(a2) (x) ab(b1))

The sign convention is pinned by exhaustive isomorphism checks against
the Heisenberg groups (see ``heisenberg_witness``).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Callable, NamedTuple

from .abelian import AbelianElement, FGAbelian, tensor_grid
from .groups import Group, InfiniteGroupError, SubgroupView, normal_closure, nilpotency_class


class Nil2Element(NamedTuple):
    a: object
    b: object
    t: AbelianElement


class NotCentralError(ValueError):
    """A pair of images whose commutator misses the center of the target."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"commutator of images not central, witness pair {witness!r}")


@lru_cache(maxsize=None)
def nil2(a_group: Group, b_group: Group) -> "Nil2Group":
    return Nil2Group(a_group, b_group)


class Nil2Group(Group):
    """The second nilpotent product A *2 B as a concrete group on triples."""

    def __init__(self, a_group: Group, b_group: Group):
        self.A = a_group
        self.B = b_group
        self.grid = tensor_grid(a_group.abelian, b_group.abelian)
        self.tensor_group = self.grid.group
        self.name = f"nil2({a_group.name}, {b_group.name})"

    # -- group interface ---------------------------------------------------

    @property
    def identity(self) -> Nil2Element:
        return Nil2Element(self.A.identity, self.B.identity, self.tensor_group.zero())

    def mul(self, x: Nil2Element, y: Nil2Element) -> Nil2Element:
        cross = self.grid.elem(self.A.ab_coords(y.a), self.B.ab_coords(x.b))
        return Nil2Element(
            self.A.mul(x.a, y.a),
            self.B.mul(x.b, y.b),
            x.t + y.t - cross,
        )

    def inv(self, x: Nil2Element) -> Nil2Element:
        cross = self.grid.elem(self.A.ab_coords(x.a), self.B.ab_coords(x.b))
        return Nil2Element(self.A.inv(x.a), self.B.inv(x.b), -x.t - cross)

    @property
    def order(self) -> int | None:
        if self.A.order is None or self.B.order is None or self.tensor_group.order is None:
            return None
        return self.A.order * self.B.order * self.tensor_group.order

    def _elements(self) -> list[Nil2Element]:
        return [
            Nil2Element(a, b, t)
            for a in self.A.elements()
            for b in self.B.elements()
            for t in self.tensor_group.elements()
        ]

    @property
    def generators(self) -> tuple:
        return tuple(self.embed_a(g) for g in self.A.generators) + tuple(
            self.embed_b(g) for g in self.B.generators
        )

    @property
    def signature(self) -> tuple:
        return ("nil2", self.A.signature, self.B.signature)

    def _ab_build(self):
        grp = self.A.abelian.direct_sum(self.B.abelian)

        def to(x: Nil2Element) -> AbelianElement:
            return grp.element(self.A.ab_coords(x.a).coords + self.B.ab_coords(x.b).coords)

        return grp, to

    def ab_basis_elements(self) -> list:
        return [self.embed_a(x) for x in self.A.ab_basis_elements()] + [
            self.embed_b(x) for x in self.B.ab_basis_elements()
        ]

    def sample(self, rng) -> Nil2Element:
        t = self.tensor_group
        coords = tuple(
            rng.randrange(d) if d else rng.randrange(-9, 10) for d in t.factors
        )
        return Nil2Element(self.A.sample(rng), self.B.sample(rng), t.element(coords))

    # -- structure maps ------------------------------------------------------

    def embed_a(self, a) -> Nil2Element:
        return Nil2Element(a, self.B.identity, self.tensor_group.zero())

    def embed_b(self, b) -> Nil2Element:
        return Nil2Element(self.A.identity, b, self.tensor_group.zero())

    def proj_a(self, x: Nil2Element):
        return x.a

    def proj_b(self, x: Nil2Element):
        return x.b

    def proj_t(self, x: Nil2Element) -> AbelianElement:
        return x.t

    def bracket(self, a, b) -> Nil2Element:
        """The commutator [embed_a(a), embed_b(b)]; central, biadditive."""
        return Nil2Element(
            self.A.identity,
            self.B.identity,
            self.grid.elem(self.A.ab_coords(a), self.B.ab_coords(b)),
        )

    def central(self, t: AbelianElement) -> Nil2Element:
        return Nil2Element(self.A.identity, self.B.identity, t)

    # -- structure computations ----------------------------------------------

    def derived_structure(self) -> tuple[SubgroupView, SubgroupView, FGAbelian]:
        """The three direct summands of the commutator subgroup."""
        from .groups import derived_subgroup

        if self.A.order is None or self.B.order is None:
            raise InfiniteGroupError("derived structure needs finite factors")
        return derived_subgroup(self.A), derived_subgroup(self.B), self.tensor_group

    def class_formula(self) -> int:
        """Nilpotency class from the factor classes; factors must be nilpotent."""
        ca = nilpotency_class(self.A)
        cb = nilpotency_class(self.B)
        if ca is None or cb is None:
            raise ValueError("a factor is not nilpotent")
        if ca <= 1 and cb <= 1 and self.tensor_group.is_trivial:
            return max(ca, cb)
        return max(2, ca, cb)

    def lcs_term_sets(self) -> list[set]:
        """Element sets of the lower central series predicted by the structure:
        the derived part is the full three-way sum, deeper terms are the
        embedded direct sums of the factors' series."""
        from .groups import lower_central_series

        series_a = lower_central_series(self.A)
        series_b = lower_central_series(self.B)
        terms: list[set] = [set(self.elements())]
        if len(terms[0]) == 1:
            return terms
        derived = {
            Nil2Element(a, b, t)
            for a in derived_subgroup_elements(self.A)
            for b in derived_subgroup_elements(self.B)
            for t in self.tensor_group.elements()
        }
        terms.append(derived)
        zero = self.tensor_group.zero()
        k = 2
        while len(terms[-1]) > 1:
            an = set(series_a[k].elements()) if k < len(series_a) else {self.A.identity}
            bn = set(series_b[k].elements()) if k < len(series_b) else {self.B.identity}
            term = {Nil2Element(a, b, zero) for a in an for b in bn}
            if term == terms[-1]:
                break
            terms.append(term)
            k += 1
        return terms

    def induced_hom(self, r_a: dict, r_b: dict, target: Group) -> Callable:
        """Extend a pair of morphisms A -> K, B -> K whose cross commutators
        are central in K to a morphism on the whole product.

        Raises NotCentralError with a witness pair when the centrality
        premise fails; raises RuntimeError if the given maps are not
        homomorphisms.
        """
        for g_src, r_map, label in ((self.A, r_a, "A"), (self.B, r_b, "B")):
            for x in g_src.elements():
                for y in g_src.elements():
                    if r_map[g_src.mul(x, y)] != target.mul(r_map[x], r_map[y]):
                        raise RuntimeError(f"map on {label} is not a homomorphism")
        center = {
            z for z in target.elements()
            if all(target.mul(z, k) == target.mul(k, z) for k in target.elements())
        }
        for a in self.A.elements():
            for b in self.B.elements():
                if target.commutator(r_a[a], r_b[b]) not in center:
                    raise NotCentralError((a, b))

        basis_a = self.A.ab_basis_elements()
        basis_b = self.B.ab_basis_elements()
        cell_images = [
            target.commutator(r_a[basis_a[i]], r_b[basis_b[j]]) for i, j in self.grid.cells
        ]

        def hom(x: Nil2Element):
            out = target.mul(r_a[x.a], r_b[x.b])
            for w, c in zip(cell_images, x.t.coords):
                out = target.mul(out, target.pow(w, c))
            return out

        for x in self.elements():
            for y in self.elements():
                if hom(self.mul(x, y)) != target.mul(hom(x), hom(y)):
                    raise RuntimeError("induced map failed verification")
        return hom

    # -- literals ---------------------------------------------------------

    def format_element(self, x: Nil2Element) -> str:
        return f"[{self.A.format_element(x.a)}; {self.B.format_element(x.b)}; {x.t}]"

    def parse_element(self, text: str) -> Nil2Element:
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"bad product literal {text!r}")
        body = text[1:-1]
        parts = [p.strip() for p in _split_semicolons(body)]
        if len(parts) != 3:
            raise ValueError(f"expected three ;-separated fields in {text!r}")
        a = self.A.parse_element(parts[0])
        b = self.B.parse_element(parts[1])
        t_text = parts[2]
        if t_text in ("", "0") and self.tensor_group.rank == 0:
            t = self.tensor_group.zero()
        else:
            coords = tuple(int(v) for v in t_text.split(",")) if t_text else ()
            t = self.tensor_group.element(coords)
        return Nil2Element(a, b, t)


def _split_semicolons(text: str) -> list[str]:
    parts = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == ";" and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def derived_subgroup_elements(group: Group) -> list:
    from .groups import derived_subgroup

    return derived_subgroup(group).elements()


def heisenberg_witness(n: int):
    """The product of two copies of Z/n, the Heisenberg group over Z/n, and
    the explicit bijection (a, b, t) -> (b, a, -t) between them.

    The naive slot-for-slot map (a, b, t) -> (a, b, t) is *not* multiplicative
    for n >= 3; exhaustive verification pins this variant.
    """
    from .groups import CyclicGroup, HeisenbergGroup

    if n < 2:
        raise ValueError("need n >= 2")
    g2 = nil2(CyclicGroup(n), CyclicGroup(n))
    heis = HeisenbergGroup(n)

    def iso(x: Nil2Element):
        t = x.t.coords[0]
        return (x.b, x.a, (-t) % n)

    return g2, heis, iso


def heisenberg_witness_integers():
    """Same map for two copies of Z; checked by sampling, the group is infinite."""
    from .groups import HeisenbergGroup, IntegerGroup

    g2 = nil2(IntegerGroup(), IntegerGroup())
    heis = HeisenbergGroup(None)

    def iso(x: Nil2Element):
        return (x.b, x.a, -x.t.coords[0])

    return g2, heis, iso
