"""Second nilpotent products of families over a totally ordered index set.

Elements are sparse normal forms: a finitely supported map of component
letters plus a finitely supported map of central tensor coordinates, one
per ordered index pair (i, j) with i < j.  Pair entries queried against
the order are answered by the swap-negate rule t(j, i) = -swap(t(i, j)),
because flipping a central commutator inverts it.

Index sets come in two flavours: an explicit finite list of groups, or a
group-indexed family (all fibers equal, indices ordered by the index
group's canonical enumeration).  Group-indexed families over infinite
index groups are fully supported for element arithmetic since supports
are finite; only whole-group enumeration is refused.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from typing import Iterable, NamedTuple, Sequence

from .abelian import AbelianElement, tensor_grid
from .groups import Group, InfiniteGroupError, split_top_level
from .nilprod2 import Nil2Element, Nil2Group, nil2


class FamElement(NamedTuple):
    comps: tuple  # ((index, payload), ...) sorted by index key, identities omitted
    tens: tuple   # (((i, j), AbelianElement), ...) sorted, zeros omitted, key(i) < key(j)


class IndexSet(ABC):
    @abstractmethod
    def group_at(self, i) -> Group:
        ...

    @abstractmethod
    def key(self, i) -> int:
        """Rank of the index in the fixed total order."""

    @property
    @abstractmethod
    def is_finite(self) -> bool:
        ...

    @abstractmethod
    def indices(self) -> list:
        ...

    @abstractmethod
    def contains(self, i) -> bool:
        ...

    @property
    @abstractmethod
    def signature(self) -> tuple:
        ...

    @abstractmethod
    def format_index(self, i) -> str:
        ...

    @abstractmethod
    def parse_index(self, text: str):
        ...

    def __eq__(self, other):
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self.signature == other.signature

    def __hash__(self):
        return hash(self.signature)


class FiniteIndexSet(IndexSet):
    """Indices 0..k-1, each with its own group."""

    def __init__(self, members: Sequence[Group]):
        self.members = tuple(members)

    def group_at(self, i) -> Group:
        return self.members[i]

    def key(self, i) -> int:
        return i

    @property
    def is_finite(self) -> bool:
        return True

    def indices(self) -> list:
        return list(range(len(self.members)))

    def contains(self, i) -> bool:
        return isinstance(i, int) and 0 <= i < len(self.members)

    @property
    def signature(self) -> tuple:
        return ("fin", tuple(m.signature for m in self.members))

    def format_index(self, i) -> str:
        return str(i)

    def parse_index(self, text: str):
        i = int(text.strip())
        if not self.contains(i):
            raise ValueError(f"index {i} out of range")
        return i


class GroupIndexSet(IndexSet):
    """Indices are the elements of a group, all carrying the same fiber."""

    def __init__(self, index_group: Group, fiber: Group):
        self.index_group = index_group
        self.fiber = fiber

    def group_at(self, i) -> Group:
        return self.fiber

    def key(self, i) -> int:
        return self.index_group.enum_index(i)

    @property
    def is_finite(self) -> bool:
        return self.index_group.order is not None

    def indices(self) -> list:
        return self.index_group.elements()

    def contains(self, i) -> bool:
        return self.index_group.contains(i)

    @property
    def signature(self) -> tuple:
        return ("gidx", self.index_group.signature, self.fiber.signature)

    def format_index(self, i) -> str:
        return self.index_group.format_element(i)

    def parse_index(self, text: str):
        return self.index_group.parse_element(text)


class FamilyGroup(Group):
    """The second nilpotent product over an ordered index set."""

    def __init__(self, index_set: IndexSet):
        self.index_set = index_set
        if isinstance(index_set, FiniteIndexSet):
            self.name = "nil(" + ", ".join(m.name for m in index_set.members) + ")"
        else:
            self.name = f"nil_[{index_set.index_group.name}]({index_set.fiber.name})"

    # -- element plumbing -----------------------------------------------------

    def pair_grid(self, i, j):
        return tensor_grid(self.index_set.group_at(i).abelian, self.index_set.group_at(j).abelian)

    def pair_group(self, i, j) -> Nil2Group:
        return nil2(self.index_set.group_at(i), self.index_set.group_at(j))

    def element(self, comps: dict, tens: dict) -> FamElement:
        """Normal form from sparse maps; drops identities and zeros, sorts keys."""
        key = self.index_set.key
        cleaned_comps = []
        for i, h in comps.items():
            if not self.index_set.contains(i):
                raise ValueError(f"unknown index {i!r}")
            if h != self.index_set.group_at(i).identity:
                cleaned_comps.append((i, h))
        cleaned_tens = []
        for (i, j), t in tens.items():
            if key(i) >= key(j):
                raise ValueError(f"pair {i, j} not in increasing order")
            if t.group != self.pair_grid(i, j).group:
                raise ValueError("tensor entry in the wrong grid")
            if not t.is_zero:
                cleaned_tens.append(((i, j), t))
        cleaned_comps.sort(key=lambda item: key(item[0]))
        cleaned_tens.sort(key=lambda item: (key(item[0][0]), key(item[0][1])))
        return FamElement(tuple(cleaned_comps), tuple(cleaned_tens))

    @property
    def identity(self) -> FamElement:
        return FamElement((), ())

    def embed(self, i, h) -> FamElement:
        return self.element({i: h}, {})

    def mul(self, x: FamElement, y: FamElement) -> FamElement:
        key = self.index_set.key
        xc, yc = dict(x.comps), dict(y.comps)
        comps = {}
        for i in sorted(set(xc) | set(yc), key=key):
            grp = self.index_set.group_at(i)
            comps[i] = grp.mul(xc.get(i, grp.identity), yc.get(i, grp.identity))
        tens: dict = {}
        for pair, t in itertools.chain(x.tens, y.tens):
            tens[pair] = tens[pair] + t if pair in tens else t
        for i, yi in y.comps:
            for j, xj in x.comps:
                if key(i) < key(j):
                    grid = self.pair_grid(i, j)
                    delta = grid.elem(
                        self.index_set.group_at(i).ab_coords(yi),
                        self.index_set.group_at(j).ab_coords(xj),
                    )
                    tens[(i, j)] = tens[(i, j)] - delta if (i, j) in tens else -delta
        return self.element(comps, tens)

    def inv(self, x: FamElement) -> FamElement:
        comps = {i: self.index_set.group_at(i).inv(h) for i, h in x.comps}
        tens: dict = {pair: -t for pair, t in x.tens}
        for (i, xi), (j, xj) in itertools.combinations(x.comps, 2):
            grid = self.pair_grid(i, j)
            delta = grid.elem(
                self.index_set.group_at(i).ab_coords(xi),
                self.index_set.group_at(j).ab_coords(xj),
            )
            tens[(i, j)] = tens[(i, j)] - delta if (i, j) in tens else -delta
        return self.element(comps, tens)

    # -- projections and support ----------------------------------------------

    def proj(self, x: FamElement, subset: Iterable) -> FamElement:
        """Erase every letter and tensor entry outside the subset."""
        keep = set(subset)
        comps = {i: h for i, h in x.comps if i in keep}
        tens = {pair: t for pair, t in x.tens if pair[0] in keep and pair[1] in keep}
        return self.element(comps, tens)

    def proj_pair(self, x: FamElement, i, j) -> Nil2Element:
        """Projection onto H_i *2 H_j with the i slot first."""
        if i == j:
            raise ValueError("pair projection needs two distinct indices")
        xc = dict(x.comps)
        gi, gj = self.index_set.group_at(i), self.index_set.group_at(j)
        a = xc.get(i, gi.identity)
        b = xc.get(j, gj.identity)
        stored = dict(x.tens)
        if self.index_set.key(i) < self.index_set.key(j):
            t = stored.get((i, j), self.pair_grid(i, j).group.zero())
        else:
            back = stored.get((j, i))
            if back is None:
                t = self.pair_grid(i, j).group.zero()
            else:
                t = -self.pair_grid(j, i).transpose_elem(back)
        return Nil2Element(a, b, t)

    def support(self, x: FamElement) -> frozenset:
        out = {i for i, _ in x.comps}
        for (i, j), _ in x.tens:
            out.add(i)
            out.add(j)
        return frozenset(out)

    def support_by_projection(self, x: FamElement, probes: Iterable = ()) -> frozenset:
        """The equivalent characterization: indices i with some pair projection
        sticking out of the j factor.

        For finite index sets this quantifies over every index.  Over an
        infinite index group the candidates are the stored support plus a
        couple of fresh probe indices, which suffices: a pair projection
        involving two untouched indices is always trivial."""
        base = self.support(x)
        probes = set(probes)
        if not probes:
            if self.index_set.is_finite:
                probes = set(self.index_set.indices()) - base
            else:
                ig = self.index_set.index_group
                k = 0
                while len(probes) < 2:
                    cand = ig.element_at(k)
                    if cand not in base:
                        probes.add(cand)
                    k += 1
        candidates = base | probes
        out = set()
        for i in candidates:
            for j in candidates - {i}:
                p = self.proj_pair(x, i, j)
                if p.a != self.index_set.group_at(i).identity or not p.t.is_zero:
                    out.add(i)
                    break
        return frozenset(out)

    # -- group interface ---------------------------------------------------------

    @property
    def order(self) -> int | None:
        if not self.index_set.is_finite:
            return None
        total = 1
        idx = self.index_set.indices()
        for i in idx:
            o = self.index_set.group_at(i).order
            if o is None:
                return None
            total *= o
        for i, j in itertools.combinations(idx, 2):
            o = self.pair_grid(i, j).group.order
            if o is None:
                return None
            total *= o
        return total

    def _elements(self) -> list[FamElement]:
        idx = self.index_set.indices()
        pairs = list(itertools.combinations(idx, 2))
        comp_choices = [self.index_set.group_at(i).elements() for i in idx]
        tens_choices = [list(self.pair_grid(i, j).group.elements()) for i, j in pairs]
        out = []
        for comp_combo in itertools.product(*comp_choices):
            comps = dict(zip(idx, comp_combo))
            for tens_combo in itertools.product(*tens_choices):
                tens = dict(zip(pairs, tens_combo))
                out.append(self.element(comps, tens))
        return out

    @property
    def generators(self) -> tuple:
        gens = []
        for i in self.index_set.indices():
            for g in self.index_set.group_at(i).generators:
                gens.append(self.embed(i, g))
        return tuple(gens)

    @property
    def signature(self) -> tuple:
        return ("fam", self.index_set.signature)

    def _ab_build(self):
        from .abelian import FGAbelian

        idx = self.index_set.indices()
        offsets = {}
        total = 0
        factors: tuple[int, ...] = ()
        for i in idx:
            offsets[i] = total
            ab = self.index_set.group_at(i).abelian
            factors = factors + ab.factors
            total += ab.rank
        grp = FGAbelian(factors)

        def to(x: FamElement) -> AbelianElement:
            coords = [0] * total
            for i, h in x.comps:
                part = self.index_set.group_at(i).ab_coords(h)
                for k, c in enumerate(part.coords):
                    coords[offsets[i] + k] = c
            return grp.element(tuple(coords))

        return grp, to

    def sample(self, rng, max_support: int = 3) -> FamElement:
        """A random element with small support (works for infinite index groups)."""
        if self.index_set.is_finite:
            pool = self.index_set.indices()
        else:
            ig = self.index_set.index_group
            pool = [ig.element_at(k) for k in range(12)]
        size = rng.randrange(0, min(max_support, len(pool)) + 1)
        chosen = sorted(rng.sample(range(len(pool)), size))
        support = [pool[k] for k in chosen]
        comps = {i: self.index_set.group_at(i).sample(rng) for i in support}
        tens = {}
        for i, j in itertools.combinations(support, 2):
            grid = self.pair_grid(i, j).group
            coords = tuple(rng.randrange(d) if d else rng.randrange(-4, 5) for d in grid.factors)
            tens[(i, j)] = grid.element(coords)
        return self.element(comps, tens)

    # -- literals ------------------------------------------------------------------

    def format_element(self, x: FamElement) -> str:
        fmt_i = self.index_set.format_index
        comp_txt = ", ".join(
            f"{fmt_i(i)}: {self.index_set.group_at(i).format_element(h)}" for i, h in x.comps
        )
        tens_txt = ", ".join(
            f"({fmt_i(i)},{fmt_i(j)}): [{t}]" for (i, j), t in x.tens
        )
        if tens_txt:
            return "{" + comp_txt + " | " + tens_txt + "}"
        return "{" + comp_txt + "}"

    def parse_element(self, text: str) -> FamElement:
        text = text.strip()
        if not (text.startswith("{") and text.endswith("}")):
            raise ValueError(f"bad family literal {text!r}")
        body = text[1:-1]
        if "|" in body:
            comp_part, tens_part = body.split("|", 1)
        else:
            comp_part, tens_part = body, ""
        comps = {}
        for chunk in split_top_level(comp_part, ","):
            idx_txt, val_txt = chunk.split(":", 1)
            i = self.index_set.parse_index(idx_txt)
            comps[i] = self.index_set.group_at(i).parse_element(val_txt)
        tens = {}
        for chunk in split_top_level(tens_part, ","):
            pair_txt, val_txt = chunk.rsplit(":", 1)
            pair_txt = pair_txt.strip()
            if not (pair_txt.startswith("(") and pair_txt.endswith(")")):
                raise ValueError(f"bad pair key {pair_txt!r}")
            i_txt, j_txt = split_top_level(pair_txt[1:-1], ",")
            i = self.index_set.parse_index(i_txt)
            j = self.index_set.parse_index(j_txt)
            val_txt = val_txt.strip()
            if not (val_txt.startswith("[") and val_txt.endswith("]")):
                raise ValueError(f"bad tensor value {val_txt!r}")
            inner = val_txt[1:-1].strip()
            coords = tuple(int(v) for v in inner.split(",")) if inner else ()
            tens[(i, j)] = self.pair_grid(i, j).group.element(coords)
        return self.element(comps, tens)


def family(*members: Group) -> FamilyGroup:
    """The product of an explicit finite list of groups."""
    return FamilyGroup(FiniteIndexSet(members))


def shift_family(index_group: Group, fiber: Group) -> FamilyGroup:
    """The product of copies of the fiber indexed by a group."""
    return FamilyGroup(GroupIndexSet(index_group, fiber))


def central_commutator(fam: FamilyGroup, x: FamElement, z: FamElement) -> FamElement:
    """The commutator [x, z]; asserts it is purely central."""
    c = fam.mul(fam.mul(x, z), fam.mul(fam.inv(x), fam.inv(z)))
    if c.comps:
        raise AssertionError("commutator across disjoint supports has letters left")
    return c


# -- regrouping (associativity) ----------------------------------------------------


def _block_layout(fam: FamilyGroup, blocks: Sequence[Sequence]):
    """Validate the partition and precompute ordering and offset data."""
    idx = fam.index_set.indices()
    key = fam.index_set.key
    flat = [i for blk in blocks for i in blk]
    if sorted(flat, key=key) != sorted(idx, key=key) or len(flat) != len(idx):
        raise ValueError("blocks do not partition the index set")
    ordered_blocks = [sorted(blk, key=key) for blk in blocks]
    ordered_blocks.sort(key=lambda blk: key(blk[0]))
    block_of = {}
    pos_in_block = {}
    for b, blk in enumerate(ordered_blocks):
        for p, i in enumerate(blk):
            block_of[i] = b
            pos_in_block[i] = p
    offsets = []
    for blk in ordered_blocks:
        offs = {}
        total = 0
        for i in blk:
            offs[i] = total
            total += fam.index_set.group_at(i).abelian.rank
        offsets.append(offs)
    return ordered_blocks, block_of, pos_in_block, offsets


def regroup_group(fam: FamilyGroup, blocks: Sequence[Sequence]) -> FamilyGroup:
    """The product-of-block-products group for a partition of the indices."""
    ordered_blocks, _, _, _ = _block_layout(fam, blocks)
    block_groups = [
        FamilyGroup(FiniteIndexSet(tuple(fam.index_set.group_at(i) for i in blk)))
        for blk in ordered_blocks
    ]
    return FamilyGroup(FiniteIndexSet(tuple(block_groups)))


def regroup(fam: FamilyGroup, blocks: Sequence[Sequence], x: FamElement) -> FamElement:
    """Rewrite x in block-major normal form, as an element of regroup_group.

    Reordering the component letters into block-major order walks letters
    past each other; every inverted pair (i, j) deposits the central term
    ab(x_i) (x) ab(x_j) on top of the stored tensor entry.
    """
    ordered_blocks, block_of, pos_in_block, offsets = _block_layout(fam, blocks)
    outer = regroup_group(fam, blocks)

    adjusted: dict = {pair: t for pair, t in x.tens}
    for (i, xi), (j, xj) in itertools.combinations(x.comps, 2):
        if block_of[j] < block_of[i]:
            grid = fam.pair_grid(i, j)
            delta = grid.elem(
                fam.index_set.group_at(i).ab_coords(xi),
                fam.index_set.group_at(j).ab_coords(xj),
            )
            adjusted[(i, j)] = adjusted[(i, j)] + delta if (i, j) in adjusted else delta

    block_groups = outer.index_set.members
    inner_comps: list[dict] = [dict() for _ in ordered_blocks]
    inner_tens: list[dict] = [dict() for _ in ordered_blocks]
    outer_tens_coords: dict = {}
    for i, h in x.comps:
        inner_comps[block_of[i]][pos_in_block[i]] = h
    for (i, j), t in adjusted.items():
        if t.is_zero:
            continue
        bi, bj = block_of[i], block_of[j]
        if bi == bj:
            inner_tens[bi][(pos_in_block[i], pos_in_block[j])] = t
            continue
        if bi < bj:
            src, dst = (i, j), (bi, bj)
            value = t
        else:
            src, dst = (j, i), (bj, bi)
            value = -fam.pair_grid(i, j).transpose_elem(t)
        p_grid = fam.pair_grid(*src)
        big_grid = tensor_grid(block_groups[dst[0]].abelian, block_groups[dst[1]].abelian)
        if dst not in outer_tens_coords:
            outer_tens_coords[dst] = {cell: 0 for cell in big_grid.cells}
        off_l = offsets[dst[0]][src[0]]
        off_r = offsets[dst[1]][src[1]]
        for (ci, cj), c in zip(p_grid.cells, value.coords):
            outer_tens_coords[dst][(off_l + ci, off_r + cj)] += c

    outer_comps = {
        b: block_groups[b].element(inner_comps[b], inner_tens[b])
        for b in range(len(ordered_blocks))
    }
    outer_tens = {}
    for (bl, br), cellmap in outer_tens_coords.items():
        big_grid = tensor_grid(block_groups[bl].abelian, block_groups[br].abelian)
        outer_tens[(bl, br)] = big_grid.group.element(
            tuple(cellmap[cell] for cell in big_grid.cells)
        )
    return outer.element(outer_comps, outer_tens)


def flatten(fam: FamilyGroup, blocks: Sequence[Sequence], big: FamElement) -> FamElement:
    """Inverse of regroup: unpack a block-major element back over the flat index set."""
    ordered_blocks, block_of, pos_in_block, offsets = _block_layout(fam, blocks)
    outer = regroup_group(fam, blocks)
    block_groups = outer.index_set.members

    comps: dict = {}
    adjusted: dict = {}
    for b, inner in big.comps:
        blk = ordered_blocks[b]
        for p, h in inner.comps:
            comps[blk[p]] = h
        for (p, q), t in inner.tens:
            adjusted[(blk[p], blk[q])] = t
    for (bl, br), t in big.tens:
        big_grid = tensor_grid(block_groups[bl].abelian, block_groups[br].abelian)
        by_cell = dict(zip(big_grid.cells, t.coords))
        for i in ordered_blocks[bl]:
            for j in ordered_blocks[br]:
                p_grid = fam.pair_grid(i, j)
                coords = tuple(
                    by_cell.get((offsets[bl][i] + ci, offsets[br][j] + cj), 0)
                    for ci, cj in p_grid.cells
                )
                piece = p_grid.group.element(coords)
                if piece.is_zero:
                    continue
                if fam.index_set.key(i) < fam.index_set.key(j):
                    adjusted[(i, j)] = adjusted.get((i, j), p_grid.group.zero()) + piece
                else:
                    flip = fam.pair_grid(j, i)
                    neg = -p_grid.transpose_elem(piece)
                    adjusted[(j, i)] = adjusted.get((j, i), flip.group.zero()) + neg

    tens = dict(adjusted)
    comp_items = sorted(comps.items(), key=lambda item: fam.index_set.key(item[0]))
    for (i, xi), (j, xj) in itertools.combinations(comp_items, 2):
        if block_of[j] < block_of[i]:
            grid = fam.pair_grid(i, j)
            delta = grid.elem(
                fam.index_set.group_at(i).ab_coords(xi),
                fam.index_set.group_at(j).ab_coords(xj),
            )
            tens[(i, j)] = (tens.get((i, j), grid.group.zero())) - delta
    return fam.element(comps, tens)
