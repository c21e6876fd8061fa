"""Concrete groups behind one small uniform interface.

A ``Group`` object owns the operations; elements are plain hashable
payloads (ints and tuples).  That keeps products cheap to build and lets
the nilpotent product constructions nest: a product group is itself just
another ``Group`` whose payloads happen to be triples or sparse maps.

Every group carries its abelianization as an ``FGAbelian`` plus a
coordinate map, and a canonical total order on elements (the enumeration
rank; for the integers, the spiral 0, 1, -1, 2, -2, ...).
"""

from __future__ import annotations

import itertools
import re
from abc import ABC, abstractmethod
from typing import Iterable, Sequence

from .abelian import AbelianElement, FGAbelian


class InfiniteGroupError(ValueError):
    """Raised when an enumeration-based operation meets an infinite group."""


class Group(ABC):
    """Group operations over opaque hashable element payloads."""

    name: str = "group"

    # -- core operations ------------------------------------------------

    @property
    @abstractmethod
    def identity(self):
        ...

    @abstractmethod
    def mul(self, x, y):
        ...

    @abstractmethod
    def inv(self, x):
        ...

    @property
    @abstractmethod
    def order(self) -> int | None:
        """Number of elements, or None for infinite groups."""

    @abstractmethod
    def _elements(self) -> list:
        ...

    @property
    @abstractmethod
    def generators(self) -> tuple:
        ...

    @property
    @abstractmethod
    def signature(self) -> tuple:
        """Structural identity; two handles with equal signatures are the same group."""

    # -- abelianization ---------------------------------------------------

    @property
    def abelian(self) -> FGAbelian:
        """Quotient by the derived subgroup, in factor-list form."""
        grp, _ = self._abelianization()
        return grp

    def ab_coords(self, x) -> AbelianElement:
        """Image of x in the abelianization."""
        _, to = self._abelianization()
        return to(x)

    def _abelianization(self):
        if not hasattr(self, "_ab_cache"):
            self._ab_cache = self._ab_build()
        return self._ab_cache

    def _ab_build(self):
        return self._generic_abelianization()

    def ab_basis_elements(self) -> list:
        """One preimage in the group for each abelianization factor."""
        grp = self.abelian
        found = []
        for i in range(grp.rank):
            unit = grp.element(tuple(int(j == i) for j in range(grp.rank)))
            for x in self.elements():
                if self.ab_coords(x) == unit:
                    found.append(x)
                    break
            else:
                raise RuntimeError("abelianization basis preimage missing")
        return found

    # -- enumeration and ordering ----------------------------------------

    def elements(self) -> list:
        """All elements in canonical order, identity first (finite groups)."""
        if self.order is None:
            raise InfiniteGroupError(f"{self.name} is infinite")
        if not hasattr(self, "_elem_cache"):
            self._elem_cache = self._elements()
        return self._elem_cache

    def enum_index(self, x) -> int:
        """Rank of x in the canonical order; 0 for the identity."""
        if not hasattr(self, "_index_cache"):
            self._index_cache = {e: i for i, e in enumerate(self.elements())}
        return self._index_cache[x]

    def sample(self, rng):
        """A uniform random element (finite groups unless overridden)."""
        return rng.choice(self.elements())

    # -- literals ----------------------------------------------------------

    @abstractmethod
    def format_element(self, x) -> str:
        ...

    @abstractmethod
    def parse_element(self, text: str):
        ...

    # -- derived helpers ----------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    def pow(self, x, n: int):
        if n < 0:
            return self.pow(self.inv(x), -n)
        result = self.identity
        base = x
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def commutator(self, x, y):
        return self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y)))

    def conjugate(self, g, x):
        return self.mul(self.mul(g, x), self.inv(g))

    def element_order(self, x) -> int:
        n = 1
        y = x
        while y != self.identity:
            y = self.mul(y, x)
            n += 1
            if self.order is not None and n > self.order:
                raise RuntimeError("order loop escaped the group")
        return n

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self.mul(a, b) == self.mul(b, a) for a in gens for b in gens)

    def contains(self, x) -> bool:
        try:
            return x in set(self.elements())
        except InfiniteGroupError:
            return True

    def _generic_abelianization(self):
        if self.order is None:
            raise InfiniteGroupError(f"no generic abelianization for {self.name}")
        if self.order > 10_000:
            raise ValueError("generic abelianization bounded to order 10^4")
        der = set(derived_subgroup(self).elements())
        rep_of = {}
        for x in self.elements():
            if x in rep_of:
                continue
            coset = [self.mul(x, d) for d in der]
            rep = min(coset, key=self.enum_index)
            for y in coset:
                rep_of[y] = rep
        reps = list(dict.fromkeys(rep_of[x] for x in self.elements()))

        def qmul(r1, r2):
            return rep_of[self.mul(r1, r2)]

        grp, table = abelian_decomposition(reps, qmul, self.identity)
        return grp, lambda x: grp.element(table[rep_of[x]])

    # -- identity and hashing ----------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Group):
            return NotImplemented
        return self.signature == other.signature

    def __hash__(self) -> int:
        return hash(self.signature)

    def __repr__(self) -> str:
        return self.name


class CyclicGroup(Group):
    """Z/n with elements 0..n-1; n = 1 gives the trivial group."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("modulus must be >= 1")
        self.n = n
        self.name = f"Z/{n}"

    @property
    def identity(self) -> int:
        return 0

    def mul(self, x: int, y: int) -> int:
        return (x + y) % self.n

    def inv(self, x: int) -> int:
        return (-x) % self.n

    @property
    def order(self) -> int:
        return self.n

    def _elements(self) -> list[int]:
        return list(range(self.n))

    @property
    def generators(self) -> tuple:
        return (1,) if self.n > 1 else ()

    @property
    def signature(self) -> tuple:
        return ("cyclic", self.n)

    def _ab_build(self):
        grp = FGAbelian((self.n,) if self.n > 1 else ())
        return grp, lambda x: grp.element((x,) if self.n > 1 else ())

    def ab_basis_elements(self) -> list:
        return [1] if self.n > 1 else []

    def enum_index(self, x: int) -> int:
        return x % self.n

    def format_element(self, x: int) -> str:
        return str(x)

    def parse_element(self, text: str) -> int:
        return int(text.strip()) % self.n


class IntegerGroup(Group):
    """The additive integers; canonical order is the spiral 0, 1, -1, 2, -2, ..."""

    name = "Z"

    @property
    def identity(self) -> int:
        return 0

    def mul(self, x: int, y: int) -> int:
        return x + y

    def inv(self, x: int) -> int:
        return -x

    @property
    def order(self) -> None:
        return None

    def _elements(self) -> list:
        raise InfiniteGroupError("Z is infinite")

    @property
    def generators(self) -> tuple:
        return (1,)

    @property
    def signature(self) -> tuple:
        return ("integers",)

    def _ab_build(self):
        grp = FGAbelian((0,))
        return grp, lambda x: grp.element((x,))

    def ab_basis_elements(self) -> list:
        return [1]

    def enum_index(self, x: int) -> int:
        return 2 * x - 1 if x > 0 else -2 * x

    def element_at(self, idx: int) -> int:
        return (idx + 1) // 2 if idx % 2 else -(idx // 2)

    def sample(self, rng) -> int:
        return rng.randrange(-50, 51)

    def format_element(self, x: int) -> str:
        return str(x)

    def parse_element(self, text: str) -> int:
        return int(text.strip())


class DihedralGroup(Group):
    """The dihedral group of order 2n: rotations r^k and reflections r^k s."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.name = f"D{n}"

    @property
    def identity(self) -> tuple[int, int]:
        return (0, 0)

    def mul(self, x, y):
        r1, s1 = x
        r2, s2 = y
        return ((r1 + (-r2 if s1 else r2)) % self.n, s1 ^ s2)

    def inv(self, x):
        r, s = x
        return x if s else ((-r) % self.n, 0)

    @property
    def order(self) -> int:
        return 2 * self.n

    def _elements(self) -> list:
        return [(r, s) for r in range(self.n) for s in (0, 1)]

    @property
    def generators(self) -> tuple:
        if self.n == 1:
            return ((0, 1),)
        return ((1, 0), (0, 1))

    @property
    def signature(self) -> tuple:
        return ("dihedral", self.n)

    def _ab_build(self):
        if self.n % 2 == 0:
            grp = FGAbelian((2, 2))
            return grp, lambda x: grp.element((x[0] % 2, x[1]))
        grp = FGAbelian((2,))
        return grp, lambda x: grp.element((x[1],))

    def ab_basis_elements(self) -> list:
        if self.n % 2 == 0:
            return [(1, 0), (0, 1)]
        return [(0, 1)]

    def enum_index(self, x) -> int:
        return 2 * x[0] + x[1]

    def format_element(self, x) -> str:
        r, s = x
        parts = []
        if r == 1:
            parts.append("r")
        elif r > 1:
            parts.append(f"r^{r}")
        if s:
            parts.append("s")
        return "*".join(parts) if parts else "e"

    def parse_element(self, text: str):
        text = text.strip()
        if text == "e":
            return (0, 0)
        match = re.fullmatch(r"(?:r(?:\^(\d+))?)?\s*\*?\s*(s)?", text)
        if not match or (match.group(1) is None and "r" not in text and match.group(2) is None):
            raise ValueError(f"bad dihedral literal {text!r}")
        rot = 0
        if "r" in text:
            rot = int(match.group(1)) if match.group(1) else 1
        ref = 1 if match.group(2) else 0
        return (rot % self.n, ref)


class PermutationGroup(Group):
    """A permutation group on m points, enumerated by naive closure."""

    def __init__(self, m: int, generators: Iterable[Sequence[int]], name: str | None = None):
        self.m = m
        gens = []
        for g in generators:
            g = tuple(g)
            if sorted(g) != list(range(m)):
                raise ValueError(f"not a permutation of 0..{m - 1}: {g!r}")
            gens.append(g)
        self._gens = tuple(gens)
        self.name = name or f"Perm({m})"

    @property
    def identity(self) -> tuple:
        return tuple(range(self.m))

    def mul(self, p, q):
        return tuple(p[q[i]] for i in range(self.m))

    def inv(self, p):
        out = [0] * self.m
        for i, pi in enumerate(p):
            out[pi] = i
        return tuple(out)

    @property
    def order(self) -> int:
        return len(self.elements())

    def elements(self) -> list:
        if not hasattr(self, "_elem_cache"):
            self._elem_cache = self._elements()
        return self._elem_cache

    def _elements(self) -> list:
        e = self.identity
        seen = {e}
        out = [e]
        frontier = [e]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self._gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        out.append(y)
                        nxt.append(y)
            frontier = nxt
        return out

    @property
    def generators(self) -> tuple:
        return self._gens

    @property
    def signature(self) -> tuple:
        return ("perm", self.m, self._gens)

    def format_element(self, p) -> str:
        seen = set()
        cycles = []
        for i in range(self.m):
            if i in seen or p[i] == i:
                continue
            cycle = [i]
            j = p[i]
            while j != i:
                seen.add(j)
                cycle.append(j)
                j = p[j]
            cycles.append("(" + " ".join(str(k + 1) for k in cycle) + ")")
        return "".join(cycles) if cycles else "()"

    def parse_element(self, text: str):
        text = text.strip()
        if text in ("()", "e", ""):
            return self.identity
        out = list(range(self.m))
        for cyc in re.findall(r"\(([^()]*)\)", text):
            points = [int(t) - 1 for t in cyc.split()]
            if any(not 0 <= p < self.m for p in points):
                raise ValueError(f"point out of range in {text!r}")
            for a, b in zip(points, points[1:] + points[:1]):
                out[a] = b
        perm = tuple(out)
        if sorted(perm) != list(range(self.m)):
            raise ValueError(f"bad permutation literal {text!r}")
        return perm


def cycle(m: int, *points: int) -> tuple:
    """The cycle on the given 1-based points, as a permutation of m points."""
    out = list(range(m))
    pts = [p - 1 for p in points]
    for a, b in zip(pts, pts[1:] + pts[:1]):
        out[a] = b
    return tuple(out)


def symmetric(m: int) -> PermutationGroup:
    if m <= 1:
        return PermutationGroup(max(m, 1), [], name=f"S{m}")
    gens = [cycle(m, 1, 2)]
    if m > 2:
        gens.append(cycle(m, *range(1, m + 1)))
    return PermutationGroup(m, gens, name=f"S{m}")


def alternating(m: int) -> PermutationGroup:
    if m <= 2:
        return PermutationGroup(max(m, 1), [], name=f"A{m}")
    gens = [cycle(m, i, i + 1, i + 2) for i in range(1, m - 1)]
    return PermutationGroup(m, gens, name=f"A{m}")


class HeisenbergGroup(Group):
    """Upper unitriangular 3x3 matrices over Z/n, or over Z when n is None.

    Payload (a, b, c) multiplies as (a, b, c)(a', b', c') =
    (a + a', b + b', c + c' + a * b').
    """

    def __init__(self, n: int | None):
        if n is not None and n < 1:
            raise ValueError("modulus must be >= 1 or None")
        self.n = n
        self.name = f"Heis(Z/{n})" if n else "Heis(Z)"

    def _red(self, v: int) -> int:
        return v % self.n if self.n else v

    @property
    def identity(self) -> tuple[int, int, int]:
        return (0, 0, 0)

    def mul(self, x, y):
        a, b, c = x
        a2, b2, c2 = y
        return (self._red(a + a2), self._red(b + b2), self._red(c + c2 + a * b2))

    def inv(self, x):
        a, b, c = x
        return (self._red(-a), self._red(-b), self._red(-c + a * b))

    @property
    def order(self) -> int | None:
        return self.n ** 3 if self.n else None

    def _elements(self) -> list:
        n = self.n
        return [(a, b, c) for a in range(n) for b in range(n) for c in range(n)]

    @property
    def generators(self) -> tuple:
        if self.n == 1:
            return ()
        return ((1, 0, 0), (0, 1, 0))

    @property
    def signature(self) -> tuple:
        return ("heis", self.n)

    def _ab_build(self):
        if self.n == 1:
            grp = FGAbelian(())
            return grp, lambda x: grp.element(())
        d = self.n if self.n else 0
        grp = FGAbelian((d, d))
        return grp, lambda x: grp.element((x[0], x[1]))

    def ab_basis_elements(self) -> list:
        if self.n == 1:
            return []
        return [(1, 0, 0), (0, 1, 0)]

    def enum_index(self, x) -> int:
        if not self.n:
            raise InfiniteGroupError("Heis(Z) has no canonical enumeration")
        a, b, c = x
        return (a * self.n + b) * self.n + c

    def sample(self, rng):
        if self.n:
            n = self.n
            return (rng.randrange(n), rng.randrange(n), rng.randrange(n))
        return (rng.randrange(-9, 10), rng.randrange(-9, 10), rng.randrange(-9, 10))

    def format_element(self, x) -> str:
        return f"({x[0]},{x[1]},{x[2]})"

    def parse_element(self, text: str):
        match = re.fullmatch(r"\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*", text)
        if not match:
            raise ValueError(f"bad Heisenberg literal {text!r}")
        a, b, c = (int(match.group(i)) for i in (1, 2, 3))
        return (self._red(a), self._red(b), self._red(c))


class DirectSumGroup(Group):
    """Componentwise direct sum of a list of groups; payloads are tuples."""

    def __init__(self, members: Sequence[Group]):
        self.members = tuple(members)
        self.name = "(" + " + ".join(m.name for m in self.members) + ")"

    @property
    def identity(self) -> tuple:
        return tuple(m.identity for m in self.members)

    def mul(self, x, y):
        return tuple(m.mul(a, b) for m, a, b in zip(self.members, x, y))

    def inv(self, x):
        return tuple(m.inv(a) for m, a in zip(self.members, x))

    @property
    def order(self) -> int | None:
        total = 1
        for m in self.members:
            if m.order is None:
                return None
            total *= m.order
        return total

    def _elements(self) -> list:
        return [tuple(combo) for combo in itertools.product(*(m.elements() for m in self.members))]

    @property
    def generators(self) -> tuple:
        gens = []
        for pos, m in enumerate(self.members):
            for g in m.generators:
                gens.append(tuple(g if i == pos else other.identity
                                  for i, other in enumerate(self.members)))
        return tuple(gens)

    @property
    def signature(self) -> tuple:
        return ("dsum", tuple(m.signature for m in self.members))

    def _ab_build(self):
        grp = FGAbelian(())
        for m in self.members:
            grp = grp.direct_sum(m.abelian)

        def to(x):
            coords: tuple[int, ...] = ()
            for m, part in zip(self.members, x):
                coords = coords + m.ab_coords(part).coords
            return grp.element(coords)

        return grp, to

    def sample(self, rng):
        return tuple(m.sample(rng) for m in self.members)

    def format_element(self, x) -> str:
        return "(" + "; ".join(m.format_element(p) for m, p in zip(self.members, x)) + ")"

    def parse_element(self, text: str):
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise ValueError(f"bad direct-sum literal {text!r}")
        parts = split_top_level(text[1:-1], ";")
        if len(parts) != len(self.members):
            raise ValueError("component count mismatch")
        return tuple(m.parse_element(p) for m, p in zip(self.members, parts))


class SubgroupView(Group):
    """An enumerated subgroup of a finite ambient group, sharing its operation."""

    def __init__(self, ambient: Group, elements: Sequence, generators: Sequence = ()):
        self.ambient = ambient
        elems = list(elements)
        if ambient.identity in elems:
            elems.remove(ambient.identity)
        self._elems = [ambient.identity] + sorted(elems, key=ambient.enum_index)
        self._gens = tuple(generators)
        self.name = f"subgroup({ambient.name}, order {len(self._elems)})"

    @property
    def identity(self):
        return self.ambient.identity

    def mul(self, x, y):
        return self.ambient.mul(x, y)

    def inv(self, x):
        return self.ambient.inv(x)

    @property
    def order(self) -> int:
        return len(self._elems)

    def _elements(self) -> list:
        return self._elems

    @property
    def generators(self) -> tuple:
        return self._gens if self._gens else tuple(self._elems[1:])

    @property
    def signature(self) -> tuple:
        return ("sub", self.ambient.signature, frozenset(self._elems))

    def format_element(self, x) -> str:
        return self.ambient.format_element(x)

    def parse_element(self, text: str):
        return self.ambient.parse_element(text)


def split_top_level(text: str, sep: str) -> list[str]:
    """Split on a separator, ignoring separators nested in (), [], {}."""
    parts = []
    depth = 0
    current = []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]


def subgroup_closure(group: Group, gens: Iterable) -> list:
    """Closure of gens under multiplication, identity first (finite ambient)."""
    e = group.identity
    seen = {e}
    out = [e]
    frontier = [e]
    gens = [g for g in gens if g != e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    nxt.append(y)
        frontier = nxt
    return out


def subgroup_generated(group: Group, gens: Iterable) -> SubgroupView:
    gens = list(gens)
    return SubgroupView(group, subgroup_closure(group, gens), gens)


def normal_closure(group: Group, seed: Iterable) -> SubgroupView:
    """Smallest normal subgroup containing the seed elements."""
    gens = set()
    pending = [g for g in seed if g != group.identity]
    while pending:
        g = pending.pop()
        if g in gens:
            continue
        gens.add(g)
        for c in group.generators:
            h = group.conjugate(c, g)
            if h not in gens:
                pending.append(h)
    return SubgroupView(group, subgroup_closure(group, gens), sorted(gens, key=group.enum_index))


def derived_subgroup(group: Group) -> SubgroupView:
    """Commutator subgroup of a finite group, by normal closure of generator commutators."""
    if group.order is None:
        raise InfiniteGroupError(f"derived subgroup of {group.name} is not enumerable")
    comms = {group.commutator(a, b) for a in group.generators for b in group.generators}
    return normal_closure(group, comms)


def lower_central_series(group: Group) -> list[SubgroupView]:
    """G = G1 >= G2 >= ... with G_{k+1} = [G, G_k], until stabilization."""
    if group.order is None:
        raise InfiniteGroupError("lower central series needs a finite group")
    series = [SubgroupView(group, group.elements(), group.generators)]
    while True:
        current = series[-1]
        comms = {group.commutator(g, x) for g in group.generators for x in current.elements()}
        nxt = normal_closure(group, comms)
        if nxt.order == current.order:
            break
        series.append(nxt)
        if nxt.order == 1:
            break
    return series


def nilpotency_class(group: Group) -> int | None:
    """Nilpotency class, or None when the series stabilizes above the identity."""
    series = lower_central_series(group)
    if series[-1].order != 1:
        return None
    return len(series) - 1


def abelian_decomposition(elements: Sequence, mul, identity):
    """Invariant factors of a finite abelian group given by a multiplication rule.

    Peels cyclic summands of maximal order.  Returns the group in canonical
    ascending form together with a dict mapping each element to coordinates.
    """
    n = len(elements)
    if n == 1:
        return FGAbelian(()), {identity: ()}

    def order_of(x):
        t = 1
        y = x
        while y != identity:
            y = mul(y, x)
            t += 1
        return t

    basis = []
    basis_orders = []
    span = {identity}
    span_list = [identity]
    while len(span) < n:
        best = None
        best_ord = 0
        for x in elements:
            if x in span:
                continue
            t = 1
            y = x
            while y not in span:
                y = mul(y, x)
                t += 1
            if t > best_ord:
                best_ord, best = t, x
        rep = None
        for s in span_list:
            y = mul(best, s)
            if order_of(y) == best_ord:
                rep = y
                break
        if rep is None:
            raise RuntimeError("no representative of maximal order; group not abelian?")
        basis.append(rep)
        basis_orders.append(best_ord)
        powers = [identity]
        y = rep
        while y != identity:
            powers.append(y)
            y = mul(y, rep)
        span = {mul(s, p) for s in span_list for p in powers}
        span_list = list(span)

    table = {}
    for tup in itertools.product(*(range(m) for m in basis_orders)):
        x = identity
        for b, exp in zip(basis, tup):
            y = x
            for _ in range(exp):
                y = mul(y, b)
            x = y
        table[x] = tuple(reversed(tup))
    if len(table) != n:
        raise RuntimeError("basis does not split the group")
    return FGAbelian(tuple(reversed(basis_orders))), table
