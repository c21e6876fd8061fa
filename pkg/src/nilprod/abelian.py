"""Finitely generated abelian groups in invariant-factor coordinates.

This module is the arithmetic bedrock for everything else: exact Smith
normal form over the integers, groups described by a list of factors
(``0`` encodes an infinite cyclic summand, ``1`` is forbidden), coordinate
vectors reduced factor by factor, and the gcd-rule tensor product.  The
tensor product is kept in two shapes: a canonical invariant-factor form
for reporting, and a raw generator-pair grid whose cells are indexed by
pairs of factors, which is what the nilpotent products need.

All arithmetic is arbitrary-precision integer arithmetic; there are no
floats anywhere in this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, prod
from typing import Callable, Iterator, Sequence


class IntMatrix:
    """An immutable rectangular matrix of exact integers."""

    __slots__ = ("data", "rows", "cols")

    def __init__(self, rows: Sequence[Sequence[int]], cols: int | None = None):
        data = tuple(tuple(int(v) for v in row) for row in rows)
        if data:
            cols = len(data[0])
            if any(len(row) != cols for row in data):
                raise ValueError("ragged rows")
        elif cols is None:
            cols = 0
        self.data = data
        self.rows = len(data)
        self.cols = cols

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.data[r][c]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return IntMatrix(
            [
                [sum(self.data[i][k] * other.data[k][j] for k in range(self.cols))
                 for j in range(other.cols)]
                for i in range(self.rows)
            ],
            cols=other.cols,
        )

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant needs a square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(row) for row in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.data == other.data and self.cols == other.cols

    def __hash__(self) -> int:
        return hash((self.data, self.cols))

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.data]!r})"


def snf(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form with unimodular witnesses.

    Returns ``(d, u, v)`` with ``d == u @ m @ v``, ``d`` diagonal with
    nonnegative entries forming a divisibility chain d1 | d2 | ..., and
    ``det(u)``, ``det(v)`` equal to +-1.  The pivot is always an entry of
    minimal nonzero absolute value, which keeps intermediate growth tame.

    >>> d, u, v = snf(IntMatrix([[2, 4], [6, 8]]))
    >>> [d[0, 0], d[1, 1]]
    [2, 4]
    """
    nr, nc = m.rows, m.cols
    a = [list(row) for row in m.data]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst: int, src: int, q: int) -> None:
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst: int, src: int, q: int) -> None:
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def negate_row(i: int) -> None:
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(nr, nc)
    while t < limit:
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                entry = a[i][j]
                if entry != 0 and (piv is None or abs(entry) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        if a[t][t] < 0:
            negate_row(t)
        p = a[t][t]
        dirty = False
        for i in range(t + 1, nr):
            if a[i][t]:
                addmul_row(i, t, -(a[i][t] // p))
                if a[i][t]:
                    dirty = True
        for j in range(t + 1, nc):
            if a[t][j]:
                addmul_col(j, t, -(a[t][j] // p))
                if a[t][j]:
                    dirty = True
        if dirty:
            continue
        fixed = True
        for i in range(t + 1, nr):
            if any(x % p for x in a[i][t + 1:]):
                addmul_row(t, i, 1)
                fixed = False
                break
        if not fixed:
            continue
        t += 1

    return IntMatrix(a, cols=nc), IntMatrix(u, cols=nr), IntMatrix(v, cols=nc)


@dataclass(frozen=True)
class FGAbelian:
    """A finitely generated abelian group as an ordered list of factors.

    Factor ``d`` contributes a cyclic summand of order ``d``; ``d == 0``
    contributes an infinite cyclic summand and ``d == 1`` is rejected.
    The empty list is the trivial group.

    >>> str(FGAbelian((2, 4, 0)))
    'Z/2+Z/4+Z'
    >>> FGAbelian((2, 3)).canonicalized()
    FGAbelian(factors=(6,))
    """

    factors: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(d < 0 or d == 1 for d in self.factors):
            raise ValueError("factors must be 0 or >= 2")

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int | None:
        """Number of elements, or None when some factor is infinite."""
        if any(d == 0 for d in self.factors):
            return None
        return prod(self.factors)

    @property
    def is_trivial(self) -> bool:
        return not self.factors

    @property
    def is_canonical(self) -> bool:
        """True when finite factors form a divisibility chain and zeros come last."""
        seen_zero = False
        previous = None
        for d in self.factors:
            if d == 0:
                seen_zero = True
                continue
            if seen_zero:
                return False
            if previous is not None and d % previous:
                return False
            previous = d
        return True

    def canonicalized(self) -> "FGAbelian":
        """Equivalent group in invariant-factor form (may drop rank-1 junk)."""
        if self.is_canonical:
            return self
        d, _, _ = snf(IntMatrix.diagonal(self.factors))
        kept = tuple(d[i, i] for i in range(self.rank) if d[i, i] != 1)
        return FGAbelian(kept)

    def direct_sum(self, other: "FGAbelian") -> "FGAbelian":
        return FGAbelian(self.factors + other.factors)

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        if len(coords) != self.rank:
            raise ValueError("coordinate length mismatch")
        return tuple(c % d if d else c for c, d in zip(coords, self.factors))

    def element(self, coords: Sequence[int]) -> "AbelianElement":
        return AbelianElement(self, self.reduce(coords))

    def zero(self) -> "AbelianElement":
        return AbelianElement(self, (0,) * self.rank)

    def elements(self) -> Iterator["AbelianElement"]:
        """All elements in mixed-radix order (finite groups only)."""
        if self.order is None:
            raise ValueError("infinite group")
        for coords in itertools.product(*(range(d) for d in self.factors)):
            yield AbelianElement(self, coords)

    def enum_index(self, e: "AbelianElement") -> int:
        idx = 0
        for c, d in zip(e.coords, self.factors):
            if d == 0:
                raise ValueError("infinite group")
            idx = idx * d + c
        return idx

    def __str__(self) -> str:
        if not self.factors:
            return "0"
        return "+".join("Z" if d == 0 else f"Z/{d}" for d in self.factors)

    @classmethod
    def parse(cls, text: str) -> "FGAbelian":
        text = text.strip()
        if text == "0":
            return cls(())
        factors = []
        for part in text.split("+"):
            part = part.strip()
            if part == "Z":
                factors.append(0)
            elif part.startswith("Z/"):
                factors.append(int(part[2:]))
            else:
                raise ValueError(f"bad factor {part!r}")
        return cls(tuple(factors))


@dataclass(frozen=True)
class AbelianElement:
    """A coordinate vector in a fixed FGAbelian parent, reduced per factor."""

    group: FGAbelian
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.group.rank:
            raise ValueError("coordinate length mismatch")

    def _check(self, other: "AbelianElement") -> None:
        if self.group != other.group:
            raise ValueError("parent mismatch")

    def __add__(self, other: "AbelianElement") -> "AbelianElement":
        self._check(other)
        return self.group.element(tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: "AbelianElement") -> "AbelianElement":
        self._check(other)
        return self.group.element(tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> "AbelianElement":
        return self.group.element(tuple(-x for x in self.coords))

    def scale(self, k: int) -> "AbelianElement":
        return self.group.element(tuple(k * x for x in self.coords))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coords)


def cell_order(d: int, e: int) -> int:
    """Order of the (d, e) tensor cell: gcd with gcd(0, n) = n, gcd(0, 0) = 0."""
    return gcd(d, e)


@dataclass(frozen=True)
class TensorGrid:
    """The tensor product of two factor lists in generator-pair coordinates.

    Cell (i, j) has order gcd(d_i, e_j).  Cells of order 1 carry no data
    and are dropped from storage, but the (i, j) indexing is retained so
    bilinear images land in the right slot.  ``group`` lists the orders
    of the kept cells in row-major order and is in general not canonical.
    """

    left: FGAbelian
    right: FGAbelian
    cells: tuple[tuple[int, int], ...]
    group: FGAbelian

    def elem(self, a: AbelianElement, b: AbelianElement) -> AbelianElement:
        """Image of the pair (a, b); bilinear in each argument."""
        if a.group != self.left or b.group != self.right:
            raise ValueError("parent mismatch")
        return self.group.element(tuple(a.coords[i] * b.coords[j] for i, j in self.cells))

    def transpose_elem(self, t: AbelianElement) -> AbelianElement:
        """The same tensor read in the flipped grid (cells transposed)."""
        if t.group != self.group:
            raise ValueError("parent mismatch")
        flipped = tensor_grid(self.right, self.left)
        by_cell = dict(zip(self.cells, t.coords))
        return flipped.group.element(tuple(by_cell[(i, j)] for j, i in flipped.cells))


@lru_cache(maxsize=None)
def tensor_grid(left: FGAbelian, right: FGAbelian) -> TensorGrid:
    cells = []
    orders = []
    for i, d in enumerate(left.factors):
        for j, e in enumerate(right.factors):
            o = cell_order(d, e)
            if o != 1:
                cells.append((i, j))
                orders.append(o)
    return TensorGrid(left, right, tuple(cells), FGAbelian(tuple(orders)))


def tensor(left: FGAbelian, right: FGAbelian) -> FGAbelian:
    """Tensor product in canonical invariant-factor form.

    >>> str(tensor(FGAbelian((4,)), FGAbelian((6,))))
    'Z/2'
    >>> str(tensor(FGAbelian((0,)), FGAbelian((5,))))
    'Z/5'
    """
    return tensor_grid(left, right).group.canonicalized()


def tensor_elem(
    left: FGAbelian, right: FGAbelian, a: AbelianElement, b: AbelianElement
) -> AbelianElement:
    """Image of a (x) b in the generator-pair grid of left (x) right."""
    return tensor_grid(left, right).elem(a, b)


def from_relations(
    num_generators: int, relations: Sequence[Sequence[int]]
) -> tuple[FGAbelian, Callable[[Sequence[int]], AbelianElement]]:
    """Quotient of Z^r by the lattice spanned by the relation rows.

    Returns the quotient in invariant-factor form together with the map
    sending a generator exponent vector to its coordinates.

    >>> g, to = from_relations(2, [[2, 4], [6, 8]])
    >>> str(g)
    'Z/2+Z/4'
    >>> to([2, 4]).is_zero and to([6, 8]).is_zero
    True
    """
    r = num_generators
    rel_rows = [list(row) for row in relations]
    if any(len(row) != r for row in rel_rows):
        raise ValueError("relation arity mismatch")
    if not rel_rows:
        grp = FGAbelian((0,) * r)
        return grp, lambda exps: grp.element(tuple(exps))
    n = IntMatrix(rel_rows).transpose()
    d, u, _ = snf(n)
    diag = [d[i, i] if i < min(n.rows, n.cols) else 0 for i in range(r)]
    kept = [i for i in range(r) if diag[i] != 1]
    grp = FGAbelian(tuple(diag[i] for i in kept))

    def to_coords(exponents: Sequence[int]) -> AbelianElement:
        if len(exponents) != r:
            raise ValueError("exponent arity mismatch")
        full = [sum(u[i, k] * exponents[k] for k in range(r)) for i in kept]
        return grp.element(tuple(full))

    return grp, to_coords
