"""Explicitly tabulated finite groups.

Elements are integer indices ``0 .. order-1``; a group is its multiplication
table. Everything here is exact and, at desk scale, exhaustively checkable.
The search-heavy routines (subgroup closure, pair closure) run through the
kernels in :mod:`pfgroups._ext`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from pfgroups._ext import kernels
from pfgroups.errors import DeskScaleExceeded, InvalidTable, NotNormal

# Largest group we are willing to hold as a dense table.
TABLE_LIMIT = 2500
# Below this order associativity is checked over all triples; above it,
# Light's test over a generating set (also exact).
EXHAUSTIVE_ASSOC_LIMIT = 200

__all__ = [
    "FiniteGroup",
    "ProductGroup",
    "GeneratedSubgroup",
    "TABLE_LIMIT",
    "multiply",
    "subgroup_closure",
    "normal_closure",
    "quotient",
    "find_homomorphism",
    "is_isomorphic",
    "normal_subgroups",
    "cyclic_group",
    "trivial_group",
    "symmetric_group",
    "direct_product",
    "group_from_elements",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[a, b]`` is the index of ``a*b``. ``labels`` optionally names the
    elements (matrices, permutations, ...); it plays no role in the algebra.
    """

    def __init__(self, table, identity: int = 0, labels: Sequence[Hashable] | None = None,
                 name: str | None = None, check: bool = True):
        table = np.ascontiguousarray(table, dtype=np.int32)
        self._table = _readonly(table)
        self.order = int(table.shape[0])
        self.identity = int(identity)
        self.labels = tuple(labels) if labels is not None else None
        self.name = name
        if check:
            self._check_shape()

    # -- construction checks -------------------------------------------------

    def _check_shape(self):
        t = self.table
        n = self.order
        if t.ndim != 2 or t.shape != (n, n) or n == 0:
            raise InvalidTable(f"table must be a non-empty square array, got shape {t.shape}")
        if not 0 <= self.identity < n:
            raise InvalidTable("identity index out of range")
        if t.min() < 0 or t.max() >= n:
            raise InvalidTable("table entries out of range")
        ar = np.arange(n, dtype=np.int32)
        if not (np.array_equal(t[self.identity], ar) and np.array_equal(t[:, self.identity], ar)):
            raise InvalidTable("identity row/column is not the identity permutation")
        # Latin square <=> unique solvability of a*x = b, y*a = b.
        srt = np.sort(t, axis=1)
        if not (srt == ar).all() or not (np.sort(t, axis=0) == ar[:, None]).all():
            raise InvalidTable("table is not a Latin square (inverses fail)")
        if self.labels is not None and len(self.labels) != n:
            raise InvalidTable("labels length does not match order")

    def check_axioms(self) -> None:
        """Raise :class:`InvalidTable` unless the table is a group."""
        self._check_shape()
        t = self.table
        n = self.order
        if n <= EXHAUSTIVE_ASSOC_LIMIT:
            for a in range(n):
                # (a b) c  vs  a (b c) for all b, c
                if not np.array_equal(t[t[a]], t[a][t]):
                    raise InvalidTable(f"associativity fails with a={a}")
            return
        # Light's test: the c with (ab)c = a(bc) for all a, b are closed under
        # products, so checking a generating set suffices.
        for c in self.generating_set():
            if not np.array_equal(t[t, c], t[:, t[:, c]]):
                raise InvalidTable(f"associativity fails at generator {c}")

    # -- basic arithmetic ----------------------------------------------------

    @property
    def table(self) -> np.ndarray:
        return self._table

    def mul(self, a: int, b: int) -> int:
        return int(self._table[a, b])

    @cached_property
    def inverses(self) -> np.ndarray:
        t = self.table
        inv = np.argmax(t == self.identity, axis=1).astype(np.int32)
        return _readonly(inv)

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        result, base = self.identity, int(a)
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def conj(self, a: int, h: int) -> int:
        """``h^-1 a h``."""
        return self.mul(self.mul(self.inv(h), a), h)

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n, dtype=np.int32)
        k = 1
        t = self.table
        ar = np.arange(n)
        while (orders == 0).any():
            hit = (cur == self.identity) & (orders == 0)
            orders[hit] = k
            cur = t[cur, ar]
            k += 1
        return _readonly(orders)

    def element_order(self, a: int) -> int:
        return int(self.element_orders[a])

    def exponent(self) -> int:
        return reduce(math.lcm, (int(o) for o in set(self.element_orders.tolist())), 1)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def gen_cols(self, gens: Iterable[int]) -> np.ndarray:
        """Right-multiplication columns ``cols[j, a] = a * gens[j]``."""
        gens = [int(g) for g in gens]
        if not gens:
            return np.zeros((0, self.order), dtype=np.int32)
        return np.ascontiguousarray(self.table[:, gens].T)

    def index_of(self, label: Hashable) -> int:
        if self.labels is None:
            raise KeyError("group has no labels")
        return self._label_index[label]

    @cached_property
    def _label_index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def generating_set(self) -> list[int]:
        """A small generating set, chosen greedily by decreasing element order."""
        orders = self.element_orders
        candidates = sorted(range(self.order), key=lambda a: (-int(orders[a]), a))
        gens: list[int] = []
        members = {self.identity}
        for a in candidates:
            if len(members) == self.order:
                break
            if a in members:
                continue
            gens.append(a)
            members = set(kernels.closure(self.gen_cols(gens), self.identity).tolist())
        return gens

    def conjugacy_class_reps(self) -> list[int]:
        gens = self.generating_set()
        seen = np.zeros(self.order, dtype=bool)
        reps = []
        for a in range(self.order):
            if seen[a]:
                continue
            reps.append(a)
            orbit = {a}
            frontier = [a]
            while frontier:
                nxt = []
                for x in frontier:
                    for h in gens:
                        y = self.conj(x, h)
                        if y not in orbit:
                            orbit.add(y)
                            nxt.append(y)
                frontier = nxt
            seen[list(orbit)] = True
        return reps

    def __repr__(self):
        name = f" {self.name}" if self.name else ""
        return f"<FiniteGroup{name} order={self.order}>"

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return (self.order == other.order and self.identity == other.identity
                and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.order, self.identity, self.table.tobytes()))


class ProductGroup(FiniteGroup):
    """Direct product evaluated componentwise.

    Elements are mixed-radix indices over the factors (first factor most
    significant). The dense table is only built on demand and only up to
    :data:`TABLE_LIMIT`, so products far beyond desk scale remain usable by
    closure and homomorphism search.
    """

    def __init__(self, factors: Sequence[FiniteGroup], name: str | None = None):
        self.factors = tuple(factors)
        self.radix = [f.order for f in self.factors]
        self.order = math.prod(self.radix)
        self.identity = self.encode([f.identity for f in self.factors])
        self.name = name
        if all(f.labels is not None for f in self.factors) and self.order <= 10**5:
            self.labels = tuple(itertools.product(*(f.labels for f in self.factors)))
        else:
            self.labels = None
        self._table = None

    def encode(self, comps: Sequence[int]) -> int:
        idx = 0
        for c, r in zip(comps, self.radix):
            idx = idx * r + int(c)
        return idx

    def decode(self, a: int) -> list[int]:
        out = []
        for r in reversed(self.radix):
            a, c = divmod(int(a), r)
            out.append(c)
        return out[::-1]

    def _decode_all(self) -> list[np.ndarray]:
        idx = np.arange(self.order, dtype=np.int64)
        comps = []
        for r in reversed(self.radix):
            comps.append(idx % r)
            idx //= r
        return comps[::-1]

    @property
    def table(self) -> np.ndarray:
        if self._table is None:
            if self.order > TABLE_LIMIT:
                raise DeskScaleExceeded(
                    f"product of order {self.order} exceeds the table limit {TABLE_LIMIT}")
            comps = self._decode_all()
            t = np.zeros((self.order, self.order), dtype=np.int64)
            for f, c in zip(self.factors, comps):
                t = t * f.order + f.table[c[:, None], c[None, :]]
            self._table = _readonly(t.astype(np.int32))
        return self._table

    def mul(self, a, b):
        return self.encode([f.mul(x, y) for f, x, y in zip(self.factors, self.decode(a), self.decode(b))])

    @cached_property
    def inverses(self):
        comps = self._decode_all()
        out = np.zeros(self.order, dtype=np.int64)
        for f, c in zip(self.factors, comps):
            out = out * f.order + f.inverses[c]
        return _readonly(out.astype(np.int32))

    @cached_property
    def element_orders(self):
        comps = self._decode_all()
        out = np.ones(self.order, dtype=np.int64)
        for f, c in zip(self.factors, comps):
            out = np.lcm(out, f.element_orders[c])
        return _readonly(out)

    def gen_cols(self, gens):
        gens = [int(g) for g in gens]
        cols = np.zeros((len(gens), self.order), dtype=np.int64)
        comps = self._decode_all()
        for j, g in enumerate(gens):
            gc = self.decode(g)
            col = np.zeros(self.order, dtype=np.int64)
            for f, c, x in zip(self.factors, comps, gc):
                col = col * f.order + f.table[c, x]
            cols[j] = col
        return np.ascontiguousarray(cols, dtype=np.int32)

    def is_abelian(self):
        return all(f.is_abelian() for f in self.factors)

    def generating_set(self):
        # Deterministic pseudo-random pairs first; products of the groups used
        # here are 2-generated far more often than not.
        rng = np.random.default_rng(0x5EED)
        if self.order == 1:
            return []
        for _ in range(200):
            pair = [int(x) for x in rng.integers(0, self.order, size=2)]
            if len(kernels.closure(self.gen_cols(pair), self.identity)) == self.order:
                return pair
        gens = []
        for f_i, f in enumerate(self.factors):
            for g in f.generating_set():
                comps = [h.identity for h in self.factors]
                comps[f_i] = g
                gens.append(self.encode(comps))
        return gens

    def __repr__(self):
        name = f" {self.name}" if self.name else ""
        return f"<ProductGroup{name} order={self.order} factors={[f.order for f in self.factors]}>"

    def __eq__(self, other):
        return FiniteGroup.__eq__(self, other)

    def __hash__(self):
        return hash((self.order, tuple(hash(f) for f in self.factors)))


@dataclass(frozen=True)
class GeneratedSubgroup:
    parent: FiniteGroup
    members: tuple[int, ...]
    generators: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, a) -> bool:
        return int(a) in self._member_set

    @cached_property
    def _member_set(self) -> frozenset:
        return frozenset(self.members)

    def as_group(self) -> tuple[FiniteGroup, np.ndarray]:
        """The subgroup as a standalone table, plus the embedding array."""
        mem = np.array(self.members, dtype=np.int64)
        pos = np.full(self.parent.order, -1, dtype=np.int64)
        pos[mem] = np.arange(len(mem))
        sub = pos[self.parent.table[mem[:, None], mem[None, :]]]
        ident = int(pos[self.parent.identity])
        return FiniteGroup(sub, identity=ident), mem.astype(np.int32)


# -- operations ---------------------------------------------------------------

def multiply(g: FiniteGroup, a: int, b: int) -> int:
    if not (0 <= a < g.order and 0 <= b < g.order):
        raise IndexError(f"element index out of range for group of order {g.order}")
    return g.mul(a, b)


def _check_indices(g: FiniteGroup, elems: Iterable[int]) -> list[int]:
    out = [int(e) for e in elems]
    for e in out:
        if not 0 <= e < g.order:
            raise IndexError(f"element index {e} out of range for group of order {g.order}")
    return out


def subgroup_closure(g: FiniteGroup, gens: Iterable[int]) -> GeneratedSubgroup:
    gens = _check_indices(g, gens)
    members = kernels.closure(g.gen_cols(gens), g.identity)
    return GeneratedSubgroup(g, tuple(members.tolist()), tuple(gens))


def normal_closure(g: FiniteGroup, gens: Iterable[int]) -> GeneratedSubgroup:
    gens = _check_indices(g, gens)
    conjugators = g.generating_set()
    current = list(gens)
    while True:
        sub = subgroup_closure(g, current)
        new = []
        for a in current:
            for h in conjugators:
                c = g.conj(a, h)
                if c not in sub and c not in new:
                    new.append(c)
        if not new:
            return GeneratedSubgroup(g, sub.members, tuple(gens))
        current.extend(new)


def is_normal(g: FiniteGroup, n: GeneratedSubgroup) -> bool:
    mem = np.array(n.members, dtype=np.int64)
    inside = np.zeros(g.order, dtype=bool)
    inside[mem] = True
    t = g.table
    for h in g.generating_set():
        conj = t[t[g.inverses[h], mem], h]
        if not inside[conj].all():
            return False
    return True


def quotient(g: FiniteGroup, n: GeneratedSubgroup) -> tuple[FiniteGroup, np.ndarray]:
    """``g / n`` on least-index coset representatives, plus the projection."""
    if not is_normal(g, n):
        raise NotNormal("subgroup is not normal")
    t = g.table
    mem = np.array(n.members, dtype=np.int64)
    rep_of = t[:, mem].min(axis=1)
    reps = np.unique(rep_of)
    label = np.full(g.order, -1, dtype=np.int64)
    label[reps] = np.arange(len(reps))
    proj = label[rep_of].astype(np.int32)
    qt = proj[t[reps[:, None], reps[None, :]]]
    return FiniteGroup(qt, identity=int(proj[g.identity])), proj


def find_homomorphism(g1: FiniteGroup, src_gens: Sequence[int], g2: FiniteGroup,
                      images: Sequence[int]) -> np.ndarray | None:
    """Extend ``src_gens[i] -> images[i]`` to a homomorphism ``g1 -> g2``.

    The pairs ``(src_gens[i], images[i])`` generate a subgroup of ``g1 x g2``;
    the assignment extends iff that subgroup is the graph of a function. The
    map is returned as an index array, or ``None`` if no extension exists.
    """
    src_gens = _check_indices(g1, src_gens)
    images = _check_indices(g2, images)
    if len(src_gens) != len(images):
        raise ValueError("generator and image lists differ in length")
    pairs = kernels.pair_closure(g1.gen_cols(src_gens), g1.identity,
                                 g2.gen_cols(images), g2.identity, True)
    if pairs is None:
        return None
    if len(pairs) != g1.order:
        raise ValueError("source generators do not generate the source group")
    hom = np.empty(g1.order, dtype=np.int32)
    hom[pairs[:, 0]] = pairs[:, 1]
    return hom


def _iso_search(g1: FiniteGroup, g2: FiniteGroup) -> np.ndarray | None:
    gens = g1.generating_set()
    o1 = g1.element_orders
    o2 = g2.element_orders
    by_order: dict[int, list[int]] = {}
    for b in range(g2.order):
        by_order.setdefault(int(o2[b]), []).append(b)
    first_choices = set(g2.conjugacy_class_reps()) if g2.order <= TABLE_LIMIT else None

    def extend(images: list[int]) -> np.ndarray | None:
        i = len(images)
        if i == len(gens):
            pairs = kernels.pair_closure(g1.gen_cols(gens), g1.identity,
                                         g2.gen_cols(images), g2.identity, True)
            if pairs is None or len(pairs) != g1.order:
                return None
            if len(np.unique(pairs[:, 1])) != g2.order:
                return None
            hom = np.empty(g1.order, dtype=np.int32)
            hom[pairs[:, 0]] = pairs[:, 1]
            return hom
        for b in by_order.get(int(o1[gens[i]]), []):
            if i == 0 and first_choices is not None and b not in first_choices:
                continue
            trial = images + [b]
            pairs = kernels.pair_closure(g1.gen_cols(gens[: i + 1]), g1.identity,
                                         g2.gen_cols(trial), g2.identity, True)
            if pairs is None or len(np.unique(pairs[:, 1])) != len(pairs):
                continue
            found = extend(trial)
            if found is not None:
                return found
        return None

    return extend([])


def is_isomorphic(g1: FiniteGroup, g2: FiniteGroup) -> bool:
    if g1.order != g2.order:
        return False
    if g1.order == 1:
        return True
    if not np.array_equal(np.sort(g1.element_orders), np.sort(g2.element_orders)):
        return False
    if g1.is_abelian() != g2.is_abelian():
        return False
    return _iso_search(g1, g2) is not None


def isomorphism(g1: FiniteGroup, g2: FiniteGroup) -> np.ndarray | None:
    """An explicit isomorphism as an index array, or ``None``."""
    if g1.order != g2.order:
        return None
    if g1.order == 1:
        return np.zeros(1, dtype=np.int32)
    if not np.array_equal(np.sort(g1.element_orders), np.sort(g2.element_orders)):
        return None
    return _iso_search(g1, g2)


def normal_subgroups(g: FiniteGroup) -> list[GeneratedSubgroup]:
    """All normal subgroups, as joins of normal closures of single elements."""
    minimal = {}
    for a in g.conjugacy_class_reps():
        nc = normal_closure(g, [a])
        minimal.setdefault(nc.members, nc)
    found = {(g.identity,): GeneratedSubgroup(g, (g.identity,), ())}
    frontier = list(found.values())
    while frontier:
        nxt = []
        for n in frontier:
            for m in minimal.values():
                if set(m.members) <= n._member_set:
                    continue
                j = subgroup_closure(g, tuple(n.members) + tuple(m.members))
                if j.members not in found:
                    found[j.members] = j
                    nxt.append(j)
        frontier = nxt
    return sorted(found.values(), key=lambda n: (n.order, n.members))


# -- constructors -------------------------------------------------------------

def trivial_group() -> FiniteGroup:
    return FiniteGroup(np.zeros((1, 1), dtype=np.int32), name="1")


def cyclic_group(n: int) -> FiniteGroup:
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n, labels=list(range(n)), name=f"Z{n}")


def group_from_elements(elements: Sequence[Hashable], mul: Callable, identity: Hashable,
                        name: str | None = None) -> FiniteGroup:
    """Tabulate a group given its elements and a product on them."""
    elements = list(elements)
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    t = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            t[i, j] = index[mul(a, b)]
    return FiniteGroup(t, identity=index[identity], labels=elements, name=name)


def symmetric_group(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))

    def compose(p, q):
        # apply p first, then q
        return tuple(q[p[i]] for i in range(n))

    return group_from_elements(perms, compose, tuple(range(n)), name=f"S{n}")


def direct_product(*groups: FiniteGroup) -> FiniteGroup:
    """Tabulated direct product (use :class:`ProductGroup` beyond desk scale)."""
    if not groups:
        return trivial_group()
    prod = ProductGroup(groups)
    return FiniteGroup(prod.table, identity=prod.identity, labels=prod.labels,
                       name=" x ".join(g.name or "?" for g in groups))
