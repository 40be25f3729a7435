"""The lattice of open normal subgroups of the free profinite group on x0, x1, ...

An open normal subgroup containing almost every generator is the kernel of an
epimorphism ``phi`` onto a finite group with ``phi(x_i) = 1`` for ``i >= m``.
Such an epimorphism is stored in a canonical form that depends only on its
kernel: the target is relabelled by breadth-first search from the identity
along right multiplication by ``phi(x_0), ..., phi(x_{m-1})``. Two elements
are therefore equal as Python values exactly when their kernels agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from pfgroups._ext import kernels
from pfgroups.finite import FiniteGroup, GeneratedSubgroup, normal_closure, quotient

__all__ = [
    "Word",
    "LatticeElement",
    "top",
    "cyclic_element",
    "evaluate",
    "leq",
    "equivalent",
    "meet",
    "join",
    "enumerate_lattice",
    "enumeration_index",
    "base_element",
    "base_cutoff",
    "separation_level",
    "delta",
    "kernel_image",
]


# -- words ----------------------------------------------------------------------

def _free_reduce(syllables) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in syllables:
        g, e = int(g), int(e)
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the free group on x0, x1, ...

    Stored as ``(generator, exponent)`` syllables; adjacent syllables use
    distinct generators and exponents are nonzero.
    """

    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "syllables", _free_reduce(self.syllables))

    @classmethod
    def gen(cls, i: int, e: int = 1) -> "Word":
        if i < 0:
            raise ValueError("generator index must be non-negative")
        return cls(((i, e),))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.syllables)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.syllables * abs(k))

    @staticmethod
    def commutator(a: "Word", b: "Word") -> "Word":
        """``[a, b] = a^-1 b^-1 a b``."""
        return a.inverse() * b.inverse() * a * b

    def is_empty(self) -> bool:
        return not self.syllables

    def max_generator(self) -> int:
        return max((g for g, _ in self.syllables), default=-1)

    def __len__(self):
        return sum(abs(e) for _, e in self.syllables)

    def __str__(self):
        if not self.syllables:
            return "e"
        return "*".join(f"x{g}" if e == 1 else f"x{g}^{e}" for g, e in self.syllables)


# -- canonical epimorphisms ------------------------------------------------------

def _bfs_tree(graph: np.ndarray):
    n, m = graph.shape
    parent = np.full(n, -1, dtype=np.int64)
    via = np.full(n, -1, dtype=np.int64)
    for k in range(n):
        for j in range(m):
            c = int(graph[k, j])
            if c != 0 and parent[c] < 0:
                parent[c] = k
                via[c] = j
    return parent, via


def table_from_cayley(graph: np.ndarray) -> np.ndarray:
    """Multiplication table of a group from its BFS-labelled Cayley graph.

    Label 0 is the identity and each later label was first reached as
    ``parent * g_j`` with a smaller parent label, so the column of label ``k``
    is the parent's column pushed through generator ``j``.
    """
    n = graph.shape[0]
    parent, via = _bfs_tree(graph)
    table = np.empty((n, n), dtype=np.int32)
    table[:, 0] = np.arange(n)
    for k in range(1, n):
        table[:, k] = graph[table[:, parent[k]], via[k]]
    return table


@dataclass(frozen=True, eq=False)
class LatticeElement:
    """Canonical epimorphism ``x_i -> images[i]`` onto ``target`` (``x_i -> 1``
    for ``i >= support``).

    Build instances with :meth:`from_images` or :meth:`from_cayley`; both
    canonicalise, so ``==`` is kernel equality.
    """

    support: int
    graph: np.ndarray = field(repr=False)

    @classmethod
    def from_cayley(cls, graph: np.ndarray) -> "LatticeElement":
        graph = np.asarray(graph, dtype=np.int32)
        m = graph.shape[1]
        while m > 0 and graph[0, m - 1] == 0:
            m -= 1
        cols = np.ascontiguousarray(graph[:, :m].T)
        _, canon = kernels.cayley_bfs(cols, 0)
        canon = np.ascontiguousarray(canon, dtype=np.int32)
        canon.setflags(write=False)
        return cls(m, canon)

    @classmethod
    def from_images(cls, target: FiniteGroup, images: Sequence[int]) -> "LatticeElement":
        """Epimorphism onto the subgroup of ``target`` generated by ``images``."""
        images = [int(a) for a in images]
        while images and images[-1] == target.identity:
            images.pop()
        _, graph = kernels.cayley_bfs(target.gen_cols(images), target.identity)
        return cls.from_cayley(graph)

    @cached_property
    def target(self) -> FiniteGroup:
        return FiniteGroup(table_from_cayley(self.graph), identity=0, check=False)

    @property
    def order(self) -> int:
        """Index of the kernel, i.e. the order of the target."""
        return int(self.graph.shape[0])

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.graph[0, : self.support])

    def image(self, i: int) -> int:
        return int(self.graph[0, i]) if i < self.support else 0

    def padded_images(self, m: int) -> list[int]:
        return [self.image(i) for i in range(m)]

    def cols(self, m: int) -> np.ndarray:
        """Generator columns ``a -> a * x_j`` for ``j < m`` (identity beyond
        the support), read straight off the Cayley graph."""
        out = np.empty((m, self.order), dtype=np.int32)
        k = min(m, self.support)
        out[:k] = self.graph[:, :k].T
        out[k:] = np.arange(self.order, dtype=np.int32)
        return out

    @cached_property
    def inverse_columns(self) -> np.ndarray:
        """``inverse_columns[j, a]`` is ``a * x_j^-1``."""
        out = np.empty((self.support, self.order), dtype=np.int32)
        for j in range(self.support):
            out[j, self.graph[:, j]] = np.arange(self.order, dtype=np.int32)
        return out

    @cached_property
    def generator_orders(self) -> tuple[int, ...]:
        out = []
        for j in range(self.support):
            x, k = int(self.graph[0, j]), 1
            while x != 0:
                x, k = int(self.graph[x, j]), k + 1
            out.append(k)
        return tuple(out)

    @cached_property
    def words(self) -> tuple["Word", ...]:
        """A positive word for every label, read off the BFS tree."""
        parent, via = _bfs_tree(self.graph)
        out = [Word()]
        for k in range(1, self.order):
            out.append(out[parent[k]] * Word.gen(int(via[k])))
        return tuple(out)

    @cached_property
    def _key(self):
        return (self.support, self.graph.shape, self.graph.tobytes())

    def __eq__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def is_top(self) -> bool:
        return self.order == 1

    def __repr__(self):
        return f"LatticeElement(support={self.support}, order={self.order}, images={self.images})"


def top() -> LatticeElement:
    """The whole group (kernel of the map onto the trivial group)."""
    return LatticeElement.from_cayley(np.zeros((1, 0), dtype=np.int32))


def cyclic_element(n: int, gen: int = 0) -> LatticeElement:
    """``x_gen -> 1 mod n``, every other generator trivial."""
    graph = np.zeros((n, gen + 1), dtype=np.int32)
    graph[:, :gen] = np.arange(n, dtype=np.int32)[:, None]
    graph[:, gen] = (np.arange(n) + 1) % n
    return LatticeElement.from_cayley(graph)


def evaluate(L: LatticeElement, w: Word) -> int:
    """Image of ``w`` in ``L.target``, walked along the Cayley graph so that
    large targets never need a dense table."""
    x = 0
    for g, e in w.syllables:
        if g >= L.support:
            continue
        col = L.graph[:, g] if e > 0 else L.inverse_columns[g]
        for _ in range(abs(e) % L.generator_orders[g]):
            x = int(col[x])
    return x


def _pairs(L: LatticeElement, M: LatticeElement, functional: bool):
    m = max(L.support, M.support)
    return kernels.pair_closure(L.cols(m), 0,
                                M.cols(m), 0, functional)


def leq(L: LatticeElement, M: LatticeElement) -> bool:
    """``ker L <= ker M``, i.e. ``M`` factors through ``L``."""
    return _pairs(L, M, True) is not None


def equivalent(L: LatticeElement, M: LatticeElement) -> bool:
    """Kernel equality decided by factoring both ways."""
    return leq(L, M) and leq(M, L)


def meet(L: LatticeElement, M: LatticeElement) -> LatticeElement:
    """``ker L  cap  ker M``: the paired images in ``L.target x M.target``."""
    m = max(L.support, M.support)
    pairs = _pairs(L, M, False)
    n2 = M.order
    keys = pairs[:, 0].astype(np.int64) * n2 + pairs[:, 1]
    label = np.full(L.order * n2, -1, dtype=np.int64)
    label[keys] = np.arange(len(pairs))
    c1 = L.cols(m).astype(np.int64)
    c2 = M.cols(m).astype(np.int64)
    graph = np.empty((len(pairs), m), dtype=np.int32)
    for j in range(m):
        graph[:, j] = label[c1[j, pairs[:, 0]] * n2 + c2[j, pairs[:, 1]]]
    return LatticeElement.from_cayley(graph)


def kernel_image(L: LatticeElement, M: LatticeElement) -> GeneratedSubgroup:
    """Image of ``ker M`` in ``L.target``: first coordinates of paired images
    whose second coordinate is the identity."""
    pairs = _pairs(L, M, False)
    firsts = sorted(set(pairs[pairs[:, 1] == 0, 0].tolist()))
    return GeneratedSubgroup(L.target, tuple(firsts), tuple(firsts))


def join(L: LatticeElement, M: LatticeElement) -> LatticeElement:
    """``ker L * ker M``: quotient of ``L.target`` by the image of ``ker M``."""
    img = kernel_image(L, M)
    n = normal_closure(L.target, img.members)
    q, proj = quotient(L.target, n)
    return LatticeElement.from_images(q, [int(proj[a]) for a in L.images])


# -- enumeration -----------------------------------------------------------------

def _compose(p, q):
    # p first, then q
    return tuple(q[x] for x in p)


def _perm_cayley(perms) -> np.ndarray:
    ident = tuple(range(len(perms[0]))) if perms else (0,)
    label = {ident: 0}
    elements = [ident]
    rows = []
    k = 0
    while k < len(elements):
        a = elements[k]
        row = []
        for g in perms:
            b = _compose(a, g)
            lb = label.get(b)
            if lb is None:
                lb = len(elements)
                label[b] = lb
                elements.append(b)
            row.append(lb)
        rows.append(row)
        k += 1
    return np.array(rows, dtype=np.int32).reshape(len(elements), len(perms))


def _stage_candidates(stage: int) -> Iterator[LatticeElement]:
    """All epimorphisms realised by ``m`` permutations of degree ``n`` with
    ``n + m == stage``; finitely many per stage and every epimorphism shows up
    at some stage (its target acts regularly on itself)."""
    for n in range(1, stage + 1):
        m = stage - n
        perms = list(itertools.permutations(range(n)))
        ident = perms[0]
        if m == 0:
            if n == 1:
                yield top()
            continue
        for tup in itertools.product(perms, repeat=m):
            if tup[-1] == ident:
                continue
            if n > 1 and any(all(p[x] == x for p in tup) for x in range(n)):
                continue  # same group already appears at degree n - 1
            yield LatticeElement.from_cayley(_perm_cayley(tup))


def _order_key(L: LatticeElement):
    return (L.order, L.target.table.tobytes(), L.support, L.images)


class _Enumeration:
    """Append-only memo of the enumeration, extended one stage at a time."""

    def __init__(self):
        self.elements: list[LatticeElement] = []
        self.index: dict[LatticeElement, int] = {}
        self.stage = 0

    def _next_stage(self):
        self.stage += 1
        fresh = {}
        for L in _stage_candidates(self.stage):
            if L not in self.index and L not in fresh:
                fresh[L] = None
        for L in sorted(fresh, key=_order_key):
            self.index[L] = len(self.elements)
            self.elements.append(L)

    def get(self, i: int) -> LatticeElement:
        if i < 0:
            raise IndexError("enumeration index must be non-negative")
        while len(self.elements) <= i:
            self._next_stage()
        return self.elements[i]

    def find(self, L: LatticeElement, max_stage: int) -> int | None:
        while L not in self.index and self.stage < max_stage:
            self._next_stage()
        return self.index.get(L)


_ENUM = _Enumeration()


def enumerate_lattice(i: int) -> LatticeElement:
    """The ``i``-th element of a fixed repetition-free enumeration.

    Stage ``s`` collects every epimorphism given by ``m`` permutations of
    degree ``n`` with ``n + m = s``; within a stage, new kernels are ordered by
    target order, canonical table, support and images. ``enumerate_lattice(0)``
    is the top element.
    """
    return _ENUM.get(i)


def enumeration_index(L: LatticeElement, max_stage: int = 8) -> int | None:
    """Position of ``L`` in the enumeration (searching up to ``max_stage``)."""
    return _ENUM.find(L, max_stage)


class _BaseSequence:
    def __init__(self):
        self.elements: list[LatticeElement] = []
        self.last_index: list[int] = []

    def get(self, n: int) -> LatticeElement:
        while len(self.elements) <= n:
            prev = self.elements[-1] if self.elements else top()
            r = self.last_index[-1] if self.last_index else 0
            acc = prev
            while True:
                r += 1
                acc = meet(acc, enumerate_lattice(r))
                if acc != prev:
                    break
            self.elements.append(acc)
            self.last_index.append(r)
        return self.elements[n]


_BASE = _BaseSequence()


def base_element(n: int) -> LatticeElement:
    """Neighbourhood base ``B(0) > B(1) > ...`` of the identity.

    ``B(n)`` is the meet of ``enumerate_lattice(0..r(n))`` where ``r(n)`` is the
    least index beyond ``r(n-1)`` that makes the meet strictly smaller. Every
    enumerated element is eventually above some ``B(n)``.
    """
    return _BASE.get(n)


def base_cutoff(n: int) -> int:
    """The index ``r(n)`` used to build ``base_element(n)``."""
    _BASE.get(n)
    return _BASE.last_index[n]


def separation_level(w: Word, precision: int) -> int | None:
    """Least ``n <= precision`` with ``w`` outside ``base_element(n)``."""
    for n in range(precision + 1):
        if evaluate(base_element(n), w) != 0:
            return n
    return None


def delta(g: Word, h: Word, precision: int) -> Fraction:
    """Bi-invariant ultrametric ``2^-n``, ``n`` the first level separating
    ``g h^-1`` from the identity; ``0`` when no level up to ``precision`` does
    (the true distance is then at most ``2^-precision``)."""
    n = separation_level(g * h.inverse(), precision)
    return Fraction(0) if n is None else Fraction(1, 2**n)
