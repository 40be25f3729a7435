"""Finite levels of the groups ``prod_{p in P} SL_2(Z_p)`` and the
unitriangular groups ``UT_3(p)``."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from pfgroups.errors import DeskScaleExceeded
from pfgroups.finite import (
    TABLE_LIMIT,
    FiniteGroup,
    ProductGroup,
    find_homomorphism,
    is_isomorphic,
    trivial_group,
)
from pfgroups.mekler import is_prime

__all__ = [
    "PrimeSet",
    "MatrixGroupLevel",
    "det_one_matrices",
    "sl2_level",
    "gP_level",
    "primes_detected",
    "distinguishing_level",
    "EQUAL",
    "ut3",
]

EQUAL = "Equal"


class PrimeSet(tuple):
    """Finite sorted set of distinct primes."""

    def __new__(cls, primes: Iterable[int] = ()):
        ps = sorted({int(p) for p in primes})
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        return super().__new__(cls, ps)

    @classmethod
    def parse(cls, text: str) -> "PrimeSet":
        text = text.strip()
        return cls(int(x) for x in text.split(",") if x.strip()) if text else cls()

    def __str__(self):
        return "{" + ",".join(map(str, self)) + "}"


def det_one_matrices(q: int) -> np.ndarray:
    """All ``(a, b, c, d)`` over ``Z/q`` with ``ad - bc = 1``, lexicographic."""
    r = np.arange(q)
    a, b, c, d = (x.ravel() for x in np.meshgrid(r, r, r, r, indexing="ij"))
    keep = (a * d - b * c) % q == 1
    return np.stack([a[keep], b[keep], c[keep], d[keep]], axis=1)


def _matrix_group(mats: np.ndarray, q: int, name: str) -> FiniteGroup:
    # rows (a, b, c, d) of 2x2 matrices mod q, closed under multiplication
    code = lambda m: ((m[..., 0] * q + m[..., 1]) * q + m[..., 2]) * q + m[..., 3]
    lookup = np.full(q**4, -1, dtype=np.int64)
    lookup[code(mats)] = np.arange(len(mats))
    x, y = mats[:, None, :], mats[None, :, :]
    prod = np.stack([
        x[..., 0] * y[..., 0] + x[..., 1] * y[..., 2],
        x[..., 0] * y[..., 1] + x[..., 1] * y[..., 3],
        x[..., 2] * y[..., 0] + x[..., 3] * y[..., 2],
        x[..., 2] * y[..., 1] + x[..., 3] * y[..., 3],
    ], axis=-1) % q
    table = lookup[code(prod)]
    ident = int(lookup[code(np.array([1, 0, 0, 1]))])
    labels = [tuple(int(v) for v in m) for m in mats]
    return FiniteGroup(table, identity=ident, labels=labels, name=name)


@dataclass(frozen=True)
class MatrixGroupLevel:
    """``SL_2(Z/p^k)`` with its matrices as labels and the reduction map to
    level ``k - 1`` (``None`` at ``k = 1``)."""

    p: int
    k: int
    group: FiniteGroup
    reduction: np.ndarray | None

    @property
    def order(self) -> int:
        return self.group.order


def sl2_order(p: int, k: int) -> int:
    return p ** (3 * k - 2) * (p * p - 1) if k >= 1 else 1


@lru_cache(maxsize=None)
def sl2_level(p: int, k: int) -> MatrixGroupLevel:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 0:
        raise ValueError("level must be non-negative")
    if k == 0:
        return MatrixGroupLevel(p, 0, trivial_group(), None)
    if sl2_order(p, k) > TABLE_LIMIT:
        raise DeskScaleExceeded(f"SL2(Z/{p}^{k}) has order {sl2_order(p, k)} > {TABLE_LIMIT}")
    q = p**k
    g = _matrix_group(det_one_matrices(q), q, f"SL2(Z/{q})")
    reduction = None
    if k >= 2:
        lower = sl2_level(p, k - 1).group
        qq = p ** (k - 1)
        reduction = np.array([lower.index_of(tuple(v % qq for v in m)) for m in g.labels],
                             dtype=np.int32)
    return MatrixGroupLevel(p, k, g, reduction)


def gP_level(P: Iterable[int], k: int) -> FiniteGroup:
    """Level ``k`` of ``G_P``: the product of ``SL_2(Z/p^k)`` over ``p`` in
    ``P``. Products beyond the table limit are evaluated componentwise."""
    P = PrimeSet(P)
    if not P:
        return trivial_group()
    factors = [sl2_level(p, k).group for p in P]
    if len(factors) == 1:
        return factors[0]
    return ProductGroup(factors, name=f"G_{P} level {k}")


def _epimorphism_exists(G: FiniteGroup, H: FiniteGroup) -> bool:
    """Is there a surjective homomorphism ``G -> H``?"""
    if H.order == 1:
        return True
    if G.order % H.order:
        return False
    gens = G.generating_set()
    og = G.element_orders
    oh = H.element_orders
    by_div: dict[int, list[int]] = {}
    for i, o in enumerate(og[gens].tolist()):
        by_div[i] = [b for b in range(H.order) if o % int(oh[b]) == 0]
    # images of the first generator only matter up to conjugacy in H
    reps = set(H.conjugacy_class_reps())
    from pfgroups._ext import kernels

    def extend(images: list[int]) -> bool:
        i = len(images)
        if i == len(gens):
            return len(kernels.closure(H.gen_cols(images), H.identity)) == H.order
        for b in by_div[i]:
            if i == 0 and b not in reps:
                continue
            trial = images + [b]
            pairs = kernels.pair_closure(G.gen_cols(gens[: i + 1]), G.identity,
                                         H.gen_cols(trial), H.identity, True)
            if pairs is None:
                continue
            if extend(trial):
                return True
        return False

    return extend([])


def primes_detected(G: FiniteGroup, candidates: Iterable[int]) -> PrimeSet:
    """Primes ``p`` in ``candidates`` with an epimorphism ``G -> SL_2(Z/p)``."""
    return PrimeSet(p for p in PrimeSet(candidates)
                    if _epimorphism_exists(G, sl2_level(p, 1).group))


def distinguishing_level(P: Iterable[int], Q: Iterable[int], max_level: int = 3):
    """Least ``k`` with non-isomorphic level-``k`` quotients, or ``EQUAL``."""
    P, Q = PrimeSet(P), PrimeSet(Q)
    if P == Q:
        return EQUAL
    for k in range(1, max_level + 1):
        g, h = gP_level(P, k), gP_level(Q, k)
        if g.order != h.order or not is_isomorphic(g, h):
            return k
    raise DeskScaleExceeded(f"no distinction found up to level {max_level}")


def ut3(p: int) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over ``F_p``, labelled ``(a, b, c)``
    for the matrix with ``a`` at (1,2), ``c`` at (1,3), ``b`` at (2,3)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > 7:
        raise DeskScaleExceeded(f"UT3({p}) has order {p**3} > 343")
    els = list(itertools.product(range(p), repeat=3))
    E = np.array(els, dtype=np.int64)
    a1, b1, c1 = (E[:, None, i] for i in range(3))
    a2, b2, c2 = (E[None, :, i] for i in range(3))
    a, b, c = (a1 + a2) % p, (b1 + b2) % p, (c1 + c2 + a1 * b2) % p
    table = (a * p + b) * p + c
    return FiniteGroup(table, identity=0, labels=els, name=f"UT3({p})")
