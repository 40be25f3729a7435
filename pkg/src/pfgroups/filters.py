"""Closed normal subgroups of the free profinite group, given as filters.

A closed normal subgroup ``R`` is represented by a descending chain of lattice
elements ``chain(0) >= chain(1) >= ...`` whose intersection is ``R``; the
filter is everything above some ``chain(i)``. Chains develop lazily through a
deterministic extender, so every answer is relative to a finite depth.
"""
from __future__ import annotations

import enum
from typing import Callable, Iterable, Sequence

import numpy as np

from pfgroups.errors import DepthInsufficient, SupportTooLarge
from pfgroups.finite import FiniteGroup, GeneratedSubgroup, normal_subgroups
from pfgroups.lattice import (
    LatticeElement,
    Word,
    base_element,
    cyclic_element,
    evaluate,
    join,
    kernel_image,
    leq,
    top,
)

__all__ = [
    "FilterChain",
    "Membership",
    "contains",
    "quotient_at",
    "projection",
    "is_principal_up_to",
    "extend_generators",
    "theta_meet",
    "hausdorff_level",
    "hausdorff_images_equal",
    "hausdorff_filters_agree",
]


class FilterChain:
    """Descending chain of lattice elements generating a filter.

    ``elements`` is the developed prefix; ``extender(i)`` produces ``chain(i)``
    on demand (``None`` means the chain stops at the developed depth).
    ``rank``, when set, records that every element lives on ``x_0..x_{rank-1}``.
    """

    def __init__(self, elements: Iterable[LatticeElement] = (),
                 extender: Callable[[int], LatticeElement] | None = None,
                 rank: int | None = None, name: str | None = None):
        self._elements = list(elements)
        self.extender = extender
        self.rank = rank
        self.name = name

    @classmethod
    def principal(cls, L: LatticeElement) -> "FilterChain":
        return cls([L], extender=lambda i: L, name="principal")

    @classmethod
    def mod_power(cls, p: int, gen: int = 0) -> "FilterChain":
        """``chain(i)`` is ``x_gen -> 1 mod p^i``; the intersection is the
        kernel of the map onto the p-adic integers."""
        return cls(extender=lambda i: cyclic_element(p**i, gen), name=f"mod{p}^n")

    @property
    def depth(self) -> int:
        return len(self._elements)

    def can_develop(self, i: int) -> bool:
        return i < len(self._elements) or self.extender is not None

    def develop(self, depth: int) -> None:
        while len(self._elements) < depth:
            if self.extender is None:
                raise DepthInsufficient(
                    f"chain has depth {len(self._elements)} and no extender; need {depth}")
            self._elements.append(self.extender(len(self._elements)))

    def __getitem__(self, i: int) -> LatticeElement:
        if i < 0:
            raise IndexError("chain index must be non-negative")
        self.develop(i + 1)
        return self._elements[i]

    def prefix(self, depth: int) -> list[LatticeElement]:
        self.develop(depth)
        return self._elements[:depth]

    def check_descending(self, depth: int) -> bool:
        els = self.prefix(depth)
        return all(leq(b, a) for a, b in zip(els, els[1:]))

    def __repr__(self):
        name = f" {self.name}" if self.name else ""
        return f"<FilterChain{name} developed={self.depth}>"


class Membership(enum.Enum):
    YES = "yes"
    NO_AT_DEPTH = "no-at-depth"
    UNKNOWN = "unknown"


def contains(R: FilterChain, L: LatticeElement, depth: int) -> Membership:
    """Is ``L`` in the filter (``R <= L``), as witnessed by ``chain(0..depth)``?"""
    for i in range(depth + 1):
        if not R.can_develop(i):
            return Membership.UNKNOWN
        if leq(R[i], L):
            return Membership.YES
    return Membership.NO_AT_DEPTH


def quotient_at(R: FilterChain, i: int) -> FiniteGroup:
    """The finite quotient ``F / chain(i)``."""
    if not R.can_develop(i):
        raise DepthInsufficient(f"level {i} is beyond the chain")
    return R[i].target


def projection(R: FilterChain, j: int, i: int) -> np.ndarray | None:
    """The map ``F/chain(j) -> F/chain(i)`` (``i <= j``) induced by the
    generator images, or ``None`` if it does not exist."""
    from pfgroups.finite import find_homomorphism

    A, B = R[j], R[i]
    m = max(A.support, B.support)
    return find_homomorphism(A.target, A.padded_images(m), B.target, B.padded_images(m))


def is_principal_up_to(R: FilterChain, depth: int) -> bool:
    """Whether the chain is constant on ``chain(depth // 2 .. depth)``."""
    lo = depth // 2
    first = R[lo]
    return all(R[i] == first for i in range(lo + 1, depth + 1))


def extend_generators(R: FilterChain, r: int, k: int) -> FilterChain:
    """Carry a chain over ``x_0..x_{r-1}`` to ``k >= r`` generators.

    Each element keeps its target and images and sends ``x_r..x_{k-1}`` to
    the identity, so the finite quotients are unchanged.
    """
    if k < r:
        raise ValueError(f"cannot extend from {r} down to {k} generators")
    for i, L in enumerate(R.prefix(R.depth)):
        if L.support > r:
            raise SupportTooLarge(f"chain element {i} has support {L.support} > {r}")

    def ext(i: int) -> LatticeElement:
        L = R[i]
        if L.support > r:
            raise SupportTooLarge(f"chain element {i} has support {L.support} > {r}")
        images = L.padded_images(k)
        return LatticeElement.from_images(L.target, images)

    out = FilterChain([ext(i) for i in range(R.depth)],
                      extender=ext if R.extender is not None else None,
                      rank=k, name=R.name)
    return out


def theta_meet(R: FilterChain, w: Word, depth: int) -> bool:
    """Is ``w`` in every ``chain(i)``, ``i <= depth``?"""
    return all(evaluate(R[i], w) == 0 for i in range(depth + 1))


# -- Hausdorff distance between closed normal subgroups ---------------------------

def _stable_join(R: FilterChain, B: LatticeElement, depth: int | None) -> tuple[LatticeElement, int]:
    """``R * B`` for an open ``B``, with the chain index it was read at.

    The joins ``chain(i) * B`` decrease in ``i`` and are eventually constant.
    With ``depth`` given, the value at ``chain(depth - 1)`` is used and the
    last two developed levels must agree; without it the chain is developed
    until two consecutive joins agree.
    """
    if depth is not None:
        if depth < 1 or not R.can_develop(depth - 1):
            raise DepthInsufficient(f"chain cannot be developed to depth {depth}")
        last = join(R[depth - 1], B)
        if leq(R[depth - 1], B):
            return last, depth - 1
        if depth < 2 or join(R[depth - 2], B) != last:
            raise DepthInsufficient(f"join with the base element has not stabilised by depth {depth}")
        return last, depth - 1
    i = 0
    prev = join(R[0], B)
    while True:
        if leq(R[i], B):
            return prev, i
        i += 1
        if not R.can_develop(i):
            raise DepthInsufficient("chain ended before the join stabilised")
        cur = join(R[i], B)
        if cur == prev:
            return cur, i
        prev = cur


def hausdorff_level(R: FilterChain, S: FilterChain, n: int, depth: int | None = None) -> bool:
    """``R B(n) = S B(n)``, i.e. Hausdorff distance at most ``2^-n``."""
    B = base_element(n)
    return _stable_join(R, B, depth)[0] == _stable_join(S, B, depth)[0]


def _image_in(B: LatticeElement, R: FilterChain, depth: int | None) -> frozenset:
    # image of the closed subgroup R in the finite group F/B
    J, i = _stable_join(R, B, depth)
    # chain(i) * B = R * B, so chain(i) already has the image of R
    return frozenset(kernel_image(B, R[i]).members)


def hausdorff_images_equal(R: FilterChain, S: FilterChain, n: int,
                           depth: int | None = None) -> bool:
    """Pointwise form of the Hausdorff condition: every element of ``R`` is
    within ``2^-n`` of ``S`` and vice versa, i.e. ``R`` and ``S`` have the same
    image in ``F / B(n)``."""
    B = base_element(n)
    return _image_in(B, R, depth) == _image_in(B, S, depth)


def hausdorff_filters_agree(R: FilterChain, S: FilterChain, n: int,
                            depth: int | None = None,
                            sample: Sequence[LatticeElement] | None = None) -> bool:
    """``R <= L  <->  S <= L`` for every ``L >= B(n)``.

    Without ``sample`` all such ``L`` are covered: they are the kernels of
    ``F -> F/B(n) -> (F/B(n))/N`` over the normal subgroups ``N``. With a
    sample, only the sampled ``L`` above ``B(n)`` are tested.
    """
    B = base_element(n)
    img_R = _image_in(B, R, depth)
    img_S = _image_in(B, S, depth)
    if sample is None:
        for N in normal_subgroups(B.target):
            inside = N._member_set
            if (img_R <= inside) != (img_S <= inside):
                return False
        return True
    # R <= L for L above B(n) iff chain(i) <= L at the level where the join
    # with B(n) settled
    _, dR = _stable_join(R, B, depth)
    _, dS = _stable_join(S, B, depth)
    for L in sample:
        if not leq(B, L):
            continue
        if _contains_bool(R, L, dR) != _contains_bool(S, L, dS):
            return False
    return True


def _contains_bool(R: FilterChain, L: LatticeElement, depth: int) -> bool:
    return contains(R, L, depth) is Membership.YES


def chain_from_elements(elements: Sequence[LatticeElement], name: str | None = None) -> FilterChain:
    """A finite chain; beyond its depth it is treated as constant (principal
    at its last element)."""
    elements = list(elements)
    last = elements[-1] if elements else top()
    return FilterChain(elements, extender=lambda i: last, name=name)
