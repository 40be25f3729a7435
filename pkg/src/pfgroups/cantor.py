"""Coset trees and the Cantor-space encoding of a profinite group.

A descending chain ``S_0 = F >= S_1 >= ...`` of open normal subgroups gives a
tree whose level-``n`` nodes are the cosets of ``S_n``: the node ``sigma`` is
``g0[sigma(0)] g1[sigma(1)] ... S_n`` with ``gm[i]`` running over coset
representatives of ``S_{m+1}`` in ``S_m``. Paths are then pushed into binary
strings by a prefix code, and the group structure becomes a difference
operation ``rho(a, b) = a b^-1`` on paths.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from pfgroups.errors import (
    DepthInsufficient,
    DigitOutOfRange,
    NotStrictlyDescending,
    PermutationMovesZero,
)
from pfgroups.finite import TABLE_LIMIT, FiniteGroup, find_homomorphism
from pfgroups.lattice import LatticeElement, Word, evaluate, leq

__all__ = [
    "CosetTree",
    "build_tree",
    "encode_F",
    "child_code",
    "rho",
    "DifferenceReport",
    "verify_difference_axioms",
    "act_homeomorphism",
    "dump_tree",
]

Path = tuple[int, ...]


@dataclass
class CosetTree:
    """Branching factors, representatives and level quotients of a chain.

    ``levels[n]`` is ``S_n`` (so ``levels[n].target`` is ``F/S_n``) for
    ``n = 0..depth``; ``reps[n][i]`` is a word in ``S_n`` whose cosets of
    ``S_{n+1}`` are pairwise distinct, with ``reps[n][0]`` empty.
    """

    depth: int
    branching: list[int]
    reps: list[list[Word]]
    levels: list[LatticeElement] = field(repr=False)
    # rep_index[n][i]: index of reps[n][i] in levels[n + 1].target
    rep_index: list[list[int]] = field(repr=False)
    _paths: dict = field(default_factory=dict, repr=False)

    def group(self, n: int) -> FiniteGroup:
        self._need(n)
        return self.levels[n].target

    def _need(self, n: int):
        if n < 0 or n > self.depth:
            raise DepthInsufficient(f"level {n} is beyond tree depth {self.depth}")

    def check_path(self, sigma: Sequence[int], n: int | None = None) -> Path:
        sigma = tuple(int(d) for d in sigma)
        if len(sigma) > self.depth:
            raise DepthInsufficient(f"path of length {len(sigma)} exceeds tree depth {self.depth}")
        if n is not None and len(sigma) < n:
            raise DepthInsufficient(f"path of length {len(sigma)} is shorter than level {n}")
        for i, d in enumerate(sigma):
            if not 0 <= d < self.branching[i]:
                raise DigitOutOfRange(f"digit {d} at level {i} outside 0..{self.branching[i] - 1}")
        return sigma

    def paths(self, n: int) -> list[Path]:
        """All level-``n`` paths in lexicographic order."""
        self._need(n)
        return list(itertools.product(*(range(k) for k in self.branching[:n])))

    def _level_maps(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        # path index (lexicographic) <-> element of F/S_n
        if n not in self._paths:
            g = self.group(n)
            words = [[evaluate(self.levels[n], w) for w in self.reps[m]] for m in range(n)]
            elem = np.empty(g.order, dtype=np.int64)
            for k, sigma in enumerate(self.paths(n)):
                x = g.identity
                for m, d in enumerate(sigma):
                    x = g.mul(x, words[m][d])
                elem[k] = x
            pos = np.full(g.order, -1, dtype=np.int64)
            pos[elem] = np.arange(g.order)
            if (pos < 0).any():
                raise AssertionError("representatives do not cover the level quotient")
            self._paths[n] = (elem, pos)
        return self._paths[n]

    def element_of(self, sigma: Sequence[int]) -> int:
        """The element of ``F/S_n`` named by a length-``n`` path."""
        sigma = self.check_path(sigma)
        n = len(sigma)
        elem, _ = self._level_maps(n)
        return int(elem[_path_index(sigma, self.branching)])

    def path_of(self, a: int, n: int) -> Path:
        _, pos = self._level_maps(n)
        return _index_path(int(pos[a]), self.branching[:n])


def _path_index(sigma: Sequence[int], branching: Sequence[int]) -> int:
    k = 0
    for d, b in zip(sigma, branching):
        k = k * b + d
    return k


def _index_path(k: int, branching: Sequence[int]) -> Path:
    out = []
    for b in reversed(branching):
        k, d = divmod(k, b)
        out.append(d)
    return tuple(reversed(out))


def build_tree(R, depth: int) -> CosetTree:
    """Coset tree of a filter chain down to ``depth``.

    The chain must start at the whole group and descend (``k_n = 1`` is
    allowed). Representatives of ``S_n / S_{n+1}`` are the kernel elements of
    ``F/S_{n+1} -> F/S_n`` in increasing index order; the identity has index 0
    and so always comes first.
    """
    levels = [R[n] for n in range(depth + 1)]
    if not levels[0].is_top():
        raise NotStrictlyDescending("chain must start at the whole group")
    branching, reps, rep_index = [], [], []
    for n in range(depth):
        upper, lower = levels[n], levels[n + 1]
        if not leq(lower, upper):
            raise NotStrictlyDescending(f"chain element {n + 1} is not below element {n}")
        m = max(upper.support, lower.support)
        proj = find_homomorphism(lower.target, lower.padded_images(m),
                                 upper.target, upper.padded_images(m))
        kernel = np.flatnonzero(proj == upper.target.identity)
        branching.append(len(kernel))
        rep_index.append([int(a) for a in kernel])
        reps.append([lower.words[int(a)] for a in kernel])
    return CosetTree(depth, branching, reps, levels, rep_index)


# -- the binary encoding ---------------------------------------------------------

def child_code(k: int, i: int) -> str:
    """Bits appended for child ``i`` of a node with ``k`` children.

    ``0 -> 0^(k-1)`` and ``i -> 0^(k-1-i) 1``: a complete prefix code whose
    all-zero word belongs to child 0.
    """
    if not 0 <= i < k:
        raise DigitOutOfRange(f"child {i} of a node with {k} children")
    return "0" * (k - 1) if i == 0 else "0" * (k - 1 - i) + "1"


def encode_F(t: CosetTree, sigma: Sequence[int]) -> str:
    sigma = t.check_path(sigma)
    return "".join(child_code(t.branching[n], d) for n, d in enumerate(sigma))


# -- the difference operation ------------------------------------------------------

def rho(t: CosetTree, Z: Sequence[int], W: Sequence[int], n: int) -> Path:
    """Level-``n`` prefix of ``rho(Z, W)``: the path of ``z w^-1`` in ``F/S_n``."""
    t._need(n)
    Z = t.check_path(Z, n)[:n]
    W = t.check_path(W, n)[:n]
    g = t.group(n)
    a, b = t.element_of(Z), t.element_of(W)
    return t.path_of(g.mul(a, g.inv(b)), n)


def _apply_perm(perm: Sequence[int] | None, sigma: Path) -> Path:
    if perm is None or not sigma:
        return sigma
    return (int(perm[sigma[0]]),) + sigma[1:]


def _check_perm(t: CosetTree, perm: Sequence[int]) -> list[int]:
    perm = [int(x) for x in perm]
    k = t.branching[0] if t.depth else 1
    if sorted(perm) != list(range(k)):
        raise DigitOutOfRange(f"not a permutation of the {k} level-0 digits")
    if perm[0] != 0:
        raise PermutationMovesZero("the permutation must fix digit 0")
    return perm


def act_homeomorphism(t: CosetTree, perm: Sequence[int], Z: Sequence[int],
                      W: Sequence[int], n: int) -> Path:
    """``(g . rho)(Z, W) = g rho(g^-1 Z, g^-1 W)`` for the homeomorphism ``g``
    permuting the first digit by ``perm`` (which must fix 0)."""
    perm = _check_perm(t, perm)
    inv = [0] * len(perm)
    for i, x in enumerate(perm):
        inv[x] = i
    Z = t.check_path(Z, n)[:n]
    W = t.check_path(W, n)[:n]
    r = rho(t, _apply_perm(inv, Z), _apply_perm(inv, W), n)
    return _apply_perm(perm, r)


@dataclass
class DifferenceReport:
    level: int
    cosets: int
    exhaustive: bool
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _difference_table(t: CosetTree, n: int, perm: Sequence[int] | None) -> np.ndarray:
    # D[a, b] = path index of rho(path a, path b), optionally conjugated
    g = t.group(n)
    elem, pos = t._level_maps(n)
    N = g.order
    if perm is None or n == 0:
        return pos[g.table[elem[:, None], g.inverses[elem][None, :]]]
    perm = _check_perm(t, perm)
    inv = [0] * len(perm)
    for i, x in enumerate(perm):
        inv[x] = i
    block = N // t.branching[0]
    # permuting digit 0 moves whole blocks of lexicographic path indices
    idx = np.arange(N)
    move = lambda p, ix: np.asarray(p)[ix // block] * block + ix % block
    pre = move(inv, idx)
    D = pos[g.table[elem[pre][:, None], g.inverses[elem[pre]][None, :]]]
    return move(perm, D)


def verify_difference_axioms(t: CosetTree, n: int, samples: int = 1000,
                             exhaustive: bool | None = None,
                             perm: Sequence[int] | None = None,
                             seed: int = 0) -> DifferenceReport:
    """Check that ``rho`` at level ``n`` is a group difference.

    Using only the ``rho`` table: ``rho(a, a) = e``, ``rho(a, e) = a`` and the
    derived product ``a * b = rho(a, rho(e, b))`` is associative. Exhaustive
    when the level quotient has at most ``TABLE_LIMIT`` elements (or when
    forced), otherwise over ``samples`` random triples. ``perm`` evaluates the
    conjugated operation of :func:`act_homeomorphism` instead.
    """
    t._need(n)
    N = t.group(n).order
    if exhaustive is None:
        exhaustive = N <= TABLE_LIMIT
    report = DifferenceReport(n, N, exhaustive)
    D = _difference_table(t, n, perm)
    ar = np.arange(N)
    bad = np.flatnonzero(D[ar, ar] != 0)
    if len(bad):
        report.violations.append(f"rho(a,a) != e for a={_index_path(int(bad[0]), t.branching[:n])}")
    bad = np.flatnonzero(D[:, 0] != ar)
    if len(bad):
        report.violations.append(f"rho(a,e) != a for a={_index_path(int(bad[0]), t.branching[:n])}")
    P = D[:, D[0]]  # P[a, b] = rho(a, rho(e, b))
    if exhaustive:
        for a in range(N):
            if not np.array_equal(P[P[a]], P[a][P]):
                report.violations.append(f"derived product not associative at a={a}")
                break
        report.checked = N**3
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, N, size=(3, samples))
        fails = np.flatnonzero(P[P[a, b], c] != P[a, P[b, c]])
        if len(fails):
            report.violations.append(f"derived product not associative at {len(fails)} sampled triples")
        report.checked = samples
    return report


def dump_tree(t: CosetTree) -> str:
    lines = [f"tree depth={t.depth}"]
    for n in range(t.depth):
        lines.append(f"level {n} k={t.branching[n]}")
        lines.extend(f"rep {i} {w}" for i, w in enumerate(t.reps[n]))
    return "\n".join(lines) + "\n"
