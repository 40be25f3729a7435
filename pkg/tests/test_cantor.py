import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfgroups import cantor
from pfgroups.cantor import (
    act_homeomorphism,
    build_tree,
    child_code,
    dump_tree,
    encode_F,
    rho,
    verify_difference_axioms,
)
from pfgroups.errors import DepthInsufficient, DigitOutOfRange, NotStrictlyDescending, PermutationMovesZero
from pfgroups.filters import FilterChain, chain_from_elements
from pfgroups.lattice import Word, cyclic_element, evaluate
from pfgroups.mekler import Graph, cycle_graph, rn_chain


@pytest.fixture(scope="module")
def mod2_tree():
    return build_tree(FilterChain.mod_power(2), 3)


@pytest.fixture(scope="module")
def rn_tree():
    return build_tree(rn_chain(cycle_graph(5), 3), 3)


def prefix_free(codes):
    return all(not b.startswith(a) for a, b in itertools.permutations(codes, 2))


# -- construction -----------------------------------------------------------------

def test_depth_zero_tree():
    t = build_tree(FilterChain.mod_power(2), 0)
    assert t.depth == 0 and t.branching == [] and t.paths(0) == [()]
    assert encode_F(t, ()) == ""


def test_mod2_tree_shape(mod2_tree):
    t = mod2_tree
    assert t.branching == [2, 2, 2]
    for n in range(4):
        assert t.group(n).order == 2**n == len(t.paths(n))
    assert all(reps[0] == Word() for reps in t.reps)


def test_mod2_tree_names_cyclic_elements(mod2_tree):
    # path sigma names x0^(sum sigma_m 2^m) modulo 2^n
    t = mod2_tree
    for n in range(4):
        for sigma in t.paths(n):
            k = sum(d << m for m, d in enumerate(sigma))
            assert t.element_of(sigma) == evaluate(t.levels[n], Word.gen(0) ** k)


def test_rn_tree_shape(rn_tree):
    assert rn_tree.branching == [3, 3, 9]
    assert [rn_tree.group(n).order for n in range(4)] == [1, 3, 9, 81]


def test_reps_in_distinct_cosets(rn_tree):
    t = rn_tree
    for n in range(t.depth):
        lower = t.levels[n + 1]
        images = [evaluate(lower, w) for w in t.reps[n]]
        assert len(set(images)) == t.branching[n]
        assert images == t.rep_index[n]
        # each representative lies in S_n: trivial in F/S_n
        upper = t.levels[n]
        assert all(evaluate(upper, w) == upper.target.identity for w in t.reps[n])


def test_non_nested_chain_rejected():
    top = cyclic_element(1, 1)
    bad = chain_from_elements([top, cyclic_element(2, 1), cyclic_element(3, 1)])
    with pytest.raises(NotStrictlyDescending):
        build_tree(bad, 2)
    with pytest.raises(NotStrictlyDescending):
        build_tree(chain_from_elements([cyclic_element(2, 1)]), 0)


def test_one_nonedge_graph_tree():
    t = build_tree(rn_chain(Graph(2), 3), 2)
    assert t.branching == [3, 9]
    rep = verify_difference_axioms(t, 2)
    assert rep.ok and rep.exhaustive and rep.cosets == 27


# -- encoding ----------------------------------------------------------------------

@pytest.mark.parametrize("k", range(1, 10))
def test_child_codes_partition(k):
    codes = [child_code(k, i) for i in range(k)]
    assert prefix_free(codes)
    assert sum(Fraction(1, 2 ** len(c)) for c in codes) == 1
    assert set(codes[0]) <= {"0"}


def test_child_code_examples():
    assert [child_code(2, i) for i in range(2)] == ["0", "1"]
    assert [child_code(3, i) for i in range(3)] == ["00", "01", "1"]
    with pytest.raises(DigitOutOfRange):
        child_code(3, 3)


@pytest.mark.parametrize("tree", ["mod2_tree", "rn_tree"])
def test_encode_injective_and_prefix_free(tree, request):
    t = request.getfixturevalue(tree)
    for n in range(t.depth + 1):
        codes = [encode_F(t, s) for s in t.paths(n)]
        assert len(set(codes)) == len(codes)
        assert prefix_free(codes)
        assert sum(Fraction(1, 2 ** len(c)) for c in codes) == 1
        assert encode_F(t, (0,) * n) == "0" * len(encode_F(t, (0,) * n))
        # prefix monotone
        for s in t.paths(n):
            assert encode_F(t, s).startswith(encode_F(t, s[:-1]) if s else "")


def test_binary_tree_encoding_is_identity(mod2_tree):
    for s in mod2_tree.paths(3):
        assert encode_F(mod2_tree, s) == "".join(map(str, s))


def test_encode_errors(mod2_tree):
    with pytest.raises(DigitOutOfRange):
        encode_F(mod2_tree, (0, 2))
    with pytest.raises(DepthInsufficient):
        encode_F(mod2_tree, (0, 0, 0, 0))


# -- rho ----------------------------------------------------------------------------

def test_rho_cyclic_oracle(mod2_tree):
    t = mod2_tree
    val = lambda s: sum(d << m for m, d in enumerate(s))
    for n in range(4):
        for Z, W in itertools.product(t.paths(n), repeat=2):
            assert val(rho(t, Z, W, n)) == (val(Z) - val(W)) % 2**n


def test_rho_examples(rn_tree):
    t = rn_tree
    for Z in t.paths(3):
        assert rho(t, Z, Z, 3) == (0, 0, 0)
        assert rho(t, Z, (0, 0, 0), 3) == Z


@settings(max_examples=80, deadline=None)
@given(data=st.data())
def test_rho_level_compatible(rn_tree, data):
    t = rn_tree
    digits = st.tuples(*(st.integers(0, k - 1) for k in t.branching))
    Z, W = data.draw(digits), data.draw(digits)
    for n in range(t.depth):
        assert rho(t, Z, W, n + 1)[:n] == rho(t, Z, W, n)


def test_rho_depth_errors(mod2_tree):
    with pytest.raises(DepthInsufficient):
        rho(mod2_tree, (0,), (1,), 2)
    with pytest.raises(DepthInsufficient):
        rho(mod2_tree, (0, 0, 0), (0, 0, 0), 4)


@pytest.mark.parametrize("tree", ["mod2_tree", "rn_tree"])
def test_difference_axioms_every_level(tree, request):
    t = request.getfixturevalue(tree)
    for n in range(t.depth + 1):
        rep = verify_difference_axioms(t, n)
        assert rep.ok, rep.violations
        assert rep.exhaustive and rep.cosets == t.group(n).order


def test_difference_axioms_sampled(rn_tree):
    rep = verify_difference_axioms(rn_tree, 3, samples=500, exhaustive=False)
    assert rep.ok and rep.checked == 500 and not rep.exhaustive


def test_difference_checker_catches_bad_tables(rn_tree, monkeypatch):
    N = rn_tree.group(2).order
    a, b = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    monkeypatch.setattr(cantor, "_difference_table", lambda t, n, perm: (2 * a - b) % N)
    assert not verify_difference_axioms(rn_tree, 2).ok
    # a difference table for Z/N but with two rows swapped
    D = (a - b) % N
    D[[1, 2]] = D[[2, 1]]
    monkeypatch.setattr(cantor, "_difference_table", lambda t, n, perm: D)
    assert not verify_difference_axioms(rn_tree, 2).ok


# -- homeomorphism action -------------------------------------------------------------

def conjugate(op, perm):
    inv = [perm.index(i) for i in range(len(perm))]
    move = lambda p, s: (p[s[0]],) + s[1:] if s else s
    return lambda Z, W: move(perm, op(move(inv, Z), move(inv, W)))


def test_identity_action(rn_tree):
    t = rn_tree
    for Z, W in itertools.product(t.paths(2), repeat=2):
        assert act_homeomorphism(t, [0, 1, 2], Z, W, 2) == rho(t, Z, W, 2)


def test_action_matches_formula_and_inverts(rn_tree):
    t = rn_tree
    base = lambda Z, W: rho(t, Z, W, 2)
    perm = [0, 2, 1]
    twisted = conjugate(base, perm)
    back = conjugate(twisted, [0, 2, 1])
    for Z, W in itertools.product(t.paths(2), repeat=2):
        assert act_homeomorphism(t, perm, Z, W, 2) == twisted(Z, W)
        assert back(Z, W) == base(Z, W)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_conjugated_operation_is_a_difference(rn_tree, n):
    rep = verify_difference_axioms(rn_tree, n, perm=[0, 2, 1])
    assert rep.ok, rep.violations


def test_conjugated_table_matches_pointwise(rn_tree):
    t = rn_tree
    D = cantor._difference_table(t, 2, [0, 2, 1])
    paths = t.paths(2)
    for i, j in itertools.product(range(len(paths)), repeat=2):
        assert paths[D[i, j]] == act_homeomorphism(t, [0, 2, 1], paths[i], paths[j], 2)


def test_permutation_errors(rn_tree):
    with pytest.raises(PermutationMovesZero):
        act_homeomorphism(rn_tree, [1, 0, 2], (0,), (0,), 1)
    with pytest.raises(DigitOutOfRange):
        act_homeomorphism(rn_tree, [0, 1], (0,), (0,), 1)


def test_dump_format(mod2_tree):
    text = dump_tree(mod2_tree)
    lines = text.splitlines()
    assert lines[0] == "tree depth=3"
    assert lines[1] == "level 0 k=2"
    assert lines[2] == "rep 0 e"
    assert len(lines) == 1 + 3 * 3
