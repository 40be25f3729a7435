import itertools
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfgroups.errors import BadPrime, CentralInput, LevelTooLarge, MixedContext, NotNice
from pfgroups.finite import cyclic_group, is_isomorphic
from pfgroups.mekler import (
    Graph,
    MeklerElement,
    alpha_vectors,
    case_classify,
    central,
    centralizer_classes,
    centralizer_kernel,
    centralizer_matrix,
    class_size,
    commutator_formula,
    commutator_oracle,
    cycle_graph,
    gamma2,
    generator,
    identity,
    inverse,
    is_nice,
    level_group,
    level_order,
    multiply,
    petersen_graph,
    power,
    project_to_level,
    rewrite_normal_form,
    rn_chain,
    same_class,
    _letters,
)

C5 = cycle_graph(5)
PETERSEN = petersen_graph()
K3 = Graph(3, frozenset({(0, 1), (1, 2), (0, 2)}))
C4 = cycle_graph(4)


def random_element(rng, A, p):
    return MeklerElement(p, A, tuple(rng.integers(0, p, A.n)),
                         tuple(rng.integers(0, p, len(A.nonedges))))


def elements(A, p):
    return st.builds(
        lambda a, b: MeklerElement(p, A, tuple(a), tuple(b)),
        st.lists(st.integers(0, p - 1), min_size=A.n, max_size=A.n),
        st.lists(st.integers(0, p - 1), min_size=len(A.nonedges), max_size=len(A.nonedges)),
    )


def oracle_product(u, w):
    return rewrite_normal_form(_letters(u) + _letters(w), u.p, u.graph)


# -- graphs and niceness --------------------------------------------------------

def brute_nice(A: Graph) -> bool:
    M = np.zeros((A.n, A.n), dtype=np.int64)
    for r, s in A.edges:
        M[r, s] = M[s, r] = 1
    if np.trace(M @ M @ M):
        return False
    common = M @ M
    np.fill_diagonal(common, 0)
    if (common >= 2).any():
        return False
    for x, y in itertools.permutations(range(A.n), 2):
        z = M[x].astype(bool) & ~M[y].astype(bool)
        z[y] = False
        if not z.any():
            return False
    return True


@pytest.mark.parametrize("A,expected", [(K3, False), (C4, False), (C5, True), (PETERSEN, True)])
def test_niceness_examples(A, expected):
    rep = is_nice(A)
    assert bool(rep) is expected is brute_nice(A)


def test_niceness_witnesses():
    rep = is_nice(K3)
    assert rep.reason == "triangle" and set(rep.witness) == {0, 1, 2}
    rep = is_nice(C4)
    assert rep.reason == "square"
    a, b, c, d = rep.witness
    assert all(C4.adjacent(x, y) for x, y in [(a, b), (b, c), (c, d), (d, a)])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                        .filter(lambda e: e[0] != e[1])))))
def test_niceness_matches_adjacency_oracle(data):
    n, edges = data
    A = Graph(n, frozenset(edges))
    assert bool(is_nice(A)) == brute_nice(A)


def test_graph_rejects_loops():
    with pytest.raises(ValueError):
        Graph(3, frozenset({(1, 1)}))


def test_petersen_shape():
    assert len(PETERSEN.edges) == 15
    assert all(len(nb) == 3 for nb in PETERSEN.neighbours)


# -- arithmetic ---------------------------------------------------------------------

def test_multiply_examples():
    p = 3
    e = identity(p, C5)
    x0, x1, x2 = (generator(p, C5, i) for i in range(3))
    w = MeklerElement(p, C5, (1, 2, 0, 0, 1), (1, 0, 2, 0, 1))
    assert multiply(e, w) == w
    u = multiply(x1, x0)
    assert u.alpha == (1, 1, 0, 0, 0) and not any(u.beta)
    u = multiply(x2, x0)
    assert u.alpha == (1, 0, 1, 0, 0)
    assert [pair for pair, c in zip(C5.nonedges, u.beta) if c] == [(0, 2)]
    # the sign is the rewriting oracle's: x2 x0 = x0 x2 x_{0,2}^{-1}
    assert u.beta_at(0, 2) == 2
    assert u == oracle_product(x2, x0)


def test_inverse_examples():
    p = 3
    x0, x2 = generator(p, C5, 0), generator(p, C5, 2)
    assert inverse(identity(p, C5)).is_identity()
    assert inverse(x0).alpha == (2, 0, 0, 0, 0) and not any(inverse(x0).beta)
    assert inverse(multiply(x2, x0)) == multiply(inverse(x0), inverse(x2))


def test_mixed_context():
    with pytest.raises(MixedContext):
        multiply(generator(3, C5, 0), generator(5, C5, 0))
    with pytest.raises(MixedContext):
        commutator_formula(generator(3, C5, 0), generator(3, PETERSEN, 0))


@pytest.mark.parametrize("p", [3, 5])
def test_multiply_matches_rewriting(p):
    rng = np.random.default_rng(p)
    for _ in range(300):
        u, w = random_element(rng, C5, p), random_element(rng, C5, p)
        assert multiply(u, w) == oracle_product(u, w)


@pytest.mark.parametrize("p", [3, 5])
def test_group_axioms_random_triples(p):
    rng = np.random.default_rng(10 + p)
    e = identity(p, C5)
    for _ in range(1000):
        u, v, w = (random_element(rng, C5, p) for _ in range(3))
        left = multiply(multiply(u, v), w)
        assert left == multiply(u, multiply(v, w))
        assert left == rewrite_normal_form(_letters(u) + _letters(v) + _letters(w), p, C5)
        assert multiply(u, e) == u == multiply(e, u)
        assert multiply(u, inverse(u)).is_identity()


@pytest.mark.parametrize("p", [3, 5])
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_exponent_p(p, data):
    u = data.draw(elements(PETERSEN, p))
    acc = identity(p, PETERSEN)
    for _ in range(p):
        acc = multiply(acc, u)
    assert acc.is_identity()
    assert power(u, p).is_identity() and power(u, -1) == inverse(u)


@pytest.mark.parametrize("p", [3, 5])
@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_nil2_law(p, data):
    u, w, z = (data.draw(elements(C5, p)) for _ in range(3))
    c = commutator_oracle(u, w)
    assert not any(c.alpha)
    assert commutator_oracle(c, z).is_identity()


# -- commutators ------------------------------------------------------------------

def test_commutator_examples():
    p = 5
    x0, x2 = generator(p, C5, 0), generator(p, C5, 2)
    for f in (commutator_formula, commutator_oracle):
        c = f(x0, x2)
        assert c.beta_at(0, 2) == 1 and sum(c.beta) == 1 and not any(c.alpha)
        c = f(generator(p, C5, 0, 2), generator(p, C5, 2, 3))
        assert c.beta_at(0, 2) == 6 % p
        assert f(x0, generator(p, C5, 1)).is_identity()
        assert f(x0, x0).is_identity()


@pytest.mark.parametrize("p", [3, 5])
def test_commutator_formula_matches_oracle_random(p):
    rng = np.random.default_rng(100 + p)
    for _ in range(1000):
        u, w = random_element(rng, C5, p), random_element(rng, C5, p)
        assert commutator_formula(u, w) == commutator_oracle(u, w)


def test_commutator_formula_matches_oracle_petersen():
    rng = np.random.default_rng(7)
    for _ in range(200):
        u, w = random_element(rng, PETERSEN, 3), random_element(rng, PETERSEN, 3)
        assert commutator_formula(u, w) == commutator_oracle(u, w)


@settings(max_examples=100, deadline=None)
@given(data=st.data())
def test_commutator_antisymmetry(data):
    u, w = data.draw(elements(C5, 5)), data.draw(elements(C5, 5))
    assert inverse(commutator_oracle(u, w)) == commutator_oracle(w, u)


# -- centralizers -------------------------------------------------------------------

def commuting_alphas(v):
    """Brute force: every alpha vector whose commutator with ``v`` vanishes."""
    p, A = v.p, v.graph
    zero = (0,) * len(A.nonedges)
    return {a for a in itertools.product(range(p), repeat=A.n)
            if commutator_formula(v, MeklerElement(p, A, a, zero)).is_identity()}


def span(basis, p):
    n = basis.shape[1]
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        out.add(tuple(int(x) for x in (np.array(coeffs, dtype=np.int64) @ basis) % p)
                if len(basis) else (0,) * n)
    return out


def test_centralizer_of_identity_is_everything():
    assert not centralizer_matrix(identity(3, C5)).any()
    assert len(centralizer_kernel(identity(3, C5))) == 5


@pytest.mark.parametrize("alpha", [(1, 0, 0, 0, 0), (1, 1, 0, 0, 0), (1, 0, 1, 0, 0),
                                   (1, 0, 2, 0, 1), (2, 1, 1, 0, 0)])
def test_centralizer_kernel_brute_force(alpha):
    v = MeklerElement(3, C5, alpha, (0,) * 5)
    K = centralizer_kernel(v)
    assert span(K, 3) == commuting_alphas(v)


def test_centralizer_of_x0_dimension():
    # x0 commutes with x0, x1, x4 and nothing else new
    K = centralizer_kernel(generator(3, C5, 0))
    assert len(K) == 3 == round(np.log(len(commuting_alphas(generator(3, C5, 0)))) / np.log(3))


@pytest.mark.parametrize("p", [3, 5])
def test_centralizer_scaling(p):
    for k in range(1, p**5):
        v = MeklerElement(p, C5, tuple(alpha_vectors(5, p, k, k + 1)[0]), (0,) * 5)
        for g in range(2, p):
            assert same_class(v, power(v, g))


def test_same_class_examples():
    x0 = generator(3, C5, 0)
    assert same_class(x0, x0)
    assert same_class(x0, power(x0, 2))
    assert not same_class(x0, generator(3, C5, 1))
    with pytest.raises(CentralInput):
        same_class(x0, central(3, C5, 0, 2))
    with pytest.raises(CentralInput):
        case_classify(identity(3, C5))


def test_case_classify_examples():
    def elt(*support):
        return MeklerElement(3, C5, tuple(1 if i in support else 0 for i in range(5)), (0,) * 5)

    assert str(case_classify(power(generator(3, C5, 0), 2))) == "Case1(0)"
    assert str(case_classify(elt(0, 1))) == "Case2(0,1)"
    assert str(case_classify(elt(0, 2))) == "Case3(1)"
    assert str(case_classify(elt(0, 2, 4))) == "Case4()"
    # the common neighbour may itself be in the support
    assert str(case_classify(elt(0, 1, 2))) == "Case3(1)"


@pytest.mark.parametrize("support,size", [((0,), 2), ((0, 1), 4), ((0, 2), 6), ((0, 2, 4), 2)])
def test_class_size_examples(support, size):
    v = MeklerElement(3, C5, tuple(1 if i in support else 0 for i in range(5)), (0,) * 5)
    assert class_size(v) == size


def brute_classes(A, p):
    """Classes of alpha vectors under equality of brute-force centralizers."""
    groups = {}
    for a in itertools.product(range(p), repeat=A.n):
        if any(a):
            v = MeklerElement(p, A, a, (0,) * len(A.nonedges))
            groups.setdefault(frozenset(commuting_alphas(v)), []).append(a)
    return groups


def test_class_sizes_exhaustive_c5():
    groups = brute_classes(C5, 3)
    sizes = {a: len(g) for g in groups.values() for a in g}
    cc = centralizer_classes(C5, 3)
    for k in range(1, 3**5):
        a = tuple(int(x) for x in alpha_vectors(5, 3, k, k + 1)[0])
        v = MeklerElement(3, C5, a, (0,) * 5)
        assert sizes[a] == class_size(v) == cc.sizes[cc.labels[k]]


@pytest.mark.parametrize("A,p", [(C5, 5), (PETERSEN, 3)])
def test_class_size_matches_enumeration(A, p):
    cc = centralizer_classes(A, p)
    vecs = alpha_vectors(A.n, p)
    zero = (0,) * len(A.nonedges)
    for k in range(1, p**A.n, 7):
        v = MeklerElement(p, A, tuple(vecs[k]), zero)
        assert class_size(v) == cc.sizes[cc.labels[k]]


def test_centralizer_classes_bookkeeping():
    cc = centralizer_classes(C5, 3, chunk=17)
    ref = centralizer_classes(C5, 3)
    assert (cc.labels == ref.labels).all()
    assert cc.sizes.sum() == 3**5 and cc.sizes[cc.central] == 1


# -- gamma2 -------------------------------------------------------------------------

@pytest.mark.parametrize("A,p", [(C5, 3), (C5, 5), (PETERSEN, 3)])
def test_gamma2_round_trip(A, p):
    res = gamma2(A, p)
    assert res.isomorphic_to(A)
    assert res.graph == A
    assert sorted(res.vertex_map) == list(range(A.n))


@pytest.mark.slow
@pytest.mark.skipif(not os.environ.get("PFGROUPS_SLOW"), reason="set PFGROUPS_SLOW=1 (about 100 s)")
def test_gamma2_petersen_p5():
    assert gamma2(PETERSEN, 5).isomorphic_to(PETERSEN)


def test_gamma2_errors():
    with pytest.raises(NotNice):
        gamma2(C4, 3)
    with pytest.raises(BadPrime):
        gamma2(C5, 2)
    with pytest.raises(BadPrime):
        gamma2(C5, 9)


# -- finite levels ----------------------------------------------------------------------

def test_level_group_small():
    g, gens = level_group(C5, 3, 0)
    assert g.order == 1
    g, gens = level_group(C5, 3, 1)
    assert is_isomorphic(g, cyclic_group(3))
    g, _ = level_group(C5, 3, 2)
    assert g.order == 9 and g.is_abelian()
    no_edge = Graph(2)
    g, _ = level_group(no_edge, 3, 2)
    assert g.order == 27 and not g.is_abelian() and g.exponent() == 3


@pytest.mark.parametrize("n,order", [(0, 1), (1, 3), (2, 9), (3, 81), (4, 2187)])
def test_level_orders(n, order):
    assert level_order(C5, 3, n) == order
    if n <= 3:
        g, _ = level_group(C5, 3, n)
        g.check_axioms()
        assert g.order == order


def test_level_too_large():
    with pytest.raises(LevelTooLarge):
        level_group(C5, 3, 5)


def test_level_group_matches_arithmetic():
    p, n = 3, 3
    g, _ = level_group(C5, p, n)
    rng = np.random.default_rng(3)
    k = 3
    sub = C5.induced(k)

    def index(u):
        digits = [u.alpha[i] for i in range(k)] + [u.beta_at(r, s) for r, s in sub.nonedges]
        return int(sum(d * p ** (len(digits) - 1 - j) for j, d in enumerate(digits)))

    for _ in range(200):
        u = project_to_level(random_element(rng, C5, p), n)
        w = project_to_level(random_element(rng, C5, p), n)
        assert g.mul(index(u), index(w)) == index(multiply(u, w))


def test_rn_chain_levels():
    R = rn_chain(C5, 3)
    assert [R[i].order for i in range(4)] == [1, 3, 9, 81]
    assert R.check_descending(3)


@settings(max_examples=100, deadline=None)
@given(data=st.data(), n=st.integers(0, 5))
def test_projection_compatible(data, n):
    u, w = data.draw(elements(C5, 3)), data.draw(elements(C5, 3))
    assert project_to_level(multiply(u, w), n) == multiply(project_to_level(u, n), project_to_level(w, n))
    if n == 0:
        assert project_to_level(u, 0).is_identity()
    if n == 5:
        assert project_to_level(u, 5) == u
