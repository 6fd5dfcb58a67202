import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import family_groups
from rootcryst.crystgrp import (
    CrystGroup,
    FiniteQuotient,
    build_from_generators,
    coset_commuting_with_involution,
    coset_equal_squares,
    coset_equal_squares_many,
    coset_involution_exists,
    finite_quotient,
    group_from_struct,
    invert,
    is_split,
    multiply,
    reflection_coset_profile,
    split_section,
    split_witness,
    square,
)
from rootcryst.errors import InconsistentVectorSystem, MixedParents, NotAnInvolution, QuotientTooLarge, UsageError
from rootcryst.lattices import invariant_lattice
from rootcryst.weyl import classify_reflections

F = Fraction
H = F(1, 2)

BUILDABLE = {
    "B3-CL": ["W1", "W2", "W3", "W4"],
    "B4-CL": ["W1", "W2", "W3", "W4"],
    "B3-CCL": ["W1", "W2"],
    "B4-CCL": ["W1", "W3"],
    "C3-FL": ["W1", "W2", "W3", "W4"],
    "C5-FL": ["W1", "W2", "W3", "W4"],
    "D6-FL": ["W1", "W2", "W3"],
}


def rep(key, name):
    return family_groups(key)[1][name]


def e(n, i, c=1):
    return tuple(F(c) if k == i - 1 else F(0) for k in range(n))


def gen(W, k):
    return W.point_group.generator_index(k - 1)


# ---------------------------------------------------------------- construction


def test_zero_vector_system_is_the_split_group():
    L = invariant_lattice("B", 3, "CL")
    W = build_from_generators(L, [((0, 0, 0), s) for s in L.group.gens])
    assert is_split(W)
    assert all(not any(W.t(g)) for g in range(L.group.order))


def test_d6_w2_is_a_valid_group():
    W = rep("D6-FL", "W2")
    assert W.check_cocycle()
    assert all(t == e(6, 1) for t in W.gen_translations)


def test_corrupted_generator_is_rejected():
    L = invariant_lattice("B", 3, "CL")
    ts = [(0, 0, 0), (H, 0, 0), (0, 0, 0)]
    with pytest.raises(InconsistentVectorSystem):
        CrystGroup(L, ts)


def test_generator_mismatch_is_rejected():
    L = invariant_lattice("B", 3, "CL")
    with pytest.raises(UsageError):
        build_from_generators(L, [((0, 0, 0), L.group.gens[1])] + [((0, 0, 0), s) for s in L.group.gens[1:]])


def test_generator_representatives_are_kept():
    W = rep("C3-FL", "W4")
    for k, t in enumerate(W.gen_translations):
        assert W.generator(k).v == t


@pytest.mark.parametrize("key", sorted(BUILDABLE))
def test_cocycle_exhaustive_for_catalog_representatives(key):
    for name in BUILDABLE[key]:
        W = rep(key, name)
        if W.point_group.order > 2000:
            assert W.check_cocycle()
        else:
            assert W.check_cocycle(exhaustive=True)


def test_cocycle_exhaustive_d6_independent_recomputation():
    # every pair (g, h): t_gh - t_g - g t_h in L, recomputed from ambient vectors
    W = rep("D6-FL", "W3")
    W0 = W.point_group
    L = W.lattice
    rng = random.Random(3)
    for _ in range(3000):
        g, h = rng.randrange(W0.order), rng.randrange(W0.order)
        gt = W0.elements[g].apply(W.t(h))
        diff = [a - b - c for a, b, c in zip(W.t(W0.multiply(g, h)), W.t(g), gt)]
        assert L.contains(diff)


# ---------------------------------------------------------------- element arithmetic


def test_square_of_epsilon_one_in_d6():
    W = rep("D6-FL", "W2")
    for k in (5, 6):
        z = W.element(e(6, 1), gen(W, k))
        sq = square(z)
        assert sq.g == 0 and sq.v == e(6, 1, 2)


def test_inverse_and_translations():
    W = rep("B3-CL", "W3")
    W0 = W.point_group
    for g in range(W0.order):
        a = W.coset_element(g)
        assert multiply(invert(a), a) == W.identity() == multiply(a, invert(a))
    x, y = W.translation((1, 2, 0)), W.translation((0, -1, 3))
    assert multiply(x, y).v == (1, 1, 3) and multiply(x, y).g == 0
    split = rep("B3-CL", "W1")
    g = 5
    assert multiply(split.element((0, 0, 0), g), split.element((0, 0, 0), W0.inverse(g))) == split.identity()


def test_mixed_parents():
    with pytest.raises(MixedParents):
        multiply(rep("B3-CL", "W1").identity(), rep("B3-CL", "W2").identity())


def test_element_outside_group_rejected():
    W = rep("B3-CL", "W1")
    with pytest.raises(UsageError):
        W.element((H, 0, 0), 0)


@given(st.integers(0, 47), st.integers(0, 47), st.integers(0, 47))
def test_group_law_is_associative(a, b, c):
    W = rep("B3-CL", "W4")
    x, y, z = W.coset_element(a), W.coset_element(b), W.coset_element(c)
    assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))
    assert multiply(x, y).in_group()


# ---------------------------------------------------------------- split detection


@pytest.mark.parametrize("key", sorted(BUILDABLE))
def test_split_exactly_for_w1(key):
    for name in BUILDABLE[key]:
        assert is_split(rep(key, name)) == (name == "W1")


@pytest.mark.parametrize("key", ["B3-CL", "C3-FL", "B4-CCL"])
def test_split_section_is_a_complement(key):
    """Shift a split group by a coboundary, recover v and check the section is a subgroup
    mapping bijectively onto the point group with pairwise distinct translation cosets."""
    W1 = rep(key, "W1")
    L, W0 = W1.lattice, W1.point_group
    v0 = L.vector([F(1, 3), F(-1, 5)] + [F(1, 7)] * (L.rank - 2))
    ts = [tuple(a - b for a, b in zip(v0, W0.gens[k].apply(v0))) for k in range(W0.rank)]
    W = CrystGroup(L, ts)
    v = split_witness(W)
    assert v is not None
    section = split_section(W, v)
    assert [z.g for z in section] == list(range(W0.order))
    assert all(z.in_group() for z in section)
    index = {z: z.g for z in section}
    for a in section[:: max(1, W0.order // 40)]:
        for b in section[:: max(1, W0.order // 40)]:
            assert multiply(a, b) in index
    # distinct point parts means pairwise distinct translation cosets
    assert len(index) == W0.order


def test_split_agrees_with_box_transversal_search():
    """Brute force: a split group has a translation v on a quarter-integer grid with (1 - s) v = t_s mod L."""
    for key in ["B3-CL", "C3-FL"]:
        for name in BUILDABLE[key]:
            W = rep(key, name)
            L, W0 = W.lattice, W.point_group
            found = False
            for q in product([F(k, 4) for k in range(4)], repeat=L.rank):
                v = L.vector(q)
                if all(L.contains([a - (b - c) for a, b, c in zip(W.t(W0.generator_index(k)), v, W0.gens[k].apply(v))])
                       for k in range(W0.rank)):
                    found = True
                    break
            assert found == is_split(W)


# ---------------------------------------------------------------- coset solvers


def involution_in_box(W, g, bound=3):
    A = W.action(g)
    t = W.t_coords(g)
    for x in product(range(-bound, bound + 1), repeat=W.rank):
        u = [a + b for a, b in zip(t, x)]
        if all(a + b == 0 for a, b in zip(u, A.apply(u))):
            return True
    return False


def squares_in_box(W, g, bound=2):
    A = W.action(g)
    t = W.t_coords(g)
    out = set()
    for x in product(range(-bound, bound + 1), repeat=W.rank):
        u = [a + b for a, b in zip(t, x)]
        out.add(tuple(a + b for a, b in zip(u, A.apply(u))))
    return out


def test_involution_examples():
    W1 = rep("B3-CL", "W1")
    z = coset_involution_exists(W1, gen(W1, 1))
    assert z is not None and square(z) == W1.identity()
    W4 = rep("B3-CL", "W4")
    assert all(coset_involution_exists(W4, gen(W4, j)) is None for j in (1, 2, 3))
    W3 = rep("C3-FL", "W3")
    assert coset_involution_exists(W3, gen(W3, 2)) is None


def test_equal_squares_examples():
    W2 = rep("D6-FL", "W2")
    wit = coset_equal_squares(W2, gen(W2, 5), gen(W2, 6), square_translation=e(6, 1, 2))
    assert wit is not None
    a, b = wit
    assert square(a) == square(b) and square(a).v == e(6, 1, 2) and square(a).g == 0
    W3 = rep("D6-FL", "W3")
    assert coset_equal_squares(W3, gen(W3, 5), gen(W3, 6)) is None
    g = gen(W3, 2)
    a, b = coset_equal_squares(W3, g, g)
    assert square(a) == square(b)


def test_triple_squares_b4_ccl():
    W1, W3 = rep("B4-CCL", "W1"), rep("B4-CCL", "W3")
    assert coset_equal_squares_many(W1, [gen(W1, k) for k in (1, 2, 3)]) is not None
    assert coset_equal_squares_many(W3, [gen(W3, k) for k in (1, 2, 3)]) is None


def test_commuting_with_involution_examples():
    W3 = rep("B4-CCL", "W3")
    zg, zh = coset_commuting_with_involution(W3, gen(W3, 1), gen(W3, 4))
    assert square(zh) == W3.identity()
    assert multiply(zg, zh) == multiply(zh, zg)
    # the printed witness: (1/2 e3, s1) with (0, s4)
    a, b = W3.element((0, 0, H, 0), gen(W3, 1)), W3.element((0, 0, 0, 0), gen(W3, 4))
    assert multiply(a, b) == multiply(b, a) and square(b) == W3.identity()
    W1 = rep("B4-CCL", "W1")
    zg, zh = coset_commuting_with_involution(W1, gen(W1, 1), gen(W1, 4))
    assert multiply(zg, zh) == multiply(zh, zg)


@pytest.mark.parametrize("key", ["B3-CL", "C3-FL", "B4-CCL", "B3-CCL"])
def test_involution_solver_against_box(key):
    for name in BUILDABLE[key]:
        W = rep(key, name)
        W0 = W.point_group
        for g in range(W0.order):
            z = coset_involution_exists(W, g)
            if z is not None:
                assert z.in_group() and square(z) == W.identity()
            if W0.is_involution(g) and involution_in_box(W, g):
                assert z is not None


@pytest.mark.parametrize("key", ["B3-CL", "C3-FL"])
def test_equal_squares_solver_against_box(key):
    for name in BUILDABLE[key]:
        W = rep(key, name)
        gens = [gen(W, k) for k in range(1, W.rank + 1)]
        for g, h in product(gens, repeat=2):
            wit = coset_equal_squares(W, g, h)
            if wit is not None:
                assert square(wit[0]) == square(wit[1]) and all(z.in_group() for z in wit)
            if squares_in_box(W, g) & squares_in_box(W, h):
                assert wit is not None


# ---------------------------------------------------------------- reflection profiles


def test_profile_examples():
    W = rep("B3-CL", "W1")
    W0 = W.point_group
    assert reflection_coset_profile(W, gen(W, 1)) == (2, 1, 4, 2)
    minus = W0.index_of(W0.elements[0].scale(-1))
    assert reflection_coset_profile(W, minus) == (0, 3, 1, 8)
    B4 = rep("B4-CCL", "W3")
    assert reflection_coset_profile(B4, gen(B4, 4)) == (3, 1, 8, 2)
    with pytest.raises(NotAnInvolution):
        reflection_coset_profile(W, 0)


def test_profile_independent_of_representative():
    for name in BUILDABLE["B3-CL"]:
        W = rep("B3-CL", name)
        for g in classify_reflections(W.point_group):
            assert reflection_coset_profile(W, g) == reflection_coset_profile(rep("B3-CL", "W1"), g)


# ---------------------------------------------------------------- finite quotients


def test_quotient_orders():
    W = rep("B3-CL", "W1")
    assert finite_quotient(W, 1).order == 48
    assert finite_quotient(W, 2).order == 384
    D = rep("D6-FL", "W2")
    with pytest.raises(QuotientTooLarge):
        finite_quotient(D, 2)
    assert FiniteQuotient(D, 2).order == 23040 * 64


def test_quotient_multiplication_matches_group_law():
    W = rep("B3-CL", "W3")
    Q = finite_quotient(W, 2)
    rng = random.Random(5)
    def random_element():
        g = rng.randrange(48)
        return W.element_from_coords([F(rng.randint(-3, 3)) + x for x in W.t_coords(g)], g)

    for _ in range(300):
        a, b = random_element(), random_element()
        assert Q.multiply(Q.element_of(a), Q.element_of(b)) == Q.element_of(multiply(a, b))


def test_quotient_of_point_group_is_the_table_of_w0():
    W = rep("B3-CL", "W4")
    Q = finite_quotient(W, 1)
    W0 = W.point_group
    T = Q.table()
    assert all(T[a][b] == W0.multiply(a, b) for a in range(48) for b in range(48))


# ---------------------------------------------------------------- representative independence and serialization


@pytest.mark.parametrize("key", ["B3-CL", "C3-FL", "B4-CCL"])
def test_reshift_keeps_verdicts(key):
    rng = random.Random(11)
    for name in BUILDABLE[key]:
        W = rep(key, name)
        for _ in range(3):
            V = W.reshifted(rng)
            assert V.same_vsys(W)
            assert is_split(V) == is_split(W)
            for k in range(1, W.rank + 1):
                assert (coset_involution_exists(V, gen(V, k)) is None) == (coset_involution_exists(W, gen(W, k)) is None)


@pytest.mark.parametrize("key", sorted(BUILDABLE))
def test_struct_round_trip(key):
    import json

    for name in BUILDABLE[key]:
        W = rep(key, name)
        text = json.dumps(W.to_struct(), sort_keys=True)
        V = group_from_struct(json.loads(text))
        assert V.gen_translations == W.gen_translations
        assert V.same_vsys(W) and V.meta == W.meta
        assert json.dumps(V.to_struct(), sort_keys=True) == text


def test_malformed_struct():
    with pytest.raises(UsageError):
        group_from_struct({"kind": "crystallographic_group", "schema_version": 1})
    with pytest.raises(UsageError):
        group_from_struct({"kind": "matrix"})
