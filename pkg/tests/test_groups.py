import itertools
import json

import pytest
from hypothesis import given, strategies as st

from bicrossed.groups import (
    FiniteGroup,
    GroupError,
    MatchedPair,
    alternating,
    check_pi_p_identities,
    cyclic,
    derive_matched_pair,
    dihedral,
    direct_product,
    exact_factorizations,
    group_from_permutations,
    group_from_table,
    make_factorization,
    named_group,
    quaternion,
    rebuild_group,
    rebuild_matches,
    subgroups,
    symmetric,
    verify_matched_pair,
)

SMALL = {
    "Z1": cyclic(1), "Z2": cyclic(2), "Z4": cyclic(4), "Z6": cyclic(6),
    "S3": symmetric(3), "D4": dihedral(4), "Q8": quaternion(), "Z2xZ2": direct_product(cyclic(2), cyclic(2)),
}


def brute_subgroups(G):
    """Every subset closed under the product, by enumeration."""
    out = []
    for mask in range(1, 1 << G.order):
        S = [a for a in G.elements if mask >> a & 1]
        if G.identity in S and all(G.mul(a, b) in S for a in S for b in S):
            out.append(tuple(S))
    return sorted(out)


def brute_factorization_count(G):
    subs = brute_subgroups(G)
    return sum(1 for F in subs for H in subs
               if len(F) * len(H) == G.order and set(F) & set(H) == {G.identity})


def assert_group_axioms(G: FiniteGroup):
    e = G.identity
    for a in G.elements:
        assert G.mul(a, e) == a == G.mul(e, a)
        assert G.mul(a, G.inv(a)) == e
        for b in G.elements:
            for c in G.elements:
                assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))


@pytest.mark.parametrize("name", sorted(SMALL))
def test_subgroups_match_enumeration(name):
    G = SMALL[name]
    assert subgroups(G) == brute_subgroups(G)
    assert len(exact_factorizations(G)) == brute_factorization_count(G)


@pytest.mark.parametrize("G,order,classes,nsub", [
    (symmetric(3), 6, 3, 6), (dihedral(4), 8, 5, 10), (quaternion(), 8, 5, 6),
    (alternating(4), 12, 4, 10), (symmetric(4), 24, 5, 30), (cyclic(12), 12, 12, 6),
])
def test_known_invariants(G, order, classes, nsub):
    assert G.order == order
    assert len(G.conjugacy_classes()) == classes
    assert len(subgroups(G)) == nsub


@pytest.mark.parametrize("name", ["Z1", "Z2", "Z5", "Z8", "Z2xZ2", "Z2xZ2xZ2", "S3", "D4", "Q8", "A4", "S4", "D5", "s3", "z7"])
def test_named_groups_are_groups(name):
    G = named_group(name)
    if G.order <= 12:
        assert_group_axioms(G)
    assert len(G.labels) == G.order


def test_named_group_unknown():
    with pytest.raises(GroupError):
        named_group("Q9")


perm = st.permutations(list(range(5))).map(tuple)


@given(st.lists(perm, min_size=1, max_size=2))
def test_permutation_closure_is_a_group(gens):
    G = group_from_permutations(gens)
    assert 120 % G.order == 0
    for a in G.elements:
        for b in G.elements:
            pa, pb = G.perms[a], G.perms[b]
            assert G.perms[G.mul(a, b)] == tuple(pa[i] for i in pb)


def test_table_validation_errors():
    with pytest.raises(GroupError, match="Latin"):
        group_from_table([[0, 1], [0, 1]])
    with pytest.raises(GroupError, match="square"):
        group_from_table([[0, 1], [1]])
    # a Latin square with identity that is not associative (order 5 loop)
    loop = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupError, match="associative"):
        group_from_table(loop)
    with pytest.raises(GroupError):
        group_from_permutations([(0, 0, 1)])


def test_json_roundtrip():
    G = dihedral(4)
    H = FiniteGroup.from_json(json.loads(json.dumps(G.to_json())))
    assert H.table == G.table and H.labels == G.labels
    P = FiniteGroup.from_json({"permutations": [[1, 0, 2], [1, 2, 0]]})
    assert P.order == 6


def test_bad_factorizations():
    S3 = symmetric(3)
    t = S3.labels.index("(0 1)")
    with pytest.raises(GroupError):
        make_factorization(S3, [0, t], [0, t])
    with pytest.raises(GroupError):
        make_factorization(S3, [0, t], [0])
    with pytest.raises(GroupError):
        make_factorization(S3, [0, t, 2], [0])


GROUPS = [SMALL[k] for k in sorted(SMALL)] + [alternating(4)]


@given(st.sampled_from(GROUPS), st.data())
def test_matched_pair_laws_on_random_factorizations(G, data):
    facts = exact_factorizations(G)
    f = data.draw(st.sampled_from(facts))
    mp = derive_matched_pair(f)
    assert verify_matched_pair(mp).ok
    assert check_pi_p_identities(f, mp).ok
    assert rebuild_matches(f, mp)
    assert rebuild_group(mp).order == G.order
    again = MatchedPair.from_json(json.loads(json.dumps(mp.to_json())))
    assert again.ract == mp.ract and again.lact == mp.lact


def test_abelian_factorizations_have_trivial_actions():
    for f in exact_factorizations(cyclic(6)):
        assert derive_matched_pair(f).is_trivial_actions()


def test_swapped_action_is_another_matched_pair():
    f = next(f for f in exact_factorizations(symmetric(3)) if f.F.order == 3)
    mp = derive_matched_pair(f)
    lact = [list(r) for r in mp.lact]
    # inversion on Z3 replaced by the identity: the laws still hold, for Z3 x Z2
    g = next(g for g in mp.G.elements if g != mp.G.identity)
    i, j = [x for x in mp.F.elements if x != mp.F.identity]
    lact[g][i], lact[g][j] = lact[g][j], lact[g][i]
    other = MatchedPair(mp.F, mp.G, mp.ract, tuple(map(tuple, lact)))
    assert verify_matched_pair(other).ok
    assert rebuild_group(other).is_abelian()
    assert not rebuild_matches(f, other)


def test_broken_matched_pair_is_caught():
    f = next(f for f in exact_factorizations(symmetric(3)) if f.F.order == 3)
    mp = derive_matched_pair(f)
    ract = [list(r) for r in mp.ract]
    g = next(g for g in mp.G.elements if g != mp.G.identity)
    ract[g][1] = mp.G.identity
    rep = verify_matched_pair(MatchedPair(mp.F, mp.G, tuple(map(tuple, ract)), mp.lact))
    assert not rep.ok and rep.failures


def test_factorizations_of_s3_include_z2_z3():
    orders = {(f.F.order, f.G.order) for f in exact_factorizations(symmetric(3))}
    assert {(2, 3), (3, 2), (1, 6), (6, 1)} <= orders


def test_cap():
    with pytest.raises(ValueError):
        subgroups(symmetric(4), cap=10)
