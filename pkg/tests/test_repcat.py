import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import bicrossed.repcat as rc
from bicrossed.cohomology import solve_opext, trivial_pair
from bicrossed.constructions import bicrossed_product, group_algebra
from bicrossed.groups import derive_matched_pair, dihedral, exact_factorizations, symmetric
from bicrossed.hopf import is_cocommutative, is_commutative
from bicrossed.repcat import (
    GradedFModule,
    SigmaBimodule,
    balanced_tensor,
    check_claim,
    check_coherence,
    check_FG,
    check_GF,
    check_naturality,
    check_xi,
    default_objects,
    direct_sum,
    free_bimodule,
    functor_F,
    functor_G,
    hom_space,
    module_from_rep,
    normalized_integral,
    orbit_module,
    regular_rep,
    rep_from_module,
    tensor_graded,
    tensor_reps,
    trivial_rep,
    verify_bimodule,
    verify_equivalence,
    verify_graded,
    verify_right_module,
)
from bicrossed.linalg import SparseTensor


def s3_setup(F_order):
    f = next(f for f in exact_factorizations(symmetric(3)) if f.F.order == F_order)
    return trivial_pair(derive_matched_pair(f), 6), f


def d4_setup():
    for f in exact_factorizations(dihedral(4)):
        for pc in solve_opext(derive_matched_pair(f), 8).classes():
            A = bicrossed_product(pc, verify=False)
            if not is_commutative(A) and not is_cocommutative(A):
                return pc, f
    raise AssertionError("no nontrivial class")


SETUPS = {"s3_split": lambda: s3_setup(2), "s3_normal_F": lambda: s3_setup(3), "d4": d4_setup}
_cache = {}


def setup(name):
    if name not in _cache:
        pc, f = SETUPS[name]()
        _cache[name] = (pc, f, default_objects(pc, f))
    return _cache[name]


def graded(objs):
    return [o for o in objs if isinstance(o, GradedFModule)]


@pytest.mark.parametrize("name", sorted(SETUPS))
def test_rep_translation_roundtrip(name):
    pc, f, objs = setup(name)
    A = bicrossed_product(pc, verify=False)
    for V in graded(objs):
        act = rep_from_module(V, pc)
        assert verify_right_module(A, act).ok
        back = module_from_rep(act, pc, A)
        assert back.grading == V.grading and back.ract == V.ract


@pytest.mark.parametrize("name", sorted(SETUPS))
def test_graded_tensor_is_the_hopf_tensor(name):
    """The twisted F-action on V (x) W is the coproduct action of A."""
    pc, f, objs = setup(name)
    A = bicrossed_product(pc, verify=False)
    small = [V for V in graded(objs) if V.dim <= 3]
    for V, W in itertools.product(small, repeat=2):
        via_hopf = tensor_reps(A, rep_from_module(V, pc), rep_from_module(W, pc))
        assert rep_from_module(tensor_graded(V, W, pc), pc) == via_hopf


def test_regular_and_trivial_reps():
    pc, f = s3_setup(2)
    A = bicrossed_product(pc)
    assert verify_right_module(A, regular_rep(A)).ok
    assert verify_right_module(A, trivial_rep(A)).ok
    # a diagonal action that ignores the product is not a module
    with pytest.raises(ValueError):
        module_from_rep(SparseTensor.from_entries((6, 1, 1), 6, {(a, 0, 0): 1 for a in range(6)}), pc, A)


def test_invalid_graded_module_is_reported():
    pc, f = s3_setup(2)
    V = orbit_module(pc, pc.mp.G.identity, character=[0, 1])  # x -> zeta_6: not a character of Z2
    rep = verify_graded(V, pc)
    assert not rep.ok
    out = verify_equivalence(pc, f, [V])
    assert not out.ok and out.failures[0]["axiom"] == "invalid object"


def test_normalized_integral():
    pc, f = s3_setup(3)
    t = normalized_integral(3, 6)
    assert t.verify(group_algebra(f.F, 6)).ok


@pytest.mark.parametrize("name", sorted(SETUPS))
def test_functors_are_inverse(name):
    pc, f, objs = setup(name)
    for V in graded(objs):
        U = functor_G(V, pc, f)
        assert verify_bimodule(U, pc, f).ok
        assert check_FG(V, pc, f).ok
        assert check_GF(U, pc, f).ok
        assert functor_F(U, pc, f).dim == V.dim
    kF = free_bimodule(pc, f)
    assert verify_bimodule(kF, pc, f).ok and check_GF(kF, pc, f).ok


@pytest.mark.parametrize("name", sorted(SETUPS))
def test_xi_and_claim_on_pairs(name):
    pc, f, objs = setup(name)
    Us = [functor_G(V, pc, f) for V in graded(objs) if V.dim <= 2] + [free_bimodule(pc, f)]
    for U, W in itertools.product(Us, repeat=2):
        assert check_xi(U, W, pc, f).ok
        assert check_claim(U, W, pc, f).ok
        T = balanced_tensor(U, W, pc, f)
        assert T.module.dim * pc.mp.F.order == U.dim * W.dim


def test_short_form_of_the_claim():
    """pi||u|| pi||u'|| is right exactly when |> is trivial on the degrees involved."""
    for name, expected in (("s3_split", True), ("s3_normal_F", False)):
        pc, f, objs = setup(name)
        Us = [functor_G(V, pc, f) for V in graded(objs) if V.dim <= 2] + [free_bimodule(pc, f)]
        results = [check_claim(a, b, pc, f).details["short_form_holds"] for a in Us for b in Us]
        assert all(results) == expected


def test_coherence_holds_and_detects_a_wrong_associator():
    pc, f, objs = setup("d4")
    Us = [functor_G(V, pc, f) for V in graded(objs)]
    triples = [t for t in itertools.product(Us, repeat=3) if t[0].dim * t[1].dim * t[2].dim <= 64]
    ctx = rc._ctx(pc, f)
    assert all(check_coherence(*t, pc, f, ctx).ok for t in triples)
    wrong = rc._ctx(pc, f)
    wrong._omega = np.zeros_like(ctx.omega)
    assert not all(check_coherence(*t, pc, f, wrong).ok for t in triples)


def test_hom_spaces():
    pc, f = s3_setup(2)
    A = bicrossed_product(pc)
    reg = module_from_rep(regular_rep(A), pc, A)
    triv = module_from_rep(trivial_rep(A), pc, A)
    assert len(hom_space(reg, reg, pc)) == A.dim        # End_A(A) = A
    assert len(hom_space(triv, reg, pc)) == 1           # the integral line
    assert len(hom_space(triv, triv, pc)) == 1


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=5)
def test_naturality_along_random_morphisms(seed):
    pc, f = s3_setup(2)
    A = bicrossed_product(pc, verify=False)
    reg = module_from_rep(regular_rep(A), pc, A, "regular")
    triv = module_from_rep(trivial_rep(A), pc, A, "trivial")
    rng = np.random.default_rng(seed)
    basis = hom_space(triv, reg, pc)
    ends = hom_space(reg, reg, pc)
    g = ends[0].scale(0)
    for e in ends:
        g = g + e.scale(int(rng.integers(-2, 3)))
    for morph, V1, V2 in ((basis[0], triv, reg), (g, reg, reg)):
        assert check_naturality(morph, V1, V2, triv, pc, f).ok


def test_naturality_rejects_non_morphisms():
    pc, f = s3_setup(2)
    A = bicrossed_product(pc, verify=False)
    reg = module_from_rep(regular_rep(A), pc, A)
    swap = SparseTensor.from_entries((6, 6), 6, {(i, (i + 1) % 6): 1 for i in range(6)})
    rep = check_naturality(swap, reg, reg, reg, pc, f)
    assert not rep.ok and rep.failures[0]["axiom"] == "not a morphism"


def test_object_json_roundtrip():
    pc, f, objs = setup("d4")
    nF = pc.mp.F.order
    V = graded(objs)[-1]
    V2 = GradedFModule.from_json(V.to_json(), nF)
    assert V2.ract == V.ract and V2.grading == V.grading
    U = functor_G(V, pc, f)
    U2 = SigmaBimodule.from_json(U.to_json(), nF)
    assert U2.lact == U.lact and U2.ract == U.ract


def test_direct_sum_and_equivalence_on_a_small_corpus():
    pc, f, objs = setup("s3_normal_F")
    orbit = next(V for V in graded(objs) if V.name.startswith("orbit"))
    V = direct_sum(graded(objs)[0], orbit)
    assert verify_graded(V, pc).ok
    rep = verify_equivalence(pc, f, [orbit, V, free_bimodule(pc, f)], triple_cap=50)
    assert rep.ok, rep.summary()
    assert rep.details["valid_objects"] == 3 and rep.details["claim_short_form_holds"] is False


def test_invariants_of_the_free_bimodule():
    for name in sorted(SETUPS):
        pc, f, _ = setup(name)
        V = functor_F(free_bimodule(pc, f), pc, f)
        assert V.dim == 1 and V.grading == (pc.mp.G.identity,)
