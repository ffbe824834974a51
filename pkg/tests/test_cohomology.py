import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bicrossed.cohomology import (
    Cochain,
    PairCocycle,
    coboundary,
    cohomology,
    is_cocycle,
    is_nondegenerate_class,
    kac_omega,
    regular_classes,
    restrict_cochain,
    solve_opext,
    trivial_pair,
    trivialize_restriction,
    verify_pair,
    zero_cochain,
)
from bicrossed.groups import (
    cyclic,
    derive_matched_pair,
    dihedral,
    direct_product,
    exact_factorizations,
    quaternion,
    symmetric,
)
from bicrossed.snf import ResourceCap, smith_mod, solve_mod, subquotient

V4 = direct_product(cyclic(2), cyclic(2))


# -- Smith normal form over Z/N ---------------------------------------------------

small_matrix = st.integers(1, 3).flatmap(
    lambda m: st.integers(1, 3).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)))


def brute_kernel(M, N):
    M = np.array(M) % N
    n = M.shape[1]
    return [v for v in itertools.product(range(N), repeat=n) if not np.any(M @ np.array(v) % N)]


@given(small_matrix, st.sampled_from([2, 3, 4, 6, 8, 12]))
def test_smith_diagonal_is_divisor_chain(M, N):
    d = [x % N for x in smith_mod(np.array(M), N).diag]
    gs = [math.gcd(x, N) for x in d]
    for a, b in zip(gs, gs[1:]):
        assert b % a == 0


@given(small_matrix, st.sampled_from([2, 3, 4, 6]))
def test_kernel_order_matches_enumeration(M, N):
    sq = subquotient(M, np.zeros((len(M[0]), 0)), N)
    assert sq.kernel_order == len(brute_kernel(M, N))
    assert sq.order == sq.kernel_order


@given(small_matrix, st.sampled_from([2, 3, 4, 6]), st.data())
def test_solve_mod(M, N, data):
    A = np.array(M)
    x = np.array(data.draw(st.lists(st.integers(0, N - 1), min_size=A.shape[1], max_size=A.shape[1])))
    b = A @ x % N
    y = solve_mod(A, b, N)
    assert y is not None and np.array_equal(A @ y % N, b)
    # an unreachable right-hand side is reported as None
    image = {tuple(A @ np.array(v) % N) for v in itertools.product(range(N), repeat=A.shape[1])}
    for c in itertools.product(range(N), repeat=A.shape[0]):
        if c not in image:
            assert solve_mod(A, np.array(c), N) is None
            break


def test_quotient_by_subgroup():
    # Z/4 squared, kernel everything, divide by the diagonal: Z/4
    sq = subquotient(np.zeros((1, 2)), np.array([[1], [1]]), 4)
    assert sq.order == 4 and sq.invariant_factors == [4]
    assert subquotient(np.zeros((0, 0)), np.zeros((0, 0)), 5, n=0).order == 1


# -- cochains --------------------------------------------------------------------

def random_cochain(G, deg, N, rng):
    return Cochain(G, deg, N, rng.integers(0, N, size=(G.order,) * deg))


@given(st.sampled_from([cyclic(3), symmetric(3), V4]), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_d_squared_is_zero(G, deg, seed):
    c = random_cochain(G, deg, 6, np.random.default_rng(seed))
    assert is_cocycle(coboundary(c))


def test_cochain_json_roundtrip():
    c = random_cochain(symmetric(3), 2, 6, np.random.default_rng(0))
    d = Cochain.from_json(c.to_json())
    assert np.array_equal(c.values, d.values) and d.N == 6


def homs_to_mu(G, N):
    """Brute-force |Hom(G, mu_N)|."""
    count = 0
    for vals in itertools.product(range(N), repeat=G.order):
        if vals[G.identity] == 0 and all(vals[G.mul(a, b)] == (vals[a] + vals[b]) % N for a in G.elements for b in G.elements):
            count += 1
    return count


@pytest.mark.parametrize("G,N", [(cyclic(4), 4), (cyclic(6), 3), (V4, 2), (symmetric(3), 6)])
def test_h1_is_characters(G, N):
    assert cohomology(G, 1, N).order == homs_to_mu(G, N)


@pytest.mark.parametrize("G,deg,N,factors", [
    (cyclic(5), 2, 5, []), (cyclic(5), 3, 5, [5]), (cyclic(6), 3, 6, [6]), (cyclic(6), 3, 4, [2]),
    (V4, 2, 4, [2]), (V4, 3, 4, [2, 2, 2]), (symmetric(3), 2, 6, []), (symmetric(3), 3, 6, [6]),
    (quaternion(), 2, 8, []), (quaternion(), 3, 8, [8]), (dihedral(4), 2, 8, [2]), (dihedral(4), 3, 8, [2, 2, 4]),
])
def test_known_cohomology(G, deg, N, factors):
    H = cohomology(G, deg, N)
    assert H.invariant_factors == factors
    for g in H.generators:
        assert is_cocycle(g) and g.is_normalized()


def test_degree_bounds():
    with pytest.raises(ValueError):
        cohomology(cyclic(2), 0, 2)
    from bicrossed.groups import alternating
    with pytest.raises(ResourceCap):
        cohomology(alternating(4), 3, 12)


def test_trivialize_restriction():
    G = cyclic(4)
    w = cohomology(G, 3, 4).generators[0]
    assert trivialize_restriction(w) is None
    # twice the generator dies on the subgroup of order 2
    S, emb = G.subgroup([a for a in G.elements if G.element_order(a) <= 2])
    w2 = w + w
    cert = trivialize_restriction(w2, S, emb)
    assert cert is not None
    res = restrict_cochain(w2, S, emb)
    assert np.array_equal(coboundary(cert).values, res.values * (cert.N // w.N) % cert.N)
    # a normalized coboundary is trivialized on the whole group
    beta = random_cochain(G, 2, 4, np.random.default_rng(1))
    beta.values[G.identity, :] = 0
    beta.values[:, G.identity] = 0
    b = coboundary(beta)
    assert b.is_normalized() and trivialize_restriction(b) is not None


def test_regular_classes_and_nondegeneracy():
    gamma = cohomology(V4, 2, 4).generators[0]
    assert is_nondegenerate_class(gamma)
    assert len(regular_classes(gamma)) == 1
    assert not is_nondegenerate_class(zero_cochain(V4, 2, 4))
    assert len(regular_classes(zero_cochain(V4, 2, 4))) == 4
    with pytest.raises(ValueError):
        is_nondegenerate_class(Cochain(V4, 2, 4, np.eye(4, dtype=int)))


# -- cocycle pairs and the Kac 3-cocycle -------------------------------------------

def is_cyclic(G):
    return any(G.element_order(a) == G.order for a in G.elements)


def kernel_of_restriction(sigma, f, N):
    """Number of classes in H^3(sigma) that die on F and on G."""
    H = cohomology(sigma, 3, N)
    count = 0
    for coeffs in itertools.product(*[range(k) for k in H.invariant_factors]):
        v = sum((c * g.values for c, g in zip(coeffs, H.generators)), np.zeros((sigma.order,) * 3, dtype=np.int64))
        w = Cochain(sigma, 3, N, v)
        count += all(trivialize_restriction(w, *sigma.subgroup(el)) is not None for el in (f.F_elems, f.G_elems))
    return count


def cyclic_cases():
    for sigma in (symmetric(3), V4, dihedral(4)):
        for f in exact_factorizations(sigma):
            if f.F.order not in (1, sigma.order) and is_cyclic(f.F) and is_cyclic(f.G):
                yield sigma, f
                break


@pytest.mark.parametrize("sigma,f", list(cyclic_cases()))
def test_opext_matches_exact_sequence(sigma, f):
    """With F and G cyclic, H^2 of both vanishes and Opext is ker(H^3(Sigma) -> H^3(F) + H^3(G))."""
    res = solve_opext(derive_matched_pair(f), sigma.order)
    assert res.order == kernel_of_restriction(sigma, f, sigma.order)


@pytest.mark.parametrize("sigma", [symmetric(3), dihedral(4), V4])
def test_solver_classes_are_valid_and_omega_is_injective(sigma):
    for f in exact_factorizations(sigma):
        res = solve_opext(derive_matched_pair(f), sigma.order)
        classes = res.classes()
        assert classes[0].is_trivial()
        omegas = []
        for pc in classes:
            assert verify_pair(pc).ok
            w = kac_omega(pc, f)
            assert is_cocycle(w) and w.is_normalized()
            omegas.append(w)
        # distinct Opext classes give distinct H^3 classes when F, G are cyclic
        if is_cyclic(f.F) and is_cyclic(f.G):
            for a, b in itertools.combinations(omegas, 2):
                assert trivialize_restriction(a - b) is None


def test_s3_opext_is_trivial():
    for f in exact_factorizations(symmetric(3)):
        assert solve_opext(derive_matched_pair(f), 6).order == 1


def test_pair_json_and_corruption():
    f = exact_factorizations(dihedral(4))[2]
    mp = derive_matched_pair(f)
    pc = solve_opext(mp, 8).classes()[-1]
    again = PairCocycle.from_json(pc.to_json())
    assert np.array_equal(again.sigma, pc.sigma) and np.array_equal(again.tau, pc.tau)
    assert kac_omega(trivial_pair(mp, 8), f).is_zero()
    bad = PairCocycle(mp, 8, pc.sigma.copy(), pc.tau.copy())
    bad.sigma[1, 1, 1] += 1
    rep = verify_pair(bad)
    assert not rep.ok and rep.failures


def test_opext_cap():
    f = exact_factorizations(dihedral(4))[2]
    with pytest.raises(ResourceCap):
        solve_opext(derive_matched_pair(f), 8, cap=3)


def test_opext_warning_for_small_N():
    f = exact_factorizations(symmetric(3))[1]
    assert solve_opext(derive_matched_pair(f), 5).warnings
