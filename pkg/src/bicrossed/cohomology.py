"""Group cohomology with coefficients in mu_N, written additively as Z/N.

Cochains are functions G^n -> Z/N (exponents of a primitive N-th root of
unity) with G acting trivially.  The coboundary is the usual bar differential

    (dc)(g_1..g_{n+1}) = c(g_2..g_{n+1})
                         + sum_i (-1)^i c(.., g_i g_{i+1}, ..)
                         + (-1)^{n+1} c(g_1..g_n).

Also here: the cocycle pairs (sigma, tau) of an abelian extension
k^G -> A -> kF, their linear solver modulo equivalence, the 3-cocycle
omega(tau, sigma) on Sigma, restriction/trivialization certificates and the
non-degeneracy test for 2-cocycles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .groups import ExactFactorization, FiniteGroup, MatchedPair
from .report import Report
from .snf import ResourceCap, solve_mod, subquotient

MAX_DEGREE = 3


# -- cochains ---------------------------------------------------------------

@dataclass(eq=False)
class Cochain:
    group: FiniteGroup
    degree: int
    N: int
    values: np.ndarray  # shape (|G|,) * degree, entries in [0, N)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64).reshape((self.group.order,) * self.degree) % self.N

    def __call__(self, *args: int) -> int:
        return int(self.values[args])

    def is_normalized(self) -> bool:
        e = self.group.identity
        for k in range(self.degree):
            idx = [slice(None)] * self.degree
            idx[k] = e
            if np.any(self.values[tuple(idx)]):
                return False
        return True

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __add__(self, other: "Cochain") -> "Cochain":
        return Cochain(self.group, self.degree, self.N, self.values + other.values)

    def __neg__(self) -> "Cochain":
        return Cochain(self.group, self.degree, self.N, -self.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "degree": self.degree,
            "N": self.N,
            "values": [int(v) for v in self.values.reshape(-1)],
        }

    @classmethod
    def from_json(cls, data: dict, group: FiniteGroup | None = None) -> "Cochain":
        grp = group if group is not None else FiniteGroup.from_json(data["group"])
        return cls(grp, int(data["degree"]), int(data["N"]), np.array(data["values"], dtype=np.int64))


def zero_cochain(G: FiniteGroup, degree: int, N: int) -> Cochain:
    return Cochain(G, degree, N, np.zeros((G.order,) * degree, dtype=np.int64))


def restrict_cochain(c: Cochain, S: FiniteGroup, embedding) -> Cochain:
    emb = np.asarray(embedding)
    return Cochain(S, c.degree, c.N, c.values[np.ix_(*([emb] * c.degree))] if c.degree else c.values)


def coboundary(c: Cochain) -> Cochain:
    G, n = c.group, c.degree
    T = np.asarray(G.table)
    g = np.indices((G.order,) * (n + 1)) if n + 1 else []
    out = np.zeros((G.order,) * (n + 1), dtype=np.int64)
    v = c.values
    if n == 0:
        return Cochain(G, 1, c.N, out)
    out += v[tuple(g[1:])]
    for i in range(1, n + 1):
        args = list(g[: i - 1]) + [T[g[i - 1], g[i]]] + list(g[i + 1:])
        out += (-1) ** i * v[tuple(args)]
    out += (-1) ** (n + 1) * v[tuple(g[:n])]
    return Cochain(G, n + 1, c.N, out)


def is_cocycle(c: Cochain) -> bool:
    return coboundary(c).is_zero()


# -- normalized bar complex as matrices --------------------------------------

def _normalized_index(G: FiniteGroup, n: int):
    nonid = G.nonidentity()
    tuples = list(itertools.product(nonid, repeat=n))
    return tuples, {t: i for i, t in enumerate(tuples)}


def coboundary_matrix(G: FiniteGroup, n: int) -> np.ndarray:
    """Matrix of d_n on normalized cochains: rows (G\\1)^{n+1}, columns (G\\1)^n."""
    cols, cidx = _normalized_index(G, n)
    rows, _ = _normalized_index(G, n + 1)
    if len(rows) * max(len(cols), 1) > 6_000_000:
        raise ResourceCap(f"d_{n} on a group of order {G.order} is too large")
    D = np.zeros((len(rows), len(cols)), dtype=np.int64)
    if n == 0:
        return D
    e = G.identity
    for r, gs in enumerate(rows):
        terms = [(gs[1:], 1)]
        for i in range(1, n + 1):
            prod = G.mul(gs[i - 1], gs[i])
            if prod != e:
                terms.append((gs[: i - 1] + (prod,) + gs[i + 1:], (-1) ** i))
        terms.append((gs[:n], (-1) ** (n + 1)))
        for t, s in terms:
            D[r, cidx[t]] += s
    return D


def _from_normalized(G: FiniteGroup, n: int, N: int, vec) -> Cochain:
    tuples, _ = _normalized_index(G, n)
    vals = np.zeros((G.order,) * n, dtype=np.int64)
    for t, v in zip(tuples, vec):
        vals[t] = int(v)
    return Cochain(G, n, N, vals)


def _to_normalized(c: Cochain) -> np.ndarray:
    tuples, _ = _normalized_index(c.group, c.degree)
    return np.array([c.values[t] for t in tuples], dtype=np.int64)


@dataclass
class CohomologyResult:
    invariant_factors: list[int]
    generators: list[Cochain]
    degree: int = 0
    N: int = 0

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "N": self.N,
            "invariant_factors": list(self.invariant_factors),
            "generators": [c.to_json() for c in self.generators],
        }


def _kx_boundaries(d_prev: np.ndarray, N: int, e: int) -> np.ndarray:
    """Columns generating {x in (Z/N)^n : e*x = d_prev(c) mod N*e for some c}.

    These are the mu_N-valued cochains that become coboundaries once the
    lower cochain may take any value in k^x (mu_{N e} suffices when e
    kills the lower cohomology).
    """
    n, k = d_prev.shape
    M = N * e
    K = np.concatenate([e * np.eye(n, dtype=np.int64), -d_prev], axis=1)
    sq = subquotient(K, np.zeros((n + k, 0), dtype=np.int64), M, n=n + k)
    if not sq.kernel_gens:
        return np.zeros((n, 0), dtype=np.int64)
    return (np.array(sq.kernel_gens, dtype=np.int64)[:, :n] % N).T


def cohomology(G: FiniteGroup, n: int, N: int, max_degree: int = MAX_DEGREE) -> CohomologyResult:
    """The classes of H^n(G, k^x) represented by mu_N-valued normalized cocycles.

    Cocycles are taken mod N; they are divided out by every mu_N-valued
    coboundary of a k^x-valued cochain.  When |G| divides N this is all of
    H^n(G, k^x).
    """
    if n < 1 or n > max_degree:
        raise ValueError(f"degree {n} outside 1..{max_degree}")
    dn = coboundary_matrix(G, n)
    ncols = (G.order - 1) ** n
    if n == 1:
        B = np.zeros((ncols, 0), dtype=np.int64)
    else:
        B = _kx_boundaries(coboundary_matrix(G, n - 1), N, G.order)
    sq = subquotient(dn, B, N, n=ncols)
    gens = [_from_normalized(G, n, N, v) for v in sq.generators]
    return CohomologyResult(list(sq.invariant_factors), gens, n, N)


def trivialize_restriction(w: Cochain, S: FiniteGroup | None = None, embedding=None) -> Cochain | None:
    """A normalized 2-cochain c on S with dc = w|_S, or None if w|_S is not a coboundary.

    The certificate may need roots of unity of order N*|S|; it is returned
    with that torsion order, so that dc equals w|_S lifted to mu_{N|S|}.
    """
    if w.degree != 3:
        raise ValueError("expected a 3-cochain")
    if S is None:
        S, embedding = w.group, list(w.group.elements)
    ws = restrict_cochain(w, S, embedding)
    if not ws.is_normalized():
        raise ValueError("restriction is not normalized")
    if ws.is_zero():
        return zero_cochain(S, 2, w.N)
    d2 = coboundary_matrix(S, 2)
    target = _to_normalized(ws)
    x = solve_mod(d2, target, w.N)
    if x is not None:
        cert = _from_normalized(S, 2, w.N, x)
    else:
        e = S.order
        x = solve_mod(d2, e * target, w.N * e)
        if x is None:
            return None
        cert = _from_normalized(S, 2, w.N * e, x)
    lifted = ws.values * (cert.N // w.N)
    assert np.array_equal(coboundary(cert).values, lifted % cert.N)
    return cert


def regular_classes(gamma: Cochain) -> list[list[int]]:
    """Conjugacy classes of gamma-regular elements of S.

    g is gamma-regular when gamma(g, h) = gamma(h, g) for every h commuting
    with g.
    """
    S = gamma.group
    out = []
    for cls in S.conjugacy_classes():
        g = cls[0]
        if all(gamma(g, h) == gamma(h, g) for h in S.centralizer(g)):
            out.append(cls)
    return out


def is_nondegenerate_class(gamma: Cochain) -> bool:
    """Is the twisted group algebra k_gamma S simple?"""
    if gamma.degree != 2:
        raise ValueError("expected a 2-cochain")
    if not is_cocycle(gamma):
        raise ValueError("gamma is not a 2-cocycle")
    return len(regular_classes(gamma)) == 1


# -- cocycle pairs -------------------------------------------------------------

@dataclass(eq=False)
class PairCocycle:
    """sigma[g, x, y] = exponent of sigma_g(x, y); tau[x, g, h] = exponent of tau_x(g, h)."""

    mp: MatchedPair
    N: int
    sigma: np.ndarray
    tau: np.ndarray
    label: str = ""

    def __post_init__(self):
        F, G = self.mp.F.order, self.mp.G.order
        self.sigma = np.asarray(self.sigma, dtype=np.int64).reshape(G, F, F) % self.N
        self.tau = np.asarray(self.tau, dtype=np.int64).reshape(F, G, G) % self.N

    def is_trivial(self) -> bool:
        return not np.any(self.sigma) and not np.any(self.tau)

    def to_json(self) -> dict:
        return {
            "matched_pair": self.mp.to_json(),
            "N": self.N,
            "sigma": self.sigma.tolist(),
            "tau": self.tau.tolist(),
            "label": self.label,
        }

    @classmethod
    def from_json(cls, data: dict, mp: MatchedPair | None = None) -> "PairCocycle":
        mp = mp or MatchedPair.from_json(data["matched_pair"])
        return cls(mp, int(data["N"]), np.array(data["sigma"]), np.array(data["tau"]), data.get("label", ""))


def trivial_pair(mp: MatchedPair, N: int) -> PairCocycle:
    F, G = mp.F.order, mp.G.order
    return PairCocycle(mp, N, np.zeros((G, F, F)), np.zeros((F, G, G)), "trivial")


def verify_pair(pc: PairCocycle) -> Report:
    """Exhaustive check of the cocycle, normalization and compatibility identities."""
    mp, N = pc.mp, pc.N
    F, G, r, l = mp.F, mp.G, mp.ract, mp.lact
    sg, ta = pc.sigma, pc.tau
    e_F, e_G = F.identity, G.identity
    rep = Report("pair_cocycle")
    for g in G.elements:
        for x, y, z in itertools.product(F.elements, repeat=3):
            rep.tick()
            lhs = sg[r[g][x], y, z] + sg[g, x, F.mul(y, z)]
            rhs = sg[g, F.mul(x, y), z] + sg[g, x, y]
            if (lhs - rhs) % N:
                rep.fail("sigma cocycle", g=g, x=x, y=y, z=z)
        for x in F.elements:
            rep.tick()
            if sg[g, x, e_F] or sg[g, e_F, x]:
                rep.fail("sigma normalized", g=g, x=x)
    for x in F.elements:
        for g, h, k in itertools.product(G.elements, repeat=3):
            rep.tick()
            lhs = ta[x, G.mul(g, h), k] + ta[l[k][x], g, h]
            rhs = ta[x, h, k] + ta[x, g, G.mul(h, k)]
            if (lhs - rhs) % N:
                rep.fail("tau cocycle", x=x, g=g, h=h, k=k)
        for g in G.elements:
            rep.tick()
            if ta[x, g, e_G] or ta[x, e_G, g]:
                rep.fail("tau normalized", x=x, g=g)
    for x, y in itertools.product(F.elements, repeat=2):
        for s, t in itertools.product(G.elements, repeat=2):
            rep.tick()
            # sigma_{ts}(x,y) tau_{xy}(t,s) =
            #   tau_x(t,s) tau_y(t<|(s|>x), s<|x) sigma_t(s|>x, (s<|x)|>y) sigma_s(x,y)
            sx = l[s][x]
            sqx = r[s][x]
            lhs = sg[G.mul(t, s), x, y] + ta[F.mul(x, y), t, s]
            rhs = ta[x, t, s] + ta[y, r[t][sx], sqx] + sg[t, sx, l[sqx][y]] + sg[s, x, y]
            if (lhs - rhs) % N:
                rep.fail("compatibility", x=x, y=y, s=s, t=t)
    for x, y in itertools.product(F.elements, repeat=2):
        rep.tick()
        if sg[e_G, x, y]:
            rep.fail("sigma_1 = 1", x=x, y=y)
    for g, h in itertools.product(G.elements, repeat=2):
        rep.tick()
        if ta[e_F, g, h]:
            rep.fail("tau_1 = 1", g=g, h=h)
    return rep


class _PairIndex:
    """Column layout of the unknowns sigma_g(x,y), tau_x(g,h) after normalization."""

    def __init__(self, mp: MatchedPair):
        F, G = mp.F, mp.G
        self.mp = mp
        self.cols: dict[tuple, int] = {}
        for g in G.nonidentity():
            for x in F.nonidentity():
                for y in F.nonidentity():
                    self.cols[("s", g, x, y)] = len(self.cols)
        for x in F.nonidentity():
            for g in G.nonidentity():
                for h in G.nonidentity():
                    self.cols[("t", x, g, h)] = len(self.cols)
        self.n = len(self.cols)

    def s(self, g, x, y):
        return self.cols.get(("s", g, x, y))

    def t(self, x, g, h):
        return self.cols.get(("t", x, g, h))

    def to_pair(self, vec, N: int, label: str = "") -> PairCocycle:
        F, G = self.mp.F.order, self.mp.G.order
        sg = np.zeros((G, F, F), dtype=np.int64)
        ta = np.zeros((F, G, G), dtype=np.int64)
        for key, c in self.cols.items():
            if key[0] == "s":
                sg[key[1:]] = vec[c]
            else:
                ta[key[1:]] = vec[c]
        return PairCocycle(self.mp, N, sg, ta, label)

    def to_vec(self, pc: PairCocycle) -> np.ndarray:
        v = np.zeros(self.n, dtype=np.int64)
        for key, c in self.cols.items():
            v[c] = pc.sigma[key[1:]] if key[0] == "s" else pc.tau[key[1:]]
        return v


def pair_equations(mp: MatchedPair, idx: _PairIndex | None = None) -> np.ndarray:
    """Integer relation matrix whose kernel mod N is the set of valid pairs."""
    idx = idx or _PairIndex(mp)
    F, G, r, l = mp.F, mp.G, mp.ract, mp.lact
    rows = []

    def emit(terms):
        row = {}
        for col, sgn in terms:
            if col is not None:
                row[col] = row.get(col, 0) + sgn
        if any(row.values()):
            rows.append(row)

    for g in G.elements:
        for x, y, z in itertools.product(F.elements, repeat=3):
            emit([(idx.s(r[g][x], y, z), 1), (idx.s(g, x, F.mul(y, z)), 1),
                  (idx.s(g, F.mul(x, y), z), -1), (idx.s(g, x, y), -1)])
    for x in F.elements:
        for g, h, k in itertools.product(G.elements, repeat=3):
            emit([(idx.t(x, G.mul(g, h), k), 1), (idx.t(l[k][x], g, h), 1),
                  (idx.t(x, h, k), -1), (idx.t(x, g, G.mul(h, k)), -1)])
    for x, y in itertools.product(F.elements, repeat=2):
        for s, t in itertools.product(G.elements, repeat=2):
            sx, sqx = l[s][x], r[s][x]
            emit([(idx.s(G.mul(t, s), x, y), 1), (idx.t(F.mul(x, y), t, s), 1),
                  (idx.t(x, t, s), -1), (idx.t(y, r[t][sx], sqx), -1),
                  (idx.s(t, sx, l[sqx][y]), -1), (idx.s(s, x, y), -1)])
    M = np.zeros((len(rows), idx.n), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, v in row.items():
            M[i, c] = v
    return M


def pair_coboundaries(mp: MatchedPair, idx: _PairIndex | None = None) -> np.ndarray:
    """Columns: the pairs induced by normalized maps lambda: G x F -> mu_N.

    An isomorphism of extensions delta_g x -> lambda_g(x) delta_g x changes
    sigma_g(x,y) by lambda_g(xy) / (lambda_g(x) lambda_{g<|x}(y)) and
    tau_x(s,t) by lambda_s(t|>x) lambda_t(x) / lambda_{st}(x).
    """
    idx = idx or _PairIndex(mp)
    F, G, r, l = mp.F, mp.G, mp.ract, mp.lact
    lam = {(g, x): i for i, (g, x) in enumerate(itertools.product(G.nonidentity(), F.nonidentity()))}
    B = np.zeros((idx.n, len(lam)), dtype=np.int64)

    def add(col, key, sgn):
        if col is not None and key in lam:
            B[col, lam[key]] += sgn

    for g in G.nonidentity():
        for x in F.nonidentity():
            for y in F.nonidentity():
                c = idx.s(g, x, y)
                add(c, (g, F.mul(x, y)), 1)
                add(c, (g, x), -1)
                add(c, (r[g][x], y), -1)
    for x in F.nonidentity():
        for s in G.nonidentity():
            for t in G.nonidentity():
                c = idx.t(x, s, t)
                add(c, (s, l[t][x]), 1)
                add(c, (t, x), 1)
                add(c, (G.mul(s, t), x), -1)
    return B


@dataclass
class OpextResult:
    mp: MatchedPair
    N: int
    kernel_orders: list[int]
    invariant_factors: list[int]
    representatives: list[PairCocycle]
    n_unknowns: int = 0
    n_equations: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    def classes(self) -> list[PairCocycle]:
        """One representative per element of the quotient, trivial class first."""
        idx = _PairIndex(self.mp)
        vecs = [idx.to_vec(p) for p in self.representatives]
        out = []
        for coeffs in itertools.product(*[range(f) for f in self.invariant_factors]):
            v = np.zeros(idx.n, dtype=np.int64)
            for c, w in zip(coeffs, vecs):
                v = (v + c * w) % self.N
            out.append(idx.to_pair(v, self.N, "class" + "".join(f"[{c}]" for c in coeffs)))
        return out

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "kernel_orders": list(self.kernel_orders),
            "invariant_factors": list(self.invariant_factors),
            "order": self.order,
            "n_unknowns": self.n_unknowns,
            "n_equations": self.n_equations,
            "representatives": [p.to_json() for p in self.representatives],
            "warnings": list(self.warnings),
        }


def solve_opext(mp: MatchedPair, N: int, cap: int = 4000) -> OpextResult:
    """All valid (sigma, tau) mod N, modulo those induced by maps G x F -> mu_N."""
    idx = _PairIndex(mp)
    if idx.n > cap:
        raise ResourceCap(f"{idx.n} unknowns exceed the solver cap {cap}")
    M = pair_equations(mp, idx)
    sigma_order = mp.F.order * mp.G.order
    B = _kx_boundaries(pair_coboundaries(mp, idx), N, sigma_order * sigma_order)
    sq = subquotient(M, B, N, n=idx.n)
    reps = [idx.to_pair(v, N, f"generator{i}") for i, v in enumerate(sq.generators)]
    warnings = []
    exponent = math.lcm(mp.F.order, mp.G.order) * mp.F.order * mp.G.order
    if exponent % N:
        warnings.append(
            f"N={N}: cocycle values restricted to mu_N; classes needing other roots of unity are not represented"
        )
    return OpextResult(mp, N, list(sq.kernel_orders), list(sq.invariant_factors), reps, idx.n, M.shape[0], warnings)


def kac_omega(pc: PairCocycle, fact: ExactFactorization) -> Cochain:
    """omega(a,b,c) = tau_{pi c}(p(a) <| pi(b), p(b)) sigma_{p a}(pi(b), p(b) |> pi(c))."""
    mp = pc.mp
    if mp.F.order != fact.F.order or mp.G.order != fact.G.order:
        raise ValueError("matched pair does not match the factorization")
    from .groups import derive_matched_pair

    ref = derive_matched_pair(fact)
    if ref.ract != mp.ract or ref.lact != mp.lact:
        raise ValueError("matched pair actions differ from the factorization's")
    S = fact.sigma
    n = S.order
    pi = np.array([fact.pi(a) for a in S.elements])
    p = np.array([fact.p(a) for a in S.elements])
    R = np.asarray(mp.ract)
    L = np.asarray(mp.lact)
    a, b, c = np.indices((n, n, n))
    vals = pc.tau[pi[c], R[p[a], pi[b]], p[b]] + pc.sigma[p[a], pi[b], L[p[b], pi[c]]]
    return Cochain(S, 3, pc.N, vals)
