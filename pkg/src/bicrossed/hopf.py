"""Finite-dimensional algebras, bialgebras, Hopf and quasi-bialgebras by structure constants.

Conventions, with basis e_0, ..., e_{dim-1}:

* ``mult[i, j, k]``   coefficient of e_k in e_i e_j
* ``unit[k]``         coefficient of e_k in 1
* ``comult[i, j, k]`` coefficient of e_j (x) e_k in Delta(e_i)
* ``counit[i]``       epsilon(e_i)
* ``antipode[i, j]``  coefficient of e_j in S(e_i)
* ``assoc[i, j, k]``  coefficient of e_i (x) e_j (x) e_k in the associator Phi

Every verifier is exhaustive over basis tuples and returns a ``Report``
whose witnesses name the failing basis indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import SparseTensor, einsum, inverse, rank, solve
from .report import Report
from .scalars import CycloNum

__all__ = [
    "StructureAlgebra",
    "StructureHopf",
    "QuasiBialgebra",
    "HopfError",
    "verify_algebra",
    "verify_coalgebra",
    "verify_bialgebra",
    "verify_antipode",
    "verify_hopf",
    "verify_quasi",
    "solve_antipode",
    "with_antipode",
    "twist_comult",
    "cocycle_deform",
    "twist_mult",
    "dual",
    "op",
    "cop",
    "tensor",
    "center_dimension",
    "is_commutative",
    "is_cocommutative",
    "one_dim_rep_count",
    "left_mult_ranks",
    "mul_tensor",
    "hopf_from_json",
]


class HopfError(ValueError):
    """A structure failed its axioms; ``report`` holds the witnesses."""

    def __init__(self, message: str, report: Report | None = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True, eq=False)
class StructureAlgebra:
    dim: int
    N: int
    mult: SparseTensor
    unit: SparseTensor
    labels: tuple | None = field(default=None, kw_only=True)

    def product(self, i: int, j: int) -> dict[int, CycloNum]:
        """e_i e_j as ``{k: coefficient}``."""
        return {k: v for (a, b, k), v in self.mult.items() if a == i and b == j}

    def left_matrix(self, x: SparseTensor) -> SparseTensor:
        """Matrix of h -> x h, acting on column vectors."""
        return einsum("i,ijk->kj", x, self.mult)

    def multiply(self, x: SparseTensor, y: SparseTensor) -> SparseTensor:
        return einsum("i,j,ijk->k", x, y, self.mult)

    def basis(self, i: int) -> SparseTensor:
        return SparseTensor.basis_vector(self.dim, i, self.N)

    def structure_json(self) -> dict:
        return {"dim": self.dim, "N": self.N, "mult": self.mult.to_json(), "unit": self.unit.to_json(),
                "labels": list(self.labels) if self.labels else None}

    def to_json(self) -> dict:
        return {"kind": "algebra", **self.structure_json()}


@dataclass(frozen=True, eq=False)
class StructureHopf(StructureAlgebra):
    comult: SparseTensor = field(kw_only=True)
    counit: SparseTensor = field(kw_only=True)
    antipode: SparseTensor | None = field(default=None, kw_only=True)

    def coproduct(self, i: int) -> dict[tuple[int, int], CycloNum]:
        return {(j, k): v for (a, j, k), v in self.comult.items() if a == i}

    def to_json(self) -> dict:
        out = {"kind": "hopf", **self.structure_json(), "comult": self.comult.to_json(),
               "counit": self.counit.to_json()}
        out["antipode"] = self.antipode.to_json() if self.antipode is not None else None
        return out


@dataclass(frozen=True, eq=False)
class QuasiBialgebra(StructureHopf):
    assoc: SparseTensor = field(kw_only=True)
    assoc_inv: SparseTensor = field(kw_only=True)

    def to_json(self) -> dict:
        out = super().to_json()
        out["kind"] = "quasi"
        out["assoc"] = self.assoc.to_json()
        out["assoc_inv"] = self.assoc_inv.to_json()
        return out


def hopf_from_json(data: dict):
    dim, N = int(data["dim"]), int(data["N"])
    d3 = (dim, dim, dim)
    kw = {"labels": tuple(data["labels"]) if data.get("labels") else None}
    mult = SparseTensor.from_json(d3, N, data["mult"])
    unit = SparseTensor.from_json((dim,), N, data["unit"])
    kind = data.get("kind", "hopf")
    if kind == "algebra":
        return StructureAlgebra(dim, N, mult, unit, **kw)
    kw["comult"] = SparseTensor.from_json(d3, N, data["comult"])
    kw["counit"] = SparseTensor.from_json((dim,), N, data["counit"])
    if data.get("antipode") is not None:
        kw["antipode"] = SparseTensor.from_json((dim, dim), N, data["antipode"])
    if kind == "quasi":
        kw["assoc"] = SparseTensor.from_json(d3, N, data["assoc"])
        kw["assoc_inv"] = SparseTensor.from_json(d3, N, data["assoc_inv"])
        return QuasiBialgebra(dim, N, mult, unit, **kw)
    return StructureHopf(dim, N, mult, unit, **kw)


# -- helpers -----------------------------------------------------------

def _record(report: Report, axiom: str, diff: SparseTensor, names: tuple[str, ...], k: int) -> None:
    """Fail once per distinct tuple of the first ``k`` coordinates of ``diff``."""
    if diff.is_zero():
        return
    c = diff.coords()[:, :k]
    tuples = np.unique(c, axis=0)
    for t in tuples[:25]:
        report.fail(axiom, **{n: int(x) for n, x in zip(names, t)})
    report.n_failures += max(0, len(tuples) - 25)


def _outer(a: SparseTensor, b: SparseTensor) -> SparseTensor:
    return einsum("i,j->ij", a, b)


def _eye(H) -> SparseTensor:
    return SparseTensor.identity(H.dim, H.N)


def mul_tensor(H: StructureAlgebra, X: SparseTensor, Y: SparseTensor) -> SparseTensor:
    """Product in H^(x)k of two tensors of shape (dim,)*k."""
    k = X.ndim
    if k == 1:
        return H.multiply(X, Y)
    xs = "abcd"[:k]
    ys = "efgh"[:k]
    outs = "pqrs"[:k]
    # join each mult factor right after X so the candidate pairs stay filtered
    ops = [X, H.mult, Y] + [H.mult] * (k - 1)
    terms = [xs, f"{xs[0]}{ys[0]}{outs[0]}", ys] + [f"{x}{y}{o}" for x, y, o in zip(xs[1:], ys[1:], outs[1:])]
    return einsum(",".join(terms) + "->" + outs, *ops)


# -- verifiers ---------------------------------------------------------

def verify_algebra(A: StructureAlgebra) -> Report:
    rep = Report("algebra")
    M, u = A.mult, A.unit
    lhs = einsum("ijp,pkq->ijkq", M, M)
    rhs = einsum("jkp,ipq->ijkq", M, M)
    rep.tick(A.dim**3)
    _record(rep, "associativity", lhs - rhs, ("i", "j", "k"), 3)
    I = _eye(A)
    rep.tick(2 * A.dim)
    _record(rep, "left unit", einsum("i,ijk->jk", u, M) - I, ("j",), 1)
    _record(rep, "right unit", einsum("j,ijk->ik", u, M) - I, ("i",), 1)
    return rep


def verify_coalgebra(H: StructureHopf) -> Report:
    rep = Report("coalgebra")
    D, eps = H.comult, H.counit
    lhs = einsum("iuc,uab->iabc", D, D)
    rhs = einsum("iau,ubc->iabc", D, D)
    rep.tick(H.dim)
    _record(rep, "coassociativity", lhs - rhs, ("i",), 1)
    _counit_laws(H, rep)
    return rep


def _counit_laws(H, rep: Report) -> None:
    D, eps = H.comult, H.counit
    I = _eye(H)
    rep.tick(2 * H.dim)
    _record(rep, "left counit", einsum("ijk,j->ik", D, eps) - I, ("i",), 1)
    _record(rep, "right counit", einsum("ijk,k->ij", D, eps) - I, ("i",), 1)


def _compat(H, rep: Report, block: int = 8) -> None:
    """Delta and epsilon are unital algebra maps."""
    M, D, u, eps = H.mult, H.comult, H.unit, H.counit
    rep.tick(H.dim**2)
    for lo in range(0, H.dim, block):
        hi = min(H.dim, lo + block)
        Mi = M.slice0(lo, hi)
        Di = D.slice0(lo, hi)
        lhs = einsum("ijk,kpq->ijpq", Mi, D)
        rhs = einsum("iab,acp,jcd,bdq->ijpq", Di, M, D, M)
        diff = lhs - rhs
        if not diff.is_zero():
            c = diff.coords()[:, :2]
            c[:, 0] += lo
            for t in np.unique(c, axis=0)[:25]:
                rep.fail("comultiplication is multiplicative", i=int(t[0]), j=int(t[1]))
            rep.n_failures += max(0, len(np.unique(c, axis=0)) - 25)
    rep.tick(H.dim**2 + 2)
    _record(rep, "counit is multiplicative", einsum("ijk,k->ij", M, eps) - _outer(eps, eps), ("i", "j"), 2)
    _record(rep, "comultiplication is unital", einsum("i,ijk->jk", u, D) - _outer(u, u), ("j", "k"), 2)
    e1 = einsum("i,i->", u, eps)
    if e1 != SparseTensor.from_entries((), H.N, {(): 1}):
        rep.fail("counit is unital", value=str(e1[()]))


def verify_bialgebra(H: StructureHopf) -> Report:
    rep = Report("bialgebra")
    rep.merge(verify_algebra(H))
    rep.merge(verify_coalgebra(H))
    _compat(H, rep)
    return rep


def _convolution(H, S: SparseTensor, side: str) -> SparseTensor:
    D, M = H.comult, H.mult
    if side == "left":
        return einsum("iab,ac,cbp->ip", D, S, M)
    return einsum("iab,bc,acp->ip", D, S, M)


def verify_antipode(H: StructureHopf, S: SparseTensor | None = None) -> Report:
    rep = Report("antipode")
    S = H.antipode if S is None else S
    if S is None:
        rep.fail("antipode missing")
        return rep
    target = _outer(H.counit, H.unit)
    rep.tick(2 * H.dim)
    _record(rep, "m(S (x) id)Delta = u eps", _convolution(H, S, "left") - target, ("i",), 1)
    _record(rep, "m(id (x) S)Delta = u eps", _convolution(H, S, "right") - target, ("i",), 1)
    return rep


def verify_hopf(H: StructureHopf) -> Report:
    rep = verify_bialgebra(H)
    rep.name = "hopf"
    rep.merge(verify_antipode(H))
    return rep


def verify_quasi(Q: StructureHopf) -> Report:
    """Axioms of a quasi-bialgebra with associator ``assoc`` (Phi = 1 for plain bialgebras)."""
    rep = Report("quasi-bialgebra")
    rep.merge(verify_algebra(Q))
    _counit_laws(Q, rep)
    _compat(Q, rep)
    dim, N = Q.dim, Q.N
    u = Q.unit
    one3 = einsum("i,j,k->ijk", u, u, u)
    Phi = getattr(Q, "assoc", one3)
    Phinv = getattr(Q, "assoc_inv", one3)
    rep.tick(2)
    if mul_tensor(Q, Phi, Phinv) != one3:
        rep.fail("associator is not invertible", side="Phi Phi^-1")
    if mul_tensor(Q, Phinv, Phi) != one3:
        rep.fail("associator is not invertible", side="Phi^-1 Phi")
    # Phi (Delta (x) id)Delta(h) = (id (x) Delta)Delta(h) Phi for every basis h
    D, M = Q.comult, Q.mult
    rep.tick(dim)
    block = 8
    for lo in range(0, dim, block):
        hi = min(dim, lo + block)
        Dh = D.slice0(lo, hi)
        X = einsum("huc,uab->habc", Dh, D)
        Y = einsum("hau,ubc->habc", Dh, D)
        left = einsum("habc,pax,pqr,qby,rcz->hxyz", X, M, Phi, M, M)
        right = einsum("habc,apx,bqy,pqr,crz->hxyz", Y, M, M, Phi, M)
        diff = left - right
        if not diff.is_zero():
            hs = np.unique(diff.coords()[:, 0]) + lo
            for h in hs[:25]:
                rep.fail("quasi-coassociativity", h=int(h))
            rep.n_failures += max(0, len(hs) - 25)
    # pentagon
    rep.tick(1)
    one_phi = einsum("a,bcd->abcd", u, Phi)
    phi_one = einsum("abc,d->abcd", Phi, u)
    mid = einsum("aud,ubc->abcd", Phi, D)
    last = einsum("abu,ucd->abcd", Phi, D)
    first = einsum("ucd,uab->abcd", Phi, D)
    lhs = mul_tensor(Q, mul_tensor(Q, one_phi, mid), phi_one)
    rhs = mul_tensor(Q, last, first)
    diff = lhs - rhs
    if not diff.is_zero():
        for c in diff.coords()[:25]:
            rep.fail("pentagon", coords=[int(x) for x in c])
        rep.n_failures += max(0, diff.nnz - 25)
    # counit triangles
    one2 = _outer(u, u)
    eps = Q.counit
    rep.tick(3)
    for name, spec in (("(id eps id)Phi", "ijk,j->ik"), ("(eps id id)Phi", "ijk,i->jk"), ("(id id eps)Phi", "ijk,k->ij")):
        if einsum(spec, Phi, eps) != one2:
            rep.fail("counit triangle", map=name)
    return rep


# -- antipode ----------------------------------------------------------

def solve_antipode(B: StructureHopf, with_report: bool = False):
    """The convolution inverse of the identity, or None if it does not exist.

    Solves m(S (x) id)Delta = u eps for the dim^2 entries of S and then checks
    the right-hand law.  When a solution exists it is unique (a left inverse
    of id equals any right inverse), which is asserted through the rank.
    """
    d = B.dim
    C = einsum("ijk,lkp->ipjl", B.comult, B.mult).reshape(d * d, d * d)
    rhs = _outer(B.counit, B.unit).reshape(d * d)
    x, unique = solve(C, rhs)
    info = {"unique": unique}
    S = None
    if x is not None:
        cand = x.reshape(d, d)
        if verify_antipode(B, cand).ok:
            if not unique:
                raise AssertionError("antipode exists but the linear system is not of full rank")
            S = cand
    return (S, info) if with_report else S


def with_antipode(B: StructureHopf) -> StructureHopf:
    S = solve_antipode(B)
    if S is None:
        raise HopfError("no antipode")
    return replace(B, antipode=S)


def _antipode_inverse(H: StructureHopf) -> SparseTensor | None:
    if H.antipode is None:
        return None
    return inverse(H.antipode)


# -- derived structures ------------------------------------------------

def dual(H: StructureHopf) -> StructureHopf:
    """The dual Hopf algebra on the dual basis."""
    S = H.antipode.transpose() if H.antipode is not None else None
    return StructureHopf(H.dim, H.N, H.comult.transpose((1, 2, 0)), H.counit,
                         comult=H.mult.transpose((2, 0, 1)), counit=H.unit, antipode=S, labels=H.labels)


def op(H: StructureHopf) -> StructureHopf:
    return replace(H, mult=H.mult.transpose((1, 0, 2)), antipode=_antipode_inverse(H))


def cop(H: StructureHopf) -> StructureHopf:
    return replace(H, comult=H.comult.transpose((0, 2, 1)), antipode=_antipode_inverse(H))


def tensor(H1: StructureHopf, H2: StructureHopf) -> StructureHopf:
    """H1 (x) H2 with basis e_a (x) e_b at index a * dim2 + b."""
    if H1.N != H2.N:
        N = math.lcm(H1.N, H2.N)
        return tensor(lift(H1, N), lift(H2, N))
    d = H1.dim * H2.dim
    M = einsum("ace,bdf->abcdef", H1.mult, H2.mult).reshape(d, d, d)
    u = einsum("a,b->ab", H1.unit, H2.unit).reshape(d)
    kw = {}
    if isinstance(H1, StructureHopf) and isinstance(H2, StructureHopf):
        kw["comult"] = einsum("iab,jcd->ijacbd", H1.comult, H2.comult).reshape(d, d, d)
        kw["counit"] = einsum("a,b->ab", H1.counit, H2.counit).reshape(d)
        if H1.antipode is not None and H2.antipode is not None:
            kw["antipode"] = einsum("ac,bd->abcd", H1.antipode, H2.antipode).reshape(d, d)
        return StructureHopf(d, H1.N, M, u, **kw)
    return StructureAlgebra(d, H1.N, M, u)


def lift(H, M: int):
    """The same structure over Q(zeta_M)."""
    changes = {}
    for name in ("mult", "unit", "comult", "counit", "antipode", "assoc", "assoc_inv"):
        t = getattr(H, name, None)
        if isinstance(t, SparseTensor):
            changes[name] = t.lift(M)
    return replace(H, N=M, **changes)


# -- twisting ----------------------------------------------------------

def _tensor_square_left(H, J: SparseTensor) -> SparseTensor:
    """Matrix of X -> J X on H (x) H, rows and columns flattened."""
    d = H.dim
    return einsum("ab,acp,bdq->pqcd", J, H.mult, H.mult).reshape(d * d, d * d)


def twist_comult(H: StructureHopf, J: SparseTensor) -> StructureHopf:
    """H with comultiplication J Delta(.) J^-1; the antipode is re-solved.

    Raises ``HopfError`` if J is not counit-normalized, not invertible, or if
    the twisted structure is not a bialgebra.
    """
    d, N = H.dim, H.N
    u, eps = H.unit, H.counit
    if einsum("ij,i->j", J, eps) != u or einsum("ij,j->i", J, eps) != u:
        raise HopfError("twist is not counit-normalized")
    one2 = _outer(u, u)
    x, unique = solve(_tensor_square_left(H, J), one2.reshape(d * d))
    if x is None or not unique:
        raise HopfError("twist is not invertible")
    Jinv = x.reshape(d, d)
    if mul_tensor(H, Jinv, J) != one2:
        raise HopfError("twist is not invertible")
    M = H.mult
    T = einsum("ab,icd,acx,bdy->ixy", J, H.comult, M, M)
    D = einsum("ixy,cd,xcp,ydq->ipq", T, Jinv, M, M)
    out = replace(H, comult=D, antipode=None)
    rep = verify_bialgebra(out)
    if not rep.ok:
        raise HopfError("twisted comultiplication is not coassociative: " + rep.summary(), rep)
    S = solve_antipode(out)
    return replace(out, antipode=S)


def cocycle_deform(H: StructureHopf, s: SparseTensor, s_inv: SparseTensor) -> StructureHopf:
    """Multiplication a.b = s(a1, b1) a2 b2 s_inv(a3, b3) for a bilinear form s.

    The antipode is re-solved and the result re-verified; failures raise
    ``HopfError`` carrying the report.
    """
    D = H.comult
    D2 = einsum("ixe,xab->iabe", D, D)
    M = einsum("iabe,ac,jcdf,bdk,ef->ijk", D2, s, D2, H.mult, s_inv)
    out = replace(H, mult=M, antipode=None)
    rep = verify_bialgebra(out)
    if not rep.ok:
        raise HopfError("deformed multiplication fails the bialgebra axioms: " + rep.summary(), rep)
    S = solve_antipode(out)
    if S is None:
        raise HopfError("deformed bialgebra has no antipode")
    return replace(out, antipode=S)


def twist_mult(H: StructureHopf, alpha, quotient) -> StructureHopf:
    """Deform the product by a 2-cocycle of F pulled back along H -> kF.

    ``quotient[i]`` is the element of F that e_i maps to, or -1 if e_i maps
    to 0.  The deformation is two-sided: e_i . e_j = alpha(x1, y1) e_i' e_j'
    alpha^-1(x3, y3) in Sweedler notation.  A 2-cocycle always gives an
    associative product; a non-cocycle usually does not, and then
    ``HopfError`` is raised with the failing triples.
    """
    d, N = H.dim, H.N
    if alpha.N != N and N % alpha.N:
        raise ValueError("alpha's torsion order must divide the field order")
    step = N // alpha.N
    vals = alpha.values
    q = list(quotient)
    coords, exps, iexps = [], [], []
    for a in range(d):
        if q[a] < 0:
            continue
        for b in range(d):
            if q[b] < 0:
                continue
            coords.append((a, b))
            exps.append(int(vals[q[a], q[b]]) * step)
    coords = np.array(coords, dtype=np.int64).reshape(-1, 2)
    exps = np.array(exps, dtype=np.int64)
    s = SparseTensor.from_roots((d, d), N, coords, exps)
    s_inv = SparseTensor.from_roots((d, d), N, coords, -exps)
    return cocycle_deform(H, s, s_inv)


# -- invariants --------------------------------------------------------

def is_commutative(A: StructureAlgebra) -> bool:
    return A.mult == A.mult.transpose((1, 0, 2))


def is_cocommutative(H: StructureHopf) -> bool:
    return H.comult == H.comult.transpose((0, 2, 1))


def center_dimension(A: StructureAlgebra) -> int:
    """dim {z : z h = h z for all h}, by the rank of the commutator system."""
    d = A.dim
    M = A.mult
    C = (M.transpose((1, 2, 0)) - M.transpose((0, 2, 1))).reshape(d * d, d)
    return d - rank(C)


def one_dim_rep_count(A: StructureAlgebra) -> int:
    """Codimension of the two-sided ideal generated by commutators.

    Over an algebraically closed field this counts the one-dimensional
    representations of a semisimple algebra.
    """
    from .linalg import rref

    d, M = A.dim, A.mult
    C = (M - M.transpose((1, 0, 2))).reshape(d * d, d)
    basis, _ = rref(C)
    while True:
        left = einsum("ri,jik->rjk", basis, M).reshape(basis.shape[0] * d, d)
        right = einsum("ri,ijk->rjk", basis, M).reshape(basis.shape[0] * d, d)
        stacked = SparseTensor.from_entries(
            (basis.shape[0] * (2 * d + 1), d), A.N,
            list(basis.items())
            + [((basis.shape[0] + r, c), v) for (r, c), v in left.items()]
            + [((basis.shape[0] * (d + 1) + r, c), v) for (r, c), v in right.items()],
        )
        new, _ = rref(stacked)
        if new.shape[0] == basis.shape[0]:
            return d - basis.shape[0]
        basis = new


def left_mult_ranks(A: StructureAlgebra, elements) -> list[int]:
    """Ranks of h -> x h for each x in ``elements``."""
    return [rank(A.left_matrix(x)) for x in elements]
