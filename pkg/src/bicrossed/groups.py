"""Finite groups as Cayley tables, exact factorizations and matched pairs.

Permutations compose right to left: ``(f g)(i) = f(g(i))``.
"""

from __future__ import annotations

import dataclasses
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .report import Report

DEFAULT_CAP = 64


class GroupError(ValueError):
    """A table or permutation list does not define a group."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    order: int
    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]
    identity: int
    inverses: tuple[int, ...] = field(repr=False)
    perms: tuple[tuple[int, ...], ...] | None = field(default=None, repr=False)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def prod(self, *elems: int) -> int:
        out = self.identity
        for e in elems:
            out = self.table[out][e]
        return out

    def conj(self, x: int, h: int) -> int:
        """x h x^-1"""
        return self.table[self.table[x][h]][self.inverses[x]]

    @property
    def elements(self) -> range:
        return range(self.order)

    def nonidentity(self) -> list[int]:
        return [a for a in range(self.order) if a != self.identity]

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def centralizer(self, a: int) -> list[int]:
        return [b for b in range(self.order) if self.table[a][b] == self.table[b][a]]

    def conjugacy_classes(self) -> list[list[int]]:
        seen: set[int] = set()
        classes = []
        for a in range(self.order):
            if a in seen:
                continue
            cls = sorted({self.conj(x, a) for x in range(self.order)})
            seen.update(cls)
            classes.append(cls)
        return classes

    def closure(self, gens: Sequence[int]) -> frozenset[int]:
        """Subgroup generated by ``gens`` (as a set of element indices)."""
        elems = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = self.table[a][g]
                    if b not in elems:
                        elems.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(elems)

    def subgroup(self, elems: Sequence[int]) -> tuple["FiniteGroup", list[int]]:
        """The subgroup on ``elems`` with local indices; returns (group, embedding).

        The embedding lists the ambient index of each local element, identity
        first and the rest in increasing ambient order.
        """
        es = sorted(set(elems))
        if self.identity not in es:
            raise GroupError("subset does not contain the identity")
        es.remove(self.identity)
        emb = [self.identity] + es
        pos = {a: i for i, a in enumerate(emb)}
        try:
            table = [[pos[self.table[a][b]] for b in emb] for a in emb]
        except KeyError as exc:
            raise GroupError("subset is not closed under multiplication") from exc
        labels = [self.labels[a] for a in emb]
        return group_from_table(table, labels, check_assoc=False), emb

    def to_json(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table], "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteGroup":
        if "permutations" in data:
            return group_from_permutations(data["permutations"])
        return group_from_table(data["table"], data.get("labels"))

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


def group_from_table(table, labels=None, check_assoc: bool = True) -> FiniteGroup:
    """Validate a Cayley table; raises GroupError naming the failed axiom."""
    rows = [list(map(int, r)) for r in table]
    n = len(rows)
    if n == 0:
        raise GroupError("empty table")
    if any(len(r) != n for r in rows):
        raise GroupError("table is not square")
    full = set(range(n))
    for i, r in enumerate(rows):
        if set(r) != full:
            raise GroupError(f"not a Latin square: row {i} is not a permutation of 0..{n - 1}")
    for j in range(n):
        if {rows[i][j] for i in range(n)} != full:
            raise GroupError(f"not a Latin square: column {j} is not a permutation of 0..{n - 1}")
    ident = None
    for e in range(n):
        if all(rows[e][a] == a and rows[a][e] == a for a in range(n)):
            ident = e
            break
    if ident is None:
        raise GroupError("no identity element")
    if check_assoc:
        for a, b, c in itertools.product(range(n), repeat=3):
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                raise GroupError(f"not associative: ({a}*{b})*{c} != {a}*({b}*{c})")
    inverses = [rows[a].index(ident) for a in range(n)]
    if labels is None:
        labels = [str(i) for i in range(n)]
    labels = tuple(str(s) for s in labels)
    if len(labels) != n:
        raise GroupError("label count does not match order")
    return FiniteGroup(n, tuple(tuple(r) for r in rows), labels, ident, tuple(inverses))


def compose(f: Sequence[int], g: Sequence[int]) -> tuple[int, ...]:
    """(f g)(i) = f(g(i))"""
    return tuple(f[i] for i in g)


def perm_label(p: Sequence[int]) -> str:
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            seen.add(i)
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


def group_from_permutations(gens: Sequence[Sequence[int]]) -> FiniteGroup:
    """Group generated by permutations given as 0-indexed image arrays.

    Elements are numbered in breadth-first discovery order from the identity,
    extending each element by every generator and admitting new elements in
    lexicographic order of their image arrays.
    """
    gens = [tuple(int(i) for i in g) for g in gens]
    if not gens:
        gens = [(0,)]
    deg = len(gens[0])
    for g in gens:
        if len(g) != deg:
            raise GroupError("degree mismatch among generators")
        if sorted(g) != list(range(deg)):
            raise GroupError(f"not a permutation: {list(g)}")
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        a = queue.popleft()
        for b in sorted({compose(a, g) for g in gens}):
            if b not in index:
                index[b] = len(elems)
                elems.append(b)
                queue.append(b)
    table = [[index[compose(a, b)] for b in elems] for a in elems]
    grp = group_from_table(table, [perm_label(p) for p in elems], check_assoc=False)
    return dataclasses.replace(grp, perms=tuple(elems))


# -- standard groups -----------------------------------------------------

def cyclic(n: int) -> FiniteGroup:
    if n == 1:
        return group_from_permutations([(0,)])
    return group_from_permutations([tuple((i + 1) % n for i in range(n))])


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return group_from_permutations([rot, ref])


def symmetric(n: int) -> FiniteGroup:
    if n < 2:
        return cyclic(1)
    swap = (1, 0) + tuple(range(2, n))
    cyc = tuple((i + 1) % n for i in range(n))
    return group_from_permutations([swap, cyc])


def alternating(n: int) -> FiniteGroup:
    gens = [tuple(_three_cycle(n, 0, 1, k)) for k in range(2, n)]
    return group_from_permutations(gens or [(0,)])


def _three_cycle(n, a, b, c):
    p = list(range(n))
    p[a], p[b], p[c] = b, c, a
    return p


def direct_product(A: FiniteGroup, B: FiniteGroup) -> FiniteGroup:
    """Elements (a, b) indexed a * |B| + b, labels 'a,b'."""
    nb = B.order
    table = [
        [A.table[a1][a2] * nb + B.table[b1][b2] for a2 in range(A.order) for b2 in range(nb)]
        for a1 in range(A.order)
        for b1 in range(nb)
    ]
    labels = [f"{A.labels[a]},{B.labels[b]}" for a in range(A.order) for b in range(nb)]
    return group_from_table(table, labels, check_assoc=False)


NAMED = {
    "Z1": lambda: cyclic(1),
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z4": lambda: cyclic(4),
    "Z5": lambda: cyclic(5),
    "Z6": lambda: cyclic(6),
    "Z8": lambda: cyclic(8),
    "Z2xZ2": lambda: direct_product(cyclic(2), cyclic(2)),
    "Z2xZ2xZ2": lambda: direct_product(direct_product(cyclic(2), cyclic(2)), cyclic(2)),
    "S3": lambda: symmetric(3),
    "D4": lambda: dihedral(4),
    "Q8": lambda: quaternion(),
    "A4": lambda: alternating(4),
    "S4": lambda: symmetric(4),
}


def quaternion() -> FiniteGroup:
    # regular representation of Q8 on 8 points
    i = (2, 3, 1, 0, 6, 7, 5, 4)
    j = (4, 5, 7, 6, 1, 0, 2, 3)
    return group_from_permutations([i, j])


def named_group(name: str) -> FiniteGroup:
    key = name.strip()
    if key in NAMED:
        return NAMED[key]()
    folded = {k.lower(): k for k in NAMED}
    if key.lower() in folded:
        return NAMED[folded[key.lower()]]()
    key = key[:1].upper() + key[1:]
    if key.startswith("Z") and key[1:].isdigit():
        return cyclic(int(key[1:]))
    if key.startswith("D") and key[1:].isdigit():
        return dihedral(int(key[1:]))
    raise GroupError(f"unknown group name {name!r}")


# -- subgroups and factorizations ----------------------------------------

def subgroups(sigma: FiniteGroup, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    """All subgroups, as sorted element tuples in lexicographic order.

    Found as closures: every cyclic subgroup, then joins with cyclic subgroups
    until nothing new appears.
    """
    if sigma.order > cap:
        raise ValueError(f"group order {sigma.order} exceeds cap {cap}")
    cyclics = {sigma.closure([a]) for a in sigma.elements}
    found = set(cyclics)
    frontier = set(cyclics)
    while frontier:
        nxt = set()
        for H in frontier:
            for C in cyclics:
                if C <= H:
                    continue
                J = sigma.closure(sorted(H | C))
                if J not in found:
                    found.add(J)
                    nxt.add(J)
        frontier = nxt
    return sorted(tuple(sorted(H)) for H in found)


@dataclass(frozen=True, eq=False)
class ExactFactorization:
    """Sigma = F G with F, G subgroups meeting trivially.

    ``F_elems``/``G_elems`` embed the local groups ``F``/``G`` into ``sigma``;
    ``factor_table[a] = (x, g)`` in local indices with ``a = F[x] G[g]``.
    """

    sigma: FiniteGroup
    F: FiniteGroup
    G: FiniteGroup
    F_elems: tuple[int, ...]
    G_elems: tuple[int, ...]
    factor_table: tuple[tuple[int, int], ...]

    def factor(self, a: int) -> tuple[int, int]:
        return self.factor_table[a]

    def pi(self, a: int) -> int:
        return self.factor_table[a][0]

    def p(self, a: int) -> int:
        return self.factor_table[a][1]

    def join(self, x: int, g: int) -> int:
        """Ambient element F[x] G[g]."""
        return self.sigma.table[self.F_elems[x]][self.G_elems[g]]

    def to_json(self) -> dict:
        return {"F": list(self.F_elems), "G": list(self.G_elems)}

    def __repr__(self) -> str:
        return f"ExactFactorization(|F|={self.F.order}, |G|={self.G.order})"


def make_factorization(sigma: FiniteGroup, F_elems: Sequence[int], G_elems: Sequence[int]) -> ExactFactorization:
    Fg, Femb = sigma.subgroup(F_elems)
    Gg, Gemb = sigma.subgroup(G_elems)
    if len(set(Femb) & set(Gemb)) != 1:
        raise GroupError("F and G do not intersect trivially")
    if Fg.order * Gg.order != sigma.order:
        raise GroupError("|F||G| != |Sigma|")
    table: list = [None] * sigma.order
    for x, a in enumerate(Femb):
        for g, b in enumerate(Gemb):
            c = sigma.table[a][b]
            if table[c] is not None:
                raise GroupError("F G does not cover Sigma uniquely")
            table[c] = (x, g)
    return ExactFactorization(sigma, Fg, Gg, tuple(Femb), tuple(Gemb), tuple(table))


def exact_factorizations(sigma: FiniteGroup, cap: int = DEFAULT_CAP) -> list[ExactFactorization]:
    subs = subgroups(sigma, cap)
    out = []
    for F in subs:
        for G in subs:
            if len(F) * len(G) == sigma.order and len(set(F) & set(G)) == 1:
                out.append(make_factorization(sigma, F, G))
    return out


@dataclass(frozen=True, eq=False)
class MatchedPair:
    """Groups F, G with ract[g][x] = g <| x in G and lact[g][x] = g |> x in F."""

    F: FiniteGroup
    G: FiniteGroup
    ract: tuple[tuple[int, ...], ...]
    lact: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {
            "F": self.F.to_json(),
            "G": self.G.to_json(),
            "ract": [list(r) for r in self.ract],
            "lact": [list(r) for r in self.lact],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MatchedPair":
        return cls(
            FiniteGroup.from_json(data["F"]),
            FiniteGroup.from_json(data["G"]),
            tuple(tuple(r) for r in data["ract"]),
            tuple(tuple(r) for r in data["lact"]),
        )

    def is_trivial_actions(self) -> bool:
        return all(
            self.ract[g][x] == g and self.lact[g][x] == x
            for g in self.G.elements
            for x in self.F.elements
        )


def derive_matched_pair(fact: ExactFactorization) -> MatchedPair:
    """g x = (g |> x)(g <| x) read off from the factorization of g x."""
    s = fact.sigma
    ract, lact = [], []
    for g in fact.G.elements:
        rrow, lrow = [], []
        for x in fact.F.elements:
            xi, gi = fact.factor(s.table[fact.G_elems[g]][fact.F_elems[x]])
            lrow.append(xi)
            rrow.append(gi)
        ract.append(tuple(rrow))
        lact.append(tuple(lrow))
    return MatchedPair(fact.F, fact.G, tuple(ract), tuple(lact))


def verify_matched_pair(mp: MatchedPair) -> Report:
    F, G, r, l = mp.F, mp.G, mp.ract, mp.lact
    rep = Report("matched_pair")
    if len(r) != G.order or len(l) != G.order or any(len(row) != F.order for row in r + l):
        rep.fail("shape", expected=(G.order, F.order))
        return rep
    for s in G.elements:
        for x in F.elements:
            for y in F.elements:
                rep.tick()
                lhs = l[s][F.mul(x, y)]
                rhs = F.mul(l[s][x], l[r[s][x]][y])
                if lhs != rhs:
                    rep.fail("s|>(xy) = (s|>x)((s<|x)|>y)", s=s, x=x, y=y)
    for s in G.elements:
        for t in G.elements:
            for x in F.elements:
                rep.tick()
                lhs = r[G.mul(s, t)][x]
                rhs = G.mul(r[s][l[t][x]], r[t][x])
                if lhs != rhs:
                    rep.fail("(st)<|x = (s<|(t|>x))(t<|x)", s=s, t=t, x=x)
    for s in G.elements:
        rep.tick()
        if l[s][F.identity] != F.identity:
            rep.fail("s|>1 = 1", s=s)
        if sorted(l[s]) != list(F.elements):
            rep.fail("s|>- bijective", s=s)
    for x in F.elements:
        rep.tick()
        if r[G.identity][x] != G.identity:
            rep.fail("1<|x = 1", x=x)
        if sorted(r[g][x] for g in G.elements) != list(G.elements):
            rep.fail("-<|x bijective", x=x)
    return rep


def rebuild_group(mp: MatchedPair) -> FiniteGroup:
    """F x G with (x,g)(y,h) = (x (g|>y), (g<|y) h); element (x,g) has index x*|G| + g."""
    F, G = mp.F, mp.G
    nG = G.order
    table = []
    for x in F.elements:
        for g in G.elements:
            row = []
            for y in F.elements:
                for h in G.elements:
                    row.append(F.mul(x, mp.lact[g][y]) * nG + G.mul(mp.ract[g][y], h))
            table.append(row)
    return group_from_table(table)


def rebuild_matches(fact: ExactFactorization, mp: MatchedPair | None = None) -> bool:
    """Does a -> (pi(a), p(a)) carry Sigma's table onto the rebuilt product?"""
    mp = mp or derive_matched_pair(fact)
    rebuilt = rebuild_group(mp)
    nG = fact.G.order
    idx = [x * nG + g for x, g in fact.factor_table]
    if len(set(idx)) != fact.sigma.order:
        return False
    s = fact.sigma
    return all(
        rebuilt.table[idx[a]][idx[b]] == idx[s.table[a][b]]
        for a in s.elements
        for b in s.elements
    )


def check_pi_p_identities(fact: ExactFactorization, mp: MatchedPair | None = None) -> Report:
    """pi(ab) = pi(a)(p(a)|>pi(b)) and p(ab) = (p(a)<|pi(b)) p(b) for all a, b."""
    mp = mp or derive_matched_pair(fact)
    s, F, G = fact.sigma, fact.F, fact.G
    rep = Report("pi_p_identities")
    for a in s.elements:
        xa, ga = fact.factor(a)
        for b in s.elements:
            xb, gb = fact.factor(b)
            xab, gab = fact.factor(s.table[a][b])
            rep.tick()
            if xab != F.mul(xa, mp.lact[ga][xb]):
                rep.fail("pi(ab) = pi(a)(p(a)|>pi(b))", a=a, b=b)
            if gab != G.mul(mp.ract[ga][xb], gb):
                rep.fail("p(ab) = (p(a)<|pi(b))p(b)", a=a, b=b)
    return rep
