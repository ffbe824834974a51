"""Smith normal form over Z/N and the subquotients it computes.

Every routine works with integer matrices reduced mod N.  Row and column
operations are unimodular over Z, so they stay invertible mod N; diagonal
entries come out as divisors of N (or 0) forming a divisibility chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["SmithMod", "smith_mod", "solve_mod", "subquotient", "Subquotient", "ResourceCap"]

MAX_ENTRIES = 6_000_000


class ResourceCap(RuntimeError):
    """The linear system is larger than the configured cap."""


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _unit_normalizer(a: int, N: int) -> int:
    """A unit u mod N with u*a = gcd(a, N) mod N."""
    g = math.gcd(a, N)
    m = N // g
    if m == 1:
        return 1
    u = pow((a // g) % m, -1, m)
    while math.gcd(u, N) != 1:
        u += m
    return u % N


@dataclass
class SmithMod:
    """U A V = D (mod N).  ``diag`` has length min(m, n)."""

    N: int
    diag: list[int]
    V: np.ndarray | None
    Vinv: np.ndarray | None
    Uinv: np.ndarray | None
    rhs: np.ndarray | None  # U @ rhs

    @property
    def rank_mod(self) -> int:
        return sum(1 for d in self.diag if d % self.N)


def smith_mod(
    A,
    N: int,
    *,
    track_right: bool = True,
    track_left_inverse: bool = False,
    rhs=None,
) -> SmithMod:
    if N < 1:
        raise ValueError("N must be positive")
    A = np.array(A, dtype=np.int64) % N if np.size(A) else np.zeros(np.shape(A), dtype=np.int64)
    if A.ndim != 2:
        A = A.reshape(len(A), -1)
    m, n = A.shape
    if m * n > MAX_ENTRIES:
        raise ResourceCap(f"matrix {m}x{n} exceeds cap of {MAX_ENTRIES} entries")
    V = np.eye(n, dtype=np.int64) if track_right else None
    Vinv = np.eye(n, dtype=np.int64) if track_right else None
    Uinv = np.eye(m, dtype=np.int64) if track_left_inverse else None
    R = None
    if rhs is not None:
        R = np.array(rhs, dtype=np.int64).reshape(m, -1) % N

    def row_swap(i, j):
        A[[i, j]] = A[[j, i]]
        if R is not None:
            R[[i, j]] = R[[j, i]]
        if Uinv is not None:
            Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def col_swap(i, j):
        A[:, [i, j]] = A[:, [j, i]]
        if V is not None:
            V[:, [i, j]] = V[:, [j, i]]
            Vinv[[i, j]] = Vinv[[j, i]]

    def row_scale(i, u):
        # u a unit mod N
        A[i] = (A[i] * u) % N
        if R is not None:
            R[i] = (R[i] * u) % N
        if Uinv is not None:
            Uinv[:, i] = (Uinv[:, i] * pow(u, -1, N)) % N

    def row_axpy(dst, src, c):
        # row_dst += c * row_src
        c %= N
        if not c:
            return
        A[dst] = (A[dst] + c * A[src]) % N
        if R is not None:
            R[dst] = (R[dst] + c * R[src]) % N
        if Uinv is not None:
            Uinv[:, src] = (Uinv[:, src] - c * Uinv[:, dst]) % N

    def row_mix(i, j, s, t, u, v):
        # [row_i; row_j] <- [[s, t], [u, v]] [row_i; row_j], det = 1
        ri, rj = A[i].copy(), A[j].copy()
        A[i] = (s * ri + t * rj) % N
        A[j] = (u * ri + v * rj) % N
        if R is not None:
            qi, qj = R[i].copy(), R[j].copy()
            R[i] = (s * qi + t * qj) % N
            R[j] = (u * qi + v * qj) % N
        if Uinv is not None:
            ci, cj = Uinv[:, i].copy(), Uinv[:, j].copy()
            # right-multiply by inverse [[v, -t], [-u, s]]
            Uinv[:, i] = (v * ci - u * cj) % N
            Uinv[:, j] = (-t * ci + s * cj) % N

    def col_axpy(dst, src, c):
        c %= N
        if not c:
            return
        A[:, dst] = (A[:, dst] + c * A[:, src]) % N
        if V is not None:
            V[:, dst] = (V[:, dst] + c * V[:, src]) % N
            Vinv[src] = (Vinv[src] - c * Vinv[dst]) % N

    def col_mix(i, j, s, t, u, v):
        # [col_i, col_j] <- [col_i, col_j] [[s, u], [t, v]], det = 1
        ci, cj = A[:, i].copy(), A[:, j].copy()
        A[:, i] = (s * ci + t * cj) % N
        A[:, j] = (u * ci + v * cj) % N
        if V is not None:
            vi, vj = V[:, i].copy(), V[:, j].copy()
            V[:, i] = (s * vi + t * vj) % N
            V[:, j] = (u * vi + v * vj) % N
            wi, wj = Vinv[i].copy(), Vinv[j].copy()
            Vinv[i] = (v * wi - u * wj) % N
            Vinv[j] = (-t * wi + s * wj) % N

    diag: list[int] = []
    r = min(m, n)
    gcd_table = np.array([math.gcd(k, N) for k in range(N)], dtype=np.int64)
    for k in range(r):
        sub = A[k:, k:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            diag.extend([0] * (r - k))
            break
        gs = gcd_table[sub[nz]]
        best = int(np.argmin(gs))
        i0, j0 = int(nz[0][best]) + k, int(nz[1][best]) + k
        if i0 != k:
            row_swap(k, i0)
        if j0 != k:
            col_swap(k, j0)
        while True:
            a = int(A[k, k])
            u = _unit_normalizer(a, N)
            if u != 1:
                row_scale(k, u)
            g = int(A[k, k])
            dirty = False
            for i in np.nonzero(A[k + 1:, k])[0] + k + 1:
                b = int(A[i, k])
                if b % g == 0:
                    row_axpy(i, k, -(b // g))
                else:
                    h, s, t = _ext_gcd(g, b)
                    row_mix(k, i, s, t, -(b // h), g // h)
                    g = int(A[k, k])
                    dirty = True
            for j in np.nonzero(A[k, k + 1:])[0] + k + 1:
                b = int(A[k, j])
                g = int(A[k, k])
                if g and b % g == 0:
                    col_axpy(j, k, -(b // g))
                else:
                    h, s, t = _ext_gcd(g, b)
                    col_mix(k, j, s, t, -(b // h), g // h)
                    dirty = True
            if dirty or np.any(A[k + 1:, k]) or np.any(A[k, k + 1:]):
                continue
            g = int(A[k, k])
            if g == 0:
                break
            rest = A[k + 1:, k + 1:]
            bad = np.nonzero(rest % g)
            if len(bad[0]) == 0:
                break
            row_axpy(k, int(bad[0][0]) + k + 1, 1)
        diag.append(int(A[k, k]))
    return SmithMod(N, diag, V, Vinv, Uinv, R)


def solve_mod(A, b, N: int):
    """Some x with A x = b (mod N), or None if the system is inconsistent."""
    A = np.array(A, dtype=np.int64).reshape(len(b), -1) if np.size(A) else np.zeros((len(b), 0), dtype=np.int64)
    m, n = A.shape
    sm = smith_mod(A, N, rhs=np.array(b, dtype=np.int64).reshape(m, 1))
    c = sm.rhs[:, 0]
    y = np.zeros(n, dtype=np.int64)
    for i in range(m):
        ci = int(c[i]) % N
        d = sm.diag[i] if i < len(sm.diag) else 0
        if d == 0:
            if ci:
                return None
            continue
        g = math.gcd(d, N)
        if ci % g:
            return None
        M = N // g
        y[i] = ((ci // g) * pow((d // g) % M, -1, M)) % M if M > 1 else 0
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    return (sm.V @ y) % N


@dataclass
class Subquotient:
    """Z / B with Z = ker(M mod N) and B a subgroup of Z.

    ``kernel_gens`` and ``kernel_orders`` present Z as a direct sum of cyclic
    groups; ``invariant_factors`` and ``generators`` present Z / B.
    """

    N: int
    kernel_gens: list[np.ndarray]
    kernel_orders: list[int]
    invariant_factors: list[int]
    generators: list[np.ndarray]

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def kernel_order(self) -> int:
        return math.prod(self.kernel_orders)


def subquotient(M, B, N: int, n: int | None = None) -> Subquotient:
    """Compute ker(M)/im(B) over Z/N.

    ``M`` is m x n; ``B`` is n x k with columns inside ker(M).
    """
    M = np.asarray(M, dtype=np.int64)
    if n is None:
        n = M.shape[1]
    if n == 0:
        return Subquotient(N, [], [], [], [])
    M = M.reshape(-1, n)
    B = np.asarray(B, dtype=np.int64).reshape(n, -1) if np.size(B) else np.zeros((n, 0), dtype=np.int64)
    sm = smith_mod(M, N)
    diag = list(sm.diag) + [0] * (n - len(sm.diag))
    c = [N // math.gcd(d, N) for d in diag]
    gens, orders, keep = [], [], []
    for i in range(n):
        o = N // c[i]
        if o > 1:
            gens.append((c[i] * sm.V[:, i]) % N)
            orders.append(o)
            keep.append(i)
    if not keep:
        return Subquotient(N, [], [], [], [])
    W = (sm.Vinv @ (B % N)) % N if B.shape[1] else np.zeros((n, 0), dtype=np.int64)
    Y = np.zeros((len(keep), B.shape[1]), dtype=np.int64)
    for r, i in enumerate(keep):
        row = W[i]
        if np.any(row % c[i]):
            raise ValueError("a column of B is not in ker(M)")
        Y[r] = (row // c[i]) % orders[r]
    for i in range(n):
        if i not in keep and np.any(W[i] % c[i]):
            raise ValueError("a column of B is not in ker(M)")
    R = np.concatenate([np.diag(orders).astype(np.int64), Y], axis=1)
    sq = smith_mod(R, N, track_right=False, track_left_inverse=True)
    G = np.array(gens, dtype=np.int64).T  # n x len(keep)
    factors, reps = [], []
    for i, e in enumerate(sq.diag):
        f = math.gcd(e, N)
        if f > 1:
            factors.append(f)
            reps.append((G @ sq.Uinv[:, i]) % N)
    return Subquotient(N, gens, orders, factors, reps)
