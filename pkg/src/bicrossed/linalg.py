"""Sparse tensors over Q(zeta_N) and exact linear algebra on them.

A ``SparseTensor`` stores its nonzero entries as sorted linear (C-order)
indices together with integer coefficient vectors over the power basis of
Q(zeta_N) and one common denominator.  Contractions are written as einsum
strings and evaluated by sort-merge joins on the shared indices, so the
cost follows the number of nonzero products rather than the dense shape.

Coefficients live in int64 arrays.  Every multiplication and aggregation is
guarded: if a bound on the result exceeds 2**62 an ``OverflowError`` is
raised instead of wrapping silently.

Rank, row reduction, null spaces and solving go through the regular
representation: an m x n matrix over Q(zeta_N) becomes an (m d) x (n d)
integer matrix over Q (d = phi(N)), which is row reduced exactly by FLINT.
"""

from __future__ import annotations

import math
import string
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
from flint import fmpz_mat

from .scalars import CycloNum, _context, embed

__all__ = [
    "SparseTensor",
    "einsum",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "inverse",
    "JoinTooLarge",
]

_LIMIT = 2**62
MAX_PAIRS = 3_000_000


class JoinTooLarge(MemoryError):
    """A single join step would materialize more than ``MAX_PAIRS`` products."""


@lru_cache(maxsize=None)
def _field(N: int):
    deg, red = _context(N)
    R = np.zeros((deg, deg, deg), dtype=np.int64)
    for a in range(deg):
        for b in range(deg):
            R[a, b] = red[a + b]
    return deg, R, max(1, int(np.abs(R).max()))


def _maxabs(v: np.ndarray) -> int:
    return int(np.abs(v).max()) if v.size else 0


def _fmul(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """Rowwise product of coefficient vectors in Q(zeta_N)."""
    deg, R, rmax = _field(N)
    if float(_maxabs(a)) * float(_maxabs(b)) * deg * deg * rmax >= _LIMIT:
        raise OverflowError("coefficient product exceeds the int64 kernel")
    if deg == 1:
        return a * b
    outer = (a[:, :, None] * b[:, None, :]).reshape(len(a), deg * deg)
    return outer @ R.reshape(deg * deg, deg)


def _canon(shape, N, idx, val, den):
    """Sort, merge duplicates, drop zeros and reduce by the content gcd."""
    if len(idx):
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        uniq, start = np.unique(idx, return_index=True)
        if len(uniq) < len(idx):
            counts = np.diff(np.append(start, len(idx)))
            if float(_maxabs(val)) * int(counts.max()) >= _LIMIT:
                raise OverflowError("coefficient sum exceeds the int64 kernel")
            val = np.add.reduceat(val, start, axis=0)
            idx = uniq
        keep = np.any(val != 0, axis=1)
        if not keep.all():
            idx, val = idx[keep], val[keep]
    den = int(den)
    if den < 0:
        den, val = -den, -val
    if len(idx) == 0:
        return SparseTensor._raw(shape, N, idx, val, 1)
    g = math.gcd(int(np.gcd.reduce(np.abs(val).ravel())), den)
    if g > 1:
        val = val // g
        den //= g
    return SparseTensor._raw(shape, N, idx, val, den)


def _as_coeffs(x, N: int) -> tuple[list[int], int]:
    if isinstance(x, CycloNum):
        if x.N != N:
            raise ValueError(f"scalar over Q(zeta_{x.N}) in a tensor over Q(zeta_{N})")
        return list(x.nums), x.den
    q = Fraction(x)
    deg = _field(N)[0]
    return [q.numerator] + [0] * (deg - 1), q.denominator


class SparseTensor:
    """An immutable sparse tensor with entries in Q(zeta_N)."""

    __slots__ = ("shape", "N", "idx", "val", "den")

    def __init__(self, shape, N, idx, val, den=1):
        t = _canon(tuple(int(s) for s in shape), N, np.asarray(idx, dtype=np.int64).ravel(),
                   np.asarray(val, dtype=np.int64).reshape(len(np.ravel(idx)), _field(N)[0]), den)
        self.shape, self.N, self.idx, self.val, self.den = t.shape, t.N, t.idx, t.val, t.den

    @classmethod
    def _raw(cls, shape, N, idx, val, den):
        obj = object.__new__(cls)
        obj.shape, obj.N, obj.idx, obj.val, obj.den = tuple(shape), N, idx, val, den
        return obj

    # -- construction -------------------------------------------------
    @classmethod
    def zeros(cls, shape, N: int) -> "SparseTensor":
        deg = _field(N)[0]
        return cls._raw(tuple(shape), N, np.zeros(0, np.int64), np.zeros((0, deg), np.int64), 1)

    @classmethod
    def from_entries(cls, shape, N: int, entries: Mapping | Iterable) -> "SparseTensor":
        """Build from ``{coords: scalar}`` (or an iterable of pairs); duplicates add up."""
        items = entries.items() if isinstance(entries, Mapping) else entries
        shape = tuple(shape)
        deg = _field(N)[0]
        coords, nums, dens = [], [], []
        for c, x in items:
            c = (c,) if isinstance(c, (int, np.integer)) else tuple(c)
            n, d = _as_coeffs(x, N)
            coords.append(c)
            nums.append(n)
            dens.append(d)
        if not coords:
            return cls.zeros(shape, N)
        L = math.lcm(*dens)
        val = np.array([[a * (L // d) for a in n] for n, d in zip(nums, dens)], dtype=object)
        if _maxabs(val) >= _LIMIT:
            raise OverflowError("entry too large for the int64 kernel")
        idx = np.ravel_multi_index(tuple(np.array(coords, dtype=np.int64).T), shape) if shape else np.zeros(len(coords), np.int64)
        return _canon(shape, N, np.asarray(idx, dtype=np.int64), val.astype(np.int64).reshape(-1, deg), L)

    @classmethod
    def from_roots(cls, shape, N: int, coords: np.ndarray, exps: np.ndarray, scale=1) -> "SparseTensor":
        """Entries ``scale * zeta_N**exps[n]`` at ``coords[n]`` (an (nnz, ndim) array)."""
        deg, red = _context(N)
        table = np.array(red[:N], dtype=np.int64)
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, len(shape))
        q = Fraction(scale)
        val = table[np.asarray(exps, dtype=np.int64) % N] * q.numerator
        idx = np.ravel_multi_index(tuple(coords.T), shape) if len(coords) else np.zeros(0, np.int64)
        return _canon(tuple(shape), N, np.asarray(idx, dtype=np.int64), val.reshape(-1, deg), q.denominator)

    @classmethod
    def identity(cls, n: int, N: int) -> "SparseTensor":
        c = np.stack([np.arange(n), np.arange(n)], axis=1)
        return cls.from_roots((n, n), N, c, np.zeros(n, dtype=np.int64))

    @classmethod
    def basis_vector(cls, n: int, i: int, N: int) -> "SparseTensor":
        return cls.from_roots((n,), N, np.array([[i]]), np.zeros(1, dtype=np.int64))

    # -- access -------------------------------------------------------
    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def nnz(self) -> int:
        return len(self.idx)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def coords(self) -> np.ndarray:
        """Nonzero positions as an (nnz, ndim) array."""
        if not self.shape:
            return np.zeros((self.nnz, 0), dtype=np.int64)
        return np.stack(np.unravel_index(self.idx, self.shape), axis=1).astype(np.int64)

    def _scalar(self, row: np.ndarray) -> CycloNum:
        return CycloNum(self.N, [int(a) for a in row], self.den)

    def __getitem__(self, key) -> CycloNum:
        key = (key,) if isinstance(key, (int, np.integer)) else tuple(key)
        lin = int(np.ravel_multi_index(key, self.shape)) if self.shape else 0
        pos = int(np.searchsorted(self.idx, lin))
        if pos < self.nnz and self.idx[pos] == lin:
            return self._scalar(self.val[pos])
        return CycloNum.from_rational(self.N, 0)

    def items(self) -> Iterator[tuple[tuple[int, ...], CycloNum]]:
        for c, row in zip(self.coords(), self.val):
            yield tuple(int(x) for x in c), self._scalar(row)

    def to_dict(self) -> dict:
        return dict(self.items())

    def is_zero(self) -> bool:
        return self.nnz == 0

    def max_abs(self) -> int:
        return _maxabs(self.val)

    # -- shape manipulation ---------------------------------------------
    def reshape(self, *shape) -> "SparseTensor":
        shape = tuple(shape[0]) if len(shape) == 1 and not isinstance(shape[0], int) else tuple(shape)
        if math.prod(shape) != self.size:
            raise ValueError(f"cannot reshape {self.shape} into {shape}")
        return SparseTensor._raw(shape, self.N, self.idx, self.val, self.den)

    def transpose(self, axes: Sequence[int] | None = None) -> "SparseTensor":
        axes = tuple(reversed(range(self.ndim))) if axes is None else tuple(axes)
        shape = tuple(self.shape[a] for a in axes)
        c = self.coords()[:, list(axes)]
        idx = np.ravel_multi_index(tuple(c.T), shape) if self.nnz else np.zeros(0, np.int64)
        return _canon(shape, self.N, np.asarray(idx, np.int64), self.val, self.den)

    @property
    def T(self) -> "SparseTensor":
        return self.transpose()

    def slice0(self, lo: int, hi: int) -> "SparseTensor":
        """Entries with first coordinate in [lo, hi), re-based to start at 0."""
        block = math.prod(self.shape[1:])
        a, b = np.searchsorted(self.idx, [lo * block, hi * block])
        return SparseTensor._raw((hi - lo,) + self.shape[1:], self.N, self.idx[a:b] - lo * block,
                                 self.val[a:b], self.den)

    def take(self, axis: int, index: int) -> "SparseTensor":
        """The slice with coordinate ``index`` on ``axis`` (that axis removed)."""
        c = self.coords()
        mask = c[:, axis] == index
        rest = [a for a in range(self.ndim) if a != axis]
        shape = tuple(self.shape[a] for a in rest)
        sub = c[mask][:, rest]
        idx = np.ravel_multi_index(tuple(sub.T), shape) if len(sub) and shape else np.zeros(int(mask.sum()), np.int64)
        return _canon(shape, self.N, np.asarray(idx, np.int64), self.val[mask], self.den)

    def permute_axis(self, axis: int, perm: Sequence[int]) -> "SparseTensor":
        """Relabel coordinate i on ``axis`` as perm[i]."""
        c = self.coords()
        c[:, axis] = np.asarray(perm, dtype=np.int64)[c[:, axis]]
        idx = np.ravel_multi_index(tuple(c.T), self.shape) if self.nnz else np.zeros(0, np.int64)
        return _canon(self.shape, self.N, np.asarray(idx, np.int64), self.val, self.den)

    # -- arithmetic ---------------------------------------------------
    def _aligned(self, other: "SparseTensor"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.N != other.N:
            raise ValueError(f"field mismatch Q(zeta_{self.N}) vs Q(zeta_{other.N})")
        L = math.lcm(self.den, other.den)
        a, b = L // self.den, L // other.den
        if float(self.max_abs()) * a + float(other.max_abs()) * b >= _LIMIT:
            raise OverflowError("coefficient sum exceeds the int64 kernel")
        return self.val * a, other.val * b, L

    def __add__(self, other: "SparseTensor") -> "SparseTensor":
        va, vb, L = self._aligned(other)
        return _canon(self.shape, self.N, np.concatenate([self.idx, other.idx]), np.concatenate([va, vb]), L)

    def __sub__(self, other: "SparseTensor") -> "SparseTensor":
        va, vb, L = self._aligned(other)
        return _canon(self.shape, self.N, np.concatenate([self.idx, other.idx]), np.concatenate([va, -vb]), L)

    def __neg__(self) -> "SparseTensor":
        return SparseTensor._raw(self.shape, self.N, self.idx, -self.val, self.den)

    def scale(self, c) -> "SparseTensor":
        nums, d = _as_coeffs(c, self.N)
        row = np.array(nums, dtype=np.int64)
        val = _fmul(self.val, np.broadcast_to(row, self.val.shape), self.N) if self.nnz else self.val
        return _canon(self.shape, self.N, self.idx.copy(), val, self.den * d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (self.shape == other.shape and self.N == other.N and self.den == other.den
                and np.array_equal(self.idx, other.idx) and np.array_equal(self.val, other.val))

    __hash__ = None

    def lift(self, M: int) -> "SparseTensor":
        """The same tensor viewed over Q(zeta_M), for N dividing M."""
        if M % self.N:
            raise ValueError(f"{self.N} does not divide {M}")
        if M == self.N:
            return self
        degM, redM = _context(M)
        step = M // self.N
        L = np.array([redM[(a * step) % M] for a in range(_field(self.N)[0])], dtype=np.int64)
        return _canon(self.shape, M, self.idx.copy(), self.val @ L, self.den)

    def to_dense(self) -> np.ndarray:
        """Object array of CycloNum (small tensors only)."""
        out = np.empty(self.size, dtype=object)
        z = CycloNum.from_rational(self.N, 0)
        out[:] = [z] * self.size
        for i, row in zip(self.idx, self.val):
            out[i] = self._scalar(row)
        return out.reshape(self.shape)

    def to_json(self) -> list:
        """``[[*coords, [[num, den], ...]], ...]`` in index order."""
        out = []
        for c, row in zip(self.coords(), self.val):
            coeffs = [[int(a) // math.gcd(int(a), self.den), self.den // math.gcd(int(a), self.den)] for a in row]
            out.append([int(x) for x in c] + [coeffs])
        return out

    @classmethod
    def from_json(cls, shape, N: int, data: list) -> "SparseTensor":
        entries = []
        for item in data:
            *c, coeffs = item
            entries.append((tuple(c), CycloNum.from_coeffs(N, [Fraction(n, d) for n, d in coeffs])))
        return cls.from_entries(shape, N, entries)

    def __repr__(self) -> str:
        return f"SparseTensor(shape={self.shape}, N={self.N}, nnz={self.nnz})"


def outer(*ts: SparseTensor) -> SparseTensor:
    letters = iter(string.ascii_letters)
    specs = ["".join(next(letters) for _ in t.shape) for t in ts]
    return einsum(",".join(specs) + "->" + "".join(specs), *ts)


# -- einsum ------------------------------------------------------------

def _join(A: SparseTensor, la: str, B: SparseTensor, lb: str, lout: str, dims: dict) -> SparseTensor:
    N = A.N
    out_shape = tuple(dims[c] for c in lout)
    deg = _field(N)[0]
    if A.nnz == 0 or B.nnz == 0:
        return SparseTensor.zeros(out_shape, N)
    ca, cb = A.coords(), B.coords()
    shared = [c for c in la if c in lb]
    if shared:
        kshape = tuple(dims[c] for c in shared)
        ka = np.ravel_multi_index(tuple(ca[:, la.index(c)] for c in shared), kshape)
        kb = np.ravel_multi_index(tuple(cb[:, lb.index(c)] for c in shared), kshape)
    else:
        ka = np.zeros(A.nnz, dtype=np.int64)
        kb = np.zeros(B.nnz, dtype=np.int64)
    ob = np.argsort(kb, kind="stable")
    kbs = kb[ob]
    lo = np.searchsorted(kbs, ka, "left")
    cnt = np.searchsorted(kbs, ka, "right") - lo
    total = int(cnt.sum())
    if total > MAX_PAIRS:
        raise JoinTooLarge(total)
    if total == 0:
        return SparseTensor.zeros(out_shape, N)
    ia = np.repeat(np.arange(A.nnz), cnt)
    start = np.repeat(np.cumsum(cnt) - cnt, cnt)
    ib = ob[np.repeat(lo, cnt) + (np.arange(total) - start)]
    cols = []
    for c in lout:
        cols.append(ca[ia, la.index(c)] if c in la else cb[ib, lb.index(c)])
    idx = np.ravel_multi_index(tuple(cols), out_shape) if lout else np.zeros(total, np.int64)
    val = _fmul(A.val[ia], B.val[ib], N)
    return _canon(out_shape, N, np.asarray(idx, np.int64), val.reshape(-1, deg), A.den * B.den)


def _reduce(A: SparseTensor, la: str, lout: str, dims: dict) -> SparseTensor:
    out_shape = tuple(dims[c] for c in lout)
    if A.nnz == 0:
        return SparseTensor.zeros(out_shape, A.N)
    c = A.coords()
    idx = np.ravel_multi_index(tuple(c[:, la.index(x)] for x in lout), out_shape) if lout else np.zeros(A.nnz, np.int64)
    return _canon(out_shape, A.N, np.asarray(idx, np.int64), A.val, A.den)


def _pipeline(specs, out, ops, dims):
    cur, lcur = ops[0], specs[0]
    for k in range(1, len(ops)):
        later = set(out).union(*specs[k + 1:])
        keep = "".join(dict.fromkeys(c for c in lcur + specs[k] if c in later))
        cur = _join(cur, lcur, ops[k], specs[k], keep, dims)
        lcur = keep
    return _reduce(cur, lcur, out, dims)


def einsum(spec: str, *ops: SparseTensor) -> SparseTensor:
    """Sparse einsum over Q(zeta_N), evaluated left to right.

    Every label must occur at most once per operand.  When an intermediate
    join would exceed ``MAX_PAIRS`` products, the first operand is split
    into chunks along its stored entries and the partial results summed.
    """
    lhs, out = spec.replace(" ", "").split("->")
    specs = lhs.split(",")
    if len(specs) != len(ops):
        raise ValueError("operand count does not match the subscripts")
    N = ops[0].N
    dims: dict[str, int] = {}
    for s, t in zip(specs, ops):
        if t.N != N:
            raise ValueError("operands over different cyclotomic fields")
        if len(s) != t.ndim or len(set(s)) != len(s):
            raise ValueError(f"bad subscripts {s!r} for shape {t.shape}")
        for c, d in zip(s, t.shape):
            if dims.setdefault(c, d) != d:
                raise ValueError(f"inconsistent size for label {c!r}")
    first = ops[0]
    parts = [first]
    while True:
        try:
            results = [_pipeline(specs, out, (p,) + ops[1:], dims) for p in parts]
            break
        except JoinTooLarge:
            if max(p.nnz for p in parts) <= 1:
                raise
            parts = [q for p in parts for q in _halve(p)]
    acc = results[0]
    for r in results[1:]:
        acc = acc + r
    return acc


def _halve(t: SparseTensor):
    if t.nnz <= 1:
        return [t]
    h = t.nnz // 2
    return [SparseTensor._raw(t.shape, t.N, t.idx[:h], t.val[:h], t.den),
            SparseTensor._raw(t.shape, t.N, t.idx[h:], t.val[h:], t.den)]


# -- exact linear algebra ----------------------------------------------

def _expand(A: SparseTensor) -> fmpz_mat:
    """Integer matrix whose rows span the Q-coordinates of the row space of A (scaled by den)."""
    m, n = A.shape
    deg, R, rmax = _field(A.N)
    if float(A.max_abs()) * deg * rmax >= _LIMIT:
        raise OverflowError("entry too large for the int64 kernel")
    E = np.zeros((m, deg, n, deg), dtype=np.int64)
    if A.nnz:
        c = A.coords()
        # row (i, c_) holds the power-basis coordinates of zeta^c_ * (row i)
        E[c[:, 0], :, c[:, 1], :] = np.einsum("nb,bca->nca", A.val, R)
    return fmpz_mat(m * deg, n * deg, E.reshape(-1).tolist())


def _compress_rows(A: SparseTensor) -> SparseTensor:
    """Drop zero rows and exact duplicate rows (the row space is unchanged)."""
    m, n = A.shape
    if A.nnz == 0:
        return SparseTensor.zeros((0, n), A.N)
    c = A.coords()
    rows = {}
    for (i, j), v in zip(c, A.val):
        rows.setdefault(int(i), []).append((int(j), tuple(int(x) for x in v)))
    seen, keep = set(), []
    for i, r in rows.items():
        key = tuple(r)
        if key not in seen:
            seen.add(key)
            keep.append(i)
    remap = {i: k for k, i in enumerate(keep)}
    mask = np.array([int(i) in remap for i in c[:, 0]])
    new_rows = np.array([remap[int(i)] for i in c[mask, 0]], dtype=np.int64)
    idx = new_rows * n + c[mask, 1]
    return _canon((len(keep), n), A.N, idx, A.val[mask], A.den)


def rref(A: SparseTensor) -> tuple[SparseTensor, list[int]]:
    """Reduced row echelon form over Q(zeta_N) and its pivot columns.

    The Q-expansion of the reduced matrix is the Q-reduced expansion, and the
    rows whose Q-pivot sits on the first power-basis coordinate of a column
    are exactly the Q(zeta_N)-reduced rows.
    """
    if A.ndim != 2:
        raise ValueError("rref needs a matrix")
    m, n = A.shape
    N = A.N
    deg = _field(N)[0]
    B = _compress_rows(A)
    if B.shape[0] == 0:
        return SparseTensor.zeros((0, n), N), []
    M, d, r = _expand(B).rref()
    rows = M.tolist()
    d = int(d)
    entries, pivots = [], []
    for row in rows[:r]:
        piv = next(k for k, x in enumerate(row) if x != 0)
        if piv % deg:
            continue
        k = len(pivots)
        pivots.append(piv // deg)
        for j in range(n):
            coeffs = [Fraction(int(x), d) for x in row[j * deg:(j + 1) * deg]]
            if any(coeffs):
                entries.append(((k, j), CycloNum.from_coeffs(N, coeffs)))
    assert len(pivots) * deg == r
    return SparseTensor.from_entries((len(pivots), n), N, entries), pivots


def rank(A: SparseTensor) -> int:
    if A.ndim != 2:
        raise ValueError("rank needs a matrix")
    B = _compress_rows(A)
    if B.shape[0] == 0:
        return 0
    r = _expand(B).rank()
    deg = _field(A.N)[0]
    assert r % deg == 0
    return r // deg


def nullspace(A: SparseTensor) -> SparseTensor:
    """A basis of {x : A x = 0} as the columns of an n x k matrix."""
    m, n = A.shape
    R, piv = rref(A)
    free = [j for j in range(n) if j not in set(piv)]
    rows = R.to_dict()
    entries = []
    for col, f in enumerate(free):
        entries.append(((f, col), 1))
        for k, p in enumerate(piv):
            v = rows.get((k, f))
            if v is not None:
                entries.append(((p, col), -v))
    return SparseTensor.from_entries((n, len(free)), A.N, entries)


def solve(A: SparseTensor, b: SparseTensor) -> tuple[SparseTensor | None, bool]:
    """Some x with A x = b and whether it is the only one; (None, False) if inconsistent."""
    m, n = A.shape
    if b.shape != (m,):
        raise ValueError("right-hand side has the wrong length")
    aug = SparseTensor.from_entries((m, n + 1), A.N, list(A.items()) + [((i, n), v) for (i,), v in b.items()])
    R, piv = rref(aug)
    if n in piv:
        return None, False
    rows = R.to_dict()
    entries = [((p,), rows[(k, n)]) for k, p in enumerate(piv) if (k, n) in rows]
    return SparseTensor.from_entries((n,), A.N, entries), len(piv) == n


def inverse(A: SparseTensor) -> SparseTensor | None:
    """Inverse of a square matrix, or None if singular."""
    n, n2 = A.shape
    if n != n2:
        raise ValueError("inverse needs a square matrix")
    aug = SparseTensor.from_entries((n, 2 * n), A.N, list(A.items()) + [((i, n + i), 1) for i in range(n)])
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        return None
    entries = [((i, j - n), v) for (i, j), v in R.items() if j >= n]
    return SparseTensor.from_entries((n, n), A.N, entries)
