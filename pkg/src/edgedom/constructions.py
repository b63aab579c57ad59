"""Generators for the concrete families: projective geometries, Hadamard
designs, Menon designs and semi-biplanes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .core import MAX_SIZE, IncidenceStructure, Polarity
from .errors import (
    BadResidueClass,
    ContainsPlane,
    DegenerateLambda,
    EvenQ,
    InvalidInput,
    NoSeedAvailable,
    NotHadamard,
    NotRegular,
    OddQ,
    OutOfRange,
    ParseError,
    SpanTooSmall,
    TooLarge,
)
from .gfield import FiniteField, field_create, field_of_order

# ----------------------------------------------------------------------
# projective spaces
#
# A point of PG(n, q) is a vector over GF(q) whose first nonzero entry is 1.
# Points are numbered in lexicographic order of these vectors, comparing
# field elements by their integer code.


def theta(n: int, q: int) -> int:
    """Number of points of PG(n, q)."""
    return (q ** (n + 1) - 1) // (q - 1)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def pg_coords(F: FiniteField, n: int) -> np.ndarray:
    """All normalised points of PG(n, q) in index order, shape (theta, n+1)."""
    q = F.q
    parts = []
    for lead in range(n, -1, -1):
        tail = n - lead
        codes = np.arange(q**tail, dtype=np.int64)
        block = np.zeros((len(codes), n + 1), dtype=np.int64)
        block[:, lead] = 1
        for j in range(tail):
            block[:, n - j] = (codes // q**j) % q
        parts.append(block)
    return np.concatenate(parts)


def pg_index(F: FiniteField, n: int, vecs: np.ndarray) -> np.ndarray:
    """Index of normalised vectors (last axis of length n+1)."""
    q = F.q
    vecs = np.asarray(vecs, dtype=np.int64)
    weights = q ** np.arange(n, -1, -1, dtype=np.int64)
    code = vecs @ weights
    lead = np.argmax(vecs != 0, axis=-1)
    top = q ** (n - lead)
    return (top - 1) // (q - 1) + code - top


def normalize(F: FiniteField, vecs: np.ndarray) -> np.ndarray:
    """Scale each vector so its first nonzero entry is 1."""
    vecs = np.asarray(vecs, dtype=np.int64)
    lead = np.argmax(vecs != 0, axis=-1)
    head = np.take_along_axis(vecs, lead[..., None], axis=-1)
    inv = F.vpow(head, F.q - 2)
    return F.vmul(vecs, inv)


def _span_points(F: FiniteField, n: int, basis: np.ndarray, normalized: bool) -> np.ndarray:
    """Point indices of the projective spans of a batch of bases.

    ``basis`` has shape (m, d, n+1); the result has shape (m, theta(d-1)) with
    each row sorted.
    """
    m, d, _ = basis.shape
    coef = pg_coords(F, d - 1)
    c = len(coef)
    out = np.empty((m, c), dtype=np.int64)
    step = max(1, 20_000_000 // max(1, c * (n + 1)))
    for s in range(0, m, step):
        b = basis[s:s + step]
        acc = F.vmul(coef[None, :, 0, None], b[:, None, 0, :])
        for i in range(1, d):
            acc = F.vadd(acc, F.vmul(coef[None, :, i, None], b[:, None, i, :]))
        if not normalized:
            acc = normalize(F, acc)
        out[s:s + step] = np.sort(pg_index(F, n, acc), axis=1)
    return out


def _rref_bases(F: FiniteField, n: int, d: int):
    """Yield (pivots, bases) batches of reduced echelon d x (n+1) matrices."""
    q = F.q
    for piv in itertools.combinations(range(n + 1), d):
        free = [(i, j) for i in range(d) for j in range(piv[i] + 1, n + 1) if j not in piv]
        count = q ** len(free)
        codes = np.arange(count, dtype=np.int64)
        bases = np.zeros((count, d, n + 1), dtype=np.int64)
        for i, c in enumerate(piv):
            bases[:, i, c] = 1
        for t, (i, j) in enumerate(reversed(free)):
            bases[:, i, j] = (codes // q**t) % q
        yield piv, bases


def pg_points_kspaces(n: int, q: int, k: int) -> IncidenceStructure:
    """Points versus projective k-subspaces of PG(n, q)."""
    if n < 2:
        raise OutOfRange("need n >= 2")
    if not 1 <= k <= n - 1:
        raise OutOfRange(f"k must satisfy 1 <= k <= n-1, got k={k}, n={n}")
    F = field_of_order(q)
    v = theta(n, q)
    b = gaussian_binomial(n + 1, k + 1, q)
    if v > MAX_SIZE or b > MAX_SIZE:
        raise TooLarge(f"PG({n},{q}) with k={k} has v={v}, b={b}")
    rows = [_span_points(F, n, bases, normalized=True)
            for _, bases in _rref_bases(F, n, k + 1)]
    blocks = np.concatenate(rows).astype(np.int32)
    return IncidenceStructure(v, blocks, name=f"PG({n},{q})_k{k}")


def hyperplane_points(F: FiniteField, n: int) -> np.ndarray:
    """Row a: sorted indices of the points x with a . x = 0."""
    pts = pg_coords(F, n)
    v = len(pts)
    lead = np.argmax(pts != 0, axis=1)
    basis = np.zeros((v, n, n + 1), dtype=np.int64)
    for a in range(v):
        l = lead[a]
        others = [j for j in range(n + 1) if j != l]
        for i, j in enumerate(others):
            basis[a, i, j] = 1
            basis[a, i, l] = F.neg(int(pts[a, j]))
    return _span_points(F, n, basis, normalized=False)


def standard_polarity(n: int, q: int, D: IncidenceStructure | None = None) -> Polarity:
    """Point a -> hyperplane a_0 X_0 + ... + a_n X_n = 0 of PG(n, q)."""
    F = field_of_order(q)
    if D is None:
        D = pg_points_kspaces(n, q, n - 1)
    H = hyperplane_points(F, n)
    order = np.lexsort(H[:, ::-1].T)
    if not np.array_equal(H[order], D.block_matrix):
        raise InvalidInput("structure is not the point-hyperplane design of PG(n,q)")
    sigma = np.empty(len(H), dtype=np.int64)
    sigma[order] = np.arange(len(H))
    return Polarity(tuple(sigma.tolist()))


# ----------------------------------------------------------------------
# Paley-Hadamard designs


def hd_point(x: int | None, sign: int = 1) -> int:
    """Index of the point (x, sign); ``x=None`` is the point at infinity."""
    if x is None:
        return 0
    return 1 + 2 * x if sign == 1 else 2 + 2 * x


def paley_hadamard_design(q: int) -> tuple[IncidenceStructure, Polarity]:
    """HD(q) for q = 1 mod 4, with its natural polarity P -> B_P."""
    if q % 2 == 0 or q % 4 != 1:
        raise BadResidueClass(f"q = {q} is not 1 mod 4")
    F = field_of_order(q)
    chi = [F.quadratic_character(x) for x in range(q)]
    blocks = [[hd_point(y, -1) for y in range(q)]]
    labels = ["inf"]
    for x in range(q):
        for sign in (1, -1):
            if sign == 1:
                blk = [hd_point(y, i) for y in range(q) if chi[F.sub(x, y)] == 1 for i in (1, -1)]
                blk.append(hd_point(x, 1))
            else:
                blk = [hd_point(y, i) for y in range(q) for i in (1, -1)
                       if y != x and chi[F.sub(y, x)] == i]
                blk.append(0)
            blocks.append(blk)
            labels.append(f"({x},{sign})")
    D = IncidenceStructure(2 * q + 1, blocks, point_labels=labels,
                           block_labels=[f"B{l}" for l in labels], name=f"HD({q})")
    # caller's block list is ordered by the point it belongs to
    return D, Polarity(tuple(D.canonical_positions().tolist()))


# ----------------------------------------------------------------------
# Hadamard matrices


@dataclass(frozen=True)
class HadamardMatrix:
    entries: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def normalized(self) -> bool:
        return bool(np.all(self.entries[0] == 1) and np.all(self.entries[:, 0] == 1))

    @property
    def regular(self) -> bool:
        s = self.entries.sum(axis=1)
        return bool(np.all(s == s[0]))

    @property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))

    @property
    def bush_type(self) -> bool:
        return is_bush_type(self.entries)


def is_hadamard(m: np.ndarray) -> bool:
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    return (m.ndim == 2 and m.shape == (n, n) and bool(np.all(np.abs(m) == 1))
            and np.array_equal(m.T @ m, n * np.eye(n, dtype=np.int64)))


def is_bush_type(m: np.ndarray) -> bool:
    """Regular Hadamard of order 4h^2 whose 2h x 2h blocks are J on the
    diagonal and have zero row and column sums elsewhere."""
    m = np.asarray(m, dtype=np.int64)
    if not is_hadamard(m):
        return False
    n = m.shape[0]
    h = int(round(np.sqrt(n / 4)))
    if 4 * h * h != n:
        return False
    s = 2 * h
    blocks = m.reshape(s, s, s, s).transpose(0, 2, 1, 3)
    for i in range(s):
        for j in range(s):
            blk = blocks[i, j]
            if i == j:
                if not np.all(blk == 1):
                    return False
            elif np.any(blk.sum(axis=0)) or np.any(blk.sum(axis=1)):
                return False
    return True


def sylvester(order: int) -> np.ndarray:
    if order < 1 or order & (order - 1):
        raise NoSeedAvailable(f"no Sylvester matrix of order {order}")
    m = np.ones((1, 1), dtype=np.int64)
    while m.shape[0] < order:
        m = np.block([[m, m], [m, -m]])
    return m


def normalize_hadamard(m: np.ndarray) -> np.ndarray:
    """Negate rows and columns so the first row and column are all ones."""
    m = np.array(m, dtype=np.int64)
    m *= m[:, :1]
    m *= m[:1, :]
    return m


def read_hadamard(path) -> HadamardMatrix:
    lines = Path(path).read_text().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].isdigit():
        raise ParseError("first line must be the order", 1)
    n = int(lines[0])
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} rows, found {len(lines) - 1}", 2)
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if len(line) != n or set(line) - {"+", "-"}:
            raise ParseError(f"row must be {n} characters from '+-'", i)
        rows.append([1 if c == "+" else -1 for c in line])
    m = np.array(rows, dtype=np.int64).reshape(n, n)
    if not is_hadamard(m):
        raise NotHadamard("matrix does not satisfy M^T M = nI")
    return HadamardMatrix(m)


def write_hadamard(M: HadamardMatrix, path) -> None:
    rows = ["".join("+" if x > 0 else "-" for x in row) for row in M.entries]
    Path(path).write_text("\n".join([str(M.n)] + rows) + "\n")


def bush_type_hadamard(h: int, path=None) -> HadamardMatrix:
    """Symmetric Bush-type Hadamard matrix of order 4h^2.

    Built in when 2h is a power of two: with r_0, ..., r_{2h-1} the rows of a
    normalised Sylvester matrix of order 2h, block (i, j) is the rank-one
    matrix r_{i xor j}^T r_{i xor j}.  Otherwise a matrix file is required.
    Either way the result is checked, never trusted.
    """
    if path is not None:
        M = read_hadamard(path)
        if M.n != 4 * h * h:
            raise InvalidInput(f"file has order {M.n}, expected {4 * h * h}")
    else:
        s = 2 * h
        if h < 1 or s & (s - 1):
            raise NoSeedAvailable(f"no built-in Bush-type seed for h={h}; supply a matrix file")
        rows = normalize_hadamard(sylvester(s))
        outer = [np.outer(r, r) for r in rows]
        M = HadamardMatrix(np.block([[outer[i ^ j] for j in range(s)] for i in range(s)]))
    if not (M.bush_type and M.symmetric):
        raise NotHadamard("matrix is not a symmetric Bush-type Hadamard matrix")
    return M


def menon_from_hadamard(M: HadamardMatrix | np.ndarray, eps: int) -> IncidenceStructure:
    """Design with incidence matrix (J + eps M)/2; rows are points, columns blocks."""
    m = M.entries if isinstance(M, HadamardMatrix) else np.asarray(M, dtype=np.int64)
    if eps not in (1, -1):
        raise InvalidInput("eps must be +1 or -1")
    if not is_hadamard(m):
        raise NotHadamard("matrix does not satisfy M^T M = nI")
    sums = m.sum(axis=1)
    if not np.all(sums == sums[0]):
        raise NotRegular("row sums are not constant")
    n = m.shape[0]
    k = (n + eps * int(sums[0])) // 2
    if k * (k - 1) == 0:
        raise DegenerateLambda(f"eps={eps} gives lambda = 0")
    N = (1 + eps * m) // 2
    blocks = [np.flatnonzero(N[:, j]).tolist() for j in range(n)]
    return IncidenceStructure(n, blocks, name=f"Menon({n},{'+' if eps > 0 else '-'})")


# ----------------------------------------------------------------------
# semi-biplanes


@dataclass
class SbpModel:
    """A semi-biplane plus coordinate lookups.

    ``points`` maps every coordinate tuple of a point class (both
    representatives) to its index; ``blocks`` does the same for block
    coordinates, giving canonical block indices.
    """

    D: IncidenceStructure
    field: FiniteField | None
    points: dict
    blocks: dict

    def point_set(self, coords) -> set[int]:
        return {self.points[c] for c in coords}

    def block_set(self, coords) -> set[int]:
        return {self.blocks[c] for c in coords}


def _finish(v, raw_blocks, block_keys, point_map, F, name, labels=None):
    D = IncidenceStructure(v, raw_blocks, point_labels=labels, name=name)
    pos = D.canonical_positions()
    bmap = {key: int(pos[i]) for i, keys in enumerate(block_keys) for key in keys}
    return SbpModel(D, F, point_map, bmap)


@lru_cache(maxsize=None)
def elation_model(q: int) -> SbpModel:
    """Quotient of PG(2, q), q even, by the elation x2 -> x2 + x0.

    Point (x1, x2) is stored with x2 having its lowest bit cleared, so
    the pair {x2, x2 + 1} shares one representative.
    """
    if q % 2:
        raise OddQ(f"q = {q} is odd")
    F = field_of_order(q)
    if q < 4:
        raise OutOfRange("need q >= 4")
    half = q // 2

    def pidx(x1, x2):
        return x1 * half + (x2 >> 1)

    pmap = {(x1, x2): pidx(x1, x2) for x1 in range(q) for x2 in range(q)}
    x1 = np.arange(q, dtype=np.int64)
    blocks, keys = [], []
    for m in range(q):
        mx = F.vmul(m, x1)
        for b in range(0, q, 2):
            blocks.append(pidx(x1, F.vadd(mx, b)))
            keys.append(((m, b), (m, b ^ 1)))
    return _finish(q * half, np.array(blocks), keys, pmap, F, f"sbp-elation({q})")


def sbp_elation(q: int) -> IncidenceStructure:
    return elation_model(q).D


@lru_cache(maxsize=None)
def homology_model(q: int) -> SbpModel:
    """Quotient of PG(2, q^2), q odd, by the homology x0 -> -x0.

    Points are pairs {+-(x1, x2)}, blocks l_{a,b}: a x1 + b x2 = +-1.
    """
    if q % 2 == 0:
        raise EvenQ(f"q = {q} is even")
    F0 = field_of_order(q)
    F = field_create(F0.p, 2 * F0.h)
    Q = F.q
    pmap: dict = {}
    reps = []
    for x1 in range(Q):
        for x2 in range(Q):
            if (x1, x2) == (0, 0) or (x1, x2) in pmap:
                continue
            neg = (F.neg(x1), F.neg(x2))
            pmap[(x1, x2)] = pmap[neg] = len(reps)
            reps.append((x1, x2))
    lookup = np.full(Q * Q, -1, dtype=np.int64)
    for (a, b), i in pmap.items():
        lookup[a * Q + b] = i
    xs = np.arange(Q, dtype=np.int64)
    blocks, keys = [], []
    for a, b in reps:
        if b:
            x2 = F.vmul(F.vadd(1, F.vneg(F.vmul(a, xs))), F.inv(b))
            pts = lookup[xs * Q + x2]
        else:
            pts = lookup[F.inv(a) * Q + xs]
        blocks.append(pts)
        keys.append(((a, b), (F.neg(a), F.neg(b))))
    return _finish(len(reps), np.array(blocks), keys, pmap, F, f"sbp-homology({q})",
                   labels=[str(r) for r in reps])


def sbp_homology(q: int) -> IncidenceStructure:
    return homology_model(q).D


@lru_cache(maxsize=None)
def baer_model(q: int) -> SbpModel:
    """Quotient of PG(2, q^2) by the Baer involution x -> x^q.

    Classes are ordered by their lexicographically smaller representative.
    """
    if q < 2:
        raise OutOfRange("need q >= 2")
    F0 = field_of_order(q)
    F = field_create(F0.p, 2 * F0.h)
    pts = pg_coords(F, 2)
    conj = F.vpow(pts, q)
    conj_idx = pg_index(F, 2, conj)
    nv = len(pts)
    cls = np.full(nv, -1, dtype=np.int64)
    reps = []
    for i in range(nv):
        j = int(conj_idx[i])
        if j != i and cls[i] < 0:
            cls[i] = cls[j] = len(reps)
            reps.append(i)
    lines = hyperplane_points(F, 2)
    blocks, keys = [], []
    done = set()
    for i in range(nv):
        j = int(conj_idx[i])
        if j == i or i in done:
            continue
        done.update((i, j))
        members = cls[lines[i]]
        blocks.append(members[members >= 0])
        keys.append((tuple(pts[i].tolist()), tuple(pts[j].tolist())))
    pmap = {}
    for i in range(nv):
        if cls[i] >= 0:
            pmap[tuple(pts[i].tolist())] = int(cls[i])
    return _finish(len(reps), np.array(blocks), keys, pmap, F, f"sbp-baer({q})",
                   labels=[str(tuple(pts[r].tolist())) for r in reps])


def sbp_baer(q: int) -> IncidenceStructure:
    return baer_model(q).D


# binary affine semi-biplanes: a vector x in GF(2)^n is the integer with
# bit (n-1-i) equal to x_i, so integer order is lexicographic order.


def vec_to_int(bits) -> int:
    out = 0
    for x in bits:
        out = (out << 1) | (int(x) & 1)
    return out


def int_to_vec(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> (n - 1 - i)) & 1 for i in range(n))


def weight_one_set(n: int) -> list[int]:
    return [1 << i for i in range(n)]


def _gf2_rank(vectors) -> int:
    basis: list[int] = []
    for x in vectors:
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
    return len(basis)


def _as_int_set(n: int, S) -> list[int]:
    out = set()
    for s in S:
        out.add(int(s) if isinstance(s, (int, np.integer)) else vec_to_int(s))
    return sorted(out)


def check_affine_set(n: int, S) -> list[int]:
    """Validate S and return it as sorted integers."""
    if n < 2:
        raise OutOfRange("need n >= 2")
    S = _as_int_set(n, S)
    if not S or any(s < 0 or s >= 1 << n or bin(s).count("1") % 2 == 0 for s in S):
        raise InvalidInput("S must be a nonempty set of odd-weight vectors")
    s0 = S[0]
    if _gf2_rank(s ^ s0 for s in S[1:]) < n - 1:
        raise SpanTooSmall("affine span of S is smaller than the odd-weight class")
    sums: dict[int, tuple[int, int]] = {}
    for a, b in itertools.combinations(S, 2):
        t = a ^ b
        if t in sums:
            raise ContainsPlane(f"S contains the plane {sorted(sums[t] + (a, b))}")
        sums[t] = (a, b)
    return S


@lru_cache(maxsize=None)
def _affine_model(n: int, S: tuple[int, ...]) -> SbpModel:
    S = check_affine_set(n, S)
    even = [x for x in range(1 << n) if bin(x).count("1") % 2 == 0]
    odd = [x for x in range(1 << n) if bin(x).count("1") % 2 == 1]
    pidx = {x: i for i, x in enumerate(even)}
    blocks = [[pidx[y ^ s] for s in S] for y in odd]
    D = IncidenceStructure(len(even), blocks, name=f"sbp-affine({n},{len(S)})")
    pos = D.canonical_positions()
    bmap = {y: int(pos[i]) for i, y in enumerate(odd)}
    return SbpModel(D, None, pidx, bmap)


def affine_model(n: int, S) -> SbpModel:
    return _affine_model(n, tuple(_as_int_set(n, S)))


def sbp_affine_binary(n: int, S) -> IncidenceStructure:
    """Even-weight vectors of AG(n, 2) against the translates y + S, y odd."""
    return affine_model(n, S).D
