"""Incidence structures: storage, classification, incidence graph, file format.

A structure is a point set ``0..v-1`` and a list of blocks (point subsets).
Blocks are stored in canonical form: points sorted inside each block and
blocks sorted lexicographically.  Every downstream search iterates in this
order, which is what makes results reproducible.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import (
    DuplicateBlock,
    IndexOutOfRange,
    InvalidStructure,
    NotAPolarity,
    ParseError,
    TooLarge,
)

MAX_SIZE = 2**20


def _lex_order(rows: np.ndarray) -> np.ndarray:
    """Row permutation sorting a 2-D integer array lexicographically.

    Keys are added a few columns at a time; once the leading columns already
    separate every row the remaining ones cannot change the order.
    """
    b, k = rows.shape
    if b <= 1:
        return np.arange(b)
    ncols = 1
    while True:
        ncols = min(ncols, k)
        order = np.lexsort(rows[:, :ncols][:, ::-1].T)
        if ncols == k:
            return order
        s = rows[order, :ncols]
        if np.all(np.any(s[1:] != s[:-1], axis=1)):
            return order
        ncols *= 4


class IncidenceStructure:
    """Points ``0..v-1`` and a canonical list of blocks.

    ``blocks`` may be a 2-D integer array (all blocks the same size, the fast
    path used for large geometries) or any iterable of point collections.
    """

    def __init__(
        self,
        v: int,
        blocks,
        *,
        point_labels: Sequence[str] | None = None,
        block_labels: Sequence[str] | None = None,
        name: str | None = None,
    ):
        v = int(v)
        if v < 1:
            raise InvalidStructure("need at least one point")
        if v > MAX_SIZE:
            raise TooLarge(f"v = {v} exceeds the 2^20 guardrail")
        self.v = v
        self.name = name
        if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
            order = self._init_uniform(blocks)
        else:
            order = self._init_general(blocks)
        # canonical position -> position in the caller's block list
        self.source_order = np.asarray(order, dtype=np.int64)
        if self.b > MAX_SIZE:
            raise TooLarge(f"b = {self.b} exceeds the 2^20 guardrail")
        if point_labels is not None and len(point_labels) != v:
            raise InvalidStructure("point label count does not match v")
        if block_labels is not None:
            if len(block_labels) != self.b:
                raise InvalidStructure("block label count does not match b")
            block_labels = [block_labels[i] for i in order]
        self.point_labels = list(point_labels) if point_labels is not None else None
        self.block_labels = block_labels

    def _init_uniform(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr)
        b, k = arr.shape
        if k == 0:
            raise InvalidStructure("empty block")
        if b and (arr.min() < 0 or arr.max() >= self.v):
            raise IndexOutOfRange(f"point index outside [0, {self.v})")
        arr = np.sort(arr.astype(np.int32, copy=False), axis=1)
        if k > 1 and np.any(arr[:, 1:] == arr[:, :-1]):
            raise InvalidStructure("repeated point inside a block")
        order = _lex_order(arr)
        arr = np.ascontiguousarray(arr[order])
        if b > 1 and np.any(np.all(arr[1:] == arr[:-1], axis=1)):
            raise DuplicateBlock("repeated block")
        self._matrix = arr
        self._indices = arr.reshape(-1)
        self._indptr = np.arange(0, b * k + 1, k, dtype=np.int64)
        self.b = b
        return order

    def _init_general(self, blocks: Iterable) -> np.ndarray:
        rows = []
        for blk in blocks:
            t = tuple(sorted(int(x) for x in blk))
            if not t:
                raise InvalidStructure("empty block")
            if t[0] < 0 or t[-1] >= self.v:
                raise IndexOutOfRange(f"point index outside [0, {self.v})")
            if any(x == y for x, y in zip(t, t[1:])):
                raise InvalidStructure("repeated point inside a block")
            rows.append(t)
        order = sorted(range(len(rows)), key=rows.__getitem__)
        rows = [rows[i] for i in order]
        for x, y in zip(rows, rows[1:]):
            if x == y:
                raise DuplicateBlock(f"repeated block {list(x)}")
        self.b = len(rows)
        sizes = [len(t) for t in rows]
        self._indptr = np.zeros(self.b + 1, dtype=np.int64)
        np.cumsum(sizes, out=self._indptr[1:])
        self._indices = np.fromiter((x for t in rows for x in t), dtype=np.int32,
                                    count=int(self._indptr[-1]))
        if rows and len(set(sizes)) == 1:
            self._matrix = self._indices.reshape(self.b, sizes[0])
        else:
            self._matrix = None
        self.__dict__["blocks"] = rows
        return np.array(order, dtype=np.int64)

    # ------------------------------------------------------------------
    # access

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"<IncidenceStructure{tag} v={self.v} b={self.b}>"

    def __eq__(self, other):
        if not isinstance(other, IncidenceStructure):
            return NotImplemented
        return (self.v == other.v and self.b == other.b
                and np.array_equal(self._indptr, other._indptr)
                and np.array_equal(self._indices, other._indices))

    def __hash__(self):
        return hash((self.v, self.b, self._indices[:64].tobytes()))

    @property
    def block_matrix(self) -> np.ndarray | None:
        """``b x k`` array of blocks when every block has the same size."""
        return self._matrix

    @property
    def num_incidences(self) -> int:
        return int(self._indptr[-1])

    def canonical_positions(self) -> np.ndarray:
        """Inverse of ``source_order``: caller's block position -> canonical index."""
        inv = np.empty(self.b, dtype=np.int64)
        inv[self.source_order] = np.arange(self.b)
        return inv

    def block(self, i: int) -> np.ndarray:
        return self._indices[self._indptr[i]:self._indptr[i + 1]]

    @cached_property
    def blocks(self) -> list[tuple[int, ...]]:
        ind = self._indices.tolist()
        ptr = self._indptr.tolist()
        return [tuple(ind[ptr[i]:ptr[i + 1]]) for i in range(self.b)]

    @cached_property
    def block_sizes(self) -> np.ndarray:
        return np.diff(self._indptr)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self._indices, minlength=self.v)

    @cached_property
    def _transpose(self) -> tuple[np.ndarray, np.ndarray]:
        owner = np.repeat(np.arange(self.b, dtype=np.int32), self.block_sizes)
        order = np.argsort(self._indices, kind="stable")
        indptr = np.zeros(self.v + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        return indptr, owner[order]

    def point_blocks(self, p: int) -> np.ndarray:
        indptr, ind = self._transpose
        return ind[indptr[p]:indptr[p + 1]]

    @cached_property
    def point_rows(self) -> list[tuple[int, ...]]:
        indptr, ind = self._transpose
        ind, ptr = ind.tolist(), indptr.tolist()
        return [tuple(ind[ptr[p]:ptr[p + 1]]) for p in range(self.v)]

    @cached_property
    def block_masks(self) -> list[int]:
        """Blocks as Python-int bitsets over points."""
        return [sum(1 << x for x in blk) for blk in self.blocks]

    @cached_property
    def point_masks(self) -> list[int]:
        """Points as Python-int bitsets over blocks."""
        return [sum(1 << x for x in row) for row in self.point_rows]

    @cached_property
    def _block_lookup(self) -> dict[tuple[int, ...], int]:
        return {blk: i for i, blk in enumerate(self.blocks)}

    def block_index(self, points: Iterable[int]) -> int:
        """Index of the block with exactly this point set."""
        key = tuple(sorted(int(x) for x in points))
        try:
            return self._block_lookup[key]
        except KeyError:
            raise KeyError(f"no block {list(key)}") from None

    def is_incident(self, p: int, blk: int) -> bool:
        row = self.block(blk)
        i = np.searchsorted(row, p)
        return bool(i < len(row) and row[i] == p)

    def incidence_matrix(self) -> np.ndarray:
        """Dense ``v x b`` 0/1 matrix (rows are points)."""
        m = np.zeros((self.v, self.b), dtype=np.uint8)
        owner = np.repeat(np.arange(self.b), self.block_sizes)
        m[self._indices, owner] = 1
        return m

    def sparse_matrix(self, dtype=np.int32) -> sparse.csr_matrix:
        """Sparse ``v x b`` incidence matrix."""
        m = sparse.csc_matrix(
            (np.ones(len(self._indices), dtype=dtype), self._indices, self._indptr),
            shape=(self.v, self.b),
        )
        return m.tocsr()

    def graph(self) -> "IncidenceGraphView":
        return IncidenceGraphView(self.v, self.b, [list(r) for r in self.point_rows])


class IncidenceGraphView:
    """Bipartite adjacency: left vertices ``0..n_left-1``, right ``0..n_right-1``.

    ``left_ids``/``right_ids`` map local vertex numbers back to the parent
    graph when the view is an induced subgraph.
    """

    def __init__(self, n_left: int, n_right: int, adj: list[list[int]],
                 left_ids: Sequence[int] | None = None,
                 right_ids: Sequence[int] | None = None):
        self.n_left = n_left
        self.n_right = n_right
        self.adj = adj
        self.left_ids = tuple(left_ids) if left_ids is not None else tuple(range(n_left))
        self.right_ids = tuple(right_ids) if right_ids is not None else tuple(range(n_right))

    @classmethod
    def from_edges(cls, n_left: int, n_right: int, edges: Iterable[tuple[int, int]]):
        adj: list[list[int]] = [[] for _ in range(n_left)]
        for u, w in sorted(set(edges)):
            adj[u].append(w)
        return cls(n_left, n_right, adj)

    @cached_property
    def radj(self) -> list[list[int]]:
        r: list[list[int]] = [[] for _ in range(self.n_right)]
        for u, nbrs in enumerate(self.adj):
            for w in nbrs:
                r[w].append(u)
        return r

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj)

    def edges(self):
        for u, nbrs in enumerate(self.adj):
            for w in nbrs:
                yield u, w

    def left_degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def right_degrees(self) -> list[int]:
        return [len(a) for a in self.radj]

    def induced(self, left_keep: Iterable[int], right_keep: Iterable[int]) -> "IncidenceGraphView":
        lk = sorted(set(left_keep))
        rk = sorted(set(right_keep))
        rpos = {w: i for i, w in enumerate(rk)}
        adj = [[rpos[w] for w in self.adj[u] if w in rpos] for u in lk]
        return IncidenceGraphView(len(lk), len(rk), adj,
                                  [self.left_ids[u] for u in lk],
                                  [self.right_ids[w] for w in rk])


# ----------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class StructureParams:
    v: int
    b: int
    k: int | None
    r: int | None
    lam: int
    block_lam: int
    is_tactical: bool
    is_design: bool
    is_sis: bool
    is_symmetric_design: bool
    is_semi_biplane: bool
    is_divisible_sbp: bool
    connected: bool
    class_size: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def type_tuple(self):
        return (self.v, self.b, self.k, self.r, self.lam)


def _pair_stats(m: sparse.csr_matrix, want_zero_sets: bool):
    """Max / min / value set of off-diagonal entries of ``m @ m.T``."""
    n = m.shape[0]
    mt = m.T.tocsc()
    chunk = max(1, 4_000_000 // max(n, 1))
    hi, lo = 0, None
    values: set[int] = set()
    zero_sets = [] if want_zero_sets else None
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        c = np.asarray((m[start:stop] @ mt).todense())
        rows = np.arange(stop - start)
        c[rows, rows + start] = -1
        off = c[c >= 0]
        if off.size:
            hi = max(hi, int(off.max()))
            lo = int(off.min()) if lo is None else min(lo, int(off.min()))
            if len(values) <= 8:
                values.update(np.unique(off).tolist())
        if zero_sets is not None:
            c[rows, rows + start] = 0
            for row in c:
                zero_sets.append(tuple(np.flatnonzero(row == 0).tolist()))
    return hi, lo, values, zero_sets


def classify(D: IncidenceStructure) -> StructureParams:
    sizes = D.block_sizes
    degs = D.degrees
    k = int(sizes[0]) if D.b and np.all(sizes == sizes[0]) else None
    r = int(degs[0]) if np.all(degs == degs[0]) else None
    tactical = k is not None and r is not None
    n = D.sparse_matrix()
    lam, lam_min, pair_values, _ = _pair_stats(n, False)
    block_lam, _, block_values, _ = _pair_stats(n.T.tocsr(), False)
    ncomp, _ = connected_components(
        sparse.bmat([[None, n], [n.T, None]]).tocsr(), directed=False)
    connected = ncomp == 1
    is_design = tactical and D.v > 1 and lam >= 1 and lam_min == lam
    is_sis = tactical and D.v == D.b and k == r and lam >= 1 and block_lam == lam
    is_sym = is_design and D.v == D.b
    is_sbp = (is_sis and pair_values <= {0, 2} and block_values <= {0, 2}
              and lam == 2 and connected)
    divisible = False
    d = None
    if is_sbp:
        _, _, _, zero_sets = _pair_stats(n, True)
        divisible = all(zero_sets[q] == zs for zs in zero_sets for q in zs)
        if divisible:
            d = len(zero_sets[0])
            # class size 1 would make every biplane "divisible"
            divisible = d >= 2 and all(len(zs) == d for zs in zero_sets)
            d = d if divisible else None
    return StructureParams(
        v=D.v, b=D.b, k=k, r=r, lam=lam, block_lam=block_lam,
        is_tactical=tactical, is_design=is_design, is_sis=is_sis,
        is_symmetric_design=is_sym, is_semi_biplane=is_sbp,
        is_divisible_sbp=divisible, connected=connected, class_size=d,
    )


def dual(D: IncidenceStructure) -> IncidenceStructure:
    """Swap points and blocks.

    Point i of the dual is the i-th block in the order D was built from, so
    ``dual(dual(D)) == D`` with identical point numbering.
    """
    order = D.source_order.tolist()
    rows = [[order[c] for c in row] for row in D.point_rows]
    labels = None
    if D.block_labels is not None:
        labels = [None] * D.b
        for c, lab in enumerate(D.block_labels):
            labels[order[c]] = lab
    return IncidenceStructure(
        D.b, rows,
        point_labels=labels, block_labels=D.point_labels,
        name=f"dual({D.name})" if D.name else None,
    )


# ----------------------------------------------------------------------
# polarity


@dataclass(frozen=True)
class Polarity:
    """Point-to-block bijection ``sigma``; blocks map back by the inverse."""

    sigma: tuple[int, ...]

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * len(self.sigma)
        for p, blk in enumerate(self.sigma):
            inv[blk] = p
        return tuple(inv)

    def check(self, D: IncidenceStructure) -> None:
        """Raise NotAPolarity unless ``P in sigma(Q) <=> Q in sigma(P)`` for all P, Q."""
        if D.v != D.b or len(self.sigma) != D.v:
            raise NotAPolarity("a polarity needs as many blocks as points")
        if sorted(self.sigma) != list(range(D.b)):
            raise NotAPolarity("sigma is not a bijection onto the blocks")
        masks = D.block_masks
        for p in range(D.v):
            img = masks[self.sigma[p]]
            for q in range(p + 1, D.v):
                if bool(img >> q & 1) != bool(masks[self.sigma[q]] >> p & 1):
                    raise NotAPolarity(f"points {p}, {q} break incidence symmetry")

    def is_polarity(self, D: IncidenceStructure) -> bool:
        try:
            self.check(D)
        except NotAPolarity:
            return False
        return True

    def absolute_points(self, D: IncidenceStructure) -> list[int]:
        masks = D.block_masks
        return [p for p in range(D.v) if masks[self.sigma[p]] >> p & 1]


# ----------------------------------------------------------------------
# .inc file format


def format_inc(D: IncidenceStructure) -> str:
    lines = [f"{D.v} {D.b}"]
    for blk in D.blocks:
        lines.append(" ".join(map(str, (len(blk),) + blk)))
    return "\n".join(lines) + "\n"


def parse_inc(text: str, name: str | None = None) -> IncidenceStructure:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        i += 1
    if i >= len(lines):
        raise ParseError("missing header line", i + 1)
    header = lines[i].split(" ")
    if len(header) != 2 or not all(t.isdigit() for t in header):
        raise ParseError(f"bad header {lines[i]!r}", i + 1)
    v, b = map(int, header)
    body = lines[i + 1:]
    if len(body) != b:
        where = i + 2 + b if len(body) > b else len(lines) + 1
        raise ParseError(f"expected {b} block lines, found {len(body)}", where)
    blocks = []
    seen = set()
    for j, line in enumerate(body):
        lineno = i + 2 + j
        toks = line.split(" ")
        if not line or not all(t.isdigit() for t in toks):
            raise ParseError(f"malformed block line {line!r}", lineno)
        nums = list(map(int, toks))
        size, pts = nums[0], nums[1:]
        if size == 0 or size != len(pts):
            raise ParseError(f"block length {size} does not match {len(pts)} entries", lineno)
        if any(x >= y for x, y in zip(pts, pts[1:])):
            raise ParseError("point indices must be strictly increasing", lineno)
        if pts[-1] >= v:
            raise IndexOutOfRange(f"point index {pts[-1]} >= v = {v}", lineno)
        t = tuple(pts)
        if t in seen:
            raise DuplicateBlock(f"repeated block {pts}", lineno)
        seen.add(t)
        blocks.append(t)
    return IncidenceStructure(v, blocks, name=name)


def read_inc(path) -> IncidenceStructure:
    path = Path(path)
    return parse_inc(path.read_text(), name=path.stem)


def write_inc(D: IncidenceStructure, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_inc(D))


# ----------------------------------------------------------------------
# incidence-free pairs


@dataclass(frozen=True)
class IncidenceFreePair:
    """Point set X and block set Y with no incidences between them."""

    X: tuple[int, ...]
    Y: tuple[int, ...]
    method: str = ""
    seed: int | None = None
    extra: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(sorted(int(x) for x in self.X)))
        object.__setattr__(self, "Y", tuple(sorted(int(y) for y in self.Y)))

    @property
    def equinumerous(self) -> bool:
        return len(self.X) == len(self.Y)

    @property
    def alpha(self) -> int:
        return min(len(self.X), len(self.Y))

    def to_json(self, verified: bool = True) -> dict:
        return {"X": list(self.X), "Y": list(self.Y), "alpha": self.alpha,
                "method": self.method, "seed": self.seed, "verified": verified}

    @classmethod
    def from_json(cls, data: dict) -> "IncidenceFreePair":
        return cls(tuple(data["X"]), tuple(data["Y"]), data.get("method", ""), data.get("seed"))


def is_incidence_free(D: IncidenceStructure, X: Iterable[int], Y: Iterable[int]) -> bool:
    """Full check that no point of X lies on a block of Y."""
    if "point_masks" in D.__dict__ or D.v * D.b <= 1 << 24:
        ymask = 0
        for y in Y:
            ymask |= 1 << int(y)
        pm = D.point_masks
        return all(not pm[int(x)] & ymask for x in X)
    mark = np.zeros(D.v, dtype=bool)
    mark[np.fromiter((int(x) for x in X), dtype=np.int64)] = True
    ys = np.fromiter((int(y) for y in Y), dtype=np.int64)
    if D.block_matrix is not None:
        return not mark[D.block_matrix[ys]].any()
    return not any(mark[D.block(int(y))].any() for y in ys)


def trim_pair(X: Iterable[int], Y: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Drop the highest indices from the larger side."""
    X, Y = sorted(X), sorted(Y)
    n = min(len(X), len(Y))
    return tuple(X[:n]), tuple(Y[:n])
