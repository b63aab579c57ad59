"""Brute-force reference implementations used to cross-check the library.

Nothing here shares code paths with the package beyond building the
structure: everything works on the dense 0/1 incidence matrix.
"""

from __future__ import annotations

import itertools

import numpy as np


def dense(D) -> np.ndarray:
    m = np.zeros((D.v, D.b), dtype=np.int64)
    for j, blk in enumerate(D.blocks):
        m[list(blk), j] = 1
    return m


def edge_list(D) -> list[tuple[int, int]]:
    m = dense(D)
    return [(int(p), int(b)) for p, b in zip(*np.nonzero(m))]


def dominates(D, edges) -> bool:
    m = dense(D)
    ps = {p for p, _ in edges}
    bs = {b for _, b in edges}
    for p, b in zip(*np.nonzero(m)):
        if p not in ps and b not in bs:
            return False
    return True


def is_matching(edges) -> bool:
    ps = [p for p, _ in edges]
    bs = [b for _, b in edges]
    return len(set(ps)) == len(ps) and len(set(bs)) == len(bs)


def incidence_free(D, X, Y) -> bool:
    m = dense(D)
    X, Y = list(X), list(Y)
    if not X or not Y:
        return True
    return int(m[np.ix_(X, Y)].sum()) == 0


def min_maximal_matching(D) -> int:
    """Smallest maximal matching by enumerating every matching."""
    edges = edge_list(D)
    best = [len(edges)]

    def rec(i, used_p, used_b, size):
        if size >= best[0]:
            return
        if i == len(edges):
            # maximal iff every edge touches a used vertex
            if all(p in used_p or b in used_b for p, b in edges):
                best[0] = size
            return
        p, b = edges[i]
        if p not in used_p and b not in used_b:
            rec(i + 1, used_p | {p}, used_b | {b}, size + 1)
        rec(i + 1, used_p, used_b, size)

    rec(0, frozenset(), frozenset(), 0)
    return best[0]


def max_equinumerous_pair(D) -> int:
    """max over point subsets X of min(|X|, #blocks avoiding X)."""
    m = dense(D)
    best = 0
    for mask in range(1, 1 << D.v):
        X = [i for i in range(D.v) if mask >> i & 1]
        avoid = int((m[X].sum(axis=0) == 0).sum())
        best = max(best, min(len(X), avoid))
    return best


def blocks_meeting(D, S) -> int:
    m = dense(D)
    return int((m[list(S)].sum(axis=0) > 0).sum())


def adjacency_spectrum(D) -> np.ndarray:
    """Eigenvalues of the full (v+b) x (v+b) bipartite adjacency matrix."""
    m = dense(D).astype(float)
    v, b = m.shape
    A = np.zeros((v + b, v + b))
    A[:v, v:] = m
    A[v:, :v] = m.T
    return np.sort(np.linalg.eigvalsh(A))[::-1]


def max_pair_count(D) -> int:
    m = dense(D)
    best = 0
    for i, j in itertools.combinations(range(D.v), 2):
        best = max(best, int((m[i] & m[j]).sum()))
    return best


def hall_violated(D, S, Y) -> bool:
    """True when the points S have fewer neighbours outside Y than |S|."""
    m = dense(D)
    keep = [j for j in range(D.b) if j not in set(Y)]
    nbrs = np.nonzero(m[list(S)][:, keep].sum(axis=0))[0]
    return len(nbrs) < len(S)


def poly_mulmod(a, b, modulus, p):
    """Multiply coefficient lists (low to high) modulo a monic modulus over GF(p)."""
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    h = len(modulus) - 1
    for d in range(len(prod) - 1, h - 1, -1):
        c = prod[d]
        if c:
            for i in range(h + 1):
                prod[d - h + i] = (prod[d - h + i] - c * modulus[i]) % p
    out = prod[:h] + [0] * max(0, h - len(prod))
    return out


def max_matching_size(D) -> int:
    """Largest matching by exhaustive augmentation-free recursion over points."""
    m = dense(D)

    def rec(i, used):
        if i == D.v:
            return 0
        best = rec(i + 1, used)
        for j in np.nonzero(m[i])[0]:
            if j not in used:
                best = max(best, 1 + rec(i + 1, used | {int(j)}))
        return best

    return rec(0, frozenset())


def kst_holds(D, S, T) -> bool:
    """e(S, T) <= sqrt(lam) (|S| - 1) sqrt(|T|) + |T| with lam the max pair count."""
    m = dense(D)
    e = int(m[np.ix_(list(S), list(T))].sum()) if S and T else 0
    lam = max_pair_count(D)
    return e <= np.sqrt(lam) * (len(S) - 1) * np.sqrt(len(T)) + len(T) + 1e-9
