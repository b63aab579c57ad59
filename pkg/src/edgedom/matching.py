"""Bipartite matchings in incidence graphs, Hall certificates, edge
dominating sets and an exact solver for the edge domination number.

Edges are always written ``(point, block)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import IncidenceGraphView, IncidenceStructure, classify, is_incidence_free
from .errors import (
    BudgetExceeded,
    InvalidInput,
    IsolatedPoint,
    NoPerfectMatching,
    NotBiregular,
    NotIncidenceFree,
    UnequalSides,
    WrongOrder,
)

DEFAULT_BUDGET = 10**7


# ----------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class Matching:
    edges: tuple[tuple[int, int], ...]
    cover: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    @property
    def size(self) -> int:
        return len(self.edges)

    @property
    def covered_points(self) -> frozenset[int]:
        return frozenset(p for p, _ in self.edges)

    @property
    def covered_blocks(self) -> frozenset[int]:
        return frozenset(b for _, b in self.edges)


@dataclass(frozen=True)
class EdgeDominatingSet:
    edges: tuple[tuple[int, int], ...]
    is_maximal_matching: bool

    @property
    def size(self) -> int:
        return len(self.edges)

    def to_json(self) -> dict:
        return {"edges": [list(e) for e in self.edges], "size": self.size,
                "is_maximal_matching": self.is_maximal_matching}


@dataclass(frozen=True)
class HallCertificate:
    """Either a perfect matching or a point set S with |N(S)| < |S|.

    ``violator`` and ``neighborhood`` use indices of the parent structure;
    the neighbourhood is taken inside the induced subgraph that was tested.
    """

    matching: Matching | None
    violator: tuple[int, ...] | None = None
    neighborhood: tuple[int, ...] | None = None

    @property
    def perfect(self) -> bool:
        return self.matching is not None

    def to_json(self) -> dict:
        if self.perfect:
            return {"perfect": True, "edges": [list(e) for e in self.matching.edges]}
        return {"perfect": False, "violator": list(self.violator),
                "neighborhood": list(self.neighborhood)}


# ----------------------------------------------------------------------
# maximum matching


def _hopcroft_karp(n_left: int, n_right: int, adj: Sequence[Sequence[int]],
                   mate_l: list[int] | None = None, mate_r: list[int] | None = None):
    """Layered augmenting paths; vertices are scanned in index order.

    An optional starting matching is extended, never shrunk: augmenting
    keeps every matched vertex matched.
    """
    mate_l = list(mate_l) if mate_l is not None else [-1] * n_left
    mate_r = list(mate_r) if mate_r is not None else [-1] * n_right
    dead = -(1 << 30)
    while True:
        dist = [-1] * n_left
        queue = [u for u in range(n_left) if mate_l[u] < 0]
        for u in queue:
            dist[u] = 0
        found = False
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for w in adj[u]:
                m = mate_r[w]
                if m < 0:
                    found = True
                elif dist[m] < 0:
                    dist[m] = dist[u] + 1
                    queue.append(m)
        if not found:
            break
        it = [0] * n_left
        for s in range(n_left):
            if mate_l[s] >= 0:
                continue
            stack = [s]
            path: list[int] = []
            while stack:
                u = stack[-1]
                if it[u] < len(adj[u]):
                    w = adj[u][it[u]]
                    it[u] += 1
                    m = mate_r[w]
                    if m < 0:
                        path.append(w)
                        for uu, ww in zip(stack, path):
                            mate_l[uu] = ww
                            mate_r[ww] = uu
                        break
                    if dist[m] == dist[u] + 1:
                        path.append(w)
                        stack.append(m)
                else:
                    dist[u] = dead
                    stack.pop()
                    if path:
                        path.pop()
    return mate_l, mate_r


def _konig_cover(G: IncidenceGraphView, mate_l, mate_r):
    """Vertex cover of the same size as the matching (alternating reachability)."""
    seen_l = [False] * G.n_left
    seen_r = [False] * G.n_right
    queue = [u for u in range(G.n_left) if mate_l[u] < 0]
    for u in queue:
        seen_l[u] = True
    while queue:
        u = queue.pop()
        for w in G.adj[u]:
            if not seen_r[w]:
                seen_r[w] = True
                m = mate_r[w]
                if m >= 0 and not seen_l[m]:
                    seen_l[m] = True
                    queue.append(m)
    return seen_l, seen_r


def max_matching(G: IncidenceGraphView) -> Matching:
    """Maximum matching with a Koenig vertex cover certificate."""
    mate_l, mate_r = _hopcroft_karp(G.n_left, G.n_right, G.adj)
    seen_l, seen_r = _konig_cover(G, mate_l, mate_r)
    cover = (tuple(G.left_ids[u] for u in range(G.n_left) if not seen_l[u]),
             tuple(G.right_ids[w] for w in range(G.n_right) if seen_r[w]))
    edges = tuple(sorted((G.left_ids[u], G.right_ids[w])
                         for u, w in enumerate(mate_l) if w >= 0))
    return Matching(edges, cover)


def biregular_cover_matching(G: IncidenceGraphView) -> Matching:
    """Matching covering the smaller side of a biregular bipartite graph."""
    ld, rd = G.left_degrees(), G.right_degrees()
    if len(set(ld)) > 1 or len(set(rd)) > 1:
        raise NotBiregular("degrees are not constant on each side")
    M = max_matching(G)
    if M.size != min(G.n_left, G.n_right):
        raise AssertionError("biregular graph without a covering matching")
    return M


# ----------------------------------------------------------------------
# edge dominating sets


def _check_edges(D: IncidenceStructure, edges: Iterable[tuple[int, int]]):
    pm = D.point_masks
    out = []
    for p, b in edges:
        p, b = int(p), int(b)
        if not (0 <= p < D.v and 0 <= b < D.b and pm[p] >> b & 1):
            raise InvalidInput(f"({p}, {b}) is not an edge of the incidence graph")
        out.append((p, b))
    return out


def is_matching(edges: Iterable[tuple[int, int]]) -> bool:
    ps, bs = set(), set()
    for p, b in edges:
        if p in ps or b in bs:
            return False
        ps.add(p)
        bs.add(b)
    return True


def is_edge_dominating(D: IncidenceStructure, edges: Iterable[tuple[int, int]]) -> bool:
    """Every incidence shares a point or a block with some member."""
    edges = _check_edges(D, edges)
    ps = {p for p, _ in edges}
    bs = {b for _, b in edges}
    return is_incidence_free(D, set(range(D.v)) - ps, set(range(D.b)) - bs)


def is_maximal_matching(D: IncidenceStructure, edges) -> bool:
    edges = list(edges)
    return is_matching(edges) and is_edge_dominating(D, edges)


def to_maximal_matching(D: IncidenceStructure, edges) -> EdgeDominatingSet:
    """Turn an edge dominating set into a maximal matching that is no larger.

    While two members share a vertex u, take one of them (u, w): move it to an
    uncovered neighbour of w if there is one, otherwise drop it.  Domination
    is preserved and the number of shared endpoints strictly drops.
    """
    edges = sorted(set(_check_edges(D, edges)))
    if not is_edge_dominating(D, edges):
        raise InvalidInput("input is not an edge dominating set")
    pts = D.point_rows
    blks = D.blocks
    # vertices as ("p", i) / ("b", j) encoded by sign: points >= 0, blocks < 0
    deg: dict[int, int] = {}
    cur = set()
    for p, b in edges:
        cur.add((p, b))
        deg[p] = deg.get(p, 0) + 1
        deg[~b] = deg.get(~b, 0) + 1
    while True:
        clash = None
        for p, b in sorted(cur):
            if deg[p] > 1:
                clash = ((p, b), "p")
                break
            if deg[~b] > 1:
                clash = ((p, b), "b")
                break
        if clash is None:
            break
        (p, b), shared = clash
        cur.discard((p, b))
        deg[p] -= 1
        deg[~b] -= 1
        if shared == "p":
            # other endpoint is block b
            free = [x for x in blks[b] if deg.get(x, 0) == 0]
            if free:
                cur.add((free[0], b))
                deg[free[0]] = 1
                deg[~b] += 1
        else:
            free = [y for y in pts[p] if deg.get(~y, 0) == 0]
            if free:
                cur.add((p, free[0]))
                deg[~free[0]] = 1
                deg[p] += 1
    out = tuple(sorted(cur))
    if not is_maximal_matching(D, out):
        raise AssertionError("conversion lost domination")
    return EdgeDominatingSet(out, True)


def dominating_trivial(D: IncidenceStructure) -> EdgeDominatingSet:
    """One incident block per point, reduced to a maximal matching (size <= v)."""
    if np.any(D.degrees == 0):
        raise IsolatedPoint("some point lies in no block")
    edges = [(p, D.point_rows[p][0]) for p in range(D.v)]
    return to_maximal_matching(D, edges)


def dominating_v_minus_1(D: IncidenceStructure, point: int = 0) -> EdgeDominatingSet:
    """Size v-1 set for a design with r < v.

    The blocks through ``point`` are matched into the other points (a
    biregular graph), then the matching is grown to a maximum matching of the
    incidence graph with ``point`` removed.
    """
    if np.any(D.degrees == 0):
        raise IsolatedPoint("some point lies in no block")
    params = classify(D)
    if not params.is_design:
        raise InvalidInput("needs a design")
    if params.r >= params.v:
        raise InvalidInput("r >= v: no dominating set smaller than v exists")
    through = list(D.point_rows[point])
    others = [p for p in range(D.v) if p != point]
    H = D.graph().induced(others, through)
    # right side = blocks through the point; cover them
    Hb = IncidenceGraphView(H.n_right, H.n_left, H.radj)
    M = biregular_cover_matching(Hb)
    G = D.graph().induced(others, range(D.b))
    pos_l = {p: i for i, p in enumerate(G.left_ids)}
    mate_l = [-1] * G.n_left
    mate_r = [-1] * G.n_right
    for j, i in M.edges:  # (local block, local point) in Hb
        p, b = H.left_ids[i], H.right_ids[j]
        mate_l[pos_l[p]] = b
        mate_r[b] = pos_l[p]
    mate_l, _ = _hopcroft_karp(G.n_left, G.n_right, G.adj, mate_l, mate_r)
    edges = tuple(sorted((G.left_ids[u], w) for u, w in enumerate(mate_l) if w >= 0))
    if not is_maximal_matching(D, edges):
        raise AssertionError("construction is not dominating")
    return EdgeDominatingSet(edges, True)


def complement_perfect_matching(D: IncidenceStructure, X: Iterable[int], Y: Iterable[int]) -> HallCertificate:
    """Perfect matching between the points outside X and the blocks outside Y,
    or a Hall violator on the point side."""
    X, Y = set(X), set(Y)
    left = [p for p in range(D.v) if p not in X]
    right = [b for b in range(D.b) if b not in Y]
    if len(left) != len(right):
        raise UnequalSides(f"{len(left)} points versus {len(right)} blocks")
    G = D.graph().induced(left, right)
    mate_l, mate_r = _hopcroft_karp(G.n_left, G.n_right, G.adj)
    if all(w >= 0 for w in mate_l):
        edges = tuple(sorted((G.left_ids[u], G.right_ids[w]) for u, w in enumerate(mate_l)))
        return HallCertificate(Matching(edges))
    seen_l, seen_r = _konig_cover(G, mate_l, mate_r)
    S = tuple(G.left_ids[u] for u in range(G.n_left) if seen_l[u])
    N = tuple(G.right_ids[w] for w in range(G.n_right) if seen_r[w])
    return HallCertificate(None, S, N)


def _pair_sets(pair):
    if hasattr(pair, "X"):
        return set(pair.X), set(pair.Y)
    X, Y = pair
    return set(X), set(Y)


def dominating_from_ifpair(D: IncidenceStructure, pair) -> EdgeDominatingSet:
    """Perfect matching of the complement of an incidence-free pair (size v - |X|)."""
    X, Y = _pair_sets(pair)
    if not is_incidence_free(D, X, Y):
        raise NotIncidenceFree("pair has an incidence")
    cert = complement_perfect_matching(D, X, Y)
    if not cert.perfect:
        raise NoPerfectMatching(
            f"Hall violator of size {len(cert.violator)} with "
            f"{len(cert.neighborhood)} neighbours", cert)
    edges = cert.matching.edges
    if not is_maximal_matching(D, edges):
        raise AssertionError("complement matching is not dominating")
    return EdgeDominatingSet(edges, True)


def maximal_arc_order(D: IncidenceStructure, S: Iterable[int]) -> int | None:
    """The n with |B cap S| in {0, n} for every block, or None."""
    smask = 0
    for s in S:
        smask |= 1 << int(s)
    if not smask:
        return None
    sizes = {(m & smask).bit_count() for m in D.block_masks} - {0}
    return sizes.pop() if len(sizes) == 1 else None


def arc_to_dominating(D: IncidenceStructure, arc) -> EdgeDominatingSet:
    """Matching on the complement of a maximal arc and its dual arc."""
    S = set(arc.S if hasattr(arc, "S") else arc)
    p = classify(D)
    if not p.is_design:
        raise InvalidInput("needs a design")
    target = (p.k - p.r + math.sqrt((p.r - p.k) ** 2 + 4 * (p.r - p.lam))) / 2
    if abs(target - round(target)) > 1e-9:
        raise WrongOrder(f"extremal arc order {target:.6g} is not an integer")
    n = maximal_arc_order(D, S)
    if n is None:
        raise InvalidInput("point set is not a maximal arc")
    if abs(n - target) > 1e-9:
        raise WrongOrder(f"arc order {n} differs from the extremal order {target:.6g}")
    smask = sum(1 << s for s in S)
    T = {j for j, m in enumerate(D.block_masks) if not m & smask}
    G = D.graph().induced(set(range(D.v)) - S, set(range(D.b)) - T)
    M = biregular_cover_matching(G)
    if not is_maximal_matching(D, M.edges):
        raise AssertionError("arc matching is not dominating")
    return EdgeDominatingSet(M.edges, True)


def pg_lines_dominating(D: IncidenceStructure, x: int | None = None, line: int | None = None) -> EdgeDominatingSet:
    """Size theta_n - q set for points/lines of PG(n, q), n >= 3.

    Fix an incident point-line pair (x, l).  The points off l and the lines
    other than l meeting l outside x form a q-regular bipartite graph; its
    perfect matching plus the edge (x, l) is a maximal matching.
    """
    p = classify(D)
    if not p.is_design or p.lam != 1:
        raise InvalidInput("needs a linear space")
    line = 0 if line is None else line
    on_line = list(D.blocks[line])
    x = on_line[0] if x is None else x
    if x not in on_line:
        raise InvalidInput("point is not on the line")
    rest = set(on_line) - {x}
    S = [q for q in range(D.v) if q not in set(on_line)]
    T = [j for j in range(D.b) if j != line and rest & set(D.blocks[j])]
    M = biregular_cover_matching(D.graph().induced(S, T))
    edges = tuple(sorted(M.edges + ((x, line),)))
    if not is_maximal_matching(D, edges):
        raise AssertionError("construction is not dominating")
    return EdgeDominatingSet(edges, True)


# ----------------------------------------------------------------------
# exact edge domination number
#
# For a point set X let N(X) be the blocks meeting X.  Taking X and the
# blocks avoiding X as the vertices left uncovered, the cheapest edge set
# covering the rest C = (P \ X) + N(X) has size |C| - nu(G[C]), and gamma_e is
# the minimum of this over all X.  Adding a point whose blocks already lie in
# N(X) never hurts, so only closed sets X need to be examined.


def _bitset_matching(left: list[int], masks: list[int], allowed: int) -> int:
    """Maximum matching size between ``left`` points and the ``allowed`` blocks."""
    mate: dict[int, int] = {}

    def augment(u: int, seen: list[int]) -> bool:
        cand = masks[u] & allowed & ~seen[0]
        while cand:
            low = cand & -cand
            w = low.bit_length() - 1
            seen[0] |= low
            m = mate.get(w)
            if m is None or augment(m, seen):
                mate[w] = u
                return True
            cand &= ~low
        return False

    size = 0
    for u in left:
        if augment(u, [0]):
            size += 1
    return size


def _cost_witness(D: IncidenceStructure, X: set[int]) -> list[tuple[int, int]]:
    """Edge dominating set of size |C| - nu(G[C]) for the vertex cover C of X."""
    pm = D.point_masks
    nmask = 0
    for x in X:
        nmask |= pm[x]
    left = [p for p in range(D.v) if p not in X]
    right = [j for j in range(D.b) if nmask >> j & 1]
    G = D.graph().induced(left, right)
    M = max_matching(G)
    edges = list(M.edges)
    used_p = {p for p, _ in edges}
    used_b = {b for _, b in edges}
    for p in left:
        if p not in used_p:
            edges.append((p, D.point_rows[p][0]))
    for b in right:
        if b not in used_b:
            edges.append((D.blocks[b][0], b))
    return edges


@dataclass
class GammaResult:
    gamma: int
    edges: tuple[tuple[int, int], ...]
    certified: bool
    lower_bound: int
    nodes: int

    def to_json(self) -> dict:
        return {"gamma": self.gamma, "edges": [list(e) for e in self.edges],
                "certified": self.certified, "lower_bound": self.lower_bound,
                "nodes": self.nodes}


def gamma_lower_bound(D: IncidenceStructure, spectral: bool = True) -> int:
    """Best certified lower bound used to stop the exact search early."""
    from . import bounds

    p = classify(D)
    nu = max_matching(D.graph()).size
    lb = (nu + 1) // 2
    if p.is_design and p.lam >= 1:
        lb = max(lb, bounds.ceil_safe(bounds.gamma_lower_counting(p, "general")))
        if p.r >= p.v:
            lb = max(lb, p.v)
    if spectral and p.is_sis and p.lam >= 1 and p.v <= bounds.SPECTRUM_LIMIT:
        spec = bounds.spectrum_exact(D)
        lb = max(lb, bounds.ceil_safe(bounds.gamma_lower_spectral(p, spec)))
    return lb


def gamma_exact(D: IncidenceStructure, budget: int = DEFAULT_BUDGET,
                initial: Iterable[tuple[int, int]] | None = None) -> GammaResult:
    """Minimum size of a maximal matching of the incidence graph.

    Depth-first search over closed point sets X in index order, pruned by
    max(|N(X)|, v - |X| - #viable later points) >= best.
    """
    if np.any(D.degrees == 0):
        raise IsolatedPoint("some point lies in no block")
    lb = gamma_lower_bound(D)
    best = dominating_trivial(D).edges
    if initial is not None:
        cand = to_maximal_matching(D, initial).edges
        if len(cand) < len(best):
            best = cand
    p = classify(D)
    if p.is_design and p.r < p.v and len(best) > p.v - 1:
        best = dominating_v_minus_1(D).edges
    state = {"best": len(best), "X": None, "nodes": 0}
    if state["best"] <= lb:
        return GammaResult(len(best), tuple(best), True, lb, 0)

    v = D.v
    pm = D.point_masks

    class Stop(Exception):
        pass

    def evaluate(X: list[int], nmask: int):
        nb = nmask.bit_count()
        lo = max(v - len(X), nb)
        if lo >= state["best"]:
            return
        xs = set(X)
        left = [q for q in range(v) if q not in xs]
        cost = len(left) + nb - _bitset_matching(left, pm, nmask)
        if cost < state["best"]:
            state["best"] = cost
            state["X"] = list(X)

    def dfs(i: int, X: list[int], nmask: int, excluded: list[int]):
        # X holds the chosen points below i; excluded points must stay unblocked
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise Stop
        if state["best"] <= lb:
            raise Stop
        for e in excluded:
            if pm[e] & ~nmask == 0:
                return
        forced = [q for q in range(i, v) if pm[q] & ~nmask == 0]
        closure = X + forced
        evaluate(closure, nmask)
        fset = set(forced)
        cands = [q for q in range(i, v)
                 if q not in fset and (nmask | pm[q]).bit_count() < state["best"]]
        for idx, q in enumerate(cands):
            nm = nmask | pm[q]
            if nm.bit_count() >= state["best"]:
                continue
            rest = len(cands) - idx - 1
            if v - len(closure) - 1 - rest >= state["best"]:
                break
            dfs(q + 1,
                X + [f for f in forced if f < q] + [q],
                nm,
                excluded + [f for f in range(i, q) if f not in fset])

    complete = True
    try:
        dfs(0, [], 0, [])
    except Stop:
        complete = state["best"] <= lb
    if state["X"] is not None:
        best = to_maximal_matching(D, _cost_witness(D, set(state["X"]))).edges
    gamma = len(best)
    if not is_maximal_matching(D, best):
        raise AssertionError("witness is not a maximal matching")
    if not complete:
        raise BudgetExceeded(f"node budget {budget} exhausted", lb, gamma,
                             GammaResult(gamma, tuple(best), False, lb, state["nodes"]),
                             state["nodes"])
    return GammaResult(gamma, tuple(best), True, lb, state["nodes"])
