"""Incidence-free pairs: exact search, polarity cocliques, maximal arcs,
random sampling and the explicit semi-biplane constructions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import bounds
from .constructions import (
    affine_model,
    baer_model,
    elation_model,
    hd_point,
    homology_model,
    paley_hadamard_design,
    pg_index,
    pg_points_kspaces,
    weight_one_set,
)
from .core import (
    IncidenceFreePair,
    IncidenceStructure,
    Polarity,
    classify,
    is_incidence_free,
    trim_pair,
)
from .errors import (
    BadOrder,
    BudgetExceeded,
    InvalidInput,
    NonSquareOrder,
    NotAPolarity,
    NotDominating,
    NotFound,
    NotIncidenceFree,
    ParameterMismatch,
    TooSmallN,
)
from .gfield import field_of_order
from .matching import DEFAULT_BUDGET, complement_perfect_matching, is_edge_dominating


def _verified(D: IncidenceStructure, pair: IncidenceFreePair) -> IncidenceFreePair:
    if not is_incidence_free(D, pair.X, pair.Y):
        raise NotIncidenceFree(f"{pair.method or 'pair'} has an incidence")
    return pair


def _mask(items: Iterable[int]) -> int:
    m = 0
    for x in items:
        m |= 1 << int(x)
    return m


def _bits(m: int) -> list[int]:
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


# ----------------------------------------------------------------------
# from dominating sets


def dominating_to_ifpair(D: IncidenceStructure, edges) -> IncidenceFreePair:
    """Points and blocks left uncovered by an edge dominating set."""
    edges = [(int(p), int(b)) for p, b in edges]
    if not is_edge_dominating(D, edges):
        raise NotDominating("edge set does not dominate the incidence graph")
    ps = {p for p, _ in edges}
    bs = {b for _, b in edges}
    X = [p for p in range(D.v) if p not in ps]
    Y = [b for b in range(D.b) if b not in bs]
    return _verified(D, IncidenceFreePair(X, Y, "dominating"))


# ----------------------------------------------------------------------
# exact alpha


@dataclass
class AlphaResult:
    alpha: int
    pair: IncidenceFreePair
    certified: bool
    upper_bound: int
    nodes: int

    def to_json(self) -> dict:
        out = self.pair.to_json()
        out.update(certified=self.certified, upper_bound=self.upper_bound, nodes=self.nodes)
        return out


def alpha_upper_bound(D: IncidenceStructure) -> int | None:
    """Closed-form cap on alpha, available for square designs."""
    p = classify(D)
    if p.is_design and p.lam >= 1 and p.v == p.b:
        return bounds.floor_safe(bounds.ifpair_upper_bound(p, "general"))
    return None


def alpha_exact(D: IncidenceStructure, budget: int = DEFAULT_BUDGET) -> AlphaResult:
    """Largest min(|X|, |blocks avoiding X|) over point sets X.

    Only closed sets are visited: a point whose blocks already meet X can be
    added without losing any avoiding block.
    """
    v, b = D.v, D.b
    pm = D.point_masks
    cap = alpha_upper_bound(D)
    cap = min(v, b) if cap is None else min(cap, v, b)
    state = {"best": 0, "X": [], "nodes": 0}

    class Stop(Exception):
        pass

    def dfs(i: int, X: list[int], nmask: int, excluded: list[int]):
        state["nodes"] += 1
        if state["nodes"] > budget or state["best"] >= cap:
            raise Stop
        for e in excluded:
            if pm[e] & ~nmask == 0:
                return
        forced = [q for q in range(i, v) if pm[q] & ~nmask == 0]
        closure = X + forced
        avoid = b - nmask.bit_count()
        val = min(len(closure), avoid)
        if val > state["best"]:
            state["best"] = val
            state["X"] = list(closure)
        fset = set(forced)
        cands = [q for q in range(i, v)
                 if q not in fset and b - (nmask | pm[q]).bit_count() > state["best"]]
        for idx, q in enumerate(cands):
            if len(closure) + len(cands) - idx <= state["best"]:
                break
            nm = nmask | pm[q]
            if b - nm.bit_count() <= state["best"]:
                continue
            dfs(q + 1, X + [f for f in forced if f < q] + [q], nm,
                excluded + [f for f in range(i, q) if f not in fset])

    complete = True
    try:
        dfs(0, [], 0, [])
    except Stop:
        complete = state["best"] >= cap
    X = state["X"]
    nmask = _mask(b for x in X for b in D.point_rows[x])
    Y = [j for j in range(b) if not nmask >> j & 1]
    X, Y = trim_pair(X, Y)
    pair = _verified(D, IncidenceFreePair(X, Y, "exact"))
    if not complete:
        raise BudgetExceeded(f"node budget {budget} exhausted", state["best"], cap,
                             AlphaResult(state["best"], pair, False, cap, state["nodes"]),
                             state["nodes"])
    return AlphaResult(state["best"], pair, True, cap, state["nodes"])


# ----------------------------------------------------------------------
# polarities


@dataclass(frozen=True)
class PolarityGraph:
    """Points adjacent when one lies on the image of the other; loops at absolute points."""

    n: int
    adj: tuple[int, ...]
    absolute: frozenset[int]

    def neighbors(self, p: int) -> list[int]:
        return _bits(self.adj[p])

    def is_coclique(self, C: Iterable[int]) -> bool:
        C = [int(c) for c in C]
        m = _mask(C)
        return all(not self.adj[c] & m for c in C)


def polarity_graph(D: IncidenceStructure, sigma: Polarity | Iterable[int]) -> PolarityGraph:
    pol = sigma if isinstance(sigma, Polarity) else Polarity(tuple(int(s) for s in sigma))
    pol.check(D)
    masks = D.block_masks
    adj = tuple(masks[pol.sigma[p]] for p in range(D.v))
    return PolarityGraph(D.v, adj, frozenset(pol.absolute_points(D)))


def _clique_cover_bound(R: PolarityGraph, cand: int) -> int:
    """Greedy partition of ``cand`` into cliques; a coclique takes one per clique."""
    count = 0
    while cand:
        low = cand & -cand
        u = low.bit_length() - 1
        clique = R.adj[u] & cand
        cand &= ~low
        pool = clique & ~low
        while pool:
            lw = pool & -pool
            w = lw.bit_length() - 1
            cand &= ~lw
            pool &= R.adj[w] & ~lw
        count += 1
    return count


def coclique_exact(R: PolarityGraph, budget: int = DEFAULT_BUDGET) -> list[int]:
    """Maximum coclique of the polarity graph (loops forbid a vertex)."""
    start = _mask(p for p in range(R.n) if p not in R.absolute)
    state = {"best": 0, "set": 0, "nodes": 0}

    def grow(cur: int, size: int, cand: int):
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise BudgetExceeded(f"node budget {budget} exhausted", state["best"],
                                 size + cand.bit_count(), _bits(state["set"]), state["nodes"])
        if not cand:
            if size > state["best"]:
                state["best"], state["set"] = size, cur
            return
        if size + _clique_cover_bound(R, cand) <= state["best"]:
            return
        low = cand & -cand
        u = low.bit_length() - 1
        grow(cur | low, size + 1, cand & ~low & ~R.adj[u])
        grow(cur, size, cand & ~low)

    grow(0, 0, start)
    return _bits(state["set"])


def coclique_greedy(R: PolarityGraph, seed: int = 0) -> list[int]:
    """Random-order greedy coclique."""
    rng = np.random.default_rng(seed)
    cur, blocked = [], 0
    for p in rng.permutation(R.n).tolist():
        if p in R.absolute or blocked >> p & 1:
            continue
        cur.append(p)
        blocked |= R.adj[p] | 1 << p
    return sorted(cur)


def from_coclique(D: IncidenceStructure, sigma: Polarity, C: Iterable[int],
                  method: str = "polarity") -> IncidenceFreePair:
    """(C, sigma(C)) for a coclique C of the polarity graph."""
    C = sorted(int(c) for c in C)
    R = polarity_graph(D, sigma)
    if not R.is_coclique(C):
        raise NotIncidenceFree("set is not a coclique of the polarity graph")
    return _verified(D, IncidenceFreePair(C, [sigma.sigma[c] for c in C], method))


def paley_clique(q: int) -> list[int]:
    """The subfield of order sqrt(q), a clique of the Paley graph."""
    F = field_of_order(q)
    if F.p == 2 or F.h % 2:
        raise NonSquareOrder(f"q = {q} is not an even power of an odd prime")
    K = sorted(F.subfield(F.h // 2))
    for x, y in itertools.combinations(K, 2):
        if F.quadratic_character(F.sub(x, y)) != 1:
            raise AssertionError("subfield is not a Paley clique")
    return K


def ifpair_paley(q: int, clique: Iterable[int] | None = None) -> IncidenceFreePair:
    """Pair (K x {-1}, its image) on HD(q) for a Paley clique K."""
    D, pol = paley_hadamard_design(q)
    K = paley_clique(q) if clique is None else list(clique)
    X = [hd_point(x, -1) for x in K]
    return from_coclique(D, pol, X, method="paley")


# ----------------------------------------------------------------------
# maximal arcs


@dataclass(frozen=True)
class MaximalArc:
    S: tuple[int, ...]
    n: int
    T: tuple[int, ...]
    trivial: bool = False

    def to_pair(self) -> IncidenceFreePair:
        return IncidenceFreePair(self.S, self.T, "arc")

    def to_json(self) -> dict:
        return {"S": list(self.S), "n": self.n, "T": list(self.T), "trivial": self.trivial}


def is_maximal_arc(D: IncidenceStructure, S: Iterable[int]) -> int | None:
    """The order n if every block meets S in 0 or n points, else None."""
    smask = _mask(S)
    if not smask:
        return None
    sizes = {(m & smask).bit_count() for m in D.block_masks} - {0}
    return sizes.pop() if len(sizes) == 1 else None


def dual_arc(D: IncidenceStructure, S: Iterable[int]) -> tuple[int, ...]:
    smask = _mask(S)
    return tuple(j for j, m in enumerate(D.block_masks) if not m & smask)


def make_arc(D: IncidenceStructure, S: Iterable[int]) -> MaximalArc:
    S = tuple(sorted(int(s) for s in S))
    n = is_maximal_arc(D, S)
    if n is None:
        raise InvalidInput("point set is not a maximal arc")
    smask = _mask(S)
    complement_of_block = any(((1 << D.v) - 1) & ~m == smask for m in D.block_masks)
    trivial = n == 1 or len(S) == D.v or complement_of_block
    return MaximalArc(S, n, dual_arc(D, S), trivial)


def maximal_arc_search(D: IncidenceStructure, n: int, budget: int = DEFAULT_BUDGET) -> MaximalArc:
    """Lexicographically first maximal arc of order n in a design."""
    p = classify(D)
    if not p.is_design or p.lam < 1:
        raise InvalidInput("maximal arc search needs a design")
    size = Fraction(p.r * (n - 1), p.lam) + 1
    if n < 1 or size.denominator != 1 or size > p.v:
        raise NotFound(f"no maximal arc of order {n}: size {size} is not feasible")
    size = int(size)
    pts = D.point_rows
    count = [0] * D.b
    chosen: list[int] = []
    nodes = [0]

    def full() -> bool:
        return all(c in (0, n) for c in count)

    def dfs(start: int) -> bool:
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded(f"node budget {budget} exhausted", 0, size, None, nodes[0])
        if len(chosen) == size:
            return full()
        for x in range(start, D.v - (size - len(chosen)) + 1):
            if any(count[j] >= n for j in pts[x]):
                continue
            for j in pts[x]:
                count[j] += 1
            chosen.append(x)
            if dfs(x + 1):
                return True
            chosen.pop()
            for j in pts[x]:
                count[j] -= 1
        return False

    if not dfs(0):
        raise NotFound(f"no maximal arc of order {n}")
    return make_arc(D, chosen)


def denniston_arc(q: int, n: int) -> tuple[IncidenceStructure, MaximalArc]:
    """Maximal arc of order n in PG(2, q), q even, from a pencil of conics.

    With x^2 + beta x y + y^2 irreducible and A an additive subgroup of order
    n, the affine points whose form value lies in A make up the arc.
    """
    F = field_of_order(q)
    if F.p != 2:
        raise BadOrder(f"q = {q} is not a power of two")
    if n <= 1 or n >= q or q % n or n & (n - 1):
        raise BadOrder(f"n = {n} must be a proper divisor of q with 1 < n < q")
    beta = next(b for b in range(1, q)
                if all(F.add(F.mul(x, x), F.add(F.mul(b, x), 1)) for x in range(q)))
    d = n.bit_length() - 1
    A = {F.from_omega_coords(c + (0,) * (F.h - d)) for c in itertools.product((0, 1), repeat=d)}
    coords = []
    for x in range(q):
        for y in range(q):
            val = F.add(F.add(F.mul(x, x), F.mul(beta, F.mul(x, y))), F.mul(y, y))
            if val in A:
                coords.append((1, x, y))
    D = pg_points_kspaces(2, q, 1)
    S = pg_index(F, 2, np.array(coords, dtype=np.int64)).tolist()
    arc = make_arc(D, S)
    if arc.n != n or len(arc.S) != (n - 1) * q + n:
        raise AssertionError("pencil construction did not give a maximal arc")
    return D, arc


def menon_class_arc(D: IncidenceStructure, h: int, index: int = 0) -> MaximalArc:
    """The 2h rows of one diagonal class of a Bush-type matrix, as an arc of the
    epsilon = -1 Menon design."""
    S = range(2 * h * index, 2 * h * (index + 1))
    arc = make_arc(D, S)
    if arc.n != h:
        raise ParameterMismatch("class rows do not form an arc of order h")
    return arc


# ----------------------------------------------------------------------
# random sampling


def random_ifpair(D: IncidenceStructure, seed: int = 0, trials: int = 20,
                  lam: int | None = None) -> IncidenceFreePair:
    """Best of ``trials`` random pairs: points kept with probability ln(k)/(2k),
    Y = blocks avoiding them, larger side trimmed.

    Trial t draws from ``default_rng(seed + t)``.
    """
    k = int(D.block_sizes.max())
    if lam is None and D.v <= 5000:
        lam = classify(D).lam
    hyp = None if lam is None or k < 2 else bool(lam <= k / (64 * math.log(k)))
    prob = math.log(k) / (2 * k) if k >= 2 else 0.0
    best: tuple | None = None
    M = D.block_matrix
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        chosen = rng.random(D.v) < prob
        if M is not None:
            hit = chosen[M].any(axis=1)
        else:
            hit = np.logical_or.reduceat(chosen[D._indices], D._indptr[:-1])
        X = np.flatnonzero(chosen).tolist()
        Y = np.flatnonzero(~hit).tolist()
        X, Y = trim_pair(X, Y)
        key = (-len(X), X, Y)
        if best is None or key < best[0]:
            best = (key, X, Y, t)
    extra = {"p": prob, "trials": trials, "hypothesis_ok": hyp,
             "target": math.ceil(k * math.log(k) / (2 * lam)) if lam and k >= 2 else None}
    if best is None:
        return IncidenceFreePair((), (), "random", seed, extra)
    _, X, Y, t = best
    extra["trial"] = t
    return _verified(D, IncidenceFreePair(X, Y, "random", seed, extra))


# ----------------------------------------------------------------------
# explicit semi-biplane pairs


def ifpair_elation(q: int) -> IncidenceFreePair:
    """x1, m in the span of 1, w, ..., w^f; top coordinate of x2 is 0, of b is 1."""
    model = elation_model(q)
    F = model.field
    h = F.h
    f = h // 2 - 1
    if f < 0:
        raise ParameterMismatch("need q >= 4")
    span = [F.from_omega_coords(c + (0,) * (h - f - 1))
            for c in itertools.product((0, 1), repeat=f + 1)]
    top = [F.omega_coords(x)[h - 1] for x in range(q)]
    X = model.point_set((x1, x2) for x1 in span for x2 in range(q) if top[x2] == 0)
    Y = model.block_set((m, b) for m in span for b in range(q) if top[b] == 1)
    pair = _verified(model.D, IncidenceFreePair(X, Y, "case1"))
    expected = 2 ** (h // 2) * q // 4
    if len(pair.X) != expected or len(pair.Y) != expected:
        raise AssertionError("elation pair has the wrong size")
    return pair


def _unit_windows(F, q: int):
    """Map x -> i with x^(q-1) = zeta^i (zeta a primitive (q+1)-th root), for x != 0."""
    zeta = F.root_of_unity(q + 1)
    power = {}
    z = 1
    for i in range(q + 1):
        power[z] = i
        z = F.mul(z, zeta)
    xs = np.arange(1, F.q, dtype=np.int64)
    vals = F.vpow(xs, q - 1).tolist()
    return {int(x): power[v] for x, v in zip(xs.tolist(), vals)}


def ifpair_homology(q: int) -> IncidenceFreePair:
    model = homology_model(q)
    F = model.field
    Fq = sorted(F.subfield(F.h // 2))
    win = _unit_windows(F, q)
    xw = set(range(0, (q - 1) // 2 + 1))
    yw = set(range(1, (q + 1) // 2 + 1))
    X = model.point_set((x1, x2) for x1 in Fq for x2, i in win.items() if i in xw)
    Y = model.block_set((a, b) for a in Fq for b, i in win.items() if i in yw)
    pair = _verified(model.D, IncidenceFreePair(X, Y, "case2"))
    expected = q * (q * q - 1) // 4
    if len(pair.X) != expected or len(pair.Y) != expected:
        raise AssertionError("homology pair has the wrong size")
    return pair


def ifpair_baer(q: int) -> IncidenceFreePair:
    model = baer_model(q)
    F = model.field
    Fq = sorted(F.subfield(F.h // 2))
    f = (q + 1) // 4
    if f < 1:
        raise ParameterMismatch(f"q = {q} leaves an empty window")
    win = _unit_windows(F, q)
    line = [(1, t) for t in Fq] + [(0, 1)]
    xw = set(range(1, f + 1))
    yw = set(range(f + 1, 2 * f + 1))
    X = model.point_set(ab + (x2,) for ab in line for x2, i in win.items() if i in xw)
    Y = model.block_set(ab + (c,) for ab in line for c, i in win.items() if i in yw)
    if q % 4 == 3:
        Fset = set(Fq)
        Y |= model.block_set((1, F.inv(a), 0) for a in range(F.q) if a not in Fset)
    X, Y = trim_pair(X, Y)
    pair = _verified(model.D, IncidenceFreePair(X, Y, "case3"))
    if q % 4 == 3:
        expected = (q - 1) * (q * q + 2 * q - 1) // 4
    else:
        expected = (q + 1) * (q - 1) * f
    if pair.alpha != expected:
        raise AssertionError(f"Baer pair has size {pair.alpha}, expected {expected}")
    return pair


def ifpair_affine_remark(n: int) -> IncidenceFreePair:
    """Light even vectors against translates by heavy odd vectors (S = unit vectors).

    ``extra["obstruction"]`` lists the heavy even points, none of which has a
    neighbour among the blocks outside Y.
    """
    if n < 6:
        raise TooSmallN("need n >= 6 for an obstructing point")
    model = affine_model(n, weight_one_set(n))
    D = model.D
    w = lambda x: bin(x).count("1")  # noqa: E731
    X = [i for x, i in model.points.items() if w(x) <= n // 2 - 1]
    Y = [j for y, j in model.blocks.items() if w(y) >= (n + 1) // 2 + 1]
    heavy = sorted(i for x, i in model.points.items() if w(x) >= (n + 1) // 2 + 2)
    X, Y = trim_pair(X, Y)
    ymask = _mask(Y)
    for p in heavy:
        if D.point_masks[p] & ~ymask:
            raise AssertionError("heavy point has a neighbour outside Y")
    ones = model.points.get((1 << n) - 1)
    extra = {"obstruction": heavy, "all_ones": ones}
    return _verified(D, IncidenceFreePair(X, Y, "remark", None, extra))


# ----------------------------------------------------------------------
# matching conditions for symmetric incidence structures


@dataclass
class SisConditionReport:
    v_condition: bool
    k_condition: bool
    alpha_condition: bool
    min_degree_condition: bool
    min_degree: int
    degree_threshold: Fraction
    matching_found: bool | None = None
    details: dict = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return (self.v_condition and self.k_condition and self.alpha_condition
                and self.min_degree_condition)

    def to_json(self) -> dict:
        return {"v_condition": self.v_condition, "k_condition": self.k_condition,
                "alpha_condition": self.alpha_condition,
                "min_degree_condition": self.min_degree_condition,
                "min_degree": self.min_degree,
                "degree_threshold": str(self.degree_threshold),
                "all_hold": self.all_hold, "matching_found": self.matching_found}


def check_sis_matching_conditions(D: IncidenceStructure, pair, confirm: bool = True,
                                  params=None) -> SisConditionReport:
    """Evaluate v <= 9k^2/(5 lam), k >= 100, |X| <= k^2/(10 lam) and the minimum
    degree condition 2|X|/k outside X and Y.

    When all hold and ``confirm`` is set, the complement matching is built and
    must exist.
    """
    p = params if params is not None else classify(D)
    if not p.is_sis:
        raise InvalidInput("needs a symmetric incidence structure")
    X, Y = (pair.X, pair.Y) if hasattr(pair, "X") else pair
    X, Y = sorted(set(X)), sorted(set(Y))
    if len(X) != len(Y) or not is_incidence_free(D, X, Y):
        raise InvalidInput("needs an equinumerous incidence-free pair")
    k, lam, a = p.k, p.lam, len(X)
    xset, yset = set(X), set(Y)
    threshold = Fraction(2 * a, k)
    yarr = np.zeros(D.b, dtype=bool)
    yarr[Y] = True
    xarr = np.zeros(D.v, dtype=bool)
    xarr[X] = True
    indptr, ind = D._transpose
    outside_y = np.add.reduceat(~yarr[ind], indptr[:-1]) if len(ind) else np.zeros(D.v)
    outside_x = np.add.reduceat(~xarr[D._indices], D._indptr[:-1])
    pdeg = [int(outside_y[i]) for i in range(D.v) if i not in xset]
    bdeg = [int(outside_x[j]) for j in range(D.b) if j not in yset]
    min_deg = min(pdeg + bdeg) if pdeg + bdeg else 0
    rep = SisConditionReport(
        v_condition=5 * lam * p.v <= 9 * k * k,
        k_condition=k >= 100,
        alpha_condition=10 * lam * a <= k * k,
        min_degree_condition=min_deg >= threshold,
        min_degree=min_deg,
        degree_threshold=threshold,
    )
    if confirm and rep.all_hold:
        cert = complement_perfect_matching(D, X, Y)
        rep.matching_found = cert.perfect
        if not cert.perfect:
            raise AssertionError("conditions hold but the complement has no perfect matching")
    return rep
