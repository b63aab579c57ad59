import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from edgedom import bounds as B
from edgedom import constructions as C
from edgedom import ifpairs as I
from edgedom import matching as M
from edgedom.core import IncidenceFreePair, IncidenceStructure, Polarity, classify
from edgedom.errors import (BadOrder, NonSquareOrder, NotAPolarity, NotDominating,
                            NotFound, NotIncidenceFree, TooSmallN)

import oracles
from strategies import structures


def check_pair(D, pair, size=None):
    assert oracles.incidence_free(D, pair.X, pair.Y)
    if size is not None:
        assert len(pair.X) == len(pair.Y) == size


def arc_oracle(D, S, n):
    m = oracles.dense(D)
    meets = m[list(S)].sum(axis=0)
    return set(np.unique(meets)) <= {0, n}


def symmetric_cap(p):
    return p.k * (math.sqrt(p.k - p.lam) - 1) / p.lam + 1


SMALL_SYMMETRIC = {
    "fano": lambda: C.pg_points_kspaces(2, 2, 1),
    "pg23": lambda: C.pg_points_kspaces(2, 3, 1),
    "pg24": lambda: C.pg_points_kspaces(2, 4, 1),
    "hd5": lambda: C.paley_hadamard_design(5)[0],
    "menon16": lambda: C.menon_from_hadamard(C.bush_type_hadamard(2), -1),
    "pg32planes": lambda: C.pg_points_kspaces(3, 2, 2),
}


# ---------------------------------------------------------------- dominating <-> pair


def test_dominating_to_ifpair_fano(fano):
    res = M.gamma_exact(fano)
    pair = I.dominating_to_ifpair(fano, res.edges)
    assert len(pair.X) >= 7 - res.gamma and len(pair.Y) >= 7 - res.gamma
    check_pair(fano, pair)


def test_dominating_to_ifpair_trivial(fano):
    eds = M.dominating_trivial(fano)
    pair = I.dominating_to_ifpair(fano, eds.edges)
    check_pair(fano, pair)


def test_dominating_to_ifpair_rejects(fano):
    with pytest.raises(NotDominating):
        I.dominating_to_ifpair(fano, [(0, fano.point_rows[0][0])])


@settings(max_examples=40)
@given(structures(max_v=6, max_b=7, covered=True))
def test_dominating_to_ifpair_random(D):
    res = M.gamma_exact(D)
    pair = I.dominating_to_ifpair(D, res.edges)
    check_pair(D, pair)
    assert len(pair.X) >= D.v - res.gamma and len(pair.Y) >= D.b - res.gamma


# ---------------------------------------------------------------- alpha


@settings(max_examples=80)
@given(structures(max_v=8, max_b=9))
def test_alpha_exact_matches_enumeration(D):
    res = I.alpha_exact(D)
    assert res.certified
    assert res.alpha == oracles.max_equinumerous_pair(D)
    check_pair(D, res.pair, res.alpha)


def test_alpha_fano(fano):
    assert I.alpha_exact(fano).alpha == 2


def test_alpha_pg24(pg24):
    assert I.alpha_exact(pg24).alpha == 6


def test_alpha_point_on_every_block():
    D = IncidenceStructure(3, [[0, 1], [0, 2], [0]])
    assert I.alpha_exact(D).alpha == oracles.max_equinumerous_pair(D) == 1
    D = IncidenceStructure(1, [[0]])
    assert I.alpha_exact(D).alpha == 0


@pytest.mark.parametrize("name", list(SMALL_SYMMETRIC))
def test_alpha_within_symmetric_cap(name):
    D = SMALL_SYMMETRIC[name]()
    p = classify(D)
    a = I.alpha_exact(D).alpha
    assert a <= symmetric_cap(p) + 1e-9
    assert a <= B.ifpair_upper_bound(p, "general") + 1e-9


@pytest.mark.parametrize("name", ["fano", "pg23", "hd5"])
def test_alpha_against_brute_force(name):
    D = SMALL_SYMMETRIC[name]()
    assert I.alpha_exact(D).alpha == oracles.max_equinumerous_pair(D)


def test_alpha_cap_not_applied_when_b_exceeds_v(pg32_lines):
    # eight affine points against the seven lines of the removed plane
    assert I.alpha_upper_bound(pg32_lines) is None
    res = I.alpha_exact(pg32_lines)
    assert res.alpha == 7
    check_pair(pg32_lines, res.pair, 7)


# ---------------------------------------------------------------- polarity


def test_polarity_graph_pg24(pg24):
    sigma = C.standard_polarity(2, 4, pg24)
    R = I.polarity_graph(pg24, sigma)
    assert len(R.absolute) == 5
    m = oracles.dense(pg24)
    for p in range(21):
        for q in range(21):
            assert bool(R.adj[p] >> q & 1) == bool(m[q, sigma.sigma[p]])
    C_ = I.coclique_exact(R)
    assert R.is_coclique(C_) and not set(C_) & R.absolute
    free = [p for p in range(21) if p not in R.absolute]
    bigger = len(C_) + 1
    assert not any(R.is_coclique(S) for S in itertools.combinations(free, bigger))
    pair = I.from_coclique(pg24, sigma, C_)
    check_pair(pg24, pair, len(C_))
    assert len(C_) <= I.alpha_exact(pg24).alpha


def test_hd9_paley_pair(hd9):
    D, pol = hd9
    K = I.paley_clique(9)
    assert K == [0, 1, 2]
    pair = I.ifpair_paley(9)
    assert pair.X == tuple(C.hd_point(x, -1) for x in K)
    check_pair(D, pair, 3)
    assert I.polarity_graph(D, pol).is_coclique(pair.X)


def test_absolute_point_rejected(fano):
    sigma = C.standard_polarity(2, 2, fano)
    ab = sigma.absolute_points(fano)[0]
    with pytest.raises(NotIncidenceFree):
        I.from_coclique(fano, sigma, [ab])


def test_bad_polarity_rejected(fano):
    with pytest.raises(NotAPolarity):
        I.polarity_graph(fano, Polarity((0,) * 7))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_greedy_coclique(pg24, seed):
    sigma = C.standard_polarity(2, 4, pg24)
    R = I.polarity_graph(pg24, sigma)
    C_ = I.coclique_greedy(R, seed)
    assert R.is_coclique(C_) and not set(C_) & R.absolute
    check_pair(pg24, I.from_coclique(pg24, sigma, C_))


def test_paley_cliques():
    from edgedom.gfield import field_of_order
    F = field_of_order(25)
    K = I.paley_clique(25)
    assert len(K) == 5
    assert all(F.quadratic_character(F.sub(x, y)) == 1 for x, y in itertools.combinations(K, 2))
    with pytest.raises(NonSquareOrder):
        I.paley_clique(27)


# ---------------------------------------------------------------- arcs


def assert_arc_arithmetic(D, arc):
    p = classify(D)
    assert arc_oracle(D, arc.S, arc.n)
    assert len(arc.S) * p.lam == p.lam + p.r * (arc.n - 1)
    m = oracles.dense(D)
    on_T = m[:, list(arc.T)].sum(axis=1)
    assert set(np.unique(on_T)) <= {0, (p.r - p.lam) // arc.n}
    assert (p.r - p.lam) % arc.n == 0
    check_pair(D, IncidenceFreePair(arc.S, arc.T))


def test_hyperoval_pg24(pg24):
    arc = I.maximal_arc_search(pg24, 2)
    assert len(arc.S) == 6 and arc.n == 2 and not arc.trivial
    assert I.is_maximal_arc(pg24, arc.S) == 2
    assert_arc_arithmetic(pg24, arc)


def test_fano_trivial_arc(fano):
    arc = I.maximal_arc_search(fano, 2)
    assert len(arc.S) == 4 and arc.trivial
    assert_arc_arithmetic(fano, arc)


def test_pg23_no_hyperoval():
    with pytest.raises(NotFound):
        I.maximal_arc_search(C.pg_points_kspaces(2, 3, 1), 2)


def test_is_maximal_arc_negative(fano):
    assert I.is_maximal_arc(fano, [0, 1]) is None
    assert I.dual_arc(fano, range(7)) == ()


@pytest.mark.parametrize("q,n", [(4, 2), (8, 2), (8, 4), (16, 2), (16, 4), (16, 8)])
def test_denniston(q, n):
    D, arc = I.denniston_arc(q, n)
    assert len(arc.S) == (n - 1) * q + n
    assert_arc_arithmetic(D, arc)


@pytest.mark.parametrize("q,n", [(8, 3), (9, 3), (8, 8), (8, 1)])
def test_denniston_bad_order(q, n):
    with pytest.raises(BadOrder):
        I.denniston_arc(q, n)


def test_menon_class_arcs(bush2):
    D = C.menon_from_hadamard(bush2, -1)
    for i in range(4):
        arc = I.menon_class_arc(D, 2, i)
        assert arc.n == 2 and len(arc.S) == 4
        assert_arc_arithmetic(D, arc)


# ---------------------------------------------------------------- random sampler


def test_random_fano_bounded_by_alpha(fano):
    pair = I.random_ifpair(fano, seed=3, trials=100)
    check_pair(fano, pair)
    assert pair.alpha <= 2


def test_random_zero_trials(fano):
    pair = I.random_ifpair(fano, trials=0)
    assert pair.X == () and pair.Y == ()


def test_random_best_over_trials(pg24):
    whole = I.random_ifpair(pg24, seed=10, trials=6)
    singles = [I.random_ifpair(pg24, seed=10 + t, trials=1) for t in range(6)]
    best = max(s.alpha for s in singles)
    assert whole.alpha == best
    t = whole.extra["trial"]
    assert (whole.X, whole.Y) == (singles[t].X, singles[t].Y)
    ties = [s for s in singles if s.alpha == best]
    assert whole.X == min(s.X for s in ties)


def test_random_deterministic(pg24):
    a = I.random_ifpair(pg24, seed=5, trials=4)
    b = I.random_ifpair(pg24, seed=5, trials=4)
    assert a.to_json() == b.to_json()
    assert a.seed == 5
    assert a.extra["p"] == pytest.approx(math.log(5) / 10)


def test_random_never_beats_alpha(pg24):
    a = I.alpha_exact(pg24).alpha
    for seed in range(5):
        assert I.random_ifpair(pg24, seed=seed, trials=10).alpha <= a


# ---------------------------------------------------------------- explicit pairs


@pytest.mark.parametrize("q,size", [(4, 2), (8, 4), (16, 16), (32, 32)])
def test_elation_pair(q, size):
    pair = I.ifpair_elation(q)
    h = q.bit_length() - 1
    assert size == 2 ** (h // 2) * q // 4
    check_pair(C.sbp_elation(q), pair, size)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_homology_pair(q):
    pair = I.ifpair_homology(q)
    check_pair(C.sbp_homology(q), pair, q * (q * q - 1) // 4)


@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_baer_pair(q):
    f = (q + 1) // 4
    want = (q - 1) * (q * q + 2 * q - 1) // 4 if q % 4 == 3 else (q + 1) * (q - 1) * f
    check_pair(C.sbp_baer(q), I.ifpair_baer(q), want)


def test_small_semi_biplanes_never_beat_alpha():
    D = C.sbp_elation(4)
    assert I.ifpair_elation(4).alpha <= I.alpha_exact(D).alpha


def test_remark_pair():
    pair = I.ifpair_affine_remark(6)
    D = C.sbp_affine_binary(6, C.weight_one_set(6))
    check_pair(D, pair, 6)
    ones = pair.extra["all_ones"]
    assert ones in pair.extra["obstruction"]
    # the all-ones point has no neighbour outside Y
    m = oracles.dense(D)
    outside = [j for j in range(D.b) if j not in set(pair.Y)]
    assert m[ones, outside].sum() == 0


def test_remark_n7():
    pair = I.ifpair_affine_remark(7)
    D = C.sbp_affine_binary(7, C.weight_one_set(7))
    check_pair(D, pair)
    assert pair.extra["obstruction"]
    assert not M.complement_perfect_matching(D, pair.X, pair.Y).perfect


def test_remark_too_small():
    with pytest.raises(TooSmallN):
        I.ifpair_affine_remark(4)


# ---------------------------------------------------------------- SIS conditions


def test_sis_conditions_elation_128():
    D = C.sbp_elation(128)
    rep = I.check_sis_matching_conditions(D, I.ifpair_elation(128))
    assert rep.all_hold and rep.matching_found


def test_sis_conditions_elation_8():
    D = C.sbp_elation(8)
    pair = I.ifpair_elation(8)
    rep = I.check_sis_matching_conditions(D, pair)
    assert not rep.k_condition and not rep.all_hold
    assert rep.matching_found is None


def test_sis_conditions_remark():
    D = C.sbp_affine_binary(6, C.weight_one_set(6))
    rep = I.check_sis_matching_conditions(D, I.ifpair_affine_remark(6))
    assert not rep.min_degree_condition
    assert rep.min_degree == 0
