import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from edgedom import constructions as C
from edgedom.core import (
    IncidenceFreePair,
    IncidenceStructure,
    Polarity,
    classify,
    dual,
    format_inc,
    is_incidence_free,
    parse_inc,
    read_inc,
    trim_pair,
    write_inc,
)
from edgedom.errors import (
    DuplicateBlock,
    IndexOutOfRange,
    InvalidStructure,
    NotAPolarity,
    ParseError,
    TooLarge,
)
from oracles import dense, incidence_free, max_pair_count
from strategies import structures


def test_fano_params(fano):
    p = classify(fano)
    assert p.type_tuple == (7, 7, 3, 3, 1)
    assert p.is_symmetric_design and p.is_sis and p.is_design
    assert not p.is_semi_biplane


def test_hd9_params(hd9):
    p = classify(hd9[0])
    assert p.type_tuple == (19, 19, 9, 9, 4) and p.is_symmetric_design


def test_elation_params():
    p = classify(C.sbp_elation(4))
    assert (p.v, p.k) == (8, 4)
    assert p.is_semi_biplane and p.is_divisible_sbp and p.class_size == 2


def test_non_uniform_structure():
    D = IncidenceStructure(4, [[0, 1], [1, 2, 3]])
    p = classify(D)
    assert p.k is None and p.r is None
    assert not (p.is_design or p.is_sis or p.is_tactical)


@given(structures())
def test_lambda_matches_oracle(D):
    p = classify(D)
    if D.v > 1:
        assert p.lam == max_pair_count(D)


@given(structures())
def test_double_count_and_transpose(D):
    assert int(D.degrees.sum()) == int(D.block_sizes.sum()) == D.num_incidences
    m = dense(D)
    for p in range(D.v):
        assert list(D.point_rows[p]) == np.nonzero(m[p])[0].tolist()
    assert np.array_equal(D.incidence_matrix(), m)
    assert np.array_equal(D.sparse_matrix().toarray(), m)


@given(structures())
def test_canonical_order_and_positions(D):
    assert D.blocks == sorted(D.blocks)
    rng = np.random.default_rng(0)
    perm = rng.permutation(D.b)
    E = IncidenceStructure(D.v, [D.blocks[i] for i in perm])
    assert E == D
    pos = E.canonical_positions()
    for i, j in enumerate(perm):
        assert pos[i] == j


@given(structures())
def test_dual_involution(D):
    rows = D.point_rows
    assume(all(rows) and len(set(rows)) == len(rows))  # dual must be a valid structure
    E = dual(D)
    assert (E.v, E.b) == (D.b, D.v)
    assert dual(E) == D
    assert E.num_incidences == D.num_incidences
    # block c of D is point order[c] of E; point p of D is the E-block with that image
    order = D.source_order
    md, me = dense(D), dense(E)
    for p in range(D.v):
        j = E.block_index(order[c] for c in D.point_rows[p])
        for c in range(D.b):
            assert me[order[c], j] == md[p, c]


def test_dual_examples(fano, pg32_lines):
    assert classify(dual(fano)).type_tuple == (7, 7, 3, 3, 1)
    E = dual(pg32_lines)
    assert (E.v, E.b) == (35, 15)


@pytest.mark.parametrize("build", [lambda: C.pg_points_kspaces(2, 3, 1),
                                   lambda: C.paley_hadamard_design(13)[0],
                                   lambda: C.menon_from_hadamard(C.bush_type_hadamard(2), 1)])
def test_dual_of_symmetric_design(build):
    D = build()
    a, b = classify(D), classify(dual(D))
    assert (a.v, a.k, a.lam) == (b.v, b.k, b.lam)


@given(structures())
def test_inc_roundtrip(D):
    text = format_inc(D)
    E = parse_inc(text)
    assert E == D
    assert format_inc(E) == text
    assert parse_inc("# comment\n#another\n" + text) == D


def test_inc_file_roundtrip(tmp_path, fano):
    path = tmp_path / "fano.inc"
    write_inc(fano, path)
    raw = path.read_bytes()
    assert raw.startswith(b"7 7\n3 0 1 2\n") and raw.endswith(b"\n")
    assert b" \n" not in raw
    write_inc(read_inc(path), tmp_path / "again.inc")
    assert (tmp_path / "again.inc").read_bytes() == raw


@pytest.mark.parametrize("text,err,line", [
    ("3 1\n2 0 3\n", IndexOutOfRange, 2),
    ("3 2\n2 0 1\n\n", ParseError, 3),
    ("3 2\n2 0 1\n2 0 1\n", DuplicateBlock, 3),
    ("3 1\n2 1 0\n", ParseError, 2),
    ("3 1\n3 0 1\n", ParseError, 2),
    ("3 1\n2 0  1\n", ParseError, 2),
    ("3 1\n2 0 1 \n", ParseError, 2),
    ("3\n", ParseError, 1),
    ("3 2\n2 0 1\n", ParseError, None),
    ("3 1\n2 0 1\n# late comment\n", ParseError, 3),
])
def test_parse_errors(text, err, line):
    with pytest.raises(err) as exc:
        parse_inc(text)
    if line is not None:
        assert f"line {line}" in str(exc.value)


def test_construction_errors():
    with pytest.raises(IndexOutOfRange):
        IncidenceStructure(3, [[0, 3]])
    with pytest.raises(InvalidStructure):
        IncidenceStructure(3, [[]])
    with pytest.raises(DuplicateBlock):
        IncidenceStructure(3, [[0, 1], [1, 0]])
    with pytest.raises(TooLarge):
        IncidenceStructure(2**20 + 1, [[0]])


def test_graph_view(fano):
    G = fano.graph()
    assert G.num_edges == 21
    assert G.left_degrees() == [3] * 7 and G.right_degrees() == [3] * 7
    H = G.induced([1, 2, 3], [0, 5])
    for u, w in H.edges():
        assert fano.is_incident(H.left_ids[u], H.right_ids[w])


def test_polarity_predicate(fano):
    pol = C.standard_polarity(2, 2, fano)
    pol.check(fano)
    assert len(pol.absolute_points(fano)) == 3
    with pytest.raises(NotAPolarity):
        Polarity((0, 0, 1, 2, 3, 4, 5)).check(fano)


@given(structures(), st.data())
def test_incidence_free_matches_oracle(D, data):
    X = data.draw(st.sets(st.integers(0, D.v - 1)))
    Y = data.draw(st.sets(st.integers(0, D.b - 1)))
    assert is_incidence_free(D, X, Y) == incidence_free(D, X, Y)


def test_incidence_free_large_path():
    D = C.pg_points_kspaces(2, 64, 1)  # v*b above the bitset threshold
    assert "point_masks" not in D.__dict__
    line = D.blocks[0]
    off = [j for j in range(D.b) if not set(D.blocks[j]) & {line[0], line[1]}][:50]
    assert is_incidence_free(D, line[:2], off)
    assert not is_incidence_free(D, line[:2], off + [0])
    assert "point_masks" not in D.__dict__


def test_pair_json_and_trim():
    pair = IncidenceFreePair((3, 1), (5, 2, 9), "exact")
    assert pair.X == (1, 3) and pair.alpha == 2 and not pair.equinumerous
    data = pair.to_json()
    assert data == {"X": [1, 3], "Y": [2, 5, 9], "alpha": 2, "method": "exact",
                    "seed": None, "verified": True}
    assert IncidenceFreePair.from_json(data).Y == (2, 5, 9)
    assert trim_pair([4, 1, 7], [2, 0]) == ((1, 4), (0, 2))
