import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from heavytails.chimera import (Subgraph, build_chimera, chimera_edges, degree, format_edgelist, is_intercell,
                                parse_edgelist, qubit_index)

from oracles import EDGE_COUNTS, chimera_edges as oracle_edges, degrees_of


@pytest.mark.parametrize("L", range(1, 11))
def test_edge_count_formula(L):
    g = build_chimera(L)
    assert len(g.edges) == EDGE_COUNTS[L] == 16 * L * L + 8 * L * (L - 1)
    assert g.n_qubits == 8 * L * L


@pytest.mark.parametrize("L", [1, 2, 3, 5])
def test_edges_match_definition(L):
    got = {tuple(e) for e in chimera_edges(L).tolist()}
    assert got == oracle_edges(L)


def test_single_cell():
    g = build_chimera(1)
    assert g.n_qubits == 8 and len(g.edges) == 16
    assert (g.degrees() == 4).all()


def test_c4_degrees_against_scan():
    g = build_chimera(4)
    assert g.degrees().tolist() == degrees_of(oracle_edges(4), 128)
    assert g.degrees().max() == 6
    corner_horizontal = qubit_index(4, 0, 0, 0, 0)
    assert degree(g, corner_horizontal) == 5
    interior = qubit_index(4, 1, 1, 0, 2)
    assert degree(g, interior) == 6


def test_all_inoperable():
    g = build_chimera(4, range(128))
    assert len(g.operable_qubits) == 0 and len(g.edges) == 0


def test_inoperable_removes_incident_edges():
    g = build_chimera(4, [45])
    assert len(g.edges) == 352 - 6
    assert degree(g, 45) == 0
    assert not (g.edges == 45).any()


@pytest.mark.parametrize("bad", [-1, 128, 1000])
def test_invalid_inoperable_index(bad):
    with pytest.raises(ValueError, match=str(bad)):
        build_chimera(4, [bad])


def test_invalid_size():
    with pytest.raises(ValueError):
        build_chimera(0)


def test_intercell_classification():
    g = build_chimera(2)
    a, b = qubit_index(2, 0, 0, 0, 1), qubit_index(2, 0, 0, 1, 3)
    assert not is_intercell(g, (a, b))
    assert is_intercell(g, (qubit_index(2, 0, 0, 0, 1), qubit_index(2, 0, 1, 0, 1)))
    assert is_intercell(g, (qubit_index(2, 0, 0, 1, 2), qubit_index(2, 1, 0, 1, 2)))
    with pytest.raises(ValueError):
        is_intercell(g, (a, a))
    with pytest.raises(ValueError):
        is_intercell(g, (qubit_index(2, 0, 0, 0, 0), qubit_index(2, 0, 0, 0, 1)))


@pytest.mark.parametrize("L", [1, 3, 6])
def test_bipartite(L):
    g = build_chimera(L)
    col = g.color()
    assert (col[g.edges[:, 0]] != col[g.edges[:, 1]]).all()
    G = nx.Graph()
    G.add_edges_from(g.edges.tolist())
    assert nx.is_bipartite(G)


def test_cell_of_roundtrip():
    g = build_chimera(3)
    for q in range(g.n_qubits):
        c = g.cell_of(q)
        assert qubit_index(3, *c) == q


def test_edgelist_roundtrip():
    g = build_chimera(3, [4, 17])
    mask = np.ones(len(g.edges), dtype=bool)
    mask[::7] = False
    sub = Subgraph(g, mask)
    text = format_edgelist(sub, seed=5, d=4)
    assert text.startswith("chimera L=3\n")
    back, meta = parse_edgelist(text)
    assert meta == {"seed": "5", "d": "4"}
    assert np.array_equal(back.edges, sub.edges)
    assert np.array_equal(back.operable, sub.operable)


def test_edgelist_rejects_non_edge():
    with pytest.raises(ValueError):
        parse_edgelist("chimera L=1\n0 1\n")


@given(st.integers(1, 5), st.data())
def test_subgraph_edges_subset(L, data):
    g = build_chimera(L)
    mask = np.array(data.draw(st.lists(st.booleans(), min_size=len(g.edges), max_size=len(g.edges))))
    sub = Subgraph(g, mask)
    parent = {tuple(e) for e in g.edges.tolist()}
    assert {tuple(e) for e in sub.edges.tolist()} <= parent
    assert sub.degrees().sum() == 2 * mask.sum()
