"""Serial union-find decoder against hand traces and the brute-force oracle."""

from itertools import combinations

from hypothesis import given, settings
from hypothesis import strategies as st

from dufsim.graph import build_phenomenological, from_edges
from dufsim.noise import empty_syndrome, sample_phenomenological, syndrome_of
from dufsim.serial_uf import (UnionFindForest, brute_force_clusters,
                              decode_serial)

G32 = build_phenomenological(3, 2)


def test_empty_syndrome():
    res = decode_serial(G32, empty_syndrome(G32))
    assert res.iterations == 0
    assert res.clusters.clusters == ()


def test_two_defects_one_edge_single_growing_iteration():
    g = from_edges(2, [(1, 2)])
    res = decode_serial(g, syndrome_of(g, [1, 2]))
    assert res.iterations == 1
    (c,) = res.clusters.clusters
    assert c.members == (1, 2) and not c.parity and not c.touched
    assert res.growth[0] == 2


def test_four_defect_configuration_merges_to_one_even_cluster():
    g = from_edges(4, [(1, 3), (1, 4), (2, 4)])
    res = decode_serial(g, syndrome_of(g, [1, 2, 3, 4]))
    (c,) = res.clusters.clusters
    assert c.members == (1, 2, 3, 4) and not c.parity
    assert res.iterations == 1


def test_lone_boundary_defect_matches_to_boundary():
    g = from_edges(2, [(1, 2)], boundary_at=[1])
    res = decode_serial(g, syndrome_of(g, [1]))
    (c,) = res.clusters.clusters
    assert c.touched and c.parity
    assert res.iterations == 2  # boundary edge grows +1 per iteration


def test_erased_edges_start_fully_grown():
    g = from_edges(3, [(1, 2), (2, 3)])
    s = syndrome_of(g, [1, 2], erased_edges=[0])
    res = decode_serial(g, s)
    (c,) = res.clusters.clusters
    assert c.members == (1, 2) and not c.parity
    assert res.iterations == 0


# -- union/find unit behavior ----------------------------------------------------

def test_union_self_is_noop():
    uf = UnionFindForest(4, [False] * 5)
    r = uf.union(2, 2)
    assert r == uf.find(2)
    assert uf.size[uf.find(2)] == 1


def test_union_odd_odd_gives_even():
    defects = [False, True, True, False, False]
    uf = UnionFindForest(4, defects)
    assert uf.is_odd(1) and uf.is_odd(2)
    r = uf.union(1, 2)
    assert not uf.parity[r]
    assert not uf.is_odd(1)


def test_union_chains_share_root():
    uf = UnionFindForest(6, [False] * 7)
    uf.union(1, 2)
    uf.union(2, 3)
    uf.union(4, 5)
    uf.union(5, 6)
    uf.union(3, 4)
    roots = {uf.find(v) for v in range(1, 7)}
    assert len(roots) == 1


def test_boundary_touch_propagates_through_union():
    uf = UnionFindForest(4, [False, True, True, False, False])
    uf.touch_boundary(1)
    r = uf.union(1, 2)
    assert uf.touched[r]
    assert not uf.is_odd(2)


# -- oracle equivalence ------------------------------------------------------------

def test_exhaustive_small_window_matches_brute_force():
    V = G32.num_vertices
    for k in range(0, 4):
        for ids in combinations(range(1, V + 1), k):
            s = syndrome_of(G32, ids)
            a = decode_serial(G32, s).clusters
            b = brute_force_clusters(G32, s)
            assert a.clusters == b.clusters, ids
            assert a.full_edges == b.full_edges, ids


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(min_value=1, max_value=G32.num_vertices), max_size=6),
       st.sets(st.integers(min_value=0, max_value=len(G32.edges) - 1), max_size=3))
def test_termination_and_no_odd_cluster_left(defects, erased):
    s = syndrome_of(G32, defects, erased_edges=erased)
    res = decode_serial(G32, s)
    for c in res.clusters.clusters:
        assert (not c.parity) or c.touched
    # growth can never exceed the weight
    assert (res.growth <= G32.weights).all()


def test_cluster_export_canonical_text():
    g = from_edges(4, [(1, 3), (1, 4), (2, 4)])
    res = decode_serial(g, syndrome_of(g, [1, 2, 3, 4]))
    assert res.clusters.export_text() == "1 0 0 1 2 3 4\n"


def test_random_syndromes_match_brute_force_d5():
    g = build_phenomenological(5, 3)
    for seed in range(25):
        _, s = sample_phenomenological(g, 0.04, seed=seed)
        a = decode_serial(g, s).clusters
        b = brute_force_clusters(g, s)
        assert a.clusters == b.clusters
