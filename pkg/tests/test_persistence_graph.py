import numpy as np
import pytest

from htgnn.filtration import PhConfig, build_rips_filtration
from htgnn.persistence_graph import extract_edges, mst_edges
from htgnn.reduction import filter_persistent, reduce_boundary_matrix
from oracles import random_distance_matrix, single_linkage_merge_weights


def three_point_matrix():
    d = np.zeros((3, 3))
    d[0, 1] = d[1, 0] = 0.2
    d[0, 2] = d[2, 0] = 0.4
    d[1, 2] = d[2, 1] = 0.6
    return d


def four_cycle_matrix():
    d = np.zeros((4, 4))
    for i, j in [(0, 1), (1, 2), (2, 3), (3, 0)]:
        d[i, j] = d[j, i] = 0.3
    d[0, 2] = d[2, 0] = 0.5
    d[1, 3] = d[3, 1] = 0.5
    return d


def persistence_edge_set(d, cfg):
    f = build_rips_filtration(d, cfg)
    pairs = filter_persistent(reduce_boundary_matrix(f), cfg)
    return extract_edges(pairs, d, cfg)


class TestMstEdges:
    def test_three_points(self):
        tree = mst_edges(three_point_matrix())
        assert tree == [((0, 1), 0.2), ((0, 2), 0.4)]

    def test_single_point(self):
        assert mst_edges(np.zeros((1, 1))) == []

    def test_weights_match_single_linkage_merges(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            d = random_distance_matrix(rng, 50)
            tree_weights = sorted(w for _, w in mst_edges(d))
            assert tree_weights == sorted(single_linkage_merge_weights(d))

    def test_deterministic_tie_breaking(self):
        d = np.zeros((4, 4))
        d[:] = 0.5
        np.fill_diagonal(d, 0.0)
        tree = mst_edges(d)
        assert tree == [((0, 1), 0.5), ((0, 2), 0.5), ((0, 3), 0.5)]


class TestExtractEdges:
    def test_three_point_mst_contribution(self):
        cfg = PhConfig(r_max=0.7, tau=0.05, max_homology_dim=1)
        edges, weights = persistence_edge_set(three_point_matrix(), cfg)
        np.testing.assert_array_equal(edges, [[0, 1], [0, 2]])
        np.testing.assert_array_equal(weights, [0.2, 0.4])

    def test_four_cycle_includes_loop_and_tree(self):
        cfg = PhConfig(r_max=0.7, tau=0.05, max_homology_dim=2)
        edges, _ = persistence_edge_set(four_cycle_matrix(), cfg)
        got = {tuple(e) for e in edges}
        # The representative contributes all four 0.3-edges; the spanning
        # tree contributes three of them (all above tau).
        assert got == {(0, 1), (1, 2), (2, 3), (0, 3)}

    def test_everything_below_tau_gives_empty_set(self):
        rng = np.random.default_rng(1)
        d = random_distance_matrix(rng, 8, scale=0.01)
        cfg = PhConfig(r_max=0.7, tau=0.05, max_homology_dim=1)
        edges, weights = persistence_edge_set(d, cfg)
        assert edges.shape == (0, 2)
        assert weights.shape == (0,)

    def test_edges_canonical_and_weighted_by_distance(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            d = random_distance_matrix(rng, 15)
            cfg = PhConfig(r_max=0.8, tau=0.02, max_homology_dim=1)
            edges, weights = persistence_edge_set(d, cfg)
            if edges.shape[0] == 0:
                continue
            assert np.all(edges[:, 0] < edges[:, 1])
            assert np.array_equal(edges, np.unique(edges, axis=0))
            np.testing.assert_array_equal(weights, d[edges[:, 0], edges[:, 1]])
            assert np.all(weights <= cfg.r_max)

    def test_mst_rule_matches_h0_death_filter(self):
        # The tree edges in (tau, r_max] are exactly the finite deaths of
        # components persisting past tau.
        rng = np.random.default_rng(3)
        for _ in range(10):
            d = random_distance_matrix(rng, 20)
            cfg = PhConfig(r_max=0.6, tau=0.15, max_homology_dim=0)
            f = build_rips_filtration(d, cfg)
            pairs = reduce_boundary_matrix(f)
            deaths = sorted(
                p.death
                for p in pairs
                if p.dim == 0 and not p.is_infinite and p.death - p.birth > cfg.tau
            )
            tree = sorted(w for _, w in mst_edges(d) if cfg.tau < w <= cfg.r_max)
            assert deaths == tree
