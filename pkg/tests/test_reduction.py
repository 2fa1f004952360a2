import math

import numpy as np
import pytest

from htgnn.filtration import PhConfig, build_rips_filtration
from htgnn.persistence_graph import mst_edges
from htgnn.reduction import filter_persistent, lifespan, reduce_boundary_matrix
from oracles import naive_diagram, random_distance_matrix, threshold_component_count


def three_point_matrix():
    d = np.zeros((3, 3))
    d[0, 1] = d[1, 0] = 0.2
    d[0, 2] = d[2, 0] = 0.4
    d[1, 2] = d[2, 1] = 0.6
    return d


def four_cycle_matrix():
    # Square: side 0.3, diagonals 0.5.
    d = np.zeros((4, 4))
    sides = [(0, 1), (1, 2), (2, 3), (3, 0)]
    for i, j in sides:
        d[i, j] = d[j, i] = 0.3
    d[0, 2] = d[2, 0] = 0.5
    d[1, 3] = d[3, 1] = 0.5
    return d


def diagram(pairs):
    return sorted((p.dim, p.birth, p.death) for p in pairs)


class TestFixtures:
    def test_single_point(self):
        f = build_rips_filtration(np.zeros((1, 1)), PhConfig(max_homology_dim=1))
        pairs = reduce_boundary_matrix(f)
        assert diagram(pairs) == [(0, 0.0, math.inf)]

    def test_three_point_bars(self):
        f = build_rips_filtration(three_point_matrix(), PhConfig(r_max=0.7, max_homology_dim=1))
        pairs = reduce_boundary_matrix(f)
        assert diagram(pairs) == [
            (0, 0.0, 0.2),
            (0, 0.0, 0.4),
            (0, 0.0, math.inf),
        ]  # the triangle fills its cycle at birth scale: no H1 bar survives

    def test_four_cycle_single_h1_bar(self):
        f = build_rips_filtration(four_cycle_matrix(), PhConfig(r_max=0.7, max_homology_dim=2))
        pairs = reduce_boundary_matrix(f)
        h1 = [p for p in pairs if p.dim == 1]
        assert len(h1) == 1
        bar = h1[0]
        assert (bar.birth, bar.death) == (0.3, 0.5)
        assert bar.representative == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})
        h2 = [p for p in pairs if p.dim == 2]
        assert h2 == []
        h0 = [p for p in pairs if p.dim == 0]
        assert diagram(h0) == [
            (0, 0.0, 0.3),
            (0, 0.0, 0.3),
            (0, 0.0, 0.3),
            (0, 0.0, math.inf),
        ]


class TestAgainstNaiveOracle:
    @pytest.mark.parametrize("use_numba_env", [None, "1"])
    def test_random_small_matrices(self, monkeypatch, use_numba_env):
        if use_numba_env is not None:
            monkeypatch.setenv("HTGNN_NO_NUMBA", use_numba_env)
        rng = np.random.default_rng(0)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            d = random_distance_matrix(rng, n)
            r_max = float(rng.uniform(0.3, 1.0))
            f = build_rips_filtration(d, PhConfig(r_max=r_max, max_homology_dim=2))
            pairs = reduce_boundary_matrix(f)
            assert diagram(pairs) == naive_diagram(f.simplices(), max_simplex_dim=f.max_simplex_dim)

    def test_capped_dimension_bars_match_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            d = random_distance_matrix(rng, 7)
            f = build_rips_filtration(d, PhConfig(r_max=0.8, max_homology_dim=2))
            pairs = reduce_boundary_matrix(f, include_capped_dim=True)
            assert diagram(pairs) == naive_diagram(f.simplices(), include_capped_dim=True, max_simplex_dim=f.max_simplex_dim)


class TestH0Oracle:
    def test_finite_deaths_match_mst_weights(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(2, 40))
            d = random_distance_matrix(rng, n)
            r_max = float(rng.uniform(0.1, 0.9))
            f = build_rips_filtration(d, PhConfig(r_max=r_max, max_homology_dim=0))
            pairs = reduce_boundary_matrix(f)
            finite = sorted(p.death for p in pairs if p.dim == 0 and not p.is_infinite)
            tree = sorted(w for _, w in mst_edges(d) if w <= r_max)
            assert finite == tree
            infinite = sum(1 for p in pairs if p.dim == 0 and p.is_infinite)
            assert infinite == threshold_component_count(d, r_max)


class TestDiagramProperties:
    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            n = 10
            d = random_distance_matrix(rng, n)
            perm = rng.permutation(n)
            dp = d[np.ix_(perm, perm)]
            cfg = PhConfig(r_max=0.7, max_homology_dim=2)
            base = reduce_boundary_matrix(build_rips_filtration(d, cfg))
            permuted = reduce_boundary_matrix(build_rips_filtration(dp, cfg))
            assert diagram(base) == diagram(permuted)

    def test_monotone_r_max_extension(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            d = random_distance_matrix(rng, 12)
            cfg_small = PhConfig(r_max=0.4, max_homology_dim=1)
            cfg_large = PhConfig(r_max=0.8, max_homology_dim=1)
            small = reduce_boundary_matrix(build_rips_filtration(d, cfg_small))
            large = reduce_boundary_matrix(build_rips_filtration(d, cfg_large))
            large_set = diagram(large)
            for dim, birth, death in diagram(small):
                if math.isinf(death):
                    # Still alive later, or dies beyond the smaller window.
                    alive = (dim, birth, math.inf) in large_set
                    dies_later = any(
                        ld > cfg_small.r_max and (dim, birth) == (ldim, lbirth)
                        for ldim, lbirth, ld in large_set
                    )
                    assert alive or dies_later
                else:
                    assert (dim, birth, death) in large_set

    def test_euler_poincare_identity(self):
        rng = np.random.default_rng(5)
        for trial in range(12):
            n = int(rng.integers(4, 21))
            d = random_distance_matrix(rng, n)
            r_max = (0.4, 0.7, 2.0)[trial % 3]
            f = build_rips_filtration(d, PhConfig(r_max=r_max, max_homology_dim=2))
            pairs = reduce_boundary_matrix(f, include_capped_dim=True)
            signs = np.where(f.dims % 2 == 0, 1, -1)
            for r in np.unique(f.values):
                betti_sum = sum(
                    (-1) ** p.dim for p in pairs if p.birth <= r < p.death
                )
                chi = int(signs[f.values <= r].sum())
                assert betti_sum == chi

    def test_representative_edges_within_death(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            d = random_distance_matrix(rng, 10)
            f = build_rips_filtration(d, PhConfig(r_max=0.9, max_homology_dim=2))
            for p in reduce_boundary_matrix(f):
                if p.dim >= 1:
                    assert p.representative
                    for i, j in p.representative:
                        assert d[i, j] <= (p.death if not p.is_infinite else 0.9)

    def test_h0_stability_under_perturbation(self):
        rng = np.random.default_rng(7)
        d = random_distance_matrix(rng, 20)
        eps = 0.01
        noise = np.triu(rng.uniform(-eps, eps, d.shape), k=1)
        d2 = np.clip(d + noise + noise.T, 0.0, None)
        np.fill_diagonal(d2, 0.0)
        base = np.sort([w for _, w in mst_edges(d)])
        moved = np.sort([w for _, w in mst_edges(d2)])
        assert np.max(np.abs(base - moved)) <= eps + 1e-12


class TestFilterPersistent:
    def test_threshold_arithmetic(self):
        cfg = PhConfig(r_max=0.7, tau=0.05, max_homology_dim=1)
        f = build_rips_filtration(four_cycle_matrix(), cfg)
        pairs = reduce_boundary_matrix(f)
        kept = filter_persistent(pairs, cfg)
        # (0.3, 0.5) has lifespan 0.2 > tau; the infinite component has
        # effective lifespan 0.7; the 0.3-deaths have lifespan 0.3.
        assert {(p.dim, p.birth, p.death) for p in kept} == {
            (0, 0.0, 0.3),
            (0, 0.0, 0.3),
            (0, 0.0, 0.3),
            (0, 0.0, math.inf),
            (1, 0.3, 0.5),
        }

    def test_short_bar_dropped(self):
        cfg = PhConfig(r_max=0.7, tau=0.25, max_homology_dim=1)
        f = build_rips_filtration(four_cycle_matrix(), cfg)
        kept = filter_persistent(reduce_boundary_matrix(f), cfg)
        assert all(lifespan(p, cfg.r_max) > 0.25 for p in kept)
        assert not any(p.dim == 1 for p in kept)

    def test_lifespan_conventions(self):
        cfg = PhConfig(r_max=0.7, tau=0.05, max_homology_dim=1)
        f = build_rips_filtration(three_point_matrix(), cfg)
        pairs = reduce_boundary_matrix(f)
        infinite = [p for p in pairs if p.is_infinite]
        assert len(infinite) == 1
        assert lifespan(infinite[0], cfg.r_max) == pytest.approx(0.7)
