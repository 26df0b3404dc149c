"""
Pruebas de las heurísticas: valores a mano, equivalencia de las tres vías de
cálculo y realización de cada heurística por la formulación unificada.
"""
import networkx as nx
import numpy as np
import pytest
from pydantic import ValidationError

from heurlink.application.services.graph_ops import build_graph
from heurlink.application.services.heuristics import (
    dense_formulation,
    heuristic_config,
    matrix_form_scores,
    ra_alternative_config,
    score_cn,
    score_fp,
    score_glhn,
    score_heuristic,
    score_katz,
    score_llhn,
    score_lpi,
    score_lrw,
    score_pairs_formulation,
    score_ra,
    score_rwr,
    verify_heuristic,
)
from heurlink.application.services.oracles import oracle_path_count
from heurlink.application.services.synthetic import generate_erdos_renyi, generate_random_graph
from heurlink.domain.entities.models import HeuristicId, HeuristicSpec
from heurlink.domain.exceptions import DenseExportError, InvalidGraphError, OracleLimitError

ALL_METHODS = list(HeuristicId)


def _spec(method: HeuristicId, order: int = 4) -> HeuristicSpec:
    return HeuristicSpec(method=method, gamma=0.3, phi=0.4, alpha=0.6, order=order)


class TestHandValues:

    def test_triangle_local_heuristics(self, triangle):
        assert score_cn(triangle, 0, 1) == 3.0
        assert score_ra(triangle, 0, 1) == pytest.approx(1.0)
        assert score_llhn(triangle, 0, 1) == pytest.approx(1.0 / 3.0)

    def test_cn_through_formulation(self, triangle):
        cn = HeuristicSpec(method=HeuristicId.CN)
        assert score_heuristic(triangle, cn, [(0, 1)])[0] == 3.0

    def test_katz_single_edge(self, single_edge):
        assert score_katz(single_edge, [(0, 1)], gamma=0.5, order=2)[0] == pytest.approx(1.0)

    def test_glhn_diagonal(self, single_edge):
        assert score_glhn(single_edge, [(0, 0)], phi=0.5, order=2)[0] == pytest.approx(2.0)

    def test_lpi_path(self, path3):
        assert score_lpi(path3, [(0, 2)], gamma=0.5, order=3)[0] == pytest.approx(2.5)

    def test_rwr_single_edge(self, single_edge):
        assert score_rwr(single_edge, [(0, 1)], alpha=0.5, order=1)[0] == pytest.approx(0.125)

    def test_rwr_order_zero_is_restart_term(self, single_edge):
        assert score_rwr(single_edge, [(1, 1)], alpha=0.5, order=0)[0] == pytest.approx(0.5)
        assert score_rwr(single_edge, [(0, 1)], alpha=0.5, order=0)[0] == 0.0

    def test_cross_component_scores_are_zero(self):
        g = build_graph([(0, 1), (2, 3)], 4)
        for method in ALL_METHODS:
            assert score_heuristic(g, _spec(method), [(0, 3)])[0] == 0.0


class TestFormulationRealizations:

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_three_way_agreement(self, small_random, method):
        report = verify_heuristic(small_random, _spec(method))
        assert report["max_deviation"] <= 1e-9

    @pytest.mark.parametrize("method", ALL_METHODS)
    @pytest.mark.parametrize("seed", range(50))
    def test_three_way_agreement_on_erdos_renyi(self, seed, method):
        n = 30 + seed % 11
        g = generate_erdos_renyi(n, 0.2, seed=seed)
        pairs = np.random.default_rng(seed).integers(0, n, size=(80, 2))
        report = verify_heuristic(g, _spec(method, order=3), pairs)
        assert report["pairs"] == 80
        assert report["max_deviation"] <= 1e-9

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_dense_formulation_matches_matrix_form(self, small_random, method):
        spec = _spec(method)
        dense = dense_formulation(small_random, heuristic_config(spec))
        expected = matrix_form_scores(small_random, spec)
        if method is HeuristicId.LRW:
            factor = small_random.degrees_with_loops / (2.0 * small_random.num_edges)
            dense = factor[:, None] * dense
        np.testing.assert_allclose(dense, expected, rtol=1e-10, atol=1e-12)

    def test_ra_alternative_realization(self, small_random):
        n = small_random.num_nodes
        rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        pairs = np.stack([rows.ravel(), cols.ravel()], axis=1)
        np.testing.assert_allclose(
            score_pairs_formulation(small_random, ra_alternative_config(), pairs),
            score_heuristic(small_random, HeuristicSpec(method=HeuristicId.RA), pairs),
            atol=1e-12,
        )

    def test_sparse_and_dense_formulation_agree(self, random_graphs):
        spec = _spec(HeuristicId.KI, order=6)
        for g in random_graphs:
            dense = dense_formulation(g, heuristic_config(spec))
            pairs = np.argwhere(np.ones((g.num_nodes, g.num_nodes), dtype=bool))
            np.testing.assert_allclose(
                score_pairs_formulation(g, heuristic_config(spec), pairs),
                dense[pairs[:, 0], pairs[:, 1]],
                rtol=1e-12,
            )

    @pytest.mark.parametrize("method", [HeuristicId.CN, HeuristicId.RA, HeuristicId.KI, HeuristicId.LPI,
                                        HeuristicId.RA_SYM, HeuristicId.FP, HeuristicId.GLHN])
    def test_symmetric_heuristics(self, small_random, method):
        h = matrix_form_scores(small_random, _spec(method))
        np.testing.assert_allclose(h, h.T, atol=1e-12)

    def test_lrw_is_symmetric(self, small_random):
        h = matrix_form_scores(small_random, _spec(HeuristicId.LRW))
        np.testing.assert_allclose(h, h.T, atol=1e-12)

    def test_rwr_detailed_balance(self, small_random):
        r = matrix_form_scores(small_random, _spec(HeuristicId.RWR))
        d = small_random.degrees_with_loops
        np.testing.assert_allclose(d[:, None] * r, (d[:, None] * r).T, atol=1e-12)

    def test_ki_increases_with_order(self, small_random):
        low = score_katz(small_random, [(0, 1), (2, 5)], gamma=0.3, order=2)
        high = score_katz(small_random, [(0, 1), (2, 5)], gamma=0.3, order=5)
        assert np.all(high >= low)

    def test_fp_rows_of_regular_graph(self):
        # En un ciclo todos los grados coinciden y FP coincide con RWR
        cycle = build_graph([(k, (k + 1) % 6) for k in range(6)], 6)
        pairs = [(0, 1), (0, 3), (2, 2)]
        np.testing.assert_allclose(score_fp(cycle, pairs, 0.6, 5), score_rwr(cycle, pairs, 0.6, 5), atol=1e-14)


class TestOracles:

    def test_path_count_matches_powers(self, small_random):
        a = small_random.adjacency().toarray()
        power = np.linalg.matrix_power(a, 3)
        for i, j in [(0, 0), (0, 4), (3, 7), (10, 14)]:
            assert oracle_path_count(small_random, i, j, 3) == power[i, j]

    def test_hexagon_simple_paths_against_networkx(self):
        hexagon = build_graph([(k, (k + 1) % 6) for k in range(6) if k != 5], 6)
        reference = nx.cycle_graph(6)
        reference.remove_edge(5, 0)
        simple = list(nx.all_simple_paths(reference, 0, 5))
        assert len(simple) == 1 and len(simple[0]) - 1 == 5
        assert oracle_path_count(hexagon, 0, 5, 5, include_self_loops=False) == 1
        for length in range(1, 5):
            assert oracle_path_count(hexagon, 0, 5, length, include_self_loops=False) == 0

    def test_oracle_limits(self):
        big = generate_random_graph(61, 80, seed=0)
        with pytest.raises(OracleLimitError):
            oracle_path_count(big, 0, 1, 2)
        with pytest.raises(OracleLimitError):
            verify_heuristic(big, _spec(HeuristicId.CN))

    def test_oracle_length_limit(self, triangle):
        with pytest.raises(OracleLimitError):
            oracle_path_count(triangle, 0, 1, 9)


class TestContracts:

    def test_lpi_needs_order_two(self):
        with pytest.raises(ValidationError):
            HeuristicSpec(method=HeuristicId.LPI, order=1)

    def test_damping_range(self):
        with pytest.raises(ValidationError):
            HeuristicSpec(method=HeuristicId.KI, gamma=1.0)

    def test_lrw_without_edges(self):
        with pytest.raises(InvalidGraphError):
            score_lrw(build_graph([], 3), [(0, 1)], order=3)

    def test_pair_out_of_range(self, triangle):
        with pytest.raises(InvalidGraphError):
            score_heuristic(triangle, _spec(HeuristicId.CN), [(0, 3)])

    def test_dense_export_limit(self):
        g = generate_random_graph(501, 600, seed=1)
        with pytest.raises(DenseExportError):
            dense_formulation(g, heuristic_config(_spec(HeuristicId.CN)))

    def test_order_zero_series(self, triangle):
        assert heuristic_config(_spec(HeuristicId.KI, order=0)).betas == [0.0]
        assert score_katz(triangle, [(0, 0), (0, 1)], order=0).tolist() == [0.0, 0.0]
