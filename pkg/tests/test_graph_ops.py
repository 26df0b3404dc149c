"""
Pruebas del núcleo de grafos: construcción, normalización, mezcla y SpMM.
"""
import logging

import numpy as np
import pytest

from heurlink.application.services.graph_ops import (
    build_graph,
    estimate_spectral_radius,
    get_num_threads,
    mix_operators,
    normalize,
    permute_graph,
    remove_edges,
    resolve_operator,
    set_num_threads,
    spmm,
    spmv,
)
from heurlink.application.services.oracles import dense_adjacency
from heurlink.application.services.synthetic import generate_erdos_renyi, generate_random_graph
from heurlink.domain.entities.models import MIXABLE_KINDS, MixedOperatorSpec, OperatorKind
from heurlink.domain.exceptions import ContractError, DimensionMismatchError, InvalidGraphError

# Cota del radio espectral de las mezclas sobre grafos G(N, 0.2) con N entre 30 y 40
MIXTURE_RADIUS_ENVELOPE = 1.1


def _exact_radius(op) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(op.to_dense()))))


class TestBuildGraph:

    def test_duplicates_reversed_and_loops_are_collapsed(self):
        g = build_graph([(0, 1), (1, 0), (0, 1), (2, 2)], 3)
        assert g.num_edges == 1
        np.testing.assert_array_equal(g.degrees_with_loops, [2.0, 2.0, 1.0])
        np.testing.assert_array_equal(g.neighbors(2), [2])

    def test_neighbors_include_self(self, triangle):
        for node in range(3):
            np.testing.assert_array_equal(triangle.neighbors(node), [0, 1, 2])

    def test_edge_list_is_upper_triangular(self, path3):
        np.testing.assert_array_equal(path3.edge_list(), [[0, 1], [1, 2]])

    def test_out_of_range_id(self):
        with pytest.raises(InvalidGraphError):
            build_graph([(0, 3)], 3)

    def test_empty_node_set(self):
        with pytest.raises(InvalidGraphError):
            build_graph([], 0)

    def test_edgeless_graph_is_identity(self):
        g = build_graph([], 4)
        assert g.num_edges == 0
        np.testing.assert_array_equal(g.adjacency().toarray(), np.eye(4))

    def test_adjacency_matches_dense_oracle(self, small_random):
        np.testing.assert_array_equal(small_random.adjacency().toarray(), dense_adjacency(small_random))

    def test_has_edge(self, path3):
        assert path3.has_edge(0, 1)
        assert path3.has_edge(1, 1)
        assert not path3.has_edge(0, 2)


class TestNormalize:

    def test_row_stochastic_rows_sum_to_one(self, small_random):
        dense = normalize(small_random, OperatorKind.ROW_STOCHASTIC).to_dense()
        np.testing.assert_allclose(dense.sum(axis=1), 1.0, atol=1e-12)

    def test_column_stochastic_columns_sum_to_one(self, small_random):
        dense = normalize(small_random, OperatorKind.COLUMN_STOCHASTIC).to_dense()
        np.testing.assert_allclose(dense.sum(axis=0), 1.0, atol=1e-12)

    def test_symmetric_is_symmetric(self, small_random):
        dense = normalize(small_random, OperatorKind.SYMMETRIC).to_dense()
        np.testing.assert_allclose(dense, dense.T, atol=1e-15)

    def test_single_edge_row_stochastic(self, single_edge):
        np.testing.assert_array_equal(
            normalize(single_edge, OperatorKind.ROW_STOCHASTIC).to_dense(), np.full((2, 2), 0.5)
        )

    def test_triangle_column_stochastic(self, triangle):
        np.testing.assert_allclose(
            normalize(triangle, OperatorKind.COLUMN_STOCHASTIC).to_dense(), np.full((3, 3), 1.0 / 3.0)
        )

    @pytest.mark.parametrize("kind", list(OperatorKind))
    def test_matches_dense_oracle(self, small_random, kind):
        np.testing.assert_allclose(
            normalize(small_random, kind).to_dense(), dense_adjacency(small_random, kind), atol=1e-15
        )

    def test_rs_transpose_is_cs(self, small_random):
        rs = normalize(small_random, OperatorKind.ROW_STOCHASTIC).to_dense()
        cs = normalize(small_random, OperatorKind.COLUMN_STOCHASTIC).to_dense()
        np.testing.assert_allclose(rs.T, cs, atol=1e-15)

    def test_operators_share_pattern(self, small_random):
        rs = normalize(small_random, OperatorKind.ROW_STOCHASTIC)
        sym = normalize(small_random, OperatorKind.SYMMETRIC)
        assert rs.col_indices is sym.col_indices


class TestMixOperators:

    def test_degenerate_weights_select_operator(self, small_random):
        mixed = mix_operators(small_random, (0.0, 0.0, 1.0)).to_dense()
        np.testing.assert_array_equal(mixed, normalize(small_random, OperatorKind.SYMMETRIC).to_dense())

    def test_convex_combination(self, small_random):
        weights = (0.2, 0.3, 0.5)
        expected = sum(
            w * normalize(small_random, k).to_dense()
            for w, k in zip(weights, (OperatorKind.ROW_STOCHASTIC, OperatorKind.COLUMN_STOCHASTIC,
                                       OperatorKind.SYMMETRIC))
        )
        np.testing.assert_allclose(mix_operators(small_random, weights).to_dense(), expected, atol=1e-15)

    def test_weights_must_sum_to_one(self, triangle):
        with pytest.raises(ContractError):
            mix_operators(triangle, (0.5, 0.5, 0.5))

    def test_negative_weight(self, triangle):
        with pytest.raises(ContractError):
            mix_operators(triangle, (1.5, -0.5, 0.0))

    def test_resolve_mixed_spec(self, triangle):
        op = resolve_operator(triangle, MixedOperatorSpec(weights=(1.0, 0.0, 0.0)))
        np.testing.assert_allclose(op.to_dense(), np.full((3, 3), 1.0 / 3.0))


class TestSpmm:

    def test_matches_dense_product(self, small_random, rng):
        op = normalize(small_random, OperatorKind.SYMMETRIC)
        x = rng.standard_normal((small_random.num_nodes, 4))
        np.testing.assert_allclose(spmm(op, x), op.to_dense() @ x, atol=1e-13)

    def test_transpose(self, small_random, rng):
        op = normalize(small_random, OperatorKind.ROW_STOCHASTIC)
        x = rng.standard_normal((small_random.num_nodes, 3))
        np.testing.assert_allclose(spmm(op, x, transpose=True), op.to_dense().T @ x, atol=1e-13)

    def test_spmv(self, path3):
        op = normalize(path3, OperatorKind.RAW_WITH_LOOPS)
        np.testing.assert_array_equal(spmv(op, np.ones(3)), [2.0, 3.0, 2.0])

    def test_dimension_mismatch(self, triangle):
        with pytest.raises(DimensionMismatchError):
            spmm(normalize(triangle, OperatorKind.SYMMETRIC), np.ones((4, 2)))

    def test_threads_are_bitwise_identical(self, rng):
        g = generate_random_graph(3000, 9000, seed=5)
        op = normalize(g, OperatorKind.SYMMETRIC)
        x = rng.standard_normal((g.num_nodes, 8))
        reference = spmm(op, x)
        set_num_threads(4)
        assert get_num_threads() == 4
        np.testing.assert_array_equal(spmm(op, x), reference)

    def test_rejects_zero_threads(self):
        with pytest.raises(ContractError):
            set_num_threads(0)
        assert get_num_threads() == 1


class TestSpectralRadius:

    def test_symmetric_triangle(self, triangle):
        assert estimate_spectral_radius(normalize(triangle, OperatorKind.SYMMETRIC)) == pytest.approx(1.0, abs=1e-9)

    def test_row_stochastic_bounded(self, small_random):
        radius = estimate_spectral_radius(normalize(small_random, OperatorKind.ROW_STOCHASTIC))
        assert radius <= 1.0 + 1e-9

    def test_raw_operator_warns(self, triangle, caplog):
        with caplog.at_level(logging.WARNING):
            radius = estimate_spectral_radius(normalize(triangle, OperatorKind.RAW_WITH_LOOPS))
        assert radius == pytest.approx(3.0, abs=1e-9)
        assert "Radio espectral" in caplog.text

    @pytest.mark.parametrize("seed", range(20))
    def test_operator_spectra_on_random_graphs(self, seed):
        g = generate_erdos_renyi(30 + seed % 11, 0.2, seed=seed)
        for kind in MIXABLE_KINDS:
            assert _exact_radius(normalize(g, kind)) <= 1.0 + 1e-9

        a = dense_adjacency(g)
        row_mass = float(np.max(a @ (1.0 / a.sum(axis=1))))
        rng = np.random.default_rng(seed)
        for _ in range(5):
            rs, cs, sym = rng.dirichlet(np.ones(3))
            radius = _exact_radius(mix_operators(g, (rs, cs, sym)))
            # ‖Ã_cs‖₂ ≤ √(‖Ã_cs‖₁ ‖Ã_cs‖∞) con columnas de suma 1
            assert radius <= sym + (rs + cs) * np.sqrt(row_mass) + 1e-9
            assert radius <= MIXTURE_RADIUS_ENVELOPE

    def test_mixture_estimate_matches_exact_radius(self, star):
        op = mix_operators(star, (0.5, 0.5, 0.0))
        exact = _exact_radius(op)
        assert exact > 1.0
        assert estimate_spectral_radius(op) == pytest.approx(exact, rel=1e-6)


class TestPermuteGraph:

    def test_relabels_edges(self, path3):
        permuted = permute_graph(path3, np.array([2, 0, 1]))
        assert permuted.has_edge(2, 0)
        assert permuted.has_edge(0, 1)
        assert not permuted.has_edge(2, 1)

    def test_rejects_non_permutation(self, path3):
        with pytest.raises(ContractError):
            permute_graph(path3, np.array([0, 0, 1]))


class TestRemoveEdges:

    def test_drops_both_orientations(self, triangle):
        reduced = remove_edges(triangle, [(1, 0), (2, 2)])
        assert not reduced.has_edge(0, 1)
        assert not reduced.has_edge(1, 0)
        assert reduced.has_edge(1, 2) and reduced.has_edge(0, 2)
        np.testing.assert_array_equal(reduced.neighbors(1), [1, 2])
        assert triangle.has_edge(0, 1)

    def test_non_edges_are_ignored(self, path3):
        reduced = remove_edges(path3, [(0, 2)])
        np.testing.assert_array_equal(reduced.edge_list(), path3.edge_list())
        assert reduced.num_nodes == 3

    def test_empty_pairs(self, small_random):
        reduced = remove_edges(small_random, np.zeros((0, 2), dtype=np.int64))
        assert reduced.num_edges == small_random.num_edges
