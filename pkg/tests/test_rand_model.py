"""
Seeded ensembles, the channel layout and matrix-free model operators.
"""

import numpy as np
import pytest

from errors import DimensionGuardError, ExpressionSyntaxError, ParameterRangeError, ShapeMismatchError
from ncpoly import parse_poly, self_adjoint_context
from rand_model import (
    MatrixFreeOperator,
    RngSeed,
    assemble_model,
    assemble_Xv,
    block_decompose,
    channel_layout,
    dimension_schedule,
    grm_split,
    growth_inequality,
    identity_operator,
    normalized_trace,
    operator_norm_mf,
    parse_k_spec,
    sample_grm,
    sample_problem_model,
    sample_sgrm,
    sgrm_combine,
    sgrm_norm,
    tail_frequency,
)


class TestSeeds:
    def test_same_seed_same_stream(self):
        a = RngSeed(5, "X/a").generator().standard_normal(4)
        b = RngSeed(5, "X/a").generator().standard_normal(4)
        assert np.array_equal(a, b)

    def test_labels_separate_streams(self):
        a = RngSeed(5, "X/a").generator().standard_normal(4)
        b = RngSeed(5, "X/b").generator().standard_normal(4)
        assert not np.array_equal(a, b)

    def test_child_label(self):
        assert RngSeed(1).child("X/a") == RngSeed(1, "X/a")
        assert RngSeed(1, "run").child("X/a").label == "run/X/a"


class TestEnsembles:
    def test_sgrm_exactly_hermitian(self):
        h = sample_sgrm(30, 1 / 30, 3)
        assert np.array_equal(h, h.conj().T)
        assert np.all(np.diag(h).imag == 0)

    def test_sgrm_reproducible(self):
        assert np.array_equal(sample_sgrm(10, 0.1, 9), sample_sgrm(10, 0.1, 9))

    def test_sgrm_norm_concentrates(self):
        norms = [sgrm_norm(400, RngSeed(s, "sgrm")) for s in range(5)]
        assert all(1.8 <= value <= 2.3 for value in norms)

    def test_tail_is_rare(self):
        assert tail_frequency(200, range(10)) == 0.0

    def test_grm_variance(self):
        y = sample_grm(300, 1.0, 4)
        assert np.mean(np.abs(y) ** 2) == pytest.approx(1.0, rel=0.05)

    def test_split_and_combine(self):
        y = sample_grm(6, 1.0, 2)
        x1, x2 = grm_split(y)
        assert np.allclose(x1, x1.conj().T)
        assert np.allclose(x2, x2.conj().T)
        assert np.allclose(sgrm_combine(x1, x2), y)

    def test_split_works_on_stacks(self):
        y = np.stack([sample_grm(3, 1.0, s) for s in range(4)])
        x1, x2 = grm_split(y)
        assert x1.shape == (4, 3, 3)
        assert np.allclose(sgrm_combine(x1, x2), y)

    def test_shape_errors(self):
        with pytest.raises(ShapeMismatchError):
            grm_split(np.ones((2, 3)))
        with pytest.raises(ShapeMismatchError):
            sgrm_combine(np.eye(2), np.eye(3))

    def test_bad_parameters(self):
        with pytest.raises(ParameterRangeError):
            sample_sgrm(0, 1.0, 1)
        with pytest.raises(ParameterRangeError):
            sample_sgrm(3, 0.0, 1)


class TestLayout:
    def test_p4_dims(self, p4):
        layout = channel_layout(p4, 2, parse_k_spec("all=3", p4))
        assert layout.dims == (2, 2, 2, 3, 3, 3, 3)
        assert layout.dim == 8 * 81
        assert layout.vertex_channels("a") == (0, 1, 3)
        assert layout.vertex_channels("d") == (1, 2, 6)

    def test_without_aux(self, p4):
        layout = channel_layout(p4, 3)
        assert layout.dims == (3, 3, 3)
        assert layout.vertex_channels("b") == (2,)

    def test_flat_multi(self, free2):
        layout = channel_layout(free2, 2, {"a": 3, "b": 2})
        assert layout.multi_to_flat(layout.flat_to_multi(7)) == 7
        assert layout.strides == (6, 2, 1)

    def test_guard(self, p4):
        with pytest.raises(DimensionGuardError):
            channel_layout(p4, 4, parse_k_spec("all=8", p4), guard=1000)

    def test_m_checked(self, p4):
        with pytest.raises(ParameterRangeError):
            channel_layout(p4, 0)


class TestKSpec:
    def test_uniform(self, p3):
        assert parse_k_spec("all=8", p3) == {"a": 8, "b": 8, "c": 8}

    def test_uniform_with_override(self, p3):
        assert parse_k_spec("all=8,b=2", p3) == {"a": 8, "b": 2, "c": 8}

    def test_explicit(self, free2):
        assert parse_k_spec("a=4, b=5", free2) == {"a": 4, "b": 5}

    @pytest.mark.parametrize("text", ["a=4", "a=x,b=2", "a4,b=2", "a=1,a=2,b=1"])
    def test_errors(self, free2, text):
        with pytest.raises(ExpressionSyntaxError):
            parse_k_spec(text, free2)

    def test_nonpositive(self, free2):
        with pytest.raises(ParameterRangeError):
            parse_k_spec("all=0", free2)


class TestMatrixFree:
    def test_matches_explicit_tensor(self, free2):
        model = assemble_model(free2, 2, {"a": 3, "b": 3}, 17)
        xa, xb = model["a"], model["b"]
        eye3 = np.eye(3)
        assert np.allclose(xa.toarray(), np.kron(xa.block, eye3))
        blocks = xb.block.reshape(2, 3, 2, 3)
        expected = np.einsum("acbd,ef->aecbfd", blocks, eye3).reshape(18, 18)
        assert np.allclose(xb.toarray(), expected)

    def test_hermitian(self, p3):
        model = assemble_model(p3, 2, parse_k_spec("all=2", p3), 5)
        for op in model.values():
            dense = op.toarray()
            assert np.allclose(dense, dense.conj().T)

    def test_adjacent_commute(self, p4):
        model = assemble_model(p4, 2, parse_k_spec("all=2", p4), 8)
        xi = np.random.default_rng(0).standard_normal(model["a"].dim) + 0j
        for v, w in (("a", "b"), ("b", "c"), ("c", "d")):
            lhs = model[v] @ (model[w] @ xi)
            rhs = model[w] @ (model[v] @ xi)
            assert np.linalg.norm(lhs - rhs) <= 1e-12

    def test_non_adjacent_do_not_commute(self, free2):
        model = assemble_model(free2, 2, {"a": 2, "b": 2}, 8)
        xa, xb = model["a"].toarray(), model["b"].toarray()
        assert np.abs(xa @ xb - xb @ xa).max() > 1e-3

    def test_compose_and_add(self, p3):
        model = assemble_model(p3, 2, parse_k_spec("all=2", p3), 3)
        a, c = model["a"], model["c"]
        assert np.allclose((a @ c).toarray(), a.toarray() @ c.toarray())
        assert np.allclose((a + c).toarray(), a.toarray() + c.toarray())
        assert np.allclose((2.0 * a - c).toarray(), 2 * a.toarray() - c.toarray())

    def test_matrix_argument(self, free2):
        xa = assemble_Xv(free2, "a", 2, {"a": 2, "b": 2}, 1)
        block = np.eye(xa.dim, dtype=np.complex128)[:, :3]
        assert np.allclose(xa @ block, xa.toarray()[:, :3])

    def test_identity(self, free2):
        layout = channel_layout(free2, 2)
        x = np.arange(layout.dim, dtype=np.complex128)
        assert np.array_equal(identity_operator(layout) @ x, x)

    def test_streams_are_per_vertex(self, free2):
        model = assemble_model(free2, 2, {"a": 2, "b": 2}, 1)
        again = assemble_Xv(free2, "b", 2, {"a": 2, "b": 2}, 1)
        assert np.array_equal(model["b"].block, again.block)
        assert not np.array_equal(model["a"].block, model["b"].block)

    def test_norm(self, free2):
        xa = assemble_Xv(free2, "a", 2, {"a": 4, "b": 4}, 2)
        assert operator_norm_mf(xa).value == pytest.approx(np.linalg.norm(xa.block, 2))

    def test_problem_model_has_no_aux(self, p4):
        layout = channel_layout(p4, 2)
        ya = sample_problem_model(p4, "a", 2, 4, layout=layout)
        assert ya.dim == 8
        assert ya.block.shape == (4, 4)

    def test_complete_graph_scalars(self, k3):
        model = assemble_model(k3, 2, parse_k_spec("all=1", k3), 1)
        assert all(op.dim == 1 for op in model.values())


class TestTraces:
    def test_exact_trace(self, free2):
        model = assemble_model(free2, 2, {"a": 3, "b": 3}, 6)
        p = parse_poly("X_a*X_b*X_a + X_b")
        ctx = self_adjoint_context(model)
        dense = {v: op.toarray() for v, op in model.items()}
        expected = np.trace(dense["a"] @ dense["b"] @ dense["a"] + dense["b"]) / 18
        assert normalized_trace(p, ctx, 18, chunk=5) == pytest.approx(expected)

    def test_sampled_trace_of_identity(self, free2):
        layout = channel_layout(free2, 2)
        ctx = self_adjoint_context({"a": identity_operator(layout)})
        assert normalized_trace(parse_poly("X_a"), ctx, layout.dim, probes=4) == pytest.approx(1.0)

    def test_second_moment_near_one(self, free2):
        model = assemble_model(free2, 3, {"a": 20, "b": 20}, 2)
        ctx = self_adjoint_context(model)
        value = normalized_trace(parse_poly("X_a*X_a"), ctx, model["a"].dim)
        assert value.real == pytest.approx(1.0, abs=0.1)


class TestBlocks:
    def test_reassembly(self, p4):
        K = parse_k_spec("all=3", p4)
        decomposition, block = block_decompose(p4, "a", 2, K, 9)
        assert decomposition.block_count == 16
        assert decomposition.x_blocks.shape == (4, 4, 3, 3)
        assert np.allclose(decomposition.reassemble(), block, atol=1e-12)

    def test_q_blocks_shape(self, free2):
        decomposition, _ = block_decompose(free2, "b", 3, {"a": 2, "b": 2}, 1)
        assert decomposition.q_blocks().shape == (3, 3, 2, 2)

    def test_diagonal_y_blocks_are_random(self, p4):
        decomposition, _ = block_decompose(p4, "a", 2, parse_k_spec("all=3", p4), 9)
        y_diag = np.stack([decomposition.y_blocks[i, i] for i in range(4)])
        assert np.abs(y_diag).max() > 1e-8

    def test_mirrored_blocks_differ(self, p4):
        decomposition, _ = block_decompose(p4, "a", 2, parse_k_spec("all=3", p4), 9)
        x = decomposition.x_blocks
        assert np.abs(x[0, 1] - x[1, 0]).max() > 1e-8
        assert np.abs(decomposition.y_blocks[0, 1] + decomposition.y_blocks[1, 0]).max() > 1e-8

    def test_x_block_is_hermitian(self, free2):
        decomposition, _ = block_decompose(free2, "a", 2, {"a": 5, "b": 1}, 4)
        x = decomposition.x_blocks[0, 1]
        assert np.allclose(x, x.conj().T, atol=1e-14)


class TestBlockStatistics:
    K = 100

    @pytest.fixture
    def decompositions(self, free2):
        return [block_decompose(free2, "a", 2, {"a": self.K, "b": 1}, seed)[0] for seed in range(4)]

    def test_diagonal_variance(self, decompositions):
        diag = np.concatenate([
            np.diagonal(d.x_blocks[i, j]).real for d in decompositions for i in range(2) for j in range(2)
        ])
        assert np.mean(diag) == pytest.approx(0.0, abs=0.02)
        assert np.var(diag) * self.K == pytest.approx(1.0, abs=0.1)

    def test_off_diagonal_second_moment(self, decompositions):
        iu = np.triu_indices(self.K, 1)
        entries = np.concatenate([d.y_blocks[1, 0][iu] for d in decompositions])
        assert np.mean(np.abs(entries) ** 2) * self.K == pytest.approx(1.0, abs=0.05)

    @pytest.mark.parametrize("pair", [
        (("x", 0, 1), ("x", 1, 0)),
        (("x", 0, 1), ("y", 0, 1)),
        (("x", 0, 0), ("y", 0, 0)),
        (("y", 0, 1), ("y", 1, 0)),
    ])
    def test_blocks_uncorrelated(self, decompositions, pair):
        def entries(kind, i, j):
            blocks = [(d.x_blocks if kind == "x" else d.y_blocks)[i, j] for d in decompositions]
            return np.concatenate([b.real.ravel() for b in blocks])

        a, b = entries(*pair[0]), entries(*pair[1])
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


class TestSchedule:
    def test_integer_delta(self, p3):
        assert dimension_schedule(2, 5, p3) == {"a": 2, "b": 32, "c": 2 ** 25}

    def test_delta_checked(self, p3):
        with pytest.raises(ParameterRangeError):
            dimension_schedule(2, 4, p3)

    def test_growth(self):
        lhs, rhs = growth_inequality(5, 3)
        assert (lhs, rhs) == (25.0, 18.0)
        assert lhs > rhs
