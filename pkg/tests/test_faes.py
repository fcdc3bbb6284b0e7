import numpy as np
import pytest

from ovtas.core import EmbeddingMatrix, SimilarityMatrix
from ovtas.faes import (
    cosine_similarity,
    l2_normalize_rows,
    permutation_pair,
    permute_ablation,
    softmax_rows,
)


def emb(rows, normalized=False):
    return EmbeddingMatrix(np.array(rows, dtype=float), normalized=normalized)


class TestL2Normalize:
    def test_three_four_five(self):
        out = l2_normalize_rows(emb([[3.0, 4.0]]))
        assert np.allclose(out.data, [[0.6, 0.8]])
        assert out.normalized

    def test_idempotent_on_unit_rows(self):
        rng = np.random.default_rng(0)
        rows = rng.normal(size=(5, 7))
        once = l2_normalize_rows(emb(rows))
        twice = l2_normalize_rows(once)
        assert np.abs(twice.data - once.data).max() < 1e-7

    def test_zero_row_rejected(self):
        with pytest.raises(ValueError, match="degenerate embedding row"):
            l2_normalize_rows(emb([[1.0, 0.0], [0.0, 0.0]]))


class TestCosineSimilarity:
    def test_self_similarity_is_one(self):
        x = l2_normalize_rows(emb([[1.0, 2.0, 3.0]]))
        sim = cosine_similarity(x, x)
        assert sim.values[0, 0] == pytest.approx(1.0)

    def test_orthogonal_is_zero(self):
        x = emb([[1.0, 0.0]], normalized=True)
        a = emb([[0.0, 1.0]], normalized=True)
        assert cosine_similarity(x, a).values[0, 0] == pytest.approx(0.0)

    def test_identity_padded_rows(self):
        # Hand oracle: direct dot products of unit basis rows.
        rows = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]
        x = emb(rows, normalized=True)
        sim = cosine_similarity(x, x)
        assert np.allclose(sim.values, np.eye(2))

    def test_dimension_mismatch(self):
        x = emb([[1.0, 0.0]], normalized=True)
        a = emb([[1.0, 0.0, 0.0]], normalized=True)
        with pytest.raises(ValueError, match="dims differ"):
            cosine_similarity(x, a)

    def test_unnormalized_rejected_without_skip(self):
        x = emb([[1.0, 0.0]])
        with pytest.raises(ValueError, match="normalized"):
            cosine_similarity(x, x)
        raw = cosine_similarity(emb([[2.0, 0.0]]), emb([[2.0, 0.0]]), skip_l2=True)
        assert raw.values[0, 0] == pytest.approx(4.0)

    def test_random_inputs_bounded(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = l2_normalize_rows(emb(rng.normal(size=(6, 9))))
            a = l2_normalize_rows(emb(rng.normal(size=(4, 9))))
            values = cosine_similarity(x, a).values
            assert values.min() >= -1.0 - 1e-6
            assert values.max() <= 1.0 + 1e-6


class TestSoftmaxRows:
    def test_equal_logits(self):
        sim = SimilarityMatrix(np.array([[0.3, 0.3, 0.3]]))
        probs = softmax_rows(sim)
        assert np.allclose(probs.values, 1.0 / 3)

    def test_large_logits_stable(self):
        sim = SimilarityMatrix(np.array([[1000.0, 0.0]]))
        probs = softmax_rows(sim)
        assert probs.values[0, 0] == pytest.approx(1.0)
        assert probs.values[0, 1] == pytest.approx(0.0, abs=1e-300)

    def test_log_two_closed_form(self):
        sim = SimilarityMatrix(np.array([[np.log(2.0), 0.0]]))
        probs = softmax_rows(sim)
        assert np.allclose(probs.values, [[2.0 / 3, 1.0 / 3]])

    def test_shift_invariance(self):
        rng = np.random.default_rng(5)
        logits = rng.normal(size=(4, 6))
        base = softmax_rows(SimilarityMatrix(logits)).values
        shifted = softmax_rows(SimilarityMatrix(logits + 123.456)).values
        assert np.abs(base - shifted).max() < 1e-9


class TestPermuteAblation:
    def test_rows_preserved_as_multiset(self):
        rng = np.random.default_rng(11)
        x = emb(rng.normal(size=(10, 4)))
        a = emb(rng.normal(size=(3, 4)))
        px, pa = permute_ablation(x, a, seed=42)
        assert sorted(map(tuple, px.data)) == sorted(map(tuple, x.data))
        assert sorted(map(tuple, pa.data)) == sorted(map(tuple, a.data))

    def test_single_row_unchanged(self):
        x = emb([[1.0, 2.0]])
        px, _ = permute_ablation(x, x, seed=0)
        assert np.array_equal(px.data, x.data)

    def test_inverse_restores_input(self):
        rng = np.random.default_rng(13)
        x = emb(rng.normal(size=(8, 5)))
        a = emb(rng.normal(size=(4, 5)))
        px, pa = permute_ablation(x, a, seed=99)
        frame_perm, action_perm = permutation_pair(8, 4, seed=99)
        assert np.array_equal(px.data[np.argsort(frame_perm)], x.data)
        assert np.array_equal(pa.data[np.argsort(action_perm)], a.data)

    def test_deterministic_for_seed(self):
        rng = np.random.default_rng(17)
        x = emb(rng.normal(size=(6, 3)))
        a = emb(rng.normal(size=(2, 3)))
        first = permute_ablation(x, a, seed=5)
        second = permute_ablation(x, a, seed=5)
        assert np.array_equal(first[0].data, second[0].data)
        assert np.array_equal(first[1].data, second[1].data)

    def test_feature_scramble_mode(self):
        rng = np.random.default_rng(19)
        x = emb(rng.normal(size=(4, 6)))
        a = emb(rng.normal(size=(2, 6)))
        sx, sa = permute_ablation(x, a, seed=1, scramble_features=True)
        assert sorted(map(tuple, sx.data.T)) == sorted(map(tuple, x.data.T))
        assert sorted(map(tuple, sa.data.T)) == sorted(map(tuple, a.data.T))
