import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfpack import (
    EmbeddingSet,
    RelevanceConfig,
    cosine_similarity,
    focus_size,
    full_focus,
    insert_compensation,
    rank_frames,
    uniform_plan,
)


def frame_level(data):
    arr = np.asarray(data, np.float32)
    return EmbeddingSet("frame-level", arr.reshape(arr.shape[0], 1, 1, arr.shape[1]))


class TestCosine:
    def test_identity(self):
        v = np.array([0.3, -1.2, 4.0])
        assert cosine_similarity(v, v) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_worked_example(self):
        got = cosine_similarity(np.array([1.0, 2.0, 3.0]), np.array([4.0, 5.0, 6.0]))
        assert got == pytest.approx(32 / (math.sqrt(14) * math.sqrt(77)), abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero-norm"):
            cosine_similarity(np.zeros(3), np.ones(3))

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            cosine_similarity(np.ones(3), np.ones(4))

    def test_clamped(self):
        v = np.array([1e-180, 2e-180, -3e-180])
        assert -1.0 <= cosine_similarity(v, -v) <= 1.0


class TestFocusSize:
    @pytest.mark.parametrize(
        "alpha,k,expected",
        [(0.3, 10, 3), (0.3, 2, 1), (1.0, 7, 7), (0.1, 10, 1), (0.5, 9, 4)],
    )
    def test_floor_with_minimum(self, alpha, k, expected):
        assert focus_size(alpha, k) == expected

    def test_exact_floor_boundary(self):
        # 0.7 * 10 = 6.999999999999999 in IEEE; the exact floor is 7
        assert focus_size(0.7, 10) == 7


class TestRanking:
    def test_query_match_ranks_first(self):
        emb = frame_level([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        plan = uniform_plan(3, 1)
        ranked = rank_frames(plan, emb, np.array([0.0, 1.0, 0.0]))
        assert ranked.order[0] == 1
        assert 1 in ranked.focus

    def test_ties_take_smaller_index(self):
        emb = frame_level([[1.0, 1.0]] * 10)
        plan = uniform_plan(10, 1)
        ranked = rank_frames(plan, emb, np.array([2.0, 2.0]), RelevanceConfig(alpha=0.3))
        assert ranked.order == tuple(range(10))
        assert ranked.focus == {0, 1, 2}

    def test_small_plan_keeps_one(self):
        emb = frame_level([[1.0, 0.0], [0.5, 0.5]])
        plan = uniform_plan(2, 1)
        ranked = rank_frames(plan, emb, np.array([1.0, 0.0]), RelevanceConfig(alpha=0.3))
        assert len(ranked.focus) == 1

    def test_compensation_frames_rank_too(self):
        plan = insert_compensation([0], 10, 0.5)  # 0 plus compensation at 3, 6
        rows = np.eye(4, dtype=np.float32)[np.arange(10) % 4]  # one-hot, never zero
        emb = frame_level(rows)
        ranked = rank_frames(plan, emb, np.array([0.0, 0.0, 0.0, 1.0]))
        assert ranked.order == (3, 0, 6)  # frame 3 matches; tie 0 vs 6 by index
        assert ranked.scores[3] == 1.0
        assert ranked.focus == {3}

    def test_missing_row_rejected(self):
        emb = frame_level([[1.0, 0.0]])
        plan = uniform_plan(3, 1)
        with pytest.raises(ValueError, match="missing embedding row"):
            rank_frames(plan, emb, np.array([1.0, 0.0]))

    def test_query_dim_mismatch(self):
        emb = frame_level([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError, match="dimension mismatch"):
            rank_frames(uniform_plan(2, 1), emb, np.array([1.0, 0.0, 0.0]))

    def test_patch_grid_rejected(self):
        emb = EmbeddingSet("patch-grid", np.ones((2, 2, 2, 3), np.float32))
        with pytest.raises(ValueError, match="frame-level"):
            rank_frames(uniform_plan(2, 1), emb, np.ones(3))

    @given(
        scale_q=st.floats(min_value=0.001, max_value=1000.0),
        scale_e=st.floats(min_value=0.001, max_value=1000.0),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_positive_rescaling_invariance(self, scale_q, scale_e, seed):
        rng = np.random.default_rng(seed)
        data = rng.normal(size=(8, 5)).astype(np.float32)
        query = rng.normal(size=5)
        if np.linalg.norm(query) == 0:
            return
        plan = uniform_plan(8, 1)
        base = rank_frames(plan, frame_level(data), query)
        scaled = rank_frames(
            plan, frame_level(data * np.float32(scale_e)), query * scale_q
        )
        assert base.order == scaled.order
        assert base.focus == scaled.focus

    def test_alpha_one_focuses_everything(self):
        rows = np.eye(3, dtype=np.float32)[np.arange(5) % 3]
        ranked = rank_frames(
            uniform_plan(5, 1), frame_level(rows), np.ones(3), RelevanceConfig(alpha=1.0)
        )
        assert ranked.focus == {0, 1, 2, 3, 4}

    def test_full_focus_degenerate(self):
        plan = uniform_plan(4, 2)
        ranked = full_focus(plan)
        assert ranked.focus == {0, 2}
        assert dict(ranked.scores) == {}

    def test_storage_order_independent(self, rng):
        # scores depend only on (frame index -> embedding row); rerunning with
        # unrelated rows shuffled must not change the result
        plan = insert_compensation([0, 5], 10, 0.5)
        data = rng.normal(size=(10, 4)).astype(np.float32)
        query = rng.normal(size=4)
        base = rank_frames(plan, frame_level(data), query)
        other = data.copy()
        unused = [t for t in range(10) if t not in set(plan.indices())]
        other[unused] = other[unused[::-1]]
        again = rank_frames(plan, frame_level(other), query)
        assert base.order == again.order and base.focus == again.focus
