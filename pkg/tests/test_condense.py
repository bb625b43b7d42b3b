import numpy as np
import pytest

from kfpack import (
    CondensationConfig,
    EmbeddingSet,
    RelevanceConfig,
    apply_condensation,
    build_condensation_plan,
    insert_compensation,
    pool_grid,
    rank_frames,
    uniform_plan,
)

from oracles import pool_bruteforce


class TestPoolGrid:
    def test_constant_grid(self):
        grid = np.full((8, 8, 3), 2.5, np.float32)
        for d in (1, 2, 4, 8):
            assert (pool_grid(grid, d) == 2.5).all()

    def test_tiny_mean(self):
        grid = np.array([[[1.0], [2.0]], [[3.0], [4.0]]], np.float32)
        out = pool_grid(grid, 2)
        assert out.shape == (1, 1, 1)
        assert out[0, 0, 0] == 2.5

    def test_matches_bruteforce(self, rng):
        grid = rng.normal(size=(16, 16, 8)).astype(np.float32)
        out = pool_grid(grid, 4)
        ref = np.asarray(pool_bruteforce(grid.tolist(), 4), np.float64)
        assert np.abs(out - ref).max() < 1e-6

    def test_identity_bit_exact(self, rng):
        grid = rng.normal(size=(4, 4, 5)).astype(np.float32)
        out = pool_grid(grid, 1)
        assert out.dtype == np.float32
        assert np.array_equal(out, grid)

    def test_non_divisible_rejected(self, rng):
        with pytest.raises(ValueError, match="does not divide"):
            pool_grid(rng.normal(size=(6, 6, 2)).astype(np.float32), 4)

    def test_mean_preserved(self, rng):
        for _ in range(10):
            grid = rng.normal(size=(16, 16, 4)).astype(np.float32)
            for d in (2, 4, 8):
                pooled = pool_grid(grid, d)
                delta = pooled.mean(axis=(0, 1), dtype=np.float64) - grid.mean(
                    axis=(0, 1), dtype=np.float64
                )
                assert np.abs(delta).max() < 1e-6


def ranked_focus(plan, focus_frames, dim=4):
    """Build a ranking whose focus set is exactly `focus_frames`."""
    data = np.zeros((plan.T, 1, 1, dim), np.float32)
    data[:, 0, 0, 0] = 1.0
    for t in focus_frames:
        data[t, 0, 0, :] = 0.0
        data[t, 0, 0, 1] = 1.0
    query = np.zeros(dim)
    query[1] = 1.0
    alpha = len(focus_frames) / len(plan.entries)
    return rank_frames(plan, EmbeddingSet("frame-level", data), query, RelevanceConfig(alpha=alpha))


class TestPlanBuilding:
    def test_default_token_counts(self):
        plan = uniform_plan(10, 1)
        ranked = ranked_focus(plan, {0, 4, 7})
        cplan = build_condensation_plan(plan, ranked, CondensationConfig())
        by_frame = {e.frame_index: e for e in cplan.entries}
        for t in range(10):
            if t in {0, 4, 7}:
                assert by_frame[t].d == 2 and by_frame[t].tokens == 64
                assert by_frame[t].focused
            else:
                assert by_frame[t].d == 4 and by_frame[t].tokens == 16
                assert not by_frame[t].focused

    def test_equal_ratios_ignore_ranking(self):
        plan = uniform_plan(6, 1)
        cfg = CondensationConfig(d1=4, d2=4)
        a = build_condensation_plan(plan, ranked_focus(plan, {0}), cfg)
        b = build_condensation_plan(plan, None, cfg)
        assert [(e.frame_index, e.d, e.tokens) for e in a.entries] == [
            (t, 4, 16) for t in range(6)
        ]
        assert [(e.d, e.tokens) for e in b.entries] == [(4, 16)] * 6

    def test_missing_ranking_rejected_when_needed(self):
        with pytest.raises(ValueError, match="requires a relevance ranking"):
            build_condensation_plan(uniform_plan(4, 1), None, CondensationConfig())

    def test_coverage_mismatch_rejected(self):
        small = uniform_plan(3, 1)
        big = uniform_plan(6, 1)
        ranked = ranked_focus(small, {0})
        with pytest.raises(ValueError, match="does not cover"):
            build_condensation_plan(big, ranked, CondensationConfig())

    def test_invalid_ratios(self):
        with pytest.raises(ValueError, match="d1 is the low"):
            CondensationConfig(d1=4, d2=2)
        with pytest.raises(ValueError, match="must divide"):
            CondensationConfig(d1=3, d2=4)


class TestApply:
    def patch_set(self, count, rng=None, rows=16, cols=16, dim=4):
        if rng is None:
            data = np.ones((count, rows, cols, dim), np.float32)
        else:
            data = rng.normal(size=(count, rows, cols, dim)).astype(np.float32)
        return EmbeddingSet("patch-grid", data)

    def test_all_ones(self):
        plan = uniform_plan(4, 1)
        cplan = build_condensation_plan(plan, ranked_focus(plan, {1}), CondensationConfig())
        frames = apply_condensation(self.patch_set(4), cplan)
        for frame, entry in zip(frames, cplan.entries):
            assert frame.grid.shape == (entry.rows_out, entry.cols_out, 4)
            assert (frame.grid == 1.0).all()

    def test_total_visual_tokens_closed_form(self, rng):
        plan = uniform_plan(10, 1)
        cplan = build_condensation_plan(plan, ranked_focus(plan, {2, 5, 8}), CondensationConfig())
        assert cplan.total_tokens() == 3 * 64 + 7 * 16 == 304
        frames = apply_condensation(self.patch_set(10, rng), cplan)
        assert sum(f.grid.shape[0] * f.grid.shape[1] for f in frames) == 304

    def test_token_identity(self):
        plan = uniform_plan(5, 1)
        cplan = build_condensation_plan(plan, ranked_focus(plan, {0, 3}), CondensationConfig())
        n = CondensationConfig().token_count
        assert sum(e.tokens * e.d * e.d for e in cplan.entries) == n * 5

    def test_kind_mismatch(self):
        emb = EmbeddingSet("frame-level", np.ones((4, 1, 1, 3), np.float32))
        plan = uniform_plan(4, 1)
        cplan = build_condensation_plan(plan, None, CondensationConfig(d1=4, d2=4))
        with pytest.raises(ValueError, match="patch-grid"):
            apply_condensation(emb, cplan)

    def test_missing_rows(self):
        plan = uniform_plan(4, 1)
        cplan = build_condensation_plan(plan, None, CondensationConfig(d1=4, d2=4))
        with pytest.raises(ValueError, match="missing patch grid"):
            apply_condensation(self.patch_set(2), cplan)

    def test_wrong_grid_shape(self):
        plan = uniform_plan(2, 1)
        cplan = build_condensation_plan(plan, None, CondensationConfig(d1=4, d2=4))
        with pytest.raises(ValueError, match="does not match"):
            apply_condensation(self.patch_set(2, rows=8, cols=8), cplan)

    def test_compensation_plan_flows(self, rng):
        kplan = insert_compensation([0, 10], 20, 0.25)
        ranked = ranked_focus(kplan, {0})
        cplan = build_condensation_plan(kplan, ranked, CondensationConfig())
        frames = apply_condensation(self.patch_set(20, rng), cplan)
        assert [f.frame_index for f in frames] == kplan.indices()
