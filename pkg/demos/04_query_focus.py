"""Query-driven focus: who keeps the fine token grid.

Every selected frame is scored by cosine similarity between its
frame-level embedding and the query; the best max(1, floor(alpha * K))
keep the low pooling ratio d1 (8x8 = 64 tokens under the defaults), the
rest drop to d2 (4x4 = 16 tokens). Pooling is plain block averaging, so
channel means survive.
"""

import numpy as np

from kfpack import (
    CondensationConfig,
    EmbeddingSet,
    RelevanceConfig,
    apply_condensation,
    build_condensation_plan,
    pool_grid,
    rank_frames,
    uniform_plan,
)

rng = np.random.default_rng(21)
K, dim = 10, 16
plan = uniform_plan(K, 1)

# embeddings for ten frames; frames 2 and 7 lie close to the query
query = rng.normal(size=dim)
rows = rng.normal(size=(K, dim)) * 0.7
rows[2] = query + rng.normal(size=dim) * 0.05
rows[7] = query + rng.normal(size=dim) * 0.10
emb = EmbeddingSet("frame-level", rows.astype(np.float32).reshape(K, 1, 1, dim))

ranked = rank_frames(plan, emb, query, RelevanceConfig(alpha=0.3))
print("ranking (best first):", ranked.order)
print("focus set (alpha=0.3 of 10 -> 3):", sorted(ranked.focus))

cfg = CondensationConfig()  # d1=2, d2=4 over 16x16 grids
cplan = build_condensation_plan(plan, ranked, cfg)
for e in cplan.entries:
    marker = "focus" if e.focused else "     "
    print(f"  frame {e.frame_index}: {marker} d={e.d} -> {e.tokens:3d} tokens")
print("visual tokens total:", cplan.total_tokens())

# pooling itself: block means, mean-preserving, identity at d=1
grid = rng.normal(size=(16, 16, dim)).astype(np.float32)
pooled = pool_grid(grid, 4)
print("pooled shape:", pooled.shape)
print(
    "channel-0 mean before/after:",
    round(float(grid[..., 0].mean()), 6),
    round(float(pooled[..., 0].mean()), 6),
)

patches = EmbeddingSet(
    "patch-grid", rng.normal(size=(K, 16, 16, dim)).astype(np.float32)
)
condensed = apply_condensation(patches, cplan)
budget = sum(f.grid.shape[0] * f.grid.shape[1] for f in condensed)
print("condensed grids:", [f.grid.shape[:2] for f in condensed])
print("budget check:", budget, "== plan total", cplan.total_tokens())
