"""Intra-frame compression: block-average pooling of patch-token grids.

Focused frames keep the low ratio d1 (finer grid, more tokens); everything
else takes d2. A frame's r x c grid pooled at ratio d yields (r/d) x (c/d)
tokens, i.e. N/d^2 of the original N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .keyframing import KeyframePlan
from .media_io import KIND_PATCH_GRID, EmbeddingSet
from .relevance import RankedFrames


@dataclass(frozen=True)
class CondensationConfig:
    d1: int = 2
    d2: int = 4
    grid_rows: int = 16
    grid_cols: int = 16

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1:
            raise ValueError("pooling ratios must be >= 1")
        if self.d1 > self.d2:
            raise ValueError("d1 is the low (focus) ratio and must be <= d2")
        for d in (self.d1, self.d2):
            if self.grid_rows % d or self.grid_cols % d:
                raise ValueError(
                    f"ratio {d} must divide the {self.grid_rows}x{self.grid_cols} grid"
                )

    @property
    def token_count(self) -> int:
        return self.grid_rows * self.grid_cols


@dataclass(frozen=True)
class CondensationEntry:
    frame_index: int
    d: int
    tokens: int
    rows_out: int
    cols_out: int
    focused: bool


@dataclass(frozen=True)
class CondensationPlan:
    entries: tuple[CondensationEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        prev = -1
        for e in self.entries:
            if e.frame_index <= prev:
                raise ValueError("plan entries must be in frame order")
            if e.tokens != e.rows_out * e.cols_out:
                raise ValueError("token count must equal rows_out * cols_out")
            prev = e.frame_index

    def total_tokens(self) -> int:
        return sum(e.tokens for e in self.entries)

    def focus_count(self) -> int:
        return sum(1 for e in self.entries if e.focused)


@dataclass(frozen=True, eq=False)
class CondensedFrame:
    frame_index: int
    grid: np.ndarray  # (rows_out, cols_out, dim) float32

    def __eq__(self, other):
        if not isinstance(other, CondensedFrame):
            return NotImplemented
        return self.frame_index == other.frame_index and np.array_equal(self.grid, other.grid)


def pool_grid(grid: np.ndarray, d: int) -> np.ndarray:
    """Average each d x d block channel-wise; f64 accumulation, f32 out."""
    if grid.ndim != 3:
        raise ValueError("grid must be (rows, cols, dim)")
    r, c, dim = grid.shape
    if d < 1:
        raise ValueError("pooling ratio must be >= 1")
    if r % d or c % d:
        raise ValueError(f"ratio {d} does not divide grid {r}x{c}")
    if d == 1:
        return np.array(grid, dtype=np.float32, copy=True)
    blocks = grid.astype(np.float64).reshape(r // d, d, c // d, d, dim)
    return blocks.mean(axis=(1, 3)).astype(np.float32)


def build_condensation_plan(
    plan: KeyframePlan,
    ranked: RankedFrames | None,
    cfg: CondensationConfig | None = None,
) -> CondensationPlan:
    """Assign d1 to focus frames and d2 to the rest, in frame order.

    ``ranked`` may be None only when d1 == d2 (the ranking is inert then and
    every frame takes the single ratio).
    """
    cfg = cfg or CondensationConfig()
    if ranked is None:
        if cfg.d1 != cfg.d2:
            raise ValueError("d1 != d2 requires a relevance ranking")
        focus: frozenset[int] = frozenset()
    else:
        missing = set(plan.indices()) - set(ranked.order)
        if missing:
            raise ValueError(f"ranking does not cover plan frames {sorted(missing)}")
        focus = ranked.focus
    entries = []
    for t in plan.indices():
        focused = t in focus
        d = cfg.d1 if focused else cfg.d2
        rows_out = cfg.grid_rows // d
        cols_out = cfg.grid_cols // d
        entries.append(
            CondensationEntry(
                frame_index=t,
                d=d,
                tokens=rows_out * cols_out,
                rows_out=rows_out,
                cols_out=cols_out,
                focused=focused,
            )
        )
    return CondensationPlan(entries=tuple(entries))


def apply_condensation(
    embeddings: EmbeddingSet, plan: CondensationPlan
) -> list[CondensedFrame]:
    """Pool the patch grid of every planned frame at its assigned ratio."""
    if embeddings.kind != KIND_PATCH_GRID:
        raise ValueError("condensation needs patch-grid embeddings")
    out = []
    for e in plan.entries:
        if e.frame_index >= embeddings.count:
            raise ValueError(
                f"missing patch grid: plan references frame {e.frame_index}, "
                f"set holds {embeddings.count} rows"
            )
        if embeddings.grid_rows != e.rows_out * e.d or embeddings.grid_cols != e.cols_out * e.d:
            raise ValueError(
                f"grid {embeddings.grid_rows}x{embeddings.grid_cols} does not match "
                f"plan entry for frame {e.frame_index} "
                f"({e.rows_out * e.d}x{e.cols_out * e.d} expected)"
            )
        out.append(
            CondensedFrame(frame_index=e.frame_index, grid=pool_grid(embeddings.grid(e.frame_index), e.d))
        )
    return out
