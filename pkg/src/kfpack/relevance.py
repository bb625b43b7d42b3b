"""Query-conditioned ranking of selected frames.

Every plan entry is scored by cosine similarity between its frame-level
embedding and the query vector; the best max(1, floor(alpha * K)) frames
form the focus set that later keeps the finer token grid. Compensation
frames compete on equal footing with detected keyframes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .keyframing import KeyframePlan
from .media_io import KIND_FRAME_LEVEL, EmbeddingSet


@dataclass(frozen=True)
class RelevanceConfig:
    alpha: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")


@dataclass(frozen=True, eq=False)
class RankedFrames:
    order: tuple[int, ...]          # frame indices, best score first
    scores: Mapping[int, float]     # frame index -> cosine similarity
    focus: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "scores", MappingProxyType(dict(self.scores)))
        if not self.focus <= set(self.order[: len(self.focus)]):
            raise ValueError("focus must be the leading prefix of the order")

    def __eq__(self, other):
        if not isinstance(other, RankedFrames):
            return NotImplemented
        return (
            self.order == other.order
            and dict(self.scores) == dict(other.scores)
            and self.focus == other.focus
        )


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    mu = float(np.abs(u).max()) if u.size else 0.0
    mv = float(np.abs(v).max()) if v.size else 0.0
    if mu == 0.0 or mv == 0.0:
        raise ValueError("cosine similarity undefined for zero-norm vectors")
    # pre-scaling keeps tiny/huge inputs out of under/overflow and makes
    # the identical-vector case come out as exactly 1.0
    u = u / mu
    v = v / mv
    score = float(np.dot(u, v)) / math.sqrt(float(np.dot(u, u)) * float(np.dot(v, v)))
    return min(1.0, max(-1.0, score))  # guard against rounding past +-1


def focus_size(alpha: float, keyframe_count: int) -> int:
    """max(1, floor(alpha * K)), floored in exact rational arithmetic."""
    if keyframe_count < 1:
        raise ValueError("need at least one keyframe")
    return max(1, int(Fraction(str(alpha)) * keyframe_count))


def full_focus(plan: KeyframePlan) -> RankedFrames:
    """Degenerate ranking with every plan entry focused (alpha = 1, no query)."""
    order = tuple(plan.indices())
    return RankedFrames(order=order, scores={}, focus=frozenset(order))


def rank_frames(
    plan: KeyframePlan,
    embeddings: EmbeddingSet,
    query: np.ndarray,
    cfg: RelevanceConfig | None = None,
) -> RankedFrames:
    """Score, sort (ties broken by smaller frame index), and cut the focus set."""
    cfg = cfg or RelevanceConfig()
    if embeddings.kind != KIND_FRAME_LEVEL:
        raise ValueError("ranking needs frame-level embeddings")
    indices = plan.indices()
    top = max(indices)
    if embeddings.count <= top:
        raise ValueError(
            f"missing embedding row: plan references frame {top}, "
            f"set holds {embeddings.count} rows"
        )
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    if query.shape[0] != embeddings.dim:
        raise ValueError(
            f"dimension mismatch: query has {query.shape[0]}, embeddings {embeddings.dim}"
        )
    scores = {t: cosine_similarity(embeddings.vector(t), query) for t in indices}
    order = tuple(sorted(indices, key=lambda t: (-scores[t], t)))
    k = focus_size(cfg.alpha, len(indices))
    return RankedFrames(order=order, scores=scores, focus=frozenset(order[:k]))
