"""Inter-frame compression: uniform sampling, change-driven keyframe
detection, and gap-covering compensation frames.

Selection walks the video once, left to right. Frame 0 is always kept;
frame t joins when the dissimilarity to its predecessor exceeds ``tau``
(respecting ``min_gap``) or when ``gop_max`` frames have passed without a
keyframe. Each gap of length T_k between kept frames then receives
n = floor(T_k / (delta * T)) evenly spaced compensation frames; the stretch
from the last keyframe to the end of the video is covered the same way.

The floor is evaluated in exact rational arithmetic (``delta`` is read as
the decimal it was written as), because IEEE rounding can push quotients
like 50 / (0.05 * 1000) just below the integer they equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .media_io import FrameSequence
from .metrics import MetricConfig, dissimilarity
from .parallel import ordered_map

KIND_IFRAME = "iframe"
KIND_COMPENSATION = "compensation"
KIND_UNIFORM = "uniform"
_KINDS = (KIND_IFRAME, KIND_COMPENSATION, KIND_UNIFORM)


@dataclass(frozen=True)
class KeyframeConfig:
    tau: float = 0.15
    gop_max: int = 30
    min_gap: int = 1
    delta: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.tau < 2.0:
            raise ValueError("tau must be in (0, 2)")
        if self.gop_max < 1:
            raise ValueError("gop_max must be >= 1")
        if self.min_gap < 1:
            raise ValueError("min_gap must be >= 1")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError("delta must be in (0, 1]")


@dataclass(frozen=True)
class PlanEntry:
    t: int
    kind: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown entry kind {self.kind!r}")


@dataclass(frozen=True)
class GapStat:
    """One gap between adjacent keyframes: its length and how many
    compensation frames were actually inserted into it."""

    t_k: int
    n: int


@dataclass(frozen=True)
class KeyframePlan:
    T: int
    entries: tuple[PlanEntry, ...]
    gaps: tuple[GapStat, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "gaps", tuple(self.gaps))
        if not self.entries:
            raise ValueError("plan must contain at least one entry")
        prev = -1
        for e in self.entries:
            if e.t <= prev:
                raise ValueError("entries must be strictly increasing, no duplicates")
            if e.t >= self.T:
                raise ValueError(f"entry index {e.t} out of range for T={self.T}")
            prev = e.t
        if any(e.kind == KIND_IFRAME for e in self.entries):
            first = self.entries[0]
            if first.t != 0 or first.kind != KIND_IFRAME:
                raise ValueError("a plan with iframes must start with an iframe at 0")

    def indices(self) -> list[int]:
        return [e.t for e in self.entries]

    def kind_counts(self) -> dict[str, int]:
        counts = {k: 0 for k in _KINDS}
        for e in self.entries:
            counts[e.kind] += 1
        return counts

    def to_json_dict(self) -> dict:
        return {
            "T": self.T,
            "entries": [{"t": e.t, "kind": e.kind} for e in self.entries],
            "gaps": [{"t_k": g.t_k, "n": g.n} for g in self.gaps],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "KeyframePlan":
        return KeyframePlan(
            T=int(d["T"]),
            entries=tuple(PlanEntry(int(e["t"]), e["kind"]) for e in d["entries"]),
            gaps=tuple(GapStat(int(g["t_k"]), int(g["n"])) for g in d.get("gaps", ())),
        )


def uniform_sample(seq: FrameSequence, interval: int) -> KeyframePlan:
    """Every ``interval``-th frame starting at 0; the fixed-rate baseline."""
    return uniform_plan(seq.T, interval)


def uniform_plan(T: int, interval: int) -> KeyframePlan:
    if interval < 1:
        raise ValueError("sampling interval must be >= 1")
    entries = tuple(PlanEntry(t, KIND_UNIFORM) for t in range(0, T, interval))
    return KeyframePlan(T=T, entries=entries)


def consecutive_dissimilarity(
    seq: FrameSequence, metric: MetricConfig | None = None
) -> list[float]:
    """dissimilarity(f[t-1], f[t]) for t = 1..T-1, evaluated pair-parallel."""
    pairs = list(range(1, seq.T))
    return ordered_map(lambda t: dissimilarity(seq.frames[t - 1], seq.frames[t], metric), pairs)


def detect_iframes_from_scores(
    scores: Sequence[float], T: int, cfg: KeyframeConfig | None = None
) -> list[int]:
    """Apply the selection rule to precomputed consecutive dissimilarities."""
    cfg = cfg or KeyframeConfig()
    if T < 1:
        raise ValueError("T must be >= 1")
    if len(scores) != T - 1:
        raise ValueError(f"need {T - 1} consecutive scores, got {len(scores)}")
    selected = [0]
    last = 0
    for t in range(1, T):
        gap = t - last
        if gap >= cfg.gop_max or (scores[t - 1] > cfg.tau and gap >= cfg.min_gap):
            selected.append(t)
            last = t
    return selected


def detect_iframes(
    seq: FrameSequence,
    cfg: KeyframeConfig | None = None,
    metric: MetricConfig | None = None,
) -> list[int]:
    return detect_iframes_from_scores(consecutive_dissimilarity(seq, metric), seq.T, cfg)


def insert_compensation(iframes: Sequence[int], T: int, delta: float) -> KeyframePlan:
    """Fill gaps between keyframes with evenly spaced compensation frames.

    For a gap of T_k frames, n = floor(T_k / (delta * T)) candidates land at
    a + floor(j * T_k / (n + 1)) for j = 1..n; candidates colliding with an
    already-chosen index are dropped, not shifted. The trailing stretch is a
    gap with the end of the video (index T) as its far edge.
    """
    iframes = list(iframes)
    if not iframes:
        raise ValueError("iframes must be nonempty")
    if any(b <= a for a, b in zip(iframes, iframes[1:])):
        raise ValueError("iframes must be strictly increasing")
    if iframes[-1] >= T or iframes[0] < 0:
        raise ValueError("iframe indices must lie in [0, T)")
    ratio = Fraction(str(delta))
    if not 0 < ratio <= 1:
        raise ValueError("delta must be in (0, 1]")
    divisor = ratio * T
    if divisor == 0:
        raise ValueError("delta * T is zero: degenerate compensation divisor")

    chosen: dict[int, str] = {t: KIND_IFRAME for t in iframes}
    gaps: list[GapStat] = []
    bounds = list(zip(iframes, iframes[1:])) + [(iframes[-1], T)]
    for a, b in bounds:
        t_k = b - a
        n = int(Fraction(t_k) / divisor)
        inserted = 0
        for j in range(1, n + 1):
            idx = a + (j * t_k) // (n + 1)
            if idx not in chosen:
                chosen[idx] = KIND_COMPENSATION
                inserted += 1
        gaps.append(GapStat(t_k=t_k, n=inserted))

    entries = tuple(PlanEntry(t, chosen[t]) for t in sorted(chosen))
    return KeyframePlan(T=T, entries=entries, gaps=tuple(gaps))


def select_keyframes(
    seq: FrameSequence,
    cfg: KeyframeConfig | None = None,
    metric: MetricConfig | None = None,
) -> KeyframePlan:
    """Detection followed by compensation; the full inter-frame pass."""
    cfg = cfg or KeyframeConfig()
    iframes = detect_iframes(seq, cfg, metric)
    return insert_compensation(iframes, seq.T, cfg.delta)
