"""End-to-end orchestration: frames -> keyframe plan -> ranking ->
condensation -> token sequence, plus the budget report against the
uniform-sampling baseline.

The baseline samples every M-th frame (M defaults to round(fps), one frame
per second of video) and is costed under the identical condensation config,
including the focus share max(1, floor(alpha * K_u)), so the comparison
isolates frame selection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .assembly import TokenSequence, assemble
from .condense import (
    CondensationConfig,
    CondensationPlan,
    apply_condensation,
    build_condensation_plan,
)
from .keyframing import (
    KeyframeConfig,
    KeyframePlan,
    consecutive_dissimilarity,
    detect_iframes_from_scores,
    insert_compensation,
    uniform_plan,
)
from .media_io import (
    KIND_FRAME_LEVEL,
    KIND_PATCH_GRID,
    EmbeddingSet,
    FrameSequence,
    read_embeddings,
    read_frame_bank,
)
from .metrics import MetricConfig, psnr
from .parallel import ordered_map
from .relevance import RankedFrames, RelevanceConfig, focus_size, full_focus, rank_frames
from .temporal import Projector, TemporalTable, load_or_init_weights

CSV_COLUMNS = ("frame", "kind", "ssim_prev", "psnr_db", "relevance", "d", "tokens")


class PipelineError(RuntimeError):
    """A module failure annotated with the pipeline stage that hit it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@dataclass(frozen=True)
class PipelineConfig:
    metric: MetricConfig = field(default_factory=MetricConfig)
    keyframe: KeyframeConfig = field(default_factory=KeyframeConfig)
    relevance: RelevanceConfig = field(default_factory=RelevanceConfig)
    condense: CondensationConfig = field(default_factory=CondensationConfig)
    temporal_bins: int = 1000
    seed: int = 0
    dim: int | None = None
    baseline_interval: int | None = None
    frames_path: str | None = None
    patch_embeddings_path: str | None = None
    frame_embeddings_path: str | None = None
    query_path: str | None = None
    weights_path: str | None = None
    plan_path: str | None = None
    tokens_path: str | None = None
    csv_path: str | None = None

    def __post_init__(self):
        if self.temporal_bins < 1:
            raise ValueError("temporal_bins must be >= 1")
        if self.dim is not None and self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.baseline_interval is not None and self.baseline_interval < 1:
            raise ValueError("baseline interval must be >= 1")

    @staticmethod
    def from_json_dict(d: dict) -> "PipelineConfig":
        metric = d.get("metric", {})
        keyframe = d.get("keyframe", {})
        relevance = d.get("relevance", {})
        condense = d.get("condense", {})
        temporal = d.get("temporal", {})
        inputs = d.get("inputs", {})
        outputs = d.get("outputs", {})
        return PipelineConfig(
            metric=MetricConfig(
                window=int(metric.get("window", 8)),
                stride=int(metric.get("stride", 4)),
                dynamic_range=int(metric.get("dynamic_range", 255)),
            ),
            keyframe=KeyframeConfig(
                tau=float(keyframe.get("tau", 0.15)),
                gop_max=int(keyframe.get("gop_max", 30)),
                min_gap=int(keyframe.get("min_gap", 1)),
                delta=float(keyframe.get("delta", 0.05)),
            ),
            relevance=RelevanceConfig(alpha=float(relevance.get("alpha", 0.3))),
            condense=CondensationConfig(
                d1=int(condense.get("d1", 2)),
                d2=int(condense.get("d2", 4)),
                grid_rows=int(condense.get("grid_rows", 16)),
                grid_cols=int(condense.get("grid_cols", 16)),
            ),
            temporal_bins=int(temporal.get("bins", 1000)),
            seed=int(temporal.get("seed", 0)),
            weights_path=temporal.get("weights"),
            dim=d.get("dim"),
            baseline_interval=d.get("baseline_interval"),
            frames_path=inputs.get("frames"),
            patch_embeddings_path=inputs.get("patch_embeddings"),
            frame_embeddings_path=inputs.get("frame_embeddings"),
            query_path=inputs.get("query"),
            plan_path=outputs.get("plan"),
            tokens_path=outputs.get("tokens"),
            csv_path=outputs.get("csv"),
        )

    def to_json_dict(self) -> dict:
        return {
            "metric": {
                "window": self.metric.window,
                "stride": self.metric.stride,
                "dynamic_range": self.metric.dynamic_range,
            },
            "keyframe": {
                "tau": self.keyframe.tau,
                "gop_max": self.keyframe.gop_max,
                "min_gap": self.keyframe.min_gap,
                "delta": self.keyframe.delta,
            },
            "relevance": {"alpha": self.relevance.alpha},
            "condense": {
                "d1": self.condense.d1,
                "d2": self.condense.d2,
                "grid_rows": self.condense.grid_rows,
                "grid_cols": self.condense.grid_cols,
            },
            "temporal": {
                "bins": self.temporal_bins,
                "seed": self.seed,
                "weights": self.weights_path,
            },
            "dim": self.dim,
            "baseline_interval": self.baseline_interval,
            "inputs": {
                "frames": self.frames_path,
                "patch_embeddings": self.patch_embeddings_path,
                "frame_embeddings": self.frame_embeddings_path,
                "query": self.query_path,
            },
            "outputs": {
                "plan": self.plan_path,
                "tokens": self.tokens_path,
                "csv": self.csv_path,
            },
        }


@dataclass(frozen=True)
class FrameRecord:
    frame: int
    kind: str
    ssim_prev: float | None  # None for frame 0 (no predecessor)
    psnr_db: float | None  # may be +inf; serialized as the string "inf"
    relevance: float | None
    d: int
    tokens: int


@dataclass(frozen=True)
class Report:
    T: int
    fps: float
    baseline_interval: int
    baseline_frames: int
    baseline_focus: int
    baseline_total_tokens: int
    keyframe_counts: dict[str, int]
    gap_stats: tuple
    focus_frames: int
    total_tokens: int
    patch_tokens: int
    intra_separators: int
    inter_separators: int
    compression_ratio: float  # baseline total / ours total
    ranking_inert: bool
    per_frame: tuple[FrameRecord, ...]

    def to_json_dict(self) -> dict:
        return {
            "T": self.T,
            "fps": self.fps,
            "baseline": {
                "interval": self.baseline_interval,
                "frames": self.baseline_frames,
                "focus": self.baseline_focus,
                "total_tokens": self.baseline_total_tokens,
            },
            "keyframes": self.keyframe_counts,
            "gaps": [{"t_k": g.t_k, "n": g.n} for g in self.gap_stats],
            "focus_frames": self.focus_frames,
            "tokens": {
                "patch": self.patch_tokens,
                "intra_separators": self.intra_separators,
                "inter_separators": self.inter_separators,
                "total": self.total_tokens,
            },
            "compression_ratio": self.compression_ratio,
            "ranking_inert": self.ranking_inert,
            "per_frame": [
                {
                    "frame": r.frame,
                    "kind": r.kind,
                    "ssim_prev": r.ssim_prev,
                    "psnr_db": _json_float(r.psnr_db),
                    "relevance": r.relevance,
                    "d": r.d,
                    "tokens": r.tokens,
                }
                for r in self.per_frame
            ],
        }


@dataclass(frozen=True)
class PipelineResult:
    keyframes: KeyframePlan
    ranked: RankedFrames | None
    condensation: CondensationPlan
    tokens: TokenSequence
    report: Report


def _json_float(v: float | None):
    if v is None:
        return None
    if math.isinf(v):
        return "inf"  # raw Infinity is not valid JSON
    return v


def frame_token_cost(cfg: CondensationConfig, d: int) -> int:
    """Patch tokens plus separators for one frame pooled at ratio d."""
    rows = cfg.grid_rows // d
    cols = cfg.grid_cols // d
    return rows * cols + rows + 1


def plan_token_total(cfg: CondensationConfig, frames: int, focus: int) -> int:
    """Closed-form sequence length for `frames` frames, `focus` of them at d1."""
    return focus * frame_token_cost(cfg, cfg.d1) + (frames - focus) * frame_token_cost(
        cfg, cfg.d2
    )


def baseline_token_total(
    cfg: CondensationConfig, alpha: float, frames: int
) -> tuple[int, int]:
    """(focus, total) for a uniform baseline costed under the same config."""
    if frames < 1:
        raise ValueError("baseline needs at least one frame")
    if cfg.d1 == cfg.d2:
        return 0, plan_token_total(cfg, frames, 0)
    nf = focus_size(alpha, frames)
    return nf, plan_token_total(cfg, frames, nf)


def default_baseline_interval(seq: FrameSequence) -> int:
    """round(fps) clamped to >= 1: one baseline frame per second of video."""
    return max(1, round(seq.fps))


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineError):
                raise PipelineError(name, exc) from exc
            return False

    return _Ctx()


def run(config: PipelineConfig) -> PipelineResult:
    """Execute the full pipeline described by `config`."""
    with _stage("inputs"):
        if config.frames_path is None:
            raise ValueError("a frame bank input is required")
        seq = read_frame_bank(config.frames_path)
        if config.patch_embeddings_path is None:
            raise ValueError("a patch-grid embedding input is required")
        patch = read_embeddings(config.patch_embeddings_path)
        if patch.kind != KIND_PATCH_GRID:
            raise ValueError("patch embedding input must be a patch-grid set")
        frame_level = None
        if config.frame_embeddings_path is not None:
            frame_level = read_embeddings(config.frame_embeddings_path)
            if frame_level.kind != KIND_FRAME_LEVEL:
                raise ValueError("frame embedding input must be a frame-level set")
        query = None
        if config.query_path is not None:
            qset = read_embeddings(config.query_path)
            if qset.kind != KIND_FRAME_LEVEL or qset.count != 1:
                raise ValueError("query input must be a single-row frame-level set")
            query = qset.vector(0)
        dim = config.dim if config.dim is not None else patch.dim
        if patch.dim != dim:
            raise ValueError(f"patch embeddings have dim {patch.dim}, expected {dim}")
        if frame_level is not None and frame_level.dim != dim:
            raise ValueError(
                f"frame embeddings have dim {frame_level.dim}, expected {dim}"
            )
        if query is not None and query.shape[0] != dim:
            raise ValueError(f"query has dim {query.shape[0]}, expected {dim}")

    with _stage("metrics"):
        dissim = consecutive_dissimilarity(seq, config.metric)
        psnr_prev = ordered_map(
            lambda t: psnr(seq.frames[t - 1], seq.frames[t], config.metric),
            list(range(1, seq.T)),
        )

    with _stage("keyframes"):
        iframes = detect_iframes_from_scores(dissim, seq.T, config.keyframe)
        kplan = insert_compensation(iframes, seq.T, config.keyframe.delta)

    with _stage("relevance"):
        ccfg = config.condense
        alpha = config.relevance.alpha
        inert = ccfg.d1 == ccfg.d2
        ranked: RankedFrames | None = None
        if not inert:
            if query is not None and frame_level is not None:
                ranked = rank_frames(kplan, frame_level, query, config.relevance)
            elif alpha == 1.0:
                ranked = full_focus(kplan)  # every frame focused, no query needed
            elif query is None:
                raise ValueError("relevance requires query")
            else:
                raise ValueError("relevance requires frame-level embeddings")
        elif query is not None and frame_level is not None:
            ranked = rank_frames(kplan, frame_level, query, config.relevance)

    with _stage("condense"):
        cplan = build_condensation_plan(kplan, ranked, ccfg)
        condensed = apply_condensation(patch, cplan)

    with _stage("temporal"):
        table, g_intra, g_inter = load_or_init_weights(
            config.weights_path, config.seed, config.temporal_bins, dim
        )

    with _stage("assemble"):
        tokens = assemble(condensed, cplan, table, g_intra, g_inter, seq.T)

    with _stage("report"):
        report = _build_report(config, seq, dissim, psnr_prev, kplan, ranked, cplan, tokens)

    return PipelineResult(
        keyframes=kplan, ranked=ranked, condensation=cplan, tokens=tokens, report=report
    )


def run_plan(config: PipelineConfig) -> tuple[KeyframePlan, CondensationPlan, Report]:
    result = run(config)
    return result.keyframes, result.condensation, result.report


def _build_report(
    config: PipelineConfig,
    seq: FrameSequence,
    dissim: list[float],
    psnr_prev: list[float],
    kplan: KeyframePlan,
    ranked: RankedFrames | None,
    cplan: CondensationPlan,
    tokens: TokenSequence,
) -> Report:
    interval = config.baseline_interval or default_baseline_interval(seq)
    baseline_frames = len(uniform_plan(seq.T, interval).entries)
    baseline_focus, baseline_total = baseline_token_total(
        config.condense, config.relevance.alpha, baseline_frames
    )
    kinds = {e.t: e.kind for e in kplan.entries}
    records = []
    for entry in cplan.entries:
        t = entry.frame_index
        records.append(
            FrameRecord(
                frame=t,
                kind=kinds[t],
                ssim_prev=None if t == 0 else 1.0 - dissim[t - 1],
                psnr_db=None if t == 0 else psnr_prev[t - 1],
                relevance=None if ranked is None else ranked.scores.get(t),
                d=entry.d,
                tokens=entry.tokens,
            )
        )
    summary = tokens.summary
    counts = kplan.kind_counts()
    return Report(
        T=seq.T,
        fps=seq.fps,
        baseline_interval=interval,
        baseline_frames=baseline_frames,
        baseline_focus=baseline_focus,
        baseline_total_tokens=baseline_total,
        keyframe_counts={k: v for k, v in counts.items() if v},
        gap_stats=kplan.gaps,
        focus_frames=cplan.focus_count(),
        total_tokens=summary.total,
        patch_tokens=summary.patch_tokens,
        intra_separators=summary.intra_separators,
        inter_separators=summary.inter_separators,
        compression_ratio=baseline_total / summary.total,
        ranking_inert=config.condense.d1 == config.condense.d2,
        per_frame=tuple(records),
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def dump_json_bytes(obj: Any) -> bytes:
    """Compact, key-order-preserving JSON; stable bytes for identical input."""
    return (json.dumps(obj, separators=(",", ":")) + "\n").encode("ascii")


def plan_document(config: PipelineConfig, result: PipelineResult) -> dict:
    """The combined pipeline plan artifact written by the `plan` subcommand."""
    return {
        "config": config.to_json_dict(),
        "keyframes": result.keyframes.to_json_dict(),
        "condensation": [
            {
                "frame": e.frame_index,
                "d": e.d,
                "tokens": e.tokens,
                "rows_out": e.rows_out,
                "cols_out": e.cols_out,
                "focused": e.focused,
            }
            for e in result.condensation.entries
        ],
        "report": result.report.to_json_dict(),
    }


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def report_csv_bytes(per_frame: list[dict]) -> bytes:
    """CSV with the fixed column set, one row per selected frame."""
    lines = [",".join(CSV_COLUMNS)]
    for rec in per_frame:
        vals = []
        for col in CSV_COLUMNS:
            v = rec[col]
            if col == "psnr_db" and v == "inf":
                vals.append("inf")
            else:
                vals.append(_csv_cell(v))
        lines.append(",".join(vals))
    return ("\n".join(lines) + "\n").encode("ascii")


def write_report_csv(report: Report, path) -> None:
    rows = report.to_json_dict()["per_frame"]
    with open(path, "wb") as fh:
        fh.write(report_csv_bytes(rows))
