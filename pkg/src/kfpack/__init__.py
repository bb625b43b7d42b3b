"""kfpack: keyframe-driven video token compression.

Selects keyframes by temporal redundancy instead of a fixed sampling grid,
inserts compensation frames to cover long gaps, condenses each frame's
patch-token grid at a query-relevance-driven ratio, and lays the surviving
tokens out with explicit spatial and temporal separators, ready for a
downstream language model.
"""

from .assembly import (
    TAG_INTER_SEP,
    TAG_INTRA_SEP,
    TAG_PATCH,
    Token,
    TokenSequence,
    TokenSummary,
    assemble,
    pack,
    unpack,
)
from .condense import (
    CondensationConfig,
    CondensationEntry,
    CondensationPlan,
    CondensedFrame,
    apply_condensation,
    build_condensation_plan,
    pool_grid,
)
from .keyframing import (
    GapStat,
    KeyframeConfig,
    KeyframePlan,
    PlanEntry,
    consecutive_dissimilarity,
    detect_iframes,
    detect_iframes_from_scores,
    insert_compensation,
    select_keyframes,
    uniform_plan,
    uniform_sample,
)
from .media_io import (
    EmbeddingSet,
    FormatError,
    Frame,
    FrameSequence,
    Segment,
    SynthSpec,
    read_embeddings,
    read_frame_bank,
    synth_video,
    write_embeddings,
    write_frame_bank,
)
from .metrics import MetricConfig, dissimilarity, psnr, ssim
from .pipeline import (
    FrameRecord,
    PipelineConfig,
    PipelineError,
    PipelineResult,
    Report,
    baseline_token_total,
    default_baseline_interval,
    frame_token_cost,
    plan_token_total,
    run,
    run_plan,
    write_report_csv,
)
from .relevance import (
    RankedFrames,
    RelevanceConfig,
    cosine_similarity,
    focus_size,
    full_focus,
    rank_frames,
)
from .temporal import (
    Projector,
    TemporalTable,
    identity_projector,
    init_table,
    load_or_init_weights,
    load_weights,
    project,
    save_weights,
    temporal_bin,
)

__version__ = "0.1.0"
