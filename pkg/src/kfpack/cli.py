"""Command-line front end.

Subcommands are thin wrappers over the library: each writes its artifact,
prints a one-line summary, and exits 0 on success / 1 with a diagnostic on
failure. Flags override values from the JSON config file.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import assembly
from .condense import CondensationConfig
from .keyframing import KeyframeConfig, select_keyframes
from .media_io import FormatError, SynthSpec, read_frame_bank, synth_video, write_frame_bank
from .metrics import MetricConfig
from .pipeline import (
    PipelineConfig,
    PipelineError,
    baseline_token_total,
    dump_json_bytes,
    plan_document,
    report_csv_bytes,
    run,
)
from .relevance import RelevanceConfig


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = PipelineConfig.from_json_dict(json.load(fh))
    else:
        cfg = PipelineConfig()
    overrides = {}
    for flag, attr in (
        ("frames", "frames_path"),
        ("patch_embeddings", "patch_embeddings_path"),
        ("frame_embeddings", "frame_embeddings_path"),
        ("query", "query_path"),
        ("weights", "weights_path"),
        ("baseline_interval", "baseline_interval"),
        ("dim", "dim"),
        ("seed", "seed"),
        ("bins", "temporal_bins"),
    ):
        v = getattr(args, flag, None)
        if v is not None:
            overrides[attr] = v
    if getattr(args, "tau", None) is not None or getattr(args, "gop_max", None) is not None \
            or getattr(args, "delta", None) is not None:
        kf = cfg.keyframe
        overrides["keyframe"] = KeyframeConfig(
            tau=args.tau if args.tau is not None else kf.tau,
            gop_max=args.gop_max if args.gop_max is not None else kf.gop_max,
            min_gap=kf.min_gap,
            delta=args.delta if args.delta is not None else kf.delta,
        )
    if getattr(args, "alpha", None) is not None:
        overrides["relevance"] = RelevanceConfig(alpha=args.alpha)
    if getattr(args, "d1", None) is not None or getattr(args, "d2", None) is not None:
        cc = cfg.condense
        overrides["condense"] = CondensationConfig(
            d1=args.d1 if args.d1 is not None else cc.d1,
            d2=args.d2 if args.d2 is not None else cc.d2,
            grid_rows=cc.grid_rows,
            grid_cols=cc.grid_cols,
        )
    return replace(cfg, **overrides) if overrides else cfg


def cmd_synth(args) -> int:
    with open(args.spec, "r", encoding="utf-8") as fh:
        spec = SynthSpec.from_json_dict(json.load(fh))
    seq = synth_video(spec)
    write_frame_bank(seq, args.out)
    print(f"wrote {args.out}: {seq.T} frames {seq.width}x{seq.height} @ {seq.fps:g} fps")
    return 0


def cmd_extract_keyframes(args) -> int:
    seq = read_frame_bank(args.input)
    kf = KeyframeConfig(
        tau=args.tau, gop_max=args.gop_max, min_gap=args.min_gap, delta=args.delta
    )
    metric = MetricConfig(window=args.window, stride=args.stride)
    plan = select_keyframes(seq, kf, metric)
    with open(args.out, "wb") as fh:
        fh.write(dump_json_bytes(plan.to_json_dict()))
    counts = plan.kind_counts()
    print(
        f"wrote {args.out}: {counts['iframe']} iframes + "
        f"{counts['compensation']} compensation of {seq.T} frames"
    )
    return 0


def cmd_plan(args) -> int:
    cfg = _load_config(args)
    out = args.out or cfg.plan_path
    if out is None:
        raise ValueError("no plan output path (use --out or outputs.plan in the config)")
    result = run(cfg)
    with open(out, "wb") as fh:
        fh.write(dump_json_bytes(plan_document(cfg, result)))
    rep = result.report
    print(
        f"wrote {out}: K={len(result.keyframes.entries)} focus={rep.focus_frames} "
        f"tokens={rep.total_tokens} baseline={rep.baseline_total_tokens} "
        f"ratio={rep.compression_ratio:.2f}x"
    )
    return 0


def cmd_pack(args) -> int:
    cfg = _load_config(args)
    out = args.out or cfg.tokens_path
    if out is None:
        raise ValueError("no token output path (use --out or outputs.tokens in the config)")
    result = run(cfg)
    assembly.pack(result.tokens, out)
    s = result.tokens.summary
    print(
        f"wrote {out}: {s.total} tokens ({s.patch_tokens} patch, "
        f"{s.intra_separators} intra, {s.inter_separators} inter)"
    )
    return 0


def cmd_report(args) -> int:
    with open(args.plan, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    report = doc["report"]
    cond = doc["condensation"]
    ccfg = doc["config"]["condense"]
    alpha = doc["config"]["relevance"]["alpha"]
    cfg = CondensationConfig(
        d1=ccfg["d1"], d2=ccfg["d2"], grid_rows=ccfg["grid_rows"], grid_cols=ccfg["grid_cols"]
    )
    T = doc["keyframes"]["T"]
    interval = args.baseline_interval or report["baseline"]["interval"]
    baseline_frames = len(range(0, T, interval))
    focus = sum(1 for e in cond if e["focused"])
    _, baseline_total = baseline_token_total(cfg, alpha, baseline_frames)
    ours = report["tokens"]["total"]
    with open(args.csv, "wb") as fh:
        fh.write(report_csv_bytes(report["per_frame"]))
    print(
        f"wrote {args.csv}: {len(report['per_frame'])} rows, ours={ours} "
        f"(focus={focus}) baseline[M={interval}]={baseline_total} "
        f"ratio={baseline_total / ours:.2f}x"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kfpack",
        description="Keyframe-driven video token compression pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a synthetic test video to a .kfv bank")
    p.add_argument("--spec", required=True, help="JSON synth spec")
    p.add_argument("--out", required=True, help="output .kfv path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract-keyframes", help="select keyframes from a .kfv bank")
    p.add_argument("--in", dest="input", required=True, help="input .kfv path")
    p.add_argument("--out", required=True, help="output plan JSON path")
    p.add_argument("--tau", type=float, default=0.15)
    p.add_argument("--gop-max", type=int, default=30)
    p.add_argument("--min-gap", type=int, default=1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--window", type=int, default=8)
    p.add_argument("--stride", type=int, default=4)
    p.set_defaults(func=cmd_extract_keyframes)

    def pipeline_flags(p):
        p.add_argument("--config", help="JSON pipeline config")
        p.add_argument("--frames", help=".kfv frame bank")
        p.add_argument("--patch-embeddings", dest="patch_embeddings", help="patch-grid .kfe")
        p.add_argument("--frame-embeddings", dest="frame_embeddings", help="frame-level .kfe")
        p.add_argument("--query", help="single-row frame-level .kfe")
        p.add_argument("--weights", help=".kfw temporal weights (falls back to seeded init)")
        p.add_argument("--tau", type=float)
        p.add_argument("--gop-max", dest="gop_max", type=int)
        p.add_argument("--delta", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--d1", type=int)
        p.add_argument("--d2", type=int)
        p.add_argument("--bins", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--dim", type=int)
        p.add_argument("--baseline-interval", dest="baseline_interval", type=int)

    p = sub.add_parser("plan", help="run the pipeline and write the combined plan JSON")
    pipeline_flags(p)
    p.add_argument("--out", help="output plan JSON path")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("pack", help="run the pipeline and write the packed .kft tokens")
    pipeline_flags(p)
    p.add_argument("--out", help="output .kft path")
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("report", help="emit the per-frame CSV from a plan JSON")
    p.add_argument("--plan", required=True, help="plan JSON from the plan subcommand")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--baseline-interval", dest="baseline_interval", type=int)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, FormatError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
