"""Keyframe selection versus the fixed-interval baseline.

Detection keeps frame 0, every frame whose dissimilarity to its
predecessor crosses tau, and forces a frame whenever gop_max frames pass
quietly. Compensation then fills each gap of length T_k with
floor(T_k / (delta * T)) evenly spaced extra frames so long static spans
stay covered.
"""

from kfpack import (
    KeyframeConfig,
    Segment,
    SynthSpec,
    insert_compensation,
    select_keyframes,
    synth_video,
    uniform_sample,
)

# a two-minute 30 fps video that is almost entirely still, with two cuts
seq = synth_video(
    SynthSpec(
        T=3600,
        width=16,
        height=16,
        fps_num=30,
        segments=(
            Segment("static", 1200, base_intensity=32),
            Segment("static", 1200, cut_magnitude=128),
            Segment("static", 1200, cut_magnitude=128),
        ),
    )
)

baseline = uniform_sample(seq, round(seq.fps))  # one frame per second
print(f"uniform baseline keeps {len(baseline.entries)} of {seq.T} frames")

plan = select_keyframes(seq, KeyframeConfig(tau=0.15, gop_max=3600, delta=0.05))
counts = plan.kind_counts()
print(
    f"keyframe plan keeps {len(plan.entries)} frames "
    f"({counts['iframe']} detected, {counts['compensation']} compensation)"
)
iframes = [e.t for e in plan.entries if e.kind == "iframe"]
print(f"detected cuts at {iframes[1:]} (frame 0 is always kept)")
for g in plan.gaps:
    print(f"  gap of {g.t_k} frames received {g.n} compensation frames")

# with the default GoP limit of 30 the forcing grid dominates on still video
forced = select_keyframes(seq, KeyframeConfig(tau=0.15, gop_max=30, delta=0.05))
print(f"with gop_max=30 the plan grows to {len(forced.entries)} frames")

# compensation spacing is even: a lone keyframe splits the tail uniformly
lone = insert_compensation([0], 100, 0.5)
print(f"single keyframe over 100 frames at delta=0.5 -> {lone.indices()}")
