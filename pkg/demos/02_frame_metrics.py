"""How the frame-pair metrics behave, and why 1 - SSIM drives detection.

The SSIM here is a fixed, reproducible variant: uniform 8x8 windows
stepped by 4 (plus the right/bottom edge windows), population variance.
PSNR is computed alongside for reports; it is unbounded, which is why the
bounded SSIM is the selection signal.
"""

import numpy as np

from kfpack import Frame, MetricConfig, Segment, SynthSpec, dissimilarity, psnr, ssim, synth_video

seq = synth_video(
    SynthSpec(
        T=20,
        width=32,
        height=32,
        seed=3,
        segments=(
            Segment("static", 10, base_intensity=50),
            Segment("static", 10, cut_magnitude=128),
        ),
    )
)

same = ssim(seq.frames[0], seq.frames[1])
cut = ssim(seq.frames[9], seq.frames[10])
print(f"ssim within static span : {same}")
print(f"ssim across the cut     : {cut:.4f}")
print(f"dissimilarity at the cut: {dissimilarity(seq.frames[9], seq.frames[10]):.4f}")

print(f"psnr identical frames   : {psnr(seq.frames[0], seq.frames[1])} dB")
print(f"psnr across the cut     : {psnr(seq.frames[9], seq.frames[10]):.2f} dB")

# PSNR falls, and dissimilarity rises, as a uniform offset grows
base = Frame(0, np.full((32, 32), 60, np.uint8))
for offset in (4, 16, 64):
    other = Frame(0, np.full((32, 32), 60 + offset, np.uint8))
    print(
        f"offset {offset:3d}: psnr {psnr(base, other):6.2f} dB, "
        f"dissimilarity {dissimilarity(base, other):.4f}"
    )

# the window grid is configurable; dense striding changes little on smooth
# content but costs more windows
loose = MetricConfig(window=8, stride=8)
dense = MetricConfig(window=8, stride=1)
a, b = seq.frames[9], seq.frames[10]
print(f"cut ssim with stride 8: {ssim(a, b, loose):.6f}")
print(f"cut ssim with stride 1: {ssim(a, b, dense):.6f}")
