"""Reference SSIM / PSNR between luma frames.

The SSIM variant is fixed so results are reproducible: uniform (unweighted)
square window, default 8x8 stepped by 4, population (/n) variance, and the
final right/bottom-aligned window included whenever the stride does not land
on the edge. Window sums come from int64 integral images, so they are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .media_io import Frame


@dataclass(frozen=True)
class MetricConfig:
    window: int = 8
    stride: int = 4
    dynamic_range: int = 255

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.dynamic_range <= 0:
            raise ValueError("dynamic range must be > 0")

    @property
    def c1(self) -> float:
        return (0.01 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (0.03 * self.dynamic_range) ** 2


DEFAULT_METRICS = MetricConfig()


def _check_pair(a: Frame, b: Frame) -> None:
    if a.luma.shape != b.luma.shape:
        raise ValueError(
            f"dimension mismatch: {a.luma.shape} vs {b.luma.shape}"
        )


def psnr(a: Frame, b: Frame, cfg: MetricConfig | None = None) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical frames."""
    cfg = cfg or DEFAULT_METRICS
    _check_pair(a, b)
    diff = a.luma.astype(np.int64) - b.luma.astype(np.int64)
    total = int((diff * diff).sum())
    if total == 0:
        return math.inf
    mse = total / diff.size
    peak = float(cfg.dynamic_range)
    return 10.0 * math.log10(peak * peak / mse)


def _window_origins(extent: int, window: int, stride: int) -> np.ndarray:
    last = extent - window
    xs = list(range(0, last + 1, stride))
    if xs[-1] != last:
        xs.append(last)  # right/bottom-aligned edge window
    return np.asarray(xs, dtype=np.intp)


def _integral(m: np.ndarray) -> np.ndarray:
    s = np.zeros((m.shape[0] + 1, m.shape[1] + 1), dtype=np.int64)
    np.cumsum(np.cumsum(m, axis=0), axis=1, out=s[1:, 1:])
    return s


def ssim(a: Frame, b: Frame, cfg: MetricConfig | None = None) -> float:
    """Mean structural similarity over the window grid, in [-1, 1].

    Exactly symmetric in its arguments: every per-window term commutes
    bitwise under swapping a and b.
    """
    cfg = cfg or DEFAULT_METRICS
    _check_pair(a, b)
    h, w = a.luma.shape
    win = cfg.window
    if win > min(h, w):
        raise ValueError(f"window {win} larger than frame {h}x{w}")

    A = a.luma.astype(np.int64)
    B = b.luma.astype(np.int64)
    sums = [_integral(m) for m in (A, B, A * A, B * B, A * B)]

    ys = _window_origins(h, win, cfg.stride)
    xs = _window_origins(w, win, cfg.stride)
    Y, X = np.meshgrid(ys, xs, indexing="ij")

    def wsum(s: np.ndarray) -> np.ndarray:
        return s[Y + win, X + win] - s[Y, X + win] - s[Y + win, X] + s[Y, X]

    n = float(win * win)
    mu_a = wsum(sums[0]) / n
    mu_b = wsum(sums[1]) / n
    var_a = wsum(sums[2]) / n - mu_a * mu_a  # population variance
    var_b = wsum(sums[3]) / n - mu_b * mu_b
    cov = wsum(sums[4]) / n - mu_a * mu_b

    c1, c2 = cfg.c1, cfg.c2
    num = (2.0 * (mu_a * mu_b) + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    score = float((num / den).mean())
    return min(1.0, max(-1.0, score))


def dissimilarity(a: Frame, b: Frame, cfg: MetricConfig | None = None) -> float:
    """1 - ssim: the change signal used for keyframe detection, in [0, 2]."""
    return 1.0 - ssim(a, b, cfg)
