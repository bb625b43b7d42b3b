"""Frame banks, embedding sets, and the synthetic video generator.

On-disk formats (all integers little-endian):

``.kfv`` frame bank
    magic ``KFVB`` | u16 version=1 | u16 width | u16 height | u32 frame_count
    | u32 fps_num | u32 fps_den | frame_count * height * width bytes of
    row-major 8-bit luma.

``.kfe`` embedding set
    magic ``KFVE`` | u16 version=1 | u8 kind (0 frame-level, 1 patch-grid)
    | u32 count | u16 grid_rows | u16 grid_cols | u32 dim
    | count * rows * cols * dim f32 values.

Both formats round-trip byte-exactly: ``write(read(f)) == f``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .rng import splitmix64

FRAME_BANK_MAGIC = b"KFVB"
EMBEDDING_MAGIC = b"KFVE"
FORMAT_VERSION = 1

KIND_FRAME_LEVEL = "frame-level"
KIND_PATCH_GRID = "patch-grid"
_KIND_CODES = {KIND_FRAME_LEVEL: 0, KIND_PATCH_GRID: 1}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}

MIN_FRAME_EDGE = 8  # metric windows must fit

# Pattern amplitude around the segment level, per segment kind.
MOTION_AMPLITUDE = 32
NOISE_AMPLITUDE = 24


class FormatError(ValueError):
    """A file does not parse as the declared format."""


@dataclass(frozen=True, eq=False)
class Frame:
    """One decoded luma plane with its position in the source video."""

    index: int
    luma: np.ndarray  # (height, width) uint8

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("frame index must be >= 0")
        if self.luma.ndim != 2 or self.luma.dtype != np.uint8:
            raise ValueError("luma must be a 2-D uint8 array")
        if min(self.luma.shape) < MIN_FRAME_EDGE:
            raise ValueError(
                f"frame dimensions must be >= {MIN_FRAME_EDGE}, got {self.luma.shape}"
            )

    @property
    def height(self) -> int:
        return self.luma.shape[0]

    @property
    def width(self) -> int:
        return self.luma.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.luma, other.luma)


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Contiguously indexed frames sharing one geometry and frame rate."""

    frames: tuple[Frame, ...]
    fps_num: int = 30
    fps_den: int = 1

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if not self.frames:
            raise ValueError("a frame sequence needs at least one frame")
        if self.fps_num < 1 or self.fps_den < 1:
            raise ValueError("fps must be a positive rational")
        w, h = self.frames[0].width, self.frames[0].height
        for t, f in enumerate(self.frames):
            if f.index != t:
                raise ValueError(f"frame indices must be 0..T-1 contiguous (got {f.index} at {t})")
            if f.width != w or f.height != h:
                raise ValueError("all frames must share width/height")

    @property
    def T(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def fps(self) -> float:
        return self.fps_num / self.fps_den

    def __eq__(self, other):
        if not isinstance(other, FrameSequence):
            return NotImplemented
        return (
            self.fps_num == other.fps_num
            and self.fps_den == other.fps_den
            and len(self.frames) == len(other.frames)
            and all(a == b for a, b in zip(self.frames, other.frames))
        )


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Per-frame vectors (frame-level, 1x1 grid) or patch-token grids."""

    kind: str
    data: np.ndarray  # (count, rows, cols, dim) float32

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        if self.data.ndim != 4 or self.data.dtype != np.float32:
            raise ValueError("embedding data must be a 4-D float32 array")
        count, rows, cols, dim = self.data.shape
        if count < 1 or dim < 1:
            raise ValueError("embedding set must have count >= 1 and dim >= 1")
        if self.kind == KIND_FRAME_LEVEL and (rows, cols) != (1, 1):
            raise ValueError("frame-level embeddings must have a 1x1 grid")
        if rows < 1 or cols < 1:
            raise ValueError("grid dimensions must be >= 1")

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def grid_rows(self) -> int:
        return self.data.shape[1]

    @property
    def grid_cols(self) -> int:
        return self.data.shape[2]

    @property
    def dim(self) -> int:
        return self.data.shape[3]

    def vector(self, index: int) -> np.ndarray:
        """Frame-level vector for one source frame."""
        if self.kind != KIND_FRAME_LEVEL:
            raise ValueError("vector() is only defined for frame-level sets")
        return self.data[index, 0, 0, :]

    def grid(self, index: int) -> np.ndarray:
        """(rows, cols, dim) patch grid for one source frame."""
        return self.data[index]

    def __eq__(self, other):
        if not isinstance(other, EmbeddingSet):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.data, other.data)


# ---------------------------------------------------------------------------
# frame bank I/O
# ---------------------------------------------------------------------------

_KFV_HEADER = struct.Struct("<HHHIII")  # version, width, height, count, fps_num, fps_den


def write_frame_bank(seq: FrameSequence, path) -> None:
    """Write a ``.kfv`` file; the sequence invariants are already enforced."""
    w, h = seq.width, seq.height
    if w > 0xFFFF or h > 0xFFFF:
        raise ValueError("frame bank stores width/height as u16")
    with open(path, "wb") as fh:
        fh.write(FRAME_BANK_MAGIC)
        fh.write(_KFV_HEADER.pack(FORMAT_VERSION, w, h, seq.T, seq.fps_num, seq.fps_den))
        for f in seq.frames:
            fh.write(np.ascontiguousarray(f.luma).tobytes())


def read_frame_bank(path) -> FrameSequence:
    with open(path, "rb") as fh:
        blob = fh.read()
    head = 4 + _KFV_HEADER.size
    if len(blob) < head:
        raise FormatError(f"truncated header: {len(blob)} bytes, need {head}")
    if blob[:4] != FRAME_BANK_MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {FRAME_BANK_MAGIC!r}")
    version, w, h, count, fps_num, fps_den = _KFV_HEADER.unpack_from(blob, 4)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported frame bank version {version}")
    if count == 0:
        raise FormatError("frame bank declares zero frames")
    expected = count * w * h
    payload = blob[head:]
    if len(payload) != expected:
        raise FormatError(
            f"truncated payload: expected {expected} luma bytes, got {len(payload)}"
        )
    planes = np.frombuffer(payload, dtype=np.uint8).reshape(count, h, w)
    frames = tuple(Frame(index=t, luma=planes[t].copy()) for t in range(count))
    return FrameSequence(frames=frames, fps_num=fps_num, fps_den=fps_den)


# ---------------------------------------------------------------------------
# embedding I/O
# ---------------------------------------------------------------------------

_KFE_HEADER = struct.Struct("<HBIHHI")  # version, kind, count, rows, cols, dim


def write_embeddings(emb: EmbeddingSet, path) -> None:
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(
            _KFE_HEADER.pack(
                FORMAT_VERSION,
                _KIND_CODES[emb.kind],
                emb.count,
                emb.grid_rows,
                emb.grid_cols,
                emb.dim,
            )
        )
        fh.write(np.ascontiguousarray(emb.data, dtype="<f4").tobytes())


def read_embeddings(path) -> EmbeddingSet:
    with open(path, "rb") as fh:
        blob = fh.read()
    head = 4 + _KFE_HEADER.size
    if len(blob) < head:
        raise FormatError(f"truncated header: {len(blob)} bytes, need {head}")
    if blob[:4] != EMBEDDING_MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {EMBEDDING_MAGIC!r}")
    version, kind_code, count, rows, cols, dim = _KFE_HEADER.unpack_from(blob, 4)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported embedding version {version}")
    if kind_code not in _KIND_NAMES:
        raise FormatError(f"unknown embedding kind code {kind_code}")
    expected = count * rows * cols * dim * 4
    payload = blob[head:]
    if len(payload) != expected:
        raise FormatError(
            f"payload length mismatch: expected {expected} bytes, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").astype(np.float32).reshape(count, rows, cols, dim)
    return EmbeddingSet(kind=_KIND_NAMES[kind_code], data=data)


# ---------------------------------------------------------------------------
# synthetic videos
# ---------------------------------------------------------------------------

SEGMENT_KINDS = ("static", "linear-motion", "noise")
_AMPLITUDE = {"static": 0, "linear-motion": MOTION_AMPLITUDE, "noise": NOISE_AMPLITUDE}


@dataclass(frozen=True)
class Segment:
    kind: str
    length: int
    base_intensity: int = 128
    cut_magnitude: int = 0

    def __post_init__(self):
        if self.kind not in SEGMENT_KINDS:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.length < 1:
            raise ValueError("segment length must be >= 1")
        if not 0 <= self.base_intensity <= 255:
            raise ValueError("base intensity must be in [0, 255]")
        if not 0 <= self.cut_magnitude <= 255:
            raise ValueError("cut magnitude must be in [0, 255]")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a deterministic test video.

    The first segment sits at its own ``base_intensity``; every later
    segment sits at the previous level shifted by its ``cut_magnitude``
    (upward when that stays in range, downward otherwise), so the mean
    intensity change across each cut equals the declared magnitude exactly.
    ``base_intensity`` of later segments is therefore ignored.
    """

    T: int
    width: int
    height: int
    segments: tuple[Segment, ...]
    seed: int = 0
    fps_num: int = 30
    fps_den: int = 1

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("need at least one segment")
        total = sum(s.length for s in self.segments)
        if total != self.T:
            raise ValueError(f"segment lengths sum to {total}, spec declares T={self.T}")
        if self.width < MIN_FRAME_EDGE or self.height < MIN_FRAME_EDGE:
            raise ValueError(f"frame dimensions must be >= {MIN_FRAME_EDGE}")

    @staticmethod
    def from_json_dict(d: dict) -> "SynthSpec":
        segments = tuple(
            Segment(
                kind=s["kind"],
                length=int(s["length"]),
                base_intensity=int(s.get("base_intensity", 128)),
                cut_magnitude=int(s.get("cut_magnitude", 0)),
            )
            for s in d.get("segments", [])
        )
        return SynthSpec(
            T=int(d["T"]),
            width=int(d["width"]),
            height=int(d["height"]),
            segments=segments,
            seed=int(d.get("seed", 0)),
            fps_num=int(d.get("fps_num", 30)),
            fps_den=int(d.get("fps_den", 1)),
        )


def _segment_levels(segments: Sequence[Segment]) -> list[int]:
    levels = []
    for i, seg in enumerate(segments):
        amp = _AMPLITUDE[seg.kind]
        if i == 0:
            level = seg.base_intensity
            if level - amp < 0 or level + amp > 255:
                raise ValueError(
                    f"segment 0: base {level} leaves no room for amplitude {amp}"
                )
        else:
            up = levels[-1] + seg.cut_magnitude
            down = levels[-1] - seg.cut_magnitude
            if up + amp <= 255 and up - amp >= 0:
                level = up
            elif down - amp >= 0 and down + amp <= 255:
                level = down
            else:
                raise ValueError(
                    f"segment {i}: cut {seg.cut_magnitude} from level {levels[-1]} "
                    f"cannot stay in [0, 255] with amplitude {amp}"
                )
        levels.append(level)
    return levels


def _motion_ramp(width: int) -> np.ndarray:
    """Zero-sum integer gradient: antisymmetric staircase of amplitude +-32."""
    x = np.arange(width, dtype=np.int64)
    f = (MOTION_AMPLITUDE * x) // (width - 1)
    return f - f[::-1]


def _noise_pattern(seed: int, pixels: int) -> np.ndarray:
    """Zero-sum noise in [-24, 24]: second half mirrors the negated first half."""
    half = pixels // 2
    raw = splitmix64(seed, half) >> np.uint64(40)
    vals = (raw.astype(np.int64) % (2 * NOISE_AMPLITUDE + 1)) - NOISE_AMPLITUDE
    out = np.zeros(pixels, dtype=np.int64)
    out[:half] = vals
    out[pixels - half :] = -vals[::-1]
    return out


def synth_video(spec: SynthSpec) -> FrameSequence:
    """Render the spec into frames. Pure function: same spec, same bytes."""
    levels = _segment_levels(spec.segments)
    frame_seeds = splitmix64(spec.seed, spec.T)
    h, w = spec.height, spec.width
    frames: list[Frame] = []
    t = 0
    for seg, level in zip(spec.segments, levels):
        if seg.kind == "static":
            plane = np.full((h, w), level, dtype=np.uint8)
            for _ in range(seg.length):
                frames.append(Frame(index=t, luma=plane))
                t += 1
        elif seg.kind == "linear-motion":
            ramp = _motion_ramp(w)
            for local in range(seg.length):
                row = level + np.roll(ramp, local)
                plane = np.broadcast_to(row, (h, w)).astype(np.uint8)
                frames.append(Frame(index=t, luma=plane))
                t += 1
        else:  # noise
            for _ in range(seg.length):
                pat = _noise_pattern(int(frame_seeds[t]), h * w)
                plane = (level + pat.reshape(h, w)).astype(np.uint8)
                frames.append(Frame(index=t, luma=plane))
                t += 1
    return FrameSequence(frames=tuple(frames), fps_num=spec.fps_num, fps_den=spec.fps_den)
