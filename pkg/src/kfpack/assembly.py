"""Flat token sequence construction and the ``.kft`` container.

Per frame, in temporal order: each row of the pooled grid is emitted
left-to-right and closed with one intra separator; after the last row one
inter separator closes the frame. Both separators are the frame's temporal
embedding pushed through the role's projector, so a frame contributes
rows_out * cols_out + rows_out + 1 tokens.

``.kft`` layout (little-endian):
    magic ``KFVT`` | u16 version=1 | u32 token_count | u32 dim
    | per token: u8 tag (0 patch, 1 intra_sep, 2 inter_sep)
                 | u32 frame_index | u32 temporal_bin | dim f32 values.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .condense import CondensationPlan, CondensedFrame
from .media_io import FormatError
from .temporal import Projector, TemporalTable, project, temporal_bin

TOKENS_MAGIC = b"KFVT"
TOKENS_VERSION = 1

TAG_PATCH = "patch"
TAG_INTRA_SEP = "intra_sep"
TAG_INTER_SEP = "inter_sep"
_TAG_CODES = {TAG_PATCH: 0, TAG_INTRA_SEP: 1, TAG_INTER_SEP: 2}
_TAG_NAMES = {v: k for k, v in _TAG_CODES.items()}


@dataclass(frozen=True, eq=False)
class Token:
    tag: str
    frame_index: int
    temporal_bin: int
    values: np.ndarray  # (dim,) float32

    def __eq__(self, other):
        if not isinstance(other, Token):
            return NotImplemented
        return (
            self.tag == other.tag
            and self.frame_index == other.frame_index
            and self.temporal_bin == other.temporal_bin
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class TokenSummary:
    frames: int
    focus_frames: int | None  # None when not recoverable (e.g. unpacked files)
    patch_tokens: int
    intra_separators: int
    inter_separators: int
    total: int


@dataclass(frozen=True, eq=False)
class TokenSequence:
    tokens: tuple[Token, ...]
    summary: TokenSummary

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        s = self.summary
        if s.total != len(self.tokens):
            raise ValueError("summary total does not match token count")
        if s.total != s.patch_tokens + s.intra_separators + s.inter_separators:
            raise ValueError("summary totals are inconsistent")
        prev = -1
        for tok in self.tokens:
            if tok.frame_index < prev:
                raise ValueError("frame_index must be non-decreasing along the sequence")
            prev = tok.frame_index

    def __eq__(self, other):
        if not isinstance(other, TokenSequence):
            return NotImplemented
        return self.summary == other.summary and all(
            a == b for a, b in zip(self.tokens, other.tokens)
        )


def _summary_from_tokens(tokens: Sequence[Token], focus_frames: int | None) -> TokenSummary:
    patch = sum(1 for t in tokens if t.tag == TAG_PATCH)
    intra = sum(1 for t in tokens if t.tag == TAG_INTRA_SEP)
    inter = sum(1 for t in tokens if t.tag == TAG_INTER_SEP)
    return TokenSummary(
        frames=inter,
        focus_frames=focus_frames,
        patch_tokens=patch,
        intra_separators=intra,
        inter_separators=inter,
        total=len(tokens),
    )


def assemble(
    condensed: Sequence[CondensedFrame],
    plan: CondensationPlan,
    table: TemporalTable,
    g_intra: Projector,
    g_inter: Projector,
    T: int,
) -> TokenSequence:
    """Lay out pooled grids and separators into one flat sequence."""
    if len(condensed) != len(plan.entries):
        raise ValueError(
            f"plan has {len(plan.entries)} entries but {len(condensed)} condensed frames"
        )
    if g_intra.role != "intra" or g_inter.role != "inter":
        raise ValueError("projector roles are swapped")
    tokens: list[Token] = []
    for frame, entry in zip(condensed, plan.entries):
        if frame.frame_index != entry.frame_index:
            raise ValueError(
                f"condensed frame {frame.frame_index} does not match plan entry "
                f"{entry.frame_index}"
            )
        rows, cols, dim = frame.grid.shape
        if (rows, cols) != (entry.rows_out, entry.cols_out):
            raise ValueError(
                f"frame {frame.frame_index}: grid {rows}x{cols} does not match plan "
                f"{entry.rows_out}x{entry.cols_out}"
            )
        if dim != table.dim or dim != g_intra.dim or dim != g_inter.dim:
            raise ValueError("token dim must match table and projector dims")
        b = temporal_bin(frame.frame_index, T, table.bins)
        eps = table.table[b]
        sep_intra = project(g_intra, eps)
        sep_inter = project(g_inter, eps)
        for r in range(rows):
            for c in range(cols):
                tokens.append(
                    Token(TAG_PATCH, frame.frame_index, b, frame.grid[r, c])
                )
            tokens.append(Token(TAG_INTRA_SEP, frame.frame_index, b, sep_intra))
        tokens.append(Token(TAG_INTER_SEP, frame.frame_index, b, sep_inter))
    return TokenSequence(
        tokens=tuple(tokens),
        summary=_summary_from_tokens(tokens, plan.focus_count()),
    )


# ---------------------------------------------------------------------------
# .kft container
# ---------------------------------------------------------------------------

_KFT_HEADER = struct.Struct("<HII")  # version, token_count, dim
_TOKEN_HEADER = struct.Struct("<BII")  # tag, frame_index, temporal_bin


def pack(seq: TokenSequence, path) -> None:
    if not seq.tokens:
        raise ValueError("refusing to pack an empty token sequence")
    dim = seq.tokens[0].values.shape[0]
    with open(path, "wb") as fh:
        fh.write(TOKENS_MAGIC)
        fh.write(_KFT_HEADER.pack(TOKENS_VERSION, len(seq.tokens), dim))
        for tok in seq.tokens:
            if tok.values.shape != (dim,):
                raise ValueError("all tokens must share one dim")
            fh.write(_TOKEN_HEADER.pack(_TAG_CODES[tok.tag], tok.frame_index, tok.temporal_bin))
            fh.write(np.ascontiguousarray(tok.values, dtype="<f4").tobytes())


def unpack(path) -> TokenSequence:
    with open(path, "rb") as fh:
        blob = fh.read()
    off = 4 + _KFT_HEADER.size
    if len(blob) < off:
        raise FormatError(f"truncated header: {len(blob)} bytes, need {off}")
    if blob[:4] != TOKENS_MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {TOKENS_MAGIC!r}")
    version, count, dim = _KFT_HEADER.unpack_from(blob, 4)
    if version != TOKENS_VERSION:
        raise FormatError(f"unsupported token container version {version}")
    if count == 0:
        raise FormatError("token container declares zero tokens")
    record = _TOKEN_HEADER.size + dim * 4
    expected = off + count * record
    if len(blob) != expected:
        raise FormatError(
            f"payload length mismatch: expected {expected} bytes, got {len(blob)}"
        )
    tokens: list[Token] = []
    for _ in range(count):
        tag_code, frame_index, b = _TOKEN_HEADER.unpack_from(blob, off)
        off += _TOKEN_HEADER.size
        if tag_code not in _TAG_NAMES:
            raise FormatError(f"unknown token tag code {tag_code}")
        values = np.frombuffer(blob, dtype="<f4", count=dim, offset=off).astype(np.float32)
        off += dim * 4
        tokens.append(Token(_TAG_NAMES[tag_code], frame_index, b, values))
    # The focus split is not stored in the container, so it is unknown here.
    return TokenSequence(tokens=tuple(tokens), summary=_summary_from_tokens(tokens, None))
