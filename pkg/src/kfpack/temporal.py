"""Discretized temporal tokens and the intra/inter separator projectors.

A frame at index k of a T-frame video falls into bin floor(bins * k / T)
of the embedding table; the table row is pushed through one affine map per
separator role. Without trained weights the table is seeded-random and the
projectors are identity, which keeps every downstream value checkable.

``.kfw`` weight container (little-endian):
    magic ``KFVW`` | u16 version=1 | u32 bins | u32 dim | bins*dim f32 table
    | twice: u8 role (0 intra, 1 inter) | u8 layer_count (=1)
             | dim*dim f32 weights row-major | dim f32 bias.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .media_io import FormatError
from .rng import uniform_small

WEIGHTS_MAGIC = b"KFVW"
WEIGHTS_VERSION = 1

ROLE_INTRA = "intra"
ROLE_INTER = "inter"
_ROLE_CODES = {ROLE_INTRA: 0, ROLE_INTER: 1}
_ROLE_NAMES = {v: k for k, v in _ROLE_CODES.items()}

TABLE_VALUE_SCALE = 0.02  # generated entries lie in [-0.02, 0.02)


@dataclass(frozen=True, eq=False)
class TemporalTable:
    table: np.ndarray  # (bins, dim) float32
    seed: int | None = None

    def __post_init__(self):
        if self.table.ndim != 2 or self.table.dtype != np.float32:
            raise ValueError("table must be a 2-D float32 array")
        if self.bins < 1 or self.dim < 1:
            raise ValueError("table must have bins >= 1 and dim >= 1")

    @property
    def bins(self) -> int:
        return self.table.shape[0]

    @property
    def dim(self) -> int:
        return self.table.shape[1]

    def __eq__(self, other):
        if not isinstance(other, TemporalTable):
            return NotImplemented
        return np.array_equal(self.table, other.table)


@dataclass(frozen=True, eq=False)
class Projector:
    weights: np.ndarray  # (dim, dim) float32
    bias: np.ndarray  # (dim,) float32
    role: str

    def __post_init__(self):
        if self.role not in _ROLE_CODES:
            raise ValueError(f"unknown projector role {self.role!r}")
        if self.weights.ndim != 2 or self.weights.shape[0] != self.weights.shape[1]:
            raise ValueError("weights must be square")
        if self.weights.dtype != np.float32 or self.bias.dtype != np.float32:
            raise ValueError("projector arrays must be float32")
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError("bias length must match the weight matrix")

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Projector):
            return NotImplemented
        return (
            self.role == other.role
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.bias, other.bias)
        )


def temporal_bin(k: int, T: int, bins: int) -> int:
    """floor(bins * k / T) in pure integer arithmetic; always < bins."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if T < 1:
        raise ValueError("T must be >= 1")
    if not 0 <= k < T:
        raise ValueError(f"frame index {k} out of range [0, {T})")
    return (bins * k) // T


def init_table(seed: int, bins: int, dim: int) -> TemporalTable:
    """Deterministic stand-in table: SplitMix64 values in [-0.02, 0.02)."""
    values = uniform_small(seed, bins * dim, scale=TABLE_VALUE_SCALE)
    return TemporalTable(table=values.reshape(bins, dim), seed=seed)


def identity_projector(dim: int, role: str) -> Projector:
    return Projector(
        weights=np.eye(dim, dtype=np.float32),
        bias=np.zeros(dim, dtype=np.float32),
        role=role,
    )


def project(p: Projector, v: np.ndarray) -> np.ndarray:
    """W @ v + b, accumulated in f64 and rounded to f32."""
    v = np.asarray(v)
    if v.shape != (p.dim,):
        raise ValueError(f"vector shape {v.shape} does not match projector dim {p.dim}")
    out = p.weights.astype(np.float64) @ v.astype(np.float64) + p.bias.astype(np.float64)
    return out.astype(np.float32)


# ---------------------------------------------------------------------------
# weight container I/O
# ---------------------------------------------------------------------------

_KFW_HEADER = struct.Struct("<HII")  # version, bins, dim
_PROJ_HEADER = struct.Struct("<BB")  # role, layer_count


def save_weights(path, table: TemporalTable, intra: Projector, inter: Projector) -> None:
    if intra.role != ROLE_INTRA or inter.role != ROLE_INTER:
        raise ValueError("projector roles are swapped")
    if intra.dim != table.dim or inter.dim != table.dim:
        raise ValueError("projector dims must match the table dim")
    with open(path, "wb") as fh:
        fh.write(WEIGHTS_MAGIC)
        fh.write(_KFW_HEADER.pack(WEIGHTS_VERSION, table.bins, table.dim))
        fh.write(np.ascontiguousarray(table.table, dtype="<f4").tobytes())
        for p in (intra, inter):
            fh.write(_PROJ_HEADER.pack(_ROLE_CODES[p.role], 1))
            fh.write(np.ascontiguousarray(p.weights, dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(p.bias, dtype="<f4").tobytes())


def load_weights(
    path, expected_bins: int | None = None, expected_dim: int | None = None
) -> tuple[TemporalTable, Projector, Projector]:
    """Read a ``.kfw`` container; returns (table, intra, inter)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    off = 4 + _KFW_HEADER.size
    if len(blob) < off:
        raise FormatError(f"truncated header: {len(blob)} bytes, need {off}")
    if blob[:4] != WEIGHTS_MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {WEIGHTS_MAGIC!r}")
    version, bins, dim = _KFW_HEADER.unpack_from(blob, 4)
    if version != WEIGHTS_VERSION:
        raise FormatError(f"unsupported weights version {version}")
    if expected_bins is not None and bins != expected_bins:
        raise FormatError(f"table has {bins} bins, configuration expects {expected_bins}")
    if expected_dim is not None and dim != expected_dim:
        raise FormatError(f"table dim {dim} does not match configured dim {expected_dim}")

    def take(count: int) -> np.ndarray:
        nonlocal off
        end = off + count * 4
        if end > len(blob):
            raise FormatError("weight payload truncated")
        vals = np.frombuffer(blob, dtype="<f4", count=count, offset=off).astype(np.float32)
        off = end
        return vals

    table = TemporalTable(table=take(bins * dim).reshape(bins, dim))
    projectors: dict[str, Projector] = {}
    for _ in range(2):
        if off + _PROJ_HEADER.size > len(blob):
            raise FormatError("missing projector record")
        role_code, layers = _PROJ_HEADER.unpack_from(blob, off)
        off += _PROJ_HEADER.size
        if role_code not in _ROLE_NAMES:
            raise FormatError(f"unknown projector role code {role_code}")
        if layers != 1:
            raise FormatError(f"unsupported projector layer count {layers}")
        role = _ROLE_NAMES[role_code]
        if role in projectors:
            raise FormatError(f"duplicate projector role {role!r}")
        weights = take(dim * dim).reshape(dim, dim)
        bias = take(dim)
        projectors[role] = Projector(weights=weights, bias=bias, role=role)
    if off != len(blob):
        raise FormatError(f"{len(blob) - off} trailing bytes after projectors")
    return table, projectors[ROLE_INTRA], projectors[ROLE_INTER]


def load_or_init_weights(
    path, seed: int, bins: int, dim: int
) -> tuple[TemporalTable, Projector, Projector]:
    """Load trained weights when the file exists; otherwise the documented
    fallback: seeded table plus identity projectors."""
    if path is not None:
        try:
            return load_weights(path, expected_bins=bins, expected_dim=dim)
        except FileNotFoundError:
            pass
    return (
        init_table(seed, bins, dim),
        identity_projector(dim, ROLE_INTRA),
        identity_projector(dim, ROLE_INTER),
    )
