import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from kfpack import (
    EmbeddingSet,
    Frame,
    FrameSequence,
    Segment,
    SynthSpec,
    synth_video,
    write_embeddings,
    write_frame_bank,
)


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def make_frame(rng, size=16, index=0):
    return Frame(index=index, luma=rng.integers(0, 256, size=(size, size), dtype=np.uint8))


def make_sequence(rng, T=4, size=16, fps_num=30, fps_den=1):
    frames = tuple(
        Frame(index=t, luma=rng.integers(0, 256, size=(size, size), dtype=np.uint8))
        for t in range(T)
    )
    return FrameSequence(frames=frames, fps_num=fps_num, fps_den=fps_den)


def build_pipeline_inputs(
    tmp_path,
    T=60,
    size=16,
    fps_num=2,
    cuts=(20, 40),
    dim=6,
    seed=77,
    grid=16,
    with_query=True,
):
    """Write a synthetic video plus matching embedding files; returns paths."""
    lengths = [b - a for a, b in zip((0,) + tuple(cuts), tuple(cuts) + (T,))]
    segments = [Segment("static", lengths[0], base_intensity=40)]
    segments += [Segment("static", n, cut_magnitude=120) for n in lengths[1:]]
    seq = synth_video(
        SynthSpec(
            T=T, width=size, height=size, segments=tuple(segments),
            seed=seed, fps_num=fps_num,
        )
    )
    gen = np.random.default_rng(seed)
    paths = {
        "frames": tmp_path / "video.kfv",
        "patch": tmp_path / "patch.kfe",
        "frame_level": tmp_path / "frame.kfe",
        "query": tmp_path / "query.kfe",
    }
    write_frame_bank(seq, paths["frames"])
    write_embeddings(
        EmbeddingSet("patch-grid", gen.normal(size=(T, grid, grid, dim)).astype(np.float32)),
        paths["patch"],
    )
    write_embeddings(
        EmbeddingSet("frame-level", gen.normal(size=(T, 1, 1, dim)).astype(np.float32)),
        paths["frame_level"],
    )
    if with_query:
        write_embeddings(
            EmbeddingSet("frame-level", gen.normal(size=(1, 1, 1, dim)).astype(np.float32)),
            paths["query"],
        )
    return paths, seq
