import struct

import numpy as np
import pytest

from kfpack import (
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

from conftest import make_sequence


def zeros_sequence(T=2, size=8):
    frames = tuple(Frame(index=t, luma=np.zeros((size, size), np.uint8)) for t in range(T))
    return FrameSequence(frames=frames, fps_num=30, fps_den=1)


class TestFrameBank:
    def test_all_zero_bank(self, tmp_path):
        path = tmp_path / "zero.kfv"
        write_frame_bank(zeros_sequence(), path)
        seq = read_frame_bank(path)
        assert seq.T == 2
        assert all((f.luma == 0).all() for f in seq.frames)

    def test_round_trip_bytes_identical(self, tmp_path, rng):
        src = tmp_path / "a.kfv"
        dst = tmp_path / "b.kfv"
        write_frame_bank(make_sequence(rng, T=5, size=9), src)
        write_frame_bank(read_frame_bank(src), dst)
        assert src.read_bytes() == dst.read_bytes()

    def test_round_trip_equal_sequence(self, tmp_path, rng):
        seq = make_sequence(rng, T=3, size=12, fps_num=24000, fps_den=1001)
        path = tmp_path / "v.kfv"
        write_frame_bank(seq, path)
        assert read_frame_bank(path) == seq

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "t.kfv"
        write_frame_bank(zeros_sequence(T=10), path)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 64])  # drop one frame of payload
        with pytest.raises(FormatError, match="truncated payload"):
            read_frame_bank(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.kfv"
        write_frame_bank(zeros_sequence(), path)
        path.write_bytes(b"NOPE" + path.read_bytes()[4:])
        with pytest.raises(FormatError, match="bad magic"):
            read_frame_bank(path)

    def test_zero_frames_declared(self, tmp_path):
        path = tmp_path / "z.kfv"
        path.write_bytes(b"KFVB" + struct.pack("<HHHIII", 1, 8, 8, 0, 30, 1))
        with pytest.raises(FormatError, match="zero frames"):
            read_frame_bank(path)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "v.kfv"
        write_frame_bank(zeros_sequence(), path)
        blob = bytearray(path.read_bytes())
        blob[4:6] = struct.pack("<H", 9)
        path.write_bytes(bytes(blob))
        with pytest.raises(FormatError, match="version"):
            read_frame_bank(path)

    def test_mismatched_frame_sizes_rejected(self):
        a = Frame(index=0, luma=np.zeros((8, 8), np.uint8))
        b = Frame(index=1, luma=np.zeros((8, 16), np.uint8))
        with pytest.raises(ValueError, match="share width/height"):
            FrameSequence(frames=(a, b))

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            write_frame_bank(zeros_sequence(), tmp_path / "no" / "such" / "dir.kfv")

    def test_golden_bytes(self, tmp_path):
        # Handcrafted bank: one 8x8 frame whose luma is 0..63 row-major.
        golden = (
            b"KFVB"
            + struct.pack("<HHHIII", 1, 8, 8, 1, 30, 1)
            + bytes(range(64))
        )
        path = tmp_path / "g.kfv"
        path.write_bytes(golden)
        seq = read_frame_bank(path)
        assert seq.T == 1 and seq.width == 8 and seq.height == 8
        assert seq.frames[0].luma[0, 3] == 3 and seq.frames[0].luma[7, 7] == 63
        out = tmp_path / "g2.kfv"
        write_frame_bank(seq, out)
        assert out.read_bytes() == golden


class TestEmbeddings:
    def test_frame_level_parses(self, tmp_path):
        emb = EmbeddingSet("frame-level", np.ones((3, 1, 1, 4), np.float32))
        path = tmp_path / "e.kfe"
        write_embeddings(emb, path)
        back = read_embeddings(path)
        assert back.kind == "frame-level"
        assert back.count == 3 and back.grid_rows == 1 and back.grid_cols == 1
        assert (back.data == 1.0).all()

    def test_io_accepts_any_grid_shape(self, tmp_path, rng):
        # an r*c that violates the condensation default (16x16) still loads;
        # the condense module is the one that rejects it
        emb = EmbeddingSet(
            "patch-grid", rng.normal(size=(2, 3, 5, 4)).astype(np.float32)
        )
        path = tmp_path / "odd.kfe"
        write_embeddings(emb, path)
        assert read_embeddings(path).grid_rows == 3

    def test_round_trip_bytes(self, tmp_path, rng):
        emb = EmbeddingSet("patch-grid", rng.normal(size=(4, 4, 4, 7)).astype(np.float32))
        a = tmp_path / "a.kfe"
        b = tmp_path / "b.kfe"
        write_embeddings(emb, a)
        write_embeddings(read_embeddings(a), b)
        assert a.read_bytes() == b.read_bytes()

    def test_length_mismatch(self, tmp_path):
        emb = EmbeddingSet("frame-level", np.ones((2, 1, 1, 3), np.float32))
        path = tmp_path / "l.kfe"
        write_embeddings(emb, path)
        path.write_bytes(path.read_bytes() + b"\x00\x00\x00\x00")
        with pytest.raises(FormatError, match="length mismatch"):
            read_embeddings(path)

    def test_bad_magic_and_kind(self, tmp_path):
        path = tmp_path / "bad.kfe"
        path.write_bytes(b"XXXX" + struct.pack("<HBIHHI", 1, 0, 1, 1, 1, 1) + b"\x00" * 4)
        with pytest.raises(FormatError, match="bad magic"):
            read_embeddings(path)
        path.write_bytes(b"KFVE" + struct.pack("<HBIHHI", 1, 7, 1, 1, 1, 1) + b"\x00" * 4)
        with pytest.raises(FormatError, match="kind code"):
            read_embeddings(path)

    def test_golden_bytes(self, tmp_path):
        # one frame-level row, dim 2, values (1.0, -2.0)
        golden = (
            b"KFVE"
            + struct.pack("<HBIHHI", 1, 0, 1, 1, 1, 2)
            + struct.pack("<ff", 1.0, -2.0)
        )
        path = tmp_path / "g.kfe"
        path.write_bytes(golden)
        emb = read_embeddings(path)
        assert emb.kind == "frame-level" and emb.dim == 2
        assert emb.data[0, 0, 0, 0] == 1.0 and emb.data[0, 0, 0, 1] == -2.0
        out = tmp_path / "g2.kfe"
        write_embeddings(emb, out)
        assert out.read_bytes() == golden


class TestSynth:
    def test_static_segment_repeats_exactly(self):
        spec = SynthSpec(T=10, width=8, height=8, segments=(Segment("static", 10, 100),))
        seq = synth_video(spec)
        first = seq.frames[0].luma.tobytes()
        assert all(f.luma.tobytes() == first for f in seq.frames)

    def test_cut_mean_abs_diff(self):
        spec = SynthSpec(
            T=10,
            width=8,
            height=8,
            segments=(Segment("static", 5, 0), Segment("static", 5, cut_magnitude=128)),
        )
        seq = synth_video(spec)
        blobs = [f.luma.tobytes() for f in seq.frames]
        assert len(set(blobs[:5])) == 1 and len(set(blobs[5:])) == 1
        diff = np.abs(
            seq.frames[5].luma.astype(np.int64) - seq.frames[4].luma.astype(np.int64)
        )
        assert diff.mean() == 128.0

    def test_deterministic(self):
        spec = SynthSpec(
            T=12,
            width=16,
            height=8,
            seed=42,
            segments=(Segment("noise", 6, 128), Segment("linear-motion", 6, cut_magnitude=30)),
        )
        a = synth_video(spec)
        b = synth_video(spec)
        assert all(x.luma.tobytes() == y.luma.tobytes() for x, y in zip(a.frames, b.frames))

    def test_segment_sum_mismatch(self):
        with pytest.raises(ValueError, match="segment lengths sum"):
            SynthSpec(T=11, width=8, height=8, segments=(Segment("static", 10, 10),))

    def test_linear_motion_translates_one_pixel(self):
        spec = SynthSpec(
            T=4, width=16, height=8, segments=(Segment("linear-motion", 4, 128),)
        )
        seq = synth_video(spec)
        for t in range(1, 4):
            rolled = np.roll(seq.frames[0].luma, t, axis=1)
            assert np.array_equal(seq.frames[t].luma, rolled)

    def test_mean_is_level_for_all_kinds(self):
        spec = SynthSpec(
            T=9,
            width=10,
            height=10,
            seed=5,
            segments=(
                Segment("static", 3, 120),
                Segment("linear-motion", 3, cut_magnitude=60),
                Segment("noise", 3, cut_magnitude=60),
            ),
        )
        seq = synth_video(spec)
        means = [f.luma.astype(np.int64).mean() for f in seq.frames]
        assert means[:3] == [120.0] * 3
        assert means[3:6] == [180.0] * 3  # 120 + 60
        assert means[6:] == [120.0] * 3  # 180 + 60 leaves no headroom, so down

    def test_noise_frames_differ(self):
        spec = SynthSpec(T=5, width=8, height=8, segments=(Segment("noise", 5, 128),))
        seq = synth_video(spec)
        blobs = {f.luma.tobytes() for f in seq.frames}
        assert len(blobs) == 5

    def test_infeasible_cut_rejected(self):
        spec = SynthSpec(
            T=4,
            width=8,
            height=8,
            segments=(Segment("static", 2, 128), Segment("noise", 2, cut_magnitude=255)),
        )
        with pytest.raises(ValueError, match="cannot stay in"):
            synth_video(spec)
