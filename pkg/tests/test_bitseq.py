"""Bit-sequence parsing, serialization, sample sets, and manifests."""

import json
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randsuite import (
    BitSequence,
    Manifest,
    ManifestEntry,
    SampleSet,
    concat_chronological,
    load_manifest,
    load_sample_set,
    parse_bits,
    save_manifest,
    serialize_bits,
)
from randsuite.errors import (
    DuplicateIndex,
    EmptyInput,
    EmptySet,
    InvalidCharacter,
    LengthMismatch,
    ManifestError,
)


class TestParseBits:
    def test_ascii01_worked_sequence(self):
        seq = parse_bits("1001100010", "ascii01")
        assert seq.n == 10
        assert list(seq.asarray()) == [1, 0, 0, 1, 1, 0, 0, 0, 1, 0]

    def test_ascii01_ignores_whitespace(self):
        seq = parse_bits(b" 10 01\n1000\t10 \r\n", "ascii01")
        assert list(seq.asarray()) == [1, 0, 0, 1, 1, 0, 0, 0, 1, 0]

    def test_packed_msb_single_byte(self):
        seq = parse_bits(bytes([0xA0]), "packed-msb")
        assert list(seq.asarray()) == [1, 0, 1, 0, 0, 0, 0, 0]

    def test_hex_nibbles(self):
        seq = parse_bits("F0", "hex")
        assert list(seq.asarray()) == [1, 1, 1, 1, 0, 0, 0, 0]
        assert parse_bits("f0", "hex") == seq

    @pytest.mark.parametrize("raw,encoding", [("10021", "ascii01"), ("FG", "hex")])
    def test_invalid_character(self, raw, encoding):
        with pytest.raises(InvalidCharacter):
            parse_bits(raw, encoding)

    @pytest.mark.parametrize("raw,encoding", [("", "ascii01"), (b"", "packed-msb"),
                                              ("  \n ", "ascii01"), ("", "hex")])
    def test_empty_input(self, raw, encoding):
        with pytest.raises(EmptyInput):
            parse_bits(raw, encoding)

    def test_declared_length_drops_zero_padding(self):
        seq = parse_bits(bytes([0b10110000]), "packed-msb", length=4)
        assert list(seq.asarray()) == [1, 0, 1, 1]

    def test_declared_length_rejects_nonzero_padding(self):
        with pytest.raises(LengthMismatch):
            parse_bits(bytes([0b10111000]), "packed-msb", length=4)

    def test_declared_length_rejects_size_mismatch(self):
        with pytest.raises(LengthMismatch):
            parse_bits(bytes([0xFF, 0xFF]), "packed-msb", length=4)
        with pytest.raises(LengthMismatch):
            parse_bits("101", "ascii01", length=4)


class TestRoundTrip:
    @pytest.mark.parametrize("encoding", ["ascii01", "packed-msb", "hex"])
    @given(data=st.binary(min_size=1, max_size=64), n_drop=st.integers(0, 7))
    @settings(max_examples=60, deadline=None)
    def test_round_trip_any_length(self, encoding, data, n_drop):
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        n = max(1, bits.size - n_drop)
        seq = BitSequence(bits[:n])
        payload = serialize_bits(seq, encoding)
        assert parse_bits(payload, encoding, length=seq.n) == seq

    @pytest.mark.parametrize("encoding", ["ascii01", "packed-msb", "hex"])
    def test_round_trip_million_bits(self, encoding):
        rng = np.random.Generator(np.random.PCG64(7))
        n = 10 ** 6 - 3  # not a multiple of 8 or 4 on purpose
        seq = BitSequence(rng.integers(0, 2, size=n, dtype=np.uint8))
        assert parse_bits(serialize_bits(seq, encoding), encoding, length=n) == seq


class TestBitSequence:
    def test_immutability_and_metadata(self):
        ts = datetime(2019, 5, 9, 11, 24, 27, tzinfo=timezone.utc)
        seq = BitSequence([1, 0, 1], source_id="qubit-00", sample_index=3, timestamp=ts)
        assert (seq.n, len(seq)) == (3, 3)
        assert (seq.source_id, seq.sample_index, seq.timestamp) == ("qubit-00", 3, ts)
        with pytest.raises(AttributeError):
            seq.source_id = "other"

    def test_equality_is_content_only(self):
        a = BitSequence([1, 0, 1], source_id="a", sample_index=0)
        b = BitSequence([1, 0, 1], source_id="b", sample_index=9)
        assert a == b
        assert a != BitSequence([1, 0, 0])
        assert a != BitSequence([1, 0, 1, 0])

    def test_indexing_and_counts(self):
        seq = BitSequence([1, 0, 0, 1, 1, 0, 0, 0, 1, 0])
        assert [seq[i] for i in range(10)] == [1, 0, 0, 1, 1, 0, 0, 0, 1, 0]
        assert seq.count_ones() == 4
        with pytest.raises(IndexError):
            seq[10]

    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            BitSequence([0, 1, 2])
        with pytest.raises(ValueError):
            BitSequence([0.5, 1.0])


class TestSampleSetAndConcat:
    def test_concat_two_samples(self, bits):
        s = SampleSet([bits("10", sample_index=0), bits("01", sample_index=1)])
        joined = concat_chronological(s)
        assert list(joined.asarray()) == [1, 0, 0, 1]

    def test_concat_single_sample_identity(self, bits):
        seq = bits("10110")
        joined = concat_chronological(SampleSet([seq]))
        assert joined == seq

    def test_concat_empty_set(self):
        with pytest.raises(EmptySet):
            concat_chronological(SampleSet([], declared_length=8))

    def test_concat_boundaries_and_length(self, random_bits):
        members = [
            BitSequence(random_bits(24, seed=i).asarray(), sample_index=i)
            for i in range(5)
        ]
        joined = concat_chronological(SampleSet(members))
        assert joined.n == sum(m.n for m in members)
        arr = joined.asarray()
        for i, m in enumerate(members):
            # spot-check both sides of every sample boundary
            assert arr[i * 24] == m[0]
            assert arr[(i + 1) * 24 - 1] == m[23]
            assert np.array_equal(arr[i * 24:(i + 1) * 24], m.asarray())

    def test_sorts_chronologically(self, bits):
        s = SampleSet([bits("11", sample_index=2), bits("00", sample_index=0),
                       bits("01", sample_index=1)])
        assert [m.sample_index for m in s] == [0, 1, 2]
        assert list(concat_chronological(s).asarray()) == [0, 0, 0, 1, 1, 1]

    def test_rejects_mixed_lengths(self, bits):
        with pytest.raises(LengthMismatch):
            SampleSet([bits("10", sample_index=0), bits("011", sample_index=1)])

    def test_rejects_duplicate_indices(self, bits):
        with pytest.raises(DuplicateIndex):
            SampleSet([bits("10", sample_index=0), bits("01", sample_index=0)])

    def test_experiment_scale_total_bits(self):
        # 579 samples x 8192 bits joined chronologically
        packed = np.zeros(1024, dtype=np.uint8)
        members = [
            BitSequence._from_packed(packed, 8192, sample_index=i)
            for i in range(579)
        ]
        s = SampleSet(members)
        assert s.total_bits() == 4_743_168
        assert concat_chronological(s).n == 4_743_168


class TestManifest:
    def _write_fixture(self, tmp_path, contents, declared_length=8, encoding="ascii01"):
        entries = []
        for i, payload in enumerate(contents):
            name = f"sample_{i}.txt"
            (tmp_path / name).write_bytes(payload)
            entries.append(ManifestEntry(path=name, encoding=encoding, sample_index=i))
        return Manifest(declared_length=declared_length, source_id="src",
                        entries=tuple(entries), base_dir=tmp_path)

    def test_load_sample_set(self, tmp_path):
        manifest = self._write_fixture(tmp_path, [b"10101010", b"11110000", b"00001111"])
        s = load_sample_set(manifest)
        assert len(s) == 3
        assert s.total_bits() == 24
        assert s.source_id == "src"

    def test_length_mismatch_reports_path(self, tmp_path):
        manifest = self._write_fixture(tmp_path, [b"10101010", b"1111000"])
        with pytest.raises(LengthMismatch) as err:
            load_sample_set(manifest)
        assert "sample_1.txt" in str(err.value)
        assert err.value.declared == 8
        assert err.value.actual == 7

    def test_duplicate_index_rejected(self, tmp_path):
        (tmp_path / "a.txt").write_bytes(b"10101010")
        (tmp_path / "b.txt").write_bytes(b"01010101")
        with pytest.raises(DuplicateIndex):
            Manifest(declared_length=8, source_id="src", base_dir=tmp_path,
                     entries=(ManifestEntry("a.txt", "ascii01", 0),
                              ManifestEntry("b.txt", "ascii01", 0)))

    def test_duplicate_path_rejected(self):
        with pytest.raises(ManifestError):
            Manifest(declared_length=8, source_id="src",
                     entries=(ManifestEntry("a.txt", "ascii01", 0),
                              ManifestEntry("a.txt", "ascii01", 1)))

    def test_unknown_encoding_rejected(self):
        with pytest.raises(ManifestError):
            Manifest(declared_length=8, source_id="src",
                     entries=(ManifestEntry("a.txt", "utf-9", 0),))

    def test_json_round_trip(self, tmp_path):
        ts = datetime(2019, 5, 9, 11, 24, 27, tzinfo=timezone.utc)
        manifest = Manifest(
            declared_length=16, source_id="qubit-03",
            entries=(ManifestEntry("x.bin", "packed-msb", 0, ts),
                     ManifestEntry("y.bin", "packed-msb", 1)))
        path = tmp_path / "manifest.json"
        save_manifest(manifest, path)
        loaded = load_manifest(path)
        assert loaded.declared_length == 16
        assert loaded.source_id == "qubit-03"
        assert loaded.entries[0].timestamp == ts
        assert loaded.entries[1].timestamp is None
        assert loaded.base_dir == tmp_path

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{not json")
        with pytest.raises(ManifestError):
            load_manifest(path)
        path.write_text(json.dumps({"source_id": "x"}))
        with pytest.raises(ManifestError):
            load_manifest(path)
