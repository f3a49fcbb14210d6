"""Canonical bit-sequence types, encodings, and sample-set manifests.

Bits are stored packed, eight per byte MSB-first, next to an explicit bit
count, so a full 20-source experiment (~95 Mbit) stays cache-friendly.
Three file encodings are supported:

``ascii01``
    Characters ``0``/``1``; whitespace ignored.
``packed-msb``
    Each byte contributes 8 bits, most significant first; trailing padding
    bits are zero and are dropped on read using the declared length.
``hex``
    Each hex character contributes 4 bits, most significant first;
    whitespace ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateIndex,
    EmptyInput,
    EmptySet,
    InvalidCharacter,
    LengthMismatch,
    ManifestError,
)

__all__ = [
    "ENCODINGS",
    "BitSequence",
    "SampleSet",
    "Manifest",
    "ManifestEntry",
    "parse_bits",
    "serialize_bits",
    "load_manifest",
    "save_manifest",
    "load_sample_set",
    "concat_chronological",
]

ENCODINGS = ("ascii01", "packed-msb", "hex")

_WHITESPACE = b" \t\r\n\x0b\x0c"
_HEX_ALPHABET = b"0123456789abcdefABCDEF"


class BitSequence:
    """An immutable, ordered sequence of bits with provenance metadata.

    Parameters
    ----------
    bits : array_like
        Values in {0, 1} (bools accepted), in stream order.
    source_id : str
        Opaque source label, e.g. ``"qubit-17"``.
    sample_index : int
        Nonnegative ordinal of this sample within its source.
    timestamp : datetime, optional
        UTC acquisition instant, when known.

    Equality compares the bit content only; provenance metadata is an
    annotation, not part of the value.
    """

    __slots__ = ("_packed", "_n", "source_id", "sample_index", "timestamp")

    def __init__(self, bits, *, source_id: str = "", sample_index: int = 0,
                 timestamp: datetime | None = None):
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise ValueError(f"bits must be one-dimensional, got shape {arr.shape}")
        if arr.size == 0:
            arr = arr.astype(np.uint8)
        elif arr.dtype == np.bool_:
            arr = arr.astype(np.uint8)
        elif arr.dtype.kind in "iu":
            if arr.size and not ((arr == 0) | (arr == 1)).all():
                raise ValueError("every bit must be exactly 0 or 1")
            arr = arr.astype(np.uint8)
        else:
            raise ValueError(f"bits must be integers or bools, got dtype {arr.dtype}")
        self._init_packed(np.packbits(arr), int(arr.size), source_id, sample_index, timestamp)

    def _init_packed(self, packed, n, source_id, sample_index, timestamp):
        if sample_index < 0:
            raise ValueError(f"sample_index must be nonnegative, got {sample_index}")
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        packed.setflags(write=False)
        object.__setattr__(self, "_packed", packed)
        object.__setattr__(self, "_n", n)
        object.__setattr__(self, "source_id", source_id)
        object.__setattr__(self, "sample_index", sample_index)
        object.__setattr__(self, "timestamp", timestamp)

    def __setattr__(self, name, value):
        raise AttributeError("BitSequence is immutable")

    @classmethod
    def _from_packed(cls, packed, n, *, source_id: str = "", sample_index: int = 0,
                     timestamp: datetime | None = None) -> "BitSequence":
        """Adopt pre-packed bytes without revalidating them (internal)."""
        self = cls.__new__(cls)
        self._init_packed(packed, n, source_id, sample_index, timestamp)
        return self

    @property
    def n(self) -> int:
        """Number of bits."""
        return self._n

    @property
    def packed(self) -> np.ndarray:
        """The packed (MSB-first) byte view; read-only."""
        return self._packed

    def asarray(self) -> np.ndarray:
        """Unpack to a uint8 array of 0/1 values."""
        return np.unpackbits(self._packed, count=self._n)

    def count_ones(self) -> int:
        return int(self.asarray().sum())

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self._n:
            raise IndexError(f"bit index {i} out of range for length {self._n}")
        return int((self._packed[i >> 3] >> (7 - (i & 7))) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._packed, other._packed)

    def __hash__(self):
        return hash((self._n, self._packed.tobytes()))

    def __repr__(self):
        head = "".join(str(b) for b in self.asarray()[:16])
        dots = "..." if self._n > 16 else ""
        return (f"BitSequence(n={self._n}, bits={head}{dots}, "
                f"source_id={self.source_id!r}, sample_index={self.sample_index})")


def _decode(raw: bytes, encoding: str) -> np.ndarray:
    if encoding == "ascii01":
        payload = raw.translate(None, _WHITESPACE)
        arr = np.frombuffer(payload, dtype=np.uint8)
        bad = (arr != ord("0")) & (arr != ord("1"))
        if bad.any():
            ch = chr(int(arr[np.argmax(bad)]))
            raise InvalidCharacter(f"unexpected character {ch!r} in ascii01 input")
        return arr - ord("0")
    if encoding == "packed-msb":
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
    if encoding == "hex":
        payload = raw.translate(None, _WHITESPACE)
        arr = np.frombuffer(payload, dtype=np.uint8)
        bad = ~np.isin(arr, np.frombuffer(_HEX_ALPHABET, dtype=np.uint8))
        if bad.any():
            ch = chr(int(arr[np.argmax(bad)]))
            raise InvalidCharacter(f"unexpected character {ch!r} in hex input")
        nibbles = np.array([int(c, 16) for c in payload.decode("ascii")], dtype=np.uint8)
        bits = np.unpackbits(nibbles[:, None], axis=1)[:, 4:]
        return bits.reshape(-1)
    raise ManifestError(f"unknown encoding {encoding!r}; expected one of {ENCODINGS}")


def _padding_per_unit(encoding: str) -> int:
    # Max zero-padding bits an encoder may append: a byte for packed-msb,
    # a nibble for hex, nothing for ascii01.
    return {"ascii01": 0, "packed-msb": 7, "hex": 3}[encoding]


def parse_bits(raw: bytes | str, encoding: str, *, length: int | None = None,
               source_id: str = "", sample_index: int = 0,
               timestamp: datetime | None = None) -> BitSequence:
    """Decode a byte stream into a :class:`BitSequence`.

    Parameters
    ----------
    raw : bytes or str
        Input stream.  ``str`` is accepted for the text encodings.
    encoding : {"ascii01", "packed-msb", "hex"}
    length : int, optional
        Declared bit count.  When given, trailing padding bits (which must
        be zero) are dropped, and any other size disagreement raises
        :class:`~randsuite.errors.LengthMismatch`.

    Raises
    ------
    InvalidCharacter
        Any character outside the encoding's alphabet (whitespace is
        ignored in the text encodings).
    EmptyInput
        The stream decodes to zero bits.
    """
    if isinstance(raw, str):
        try:
            raw = raw.encode("ascii")
        except UnicodeEncodeError as exc:
            raise InvalidCharacter(f"non-ASCII character in {encoding} input") from exc
    bits = _decode(raw, encoding)
    if bits.size == 0:
        raise EmptyInput(f"no bits decoded from {encoding} input")
    if length is not None:
        slack = _padding_per_unit(encoding)
        pad = bits.size - length
        if pad < 0 or pad > slack:
            raise LengthMismatch(
                f"decoded {bits.size} bits but {length} were declared",
                declared=length, actual=int(bits.size))
        if pad and bits[length:].any():
            raise LengthMismatch(
                f"nonzero padding bits after declared length {length}",
                declared=length, actual=int(bits.size))
        bits = bits[:length]
    return BitSequence._from_packed(np.packbits(bits), int(bits.size),
                                    source_id=source_id, sample_index=sample_index,
                                    timestamp=timestamp)


def serialize_bits(seq: BitSequence, encoding: str) -> bytes:
    """Encode a sequence into bytes; inverse of :func:`parse_bits`.

    ``packed-msb`` and ``hex`` zero-pad the final byte/nibble; the bit
    count must be supplied back to :func:`parse_bits` (``length=``) to
    round-trip lengths that are not multiples of 8 or 4.
    """
    if encoding == "ascii01":
        return (seq.asarray() + ord("0")).astype(np.uint8).tobytes()
    if encoding == "packed-msb":
        return seq.packed.tobytes()
    if encoding == "hex":
        bits = seq.asarray()
        n_nibbles = -(-bits.size // 4)
        padded = np.zeros(n_nibbles * 4, dtype=np.uint8)
        padded[:bits.size] = bits
        nibbles = padded.reshape(-1, 4) @ np.array([8, 4, 2, 1], dtype=np.uint8)
        return "".join("0123456789abcdef"[v] for v in nibbles).encode("ascii")
    raise ManifestError(f"unknown encoding {encoding!r}; expected one of {ENCODINGS}")


class SampleSet:
    """Chronologically ordered samples from one source, all the same length."""

    __slots__ = ("samples", "source_id", "declared_length")

    def __init__(self, samples, *, source_id: str | None = None,
                 declared_length: int | None = None):
        samples = sorted(samples, key=lambda s: s.sample_index)
        if source_id is None:
            source_id = samples[0].source_id if samples else ""
        if declared_length is None:
            if not samples:
                raise EmptySet("declared_length is required for an empty sample set")
            declared_length = samples[0].n
        seen = set()
        for s in samples:
            if s.n != declared_length:
                raise LengthMismatch(
                    f"sample {s.sample_index} has {s.n} bits, declared {declared_length}",
                    declared=declared_length, actual=s.n)
            if s.sample_index in seen:
                raise DuplicateIndex(f"duplicate sample_index {s.sample_index}")
            seen.add(s.sample_index)
        object.__setattr__(self, "samples", tuple(samples))
        object.__setattr__(self, "source_id", source_id)
        object.__setattr__(self, "declared_length", declared_length)

    def __setattr__(self, name, value):
        raise AttributeError("SampleSet is immutable")

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    def total_bits(self) -> int:
        return len(self.samples) * self.declared_length

    def __repr__(self):
        return (f"SampleSet(source_id={self.source_id!r}, samples={len(self.samples)}, "
                f"declared_length={self.declared_length})")


def concat_chronological(sample_set: SampleSet) -> BitSequence:
    """Join all samples, in sample_index order, into one long sequence."""
    if len(sample_set) == 0:
        raise EmptySet("cannot concatenate an empty sample set")
    if sample_set.declared_length % 8 == 0:
        packed = np.concatenate([s.packed for s in sample_set])
        return BitSequence._from_packed(packed, sample_set.total_bits(),
                                        source_id=sample_set.source_id)
    bits = np.concatenate([s.asarray() for s in sample_set])
    return BitSequence._from_packed(np.packbits(bits), int(bits.size),
                                    source_id=sample_set.source_id)


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    encoding: str
    sample_index: int
    timestamp: datetime | None = None


@dataclass(frozen=True)
class Manifest:
    """Declares the files making up one source's sample set.

    ``base_dir`` anchors relative entry paths; :func:`load_manifest` sets it
    to the manifest file's directory.
    """

    declared_length: int
    source_id: str
    entries: tuple[ManifestEntry, ...]
    base_dir: Path = Path(".")

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "base_dir", Path(self.base_dir))
        if self.declared_length <= 0:
            raise ManifestError(f"declared_length must be positive, got {self.declared_length}")
        paths = set()
        indices = set()
        for e in self.entries:
            if e.encoding not in ENCODINGS:
                raise ManifestError(f"unknown encoding {e.encoding!r} for {e.path!r}")
            if e.path in paths:
                raise ManifestError(f"duplicate path {e.path!r} in manifest")
            paths.add(e.path)
            if e.sample_index in indices:
                raise DuplicateIndex(f"duplicate sample_index {e.sample_index} in manifest")
            indices.add(e.sample_index)


def _parse_timestamp(value):
    if value is None:
        return None
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def load_manifest(path) -> Manifest:
    """Read a manifest JSON file; entry paths resolve against its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    try:
        entries = tuple(
            ManifestEntry(path=e["path"], encoding=e["encoding"],
                          sample_index=int(e["sample_index"]),
                          timestamp=_parse_timestamp(e.get("timestamp")))
            for e in doc["entries"]
        )
        return Manifest(declared_length=int(doc["declared_length"]),
                        source_id=str(doc["source_id"]),
                        entries=entries, base_dir=path.parent)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError | DuplicateIndex):
            raise
        raise ManifestError(f"manifest {path} is malformed: {exc}") from exc


def save_manifest(manifest: Manifest, path) -> None:
    """Write a manifest as JSON (paths are stored as given, not resolved)."""
    doc = {
        "declared_length": manifest.declared_length,
        "source_id": manifest.source_id,
        "entries": [
            {"path": e.path, "encoding": e.encoding, "sample_index": e.sample_index,
             **({"timestamp": e.timestamp.isoformat()} if e.timestamp else {})}
            for e in manifest.entries
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_sample_set(manifest: Manifest) -> SampleSet:
    """Load and validate every file a manifest declares.

    Raises
    ------
    LengthMismatch
        A file decodes to a bit count other than ``declared_length``
        (message includes the offending path).
    DuplicateIndex
        Two entries share a sample_index.
    """
    samples = []
    for entry in manifest.entries:
        file_path = manifest.base_dir / entry.path
        raw = file_path.read_bytes()
        try:
            seq = parse_bits(raw, entry.encoding, length=manifest.declared_length,
                             source_id=manifest.source_id,
                             sample_index=entry.sample_index,
                             timestamp=entry.timestamp)
        except LengthMismatch as exc:
            raise LengthMismatch(f"{file_path}: {exc}", path=str(file_path),
                                 declared=exc.declared, actual=exc.actual) from exc
        samples.append(seq)
    return SampleSet(samples, source_id=manifest.source_id,
                     declared_length=manifest.declared_length)
