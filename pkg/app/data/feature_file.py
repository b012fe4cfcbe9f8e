# app/data/feature_file.py
#
# OCLF binary feature files.
#
# Layout (little endian):
#   header: b"OCLF" | u32 version=1 | u32 K | u32 F | u64 T
#   T records: u32 label | F x f32 features
#
# Also reads label files (one integer label per line) for the oracle and
# converts CSV rows "label,f1,...,fF" into OCLF.
#

import logging
from pathlib import Path

import numpy as np

from app.data.readers import ArraySource, SequenceReader
from app.errors import FormatError

logger = logging.getLogger(__name__)

FEATURE_FILE_MAGIC = b"OCLF"
FEATURE_FILE_VERSION = 1
HEADER_DTYPE = np.dtype([("magic", "S4"), ("version", "<u4"), ("K", "<u4"), ("F", "<u4"), ("T", "<u8")])


def record_dtype(feature_dim: int) -> np.dtype:
    return np.dtype([("label", "<u4"), ("features", "<f4", (feature_dim,))])


def write_feature_file(path: str | Path, features, labels, num_classes: int) -> Path:
    #
    # Write features [T, F] and labels [T] as an OCLF file.
    #
    # Raises:
    #     FormatError: Labels outside [0, num_classes) or mismatched lengths
    #
    features = np.asarray(features, dtype=np.float32)
    labels = np.asarray(labels, dtype=np.int64)
    if features.ndim != 2 or len(features) != len(labels):
        raise FormatError(f"features {features.shape} and labels {labels.shape} do not pair up", offset=0)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise FormatError(f"labels must lie in [0, {num_classes})", offset=0)

    header = np.array(
        [(FEATURE_FILE_MAGIC, FEATURE_FILE_VERSION, num_classes, features.shape[1], len(labels))],
        dtype=HEADER_DTYPE,
    )
    records = np.empty(len(labels), dtype=record_dtype(features.shape[1]))
    records["label"] = labels
    records["features"] = features

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as handle:
        handle.write(header.tobytes())
        handle.write(records.tobytes())
    return path


def load_feature_source(path: str | Path) -> ArraySource:
    #
    # Parse and validate an OCLF file.
    #
    # Raises:
    #     FormatError: Bad magic or version, truncated data, trailing bytes,
    #         or a label >= K; offset points at the offending byte
    #
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise FormatError(f"feature file header truncated ({len(raw)} bytes)", offset=len(raw))
    header = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    if header["magic"] != FEATURE_FILE_MAGIC:
        raise FormatError(f"bad feature file magic {header['magic']!r}", offset=0)
    if header["version"] != FEATURE_FILE_VERSION:
        raise FormatError(f"unsupported feature file version {int(header['version'])}", offset=4)

    num_classes, feature_dim, length = int(header["K"]), int(header["F"]), int(header["T"])
    records_type = record_dtype(feature_dim)
    start = HEADER_DTYPE.itemsize
    expected = start + length * records_type.itemsize
    if len(raw) < expected:
        complete = (len(raw) - start) // records_type.itemsize
        raise FormatError(
            f"feature file truncated: header promises {length} records, found {complete}",
            offset=start + complete * records_type.itemsize,
        )
    if len(raw) > expected:
        raise FormatError(f"{len(raw) - expected} trailing bytes after {length} records", offset=expected)

    records = np.frombuffer(raw, dtype=records_type, count=length, offset=start)
    invalid = np.flatnonzero(records["label"] >= num_classes)
    if invalid.size:
        first = int(invalid[0])
        raise FormatError(
            f"record {first} has label {int(records['label'][first])} >= K={num_classes}",
            offset=start + first * records_type.itemsize,
        )
    logger.info("loaded feature file %s: K=%d F=%d T=%d", path, num_classes, feature_dim, length)
    return ArraySource(records["features"].copy(), records["label"].astype(np.int64), num_classes=num_classes)


def load_feature_file(path: str | Path) -> SequenceReader:
    return load_feature_source(path).reader()


def is_feature_file(path: str | Path) -> bool:
    with Path(path).open("rb") as handle:
        return handle.read(4) == FEATURE_FILE_MAGIC


def load_label_file(path: str | Path) -> np.ndarray:
    #
    # One integer label per line; blank lines and '#' comments are skipped.
    #
    # Raises:
    #     FormatError: A line that is not ASCII or not a non-negative integer
    #
    labels = []
    offset = 0
    for line in Path(path).read_bytes().splitlines(keepends=True):
        try:
            text = line.decode("ascii").split("#", 1)[0].strip()
        except UnicodeDecodeError as exc:
            raise FormatError("label file line is not ASCII text", offset=offset + exc.start) from exc
        if text:
            if not text.isdigit():
                raise FormatError(f"label file line {text!r} is not a non-negative integer", offset=offset)
            labels.append(int(text))
        offset += len(line)
    return np.asarray(labels, dtype=np.int64)


def csv_to_feature_file(csv_path: str | Path, output_path: str | Path, num_classes: int | None = None) -> Path:
    #
    # Convert CSV rows "label,f1,...,fF" (no header) into an OCLF file.
    #
    # Args:
    #     num_classes: Defaults to max(label) + 1
    #
    table = np.loadtxt(csv_path, delimiter=",", ndmin=2, dtype=np.float64)
    labels = table[:, 0]
    if not np.all(labels == np.round(labels)):
        raise FormatError(f"{csv_path}: first column must hold integer labels", offset=0)
    labels = labels.astype(np.int64)
    classes = num_classes if num_classes is not None else int(labels.max(initial=-1)) + 1
    logger.info("converting %s -> %s (%d rows)", csv_path, output_path, len(labels))
    return write_feature_file(output_path, table[:, 1:], labels, classes)
