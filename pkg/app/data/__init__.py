# app/data/__init__.py
#
# Data Module - deterministic sequential readers over synthetic and
# pre-extracted feature data.
#

from .readers import ArraySource, DataSource, SequenceReader
from .base_dataset import BaseDataset, BlobDatasetSpec, blob_dataset_from_spec, gaussian_blob_dataset
from .split_sequence import SequenceSpec, SplitSequence, make_split_sequence
from .feature_file import (
    csv_to_feature_file,
    is_feature_file,
    load_feature_file,
    load_feature_source,
    load_label_file,
    write_feature_file,
)

__all__ = [
    "ArraySource",
    "DataSource",
    "SequenceReader",
    "BaseDataset",
    "BlobDatasetSpec",
    "blob_dataset_from_spec",
    "gaussian_blob_dataset",
    "SequenceSpec",
    "SplitSequence",
    "make_split_sequence",
    "csv_to_feature_file",
    "is_feature_file",
    "load_feature_file",
    "load_feature_source",
    "load_label_file",
    "write_feature_file",
]
