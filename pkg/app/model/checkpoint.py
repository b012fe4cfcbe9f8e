# app/model/checkpoint.py
#
# Parameter checkpoints.
#
# Layout (little endian):
#   b"OCLM" | u32 version | u32 header length | JSON header | float32 weights
#
# The JSON header holds the model config and a manifest of parameter names
# and shapes; weights follow as one flat array in declaration order.
#

import json
import logging
from pathlib import Path

import numpy as np

from app.errors import FormatError
from app.model.config import ModelConfig
from app.model.params import init_params
from app.model.transformer import OnlineTransformer

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b"OCLM"
CHECKPOINT_VERSION = 1
_PREAMBLE = np.dtype([("magic", "S4"), ("version", "<u4"), ("header_length", "<u4")])


def save_checkpoint(path: str | Path, model: OnlineTransformer) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    named = model.named_parameters()
    header = json.dumps(
        {
            "config": json.loads(model.config.model_dump_json()),
            "parameters": [{"name": name, "shape": list(tensor.shape)} for name, tensor in named],
        },
        sort_keys=True,
    ).encode("utf-8")

    preamble = np.array([(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(header))], dtype=_PREAMBLE)
    weights = np.concatenate([tensor.data.astype("<f4").ravel() for _, tensor in named])
    with path.open("wb") as handle:
        handle.write(preamble.tobytes())
        handle.write(header)
        handle.write(weights.tobytes())
    logger.debug("checkpoint written: %s (%d weights)", path, weights.size)
    return path


def load_checkpoint(path: str | Path) -> OnlineTransformer:
    #
    # Rebuild a model from a checkpoint file.
    #
    # Raises:
    #     FormatError: Bad magic/version, malformed header, manifest that
    #         does not match the config, or truncated weights
    #
    raw = Path(path).read_bytes()
    if len(raw) < _PREAMBLE.itemsize:
        raise FormatError(f"checkpoint preamble truncated ({len(raw)} bytes)", offset=len(raw))
    preamble = np.frombuffer(raw, dtype=_PREAMBLE, count=1)[0]
    if preamble["magic"] != CHECKPOINT_MAGIC:
        raise FormatError(f"bad checkpoint magic {preamble['magic']!r}", offset=0)
    if preamble["version"] != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {int(preamble['version'])}", offset=4)

    start = _PREAMBLE.itemsize
    end = start + int(preamble["header_length"])
    if end > len(raw):
        raise FormatError("checkpoint header truncated", offset=len(raw))
    try:
        header = json.loads(raw[start:end].decode("utf-8"))
        config = ModelConfig.model_validate(header["config"])
        manifest = header["parameters"]
    except (ValueError, KeyError) as exc:
        raise FormatError(f"malformed checkpoint header: {exc}", offset=start) from None

    params = init_params(config)
    named = params.named_parameters()
    expected = [(name, list(tensor.shape)) for name, tensor in named]
    stored = [(entry["name"], list(entry["shape"])) for entry in manifest]
    if expected != stored:
        raise FormatError("checkpoint manifest does not match its config", offset=start)

    offset = end
    for _, tensor in named:
        nbytes = tensor.data.size * 4
        if offset + nbytes > len(raw):
            raise FormatError("checkpoint weights truncated", offset=len(raw))
        values = np.frombuffer(raw, dtype="<f4", count=tensor.data.size, offset=offset)
        tensor.data = values.reshape(tensor.shape).astype(config.np_dtype)
        offset += nbytes
    if offset != len(raw):
        raise FormatError(f"{len(raw) - offset} trailing bytes after checkpoint weights", offset=offset)
    return OnlineTransformer(config, params)
