"""Versioned binary checkpoints: model config plus the flat parameter vector.

Layout (all integers little-endian):

    bytes 0..3   magic b"SCKP"
    bytes 4..7   format version (u32)
    bytes 8..11  config JSON length (u32)
    ...          config JSON, canonical form (sorted keys, utf-8)
    8 bytes      parameter count (u64)
    ...          parameters, float64 little-endian
"""

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .model import ModelConfig, ModelParams

MAGIC = b"SCKP"
VERSION = 1


def _canonical_config_bytes(config: ModelConfig) -> bytes:
    return json.dumps(config.to_dict(), sort_keys=True,
                      separators=(",", ":")).encode("utf-8")


def save_checkpoint(params: ModelParams, config: ModelConfig, path) -> None:
    cfg = _canonical_config_bytes(config)
    flat = np.ascontiguousarray(params.flat, dtype="<f8")
    blob = b"".join([
        MAGIC,
        struct.pack("<I", VERSION),
        struct.pack("<I", len(cfg)),
        cfg,
        struct.pack("<Q", flat.size),
        flat.tobytes(),
    ])
    Path(path).write_bytes(blob)


def load_checkpoint(path):
    """Returns (params, config); raises FormatError on any malformation."""
    blob = Path(path).read_bytes()
    if len(blob) < 12:
        raise FormatError(f"{path}: truncated header ({len(blob)} bytes)")
    if blob[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    (cfg_len,) = struct.unpack_from("<I", blob, 8)
    if len(blob) < 12 + cfg_len + 8:
        raise FormatError(f"{path}: truncated config block")
    try:
        cfg_dict = json.loads(blob[12 : 12 + cfg_len].decode("utf-8"))
        config = ModelConfig.from_dict(cfg_dict)
    except (ValueError, TypeError) as exc:
        raise FormatError(f"{path}: invalid config block: {exc}") from exc
    (count,) = struct.unpack_from("<Q", blob, 12 + cfg_len)
    start = 12 + cfg_len + 8
    expected_bytes = count * 8
    if len(blob) != start + expected_bytes:
        raise FormatError(
            f"{path}: expected {expected_bytes} parameter bytes, "
            f"found {len(blob) - start}"
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=start).astype(np.float64)
    try:
        params = ModelParams.from_flat(config, flat)
    except Exception as exc:
        raise FormatError(f"{path}: parameter count does not fit config") from exc
    return params, config
