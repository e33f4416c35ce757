"""MGPT container for generated models and hypernetwork checkpoints.

Layout (little-endian)::

    b"MGPT"  u16 version
    u32 length, UTF-8 JSON text block (sorted keys, compact, ``kind`` field)
    u32 tensor count
    per tensor: u16 name length, name bytes, u32 rank, u32 dims..., f32 payload (row-major)
    u32 CRC32 of everything before it

The text block carries no timestamps, so saving the same model twice gives
the same bytes.
"""

import json
import logging
import struct
import zlib
from pathlib import Path

import numpy as np

from ..core.mlp import MlpParams
from ..errors import FormatError
from ..hypernet.architecture import ArchitectureSpec, SizeProfile
from ..hypernet.assemble import GeneratedModel, Provenance
from ..training.trainer import Checkpoint

logger = logging.getLogger(__name__)

MAGIC = b'MGPT'
VERSION = 1
KINDS = ('model', 'checkpoint')


def encode_artifact(header, tensors):
    text = json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8')
    chunks = [MAGIC, struct.pack('<H', VERSION), struct.pack('<I', len(text)), text,
              struct.pack('<I', len(tensors))]
    for name, value in tensors.items():
        raw = name.encode('utf-8')
        value = np.ascontiguousarray(value, dtype='<f4')
        chunks.append(struct.pack('<H', len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack('<I', value.ndim))
        chunks.append(struct.pack(f'<{value.ndim}I', *value.shape))
        chunks.append(value.tobytes())
    body = b''.join(chunks)
    return body + struct.pack('<I', zlib.crc32(body))


class _Reader:
    def __init__(self, data):
        self.data = data
        self.offset = 0

    def take(self, size):
        if self.offset + size > len(self.data):
            raise FormatError(f"artifact truncated at byte {self.offset}")
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_artifact(data):
    """Return ``(header, tensors)``; tensors keep file order."""
    if data[:len(MAGIC)] != MAGIC:
        raise FormatError(f"not an artifact: expected magic {MAGIC.decode()!r}, "
                          f"found {bytes(data[:len(MAGIC)])!r}")
    if len(data) < len(MAGIC) + 2 + 4:
        raise FormatError("artifact truncated")
    body, (crc,) = data[:-4], struct.unpack('<I', data[-4:])
    if zlib.crc32(body) != crc:
        raise FormatError("artifact CRC mismatch (truncated or corrupted)")

    reader = _Reader(body)
    reader.take(len(MAGIC))
    (version,) = reader.unpack('<H')
    if version != VERSION:
        raise FormatError(f"unsupported artifact version {version}, expected {VERSION}")
    (length,) = reader.unpack('<I')
    try:
        header = json.loads(reader.take(length).decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"artifact text block is not JSON: {e}") from e
    if header.get('kind') not in KINDS:
        raise FormatError(f"artifact kind must be one of {KINDS}, got {header.get('kind')!r}")

    (count,) = reader.unpack('<I')
    tensors = {}
    for _ in range(count):
        (name_len,) = reader.unpack('<H')
        name = reader.take(name_len).decode('utf-8')
        (rank,) = reader.unpack('<I')
        shape = reader.unpack(f'<{rank}I')
        size = int(np.prod(shape, dtype=np.int64))
        payload = reader.take(4 * size)
        tensors[name] = np.frombuffer(payload, dtype='<f4').reshape(shape).astype(np.float32)
    if reader.offset != len(body):
        raise FormatError(f"{len(body) - reader.offset} trailing bytes after the tensor table")
    return header, tensors


def _write(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info("Wrote %s (%d bytes)", path, len(data))


def _read(path, kind):
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise FormatError(f"no artifact at {path}") from None
    header, tensors = decode_artifact(data)
    if header['kind'] != kind:
        raise FormatError(f"{path} holds a {header['kind']}, expected a {kind}")
    return header, tensors


def model_bytes(model):
    header = {
        'kind': 'model',
        'spec': model.spec.to_dict(),
        'requirement': model.provenance.requirement,
        'checkpoint_id': model.provenance.checkpoint_id,
    }
    return encode_artifact(header, model.params.named())


def save_model(model, path):
    _write(path, model_bytes(model))


def load_model(path):
    header, tensors = _read(path, 'model')
    spec = ArchitectureSpec.from_dict(header['spec'])
    provenance = Provenance(header.get('requirement', ''), header.get('checkpoint_id'))
    return GeneratedModel(spec, MlpParams.from_named(tensors), provenance)


def save_checkpoint(checkpoint, path):
    header = {
        'kind': 'checkpoint',
        'profile': {'hidden_dim': checkpoint.profile.hidden_dim,
                    'n_layers': checkpoint.profile.n_layers},
        'encoder_vocab': checkpoint.encoder_vocab,
        'encoder_dim': checkpoint.encoder_dim,
        'latent_dim': checkpoint.latent_dim,
        'epoch': checkpoint.epoch,
        'avg_eval_loss': checkpoint.avg_eval_loss,
        'history': list(checkpoint.history),
        'trained_on': list(checkpoint.trained_on),
        'diverged': checkpoint.diverged,
    }
    tensors = {name: checkpoint.params[name] for name in sorted(checkpoint.params)}
    _write(path, encode_artifact(header, tensors))


def load_checkpoint(path):
    header, tensors = _read(path, 'checkpoint')
    return Checkpoint(tensors, header['avg_eval_loss'], header['epoch'],
                      SizeProfile(**header['profile']), header['encoder_vocab'],
                      header['encoder_dim'], header['latent_dim'], tuple(header['trained_on']),
                      header['history'], header.get('diverged', False))
