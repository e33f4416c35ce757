"""Sentence encoder: hashed token embeddings, uniform attention, first-token pooling.

Token ids come from 64-bit FNV-1a over the UTF-8 bytes, modulo the vocabulary
size. The sequence is ``[CLS] + tokens``; one uniform-attention pass replaces
the first position with the mean over all positions, a learned linear layer
maps it, and that first position is the sentence embedding ``z0``.
"""

import re
from dataclasses import dataclass

import numpy as np

from ..core.tensor import DTYPE

FNV_OFFSET = 0xcbf29ce484222325
FNV_PRIME = 0x100000001b3
_MASK64 = (1 << 64) - 1

_NON_ALNUM = re.compile(r'[\W_]+')


def tokenize(sentence):
    return [t for t in _NON_ALNUM.split(sentence.lower()) if t]


def fnv1a_64(text):
    value = FNV_OFFSET
    for byte in text.encode('utf-8'):
        value ^= byte
        value = (value * FNV_PRIME) & _MASK64
    return value


def token_ids(tokens, vocab_size):
    return np.array([fnv1a_64(t) % vocab_size for t in tokens], dtype=np.int64)


@dataclass
class EncoderParams:
    cls_embedding: np.ndarray
    token_table: np.ndarray
    weight: np.ndarray
    bias: np.ndarray

    @property
    def dim(self):
        return self.cls_embedding.shape[0]

    @property
    def vocab_size(self):
        return self.token_table.shape[0]

    @classmethod
    def init(cls, vocab_size, dim, rng, dtype=DTYPE):
        bound = 1.0 / np.sqrt(dim)
        return cls(
            cls_embedding=rng.normal(size=dim).astype(dtype),
            token_table=rng.normal(size=(vocab_size, dim)).astype(dtype),
            weight=rng.uniform(-bound, bound, size=(dim, dim)).astype(dtype),
            bias=rng.uniform(-bound, bound, size=dim).astype(dtype),
        )

    def named(self):
        return {
            'cls_embedding': self.cls_embedding,
            'token_table': self.token_table,
            'linear.weight': self.weight,
            'linear.bias': self.bias,
        }

    @classmethod
    def from_named(cls, named):
        return cls(named['cls_embedding'], named['token_table'],
                   named['linear.weight'], named['linear.bias'])


@dataclass(frozen=True)
class EncoderCache:
    ids: np.ndarray
    pooled: np.ndarray


def encode(requirement, params, return_cache=False):
    sentence = requirement.sentence if hasattr(requirement, 'sentence') else str(requirement)
    ids = token_ids(tokenize(sentence), params.vocab_size)
    sequence = np.vstack([params.cls_embedding[None, :], params.token_table[ids]])
    pooled = sequence.mean(axis=0, dtype=sequence.dtype)
    z0 = params.weight @ pooled + params.bias
    if return_cache:
        return z0, EncoderCache(ids, pooled)
    return z0


def encode_backward(params, cache, grad_z0):
    scale = 1.0 / (cache.ids.size + 1)
    grad_pooled = params.weight.T @ grad_z0
    grad_table = np.zeros_like(params.token_table)
    np.add.at(grad_table, cache.ids, grad_pooled * scale)
    return {
        'cls_embedding': grad_pooled * scale,
        'token_table': grad_table,
        'linear.weight': np.outer(grad_z0, cache.pooled),
        'linear.bias': grad_z0.copy(),
    }
