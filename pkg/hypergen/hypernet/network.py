"""Encoder, transform block and generator heads behind one interface.

Parameter names are prefixed by part (``encoder/``, ``transform/``,
``generator/``); these names are also the checkpoint tensor names.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from ..core.tensor import DTYPE
from ..errors import ConsistencyError
from .architecture import DEFAULT_RULES, SizeProfile, build_arch_spec, infer_task_type
from .assemble import Provenance, assemble_model, utc_now
from .encoder import EncoderParams, encode, encode_backward
from .generator import GeneratorParams, generate, generate_backward
from .registry import register_shapes
from .transform import TransformParams, transform, transform_backward

PARTS = ('encoder', 'transform', 'generator')


@dataclass(frozen=True)
class ForwardCache:
    version: int
    encoder: object
    transform: object
    z: np.ndarray
    registry: object


def split_named(named):
    parts = {part: {} for part in PARTS}
    for name, value in named.items():
        part, rest = name.split('/', 1)
        if part not in parts:
            raise ConsistencyError(f"unknown parameter group in {name!r}")
        parts[part][rest] = value
    return parts


def flatten_named(named):
    return np.concatenate([np.asarray(named[k]).ravel() for k in sorted(named)])


def unflatten_named(vector, like):
    out = {}
    offset = 0
    for name in sorted(like):
        size = like[name].size
        out[name] = np.asarray(vector[offset:offset + size], dtype=like[name].dtype).reshape(like[name].shape)
        offset += size
    return out


class HyperNetwork:
    def __init__(self, encoder, transform, generator, profile=SizeProfile()):
        self.encoder = encoder
        self.transform = transform
        self.generator = generator
        self.profile = profile
        self.version = 0
        self._id = (None, None)

    @classmethod
    def init(cls, registries, rng, vocab_size=4096, encoder_dim=64, latent_dim=25,
             profile=SizeProfile(), dtype=DTYPE):
        encoder = EncoderParams.init(vocab_size, encoder_dim, rng, dtype)
        block = TransformParams.init(encoder_dim, latent_dim, rng, dtype)
        generator = GeneratorParams.init(latent_dim, registries, rng, dtype)
        return cls(encoder, block, generator, profile)

    def ensure_heads(self, registries, rng):
        for registry in registries:
            self.generator.ensure(registry, rng)
        self.version += 1

    @property
    def latent_dim(self):
        return self.transform.latent_dim

    def latent(self, requirement):
        return transform(encode(requirement, self.encoder), self.transform)

    def generate(self, requirement, registry):
        return generate(self.latent(requirement), self.generator, registry)

    def generate_model(self, requirement, rules=DEFAULT_RULES, generated_at=None):
        """Zero-shot path: sentence in, runnable target out. No task data is touched."""
        task = infer_task_type(requirement, rules=rules)
        spec = build_arch_spec(task, self.profile)
        params = self.generate(requirement, register_shapes(spec))
        sentence = getattr(requirement, 'sentence', str(requirement))
        provenance = Provenance(sentence, self.checkpoint_id(), generated_at or utc_now())
        return assemble_model(spec, params, provenance=provenance)

    def forward(self, requirement, registry):
        z0, enc_cache = encode(requirement, self.encoder, return_cache=True)
        z, tf_cache = transform(z0, self.transform, return_cache=True)
        params = generate(z, self.generator, registry)
        return params, ForwardCache(self.version, enc_cache, tf_cache, z, registry)

    def backward(self, upstream, cache):
        """Gradients of all parameters given dL/d(generated tensors)."""
        if cache.version != self.version:
            raise ConsistencyError(
                f"forward cache is from version {cache.version}, network is at {self.version}")
        grads = {}
        head_grads, grad_z = generate_backward(cache.z, self.generator, cache.registry, upstream)
        tf_grads, grad_z0 = transform_backward(self.transform, cache.transform, grad_z)
        enc_grads = encode_backward(self.encoder, cache.encoder, grad_z0)
        for part, part_grads in (('encoder', enc_grads), ('transform', tf_grads),
                                 ('generator', head_grads)):
            for name, value in part_grads.items():
                grads[f'{part}/{name}'] = value
        return grads

    def named_parameters(self):
        named = {}
        for part, source in (('encoder', self.encoder), ('transform', self.transform),
                             ('generator', self.generator)):
            for name, value in source.named().items():
                named[f'{part}/{name}'] = value
        return named

    def load_parameters(self, named):
        parts = split_named(named)
        self.encoder = EncoderParams.from_named(parts['encoder'])
        self.transform = TransformParams.from_named(parts['transform'])
        self.generator = GeneratorParams.from_named(parts['generator'], self.transform.latent_dim)
        self.version += 1

    def step(self, optimizer, grads):
        named = self.named_parameters()
        optimizer.step(named, grads)
        self.load_parameters(named)

    def snapshot(self):
        return {name: value.copy() for name, value in self.named_parameters().items()}

    def checkpoint_id(self):
        if self._id[0] == self.version:
            return self._id[1]
        digest = hashlib.sha256()
        for name, value in sorted(self.named_parameters().items()):
            digest.update(name.encode('utf-8'))
            digest.update(np.ascontiguousarray(value).tobytes())
        self._id = (self.version, digest.hexdigest()[:16])
        return self._id[1]

    @classmethod
    def from_named(cls, named, profile=SizeProfile()):
        parts = split_named(named)
        block = TransformParams.from_named(parts['transform'])
        generator = GeneratorParams.from_named(parts['generator'], block.latent_dim)
        return cls(EncoderParams.from_named(parts['encoder']), block, generator, profile)
