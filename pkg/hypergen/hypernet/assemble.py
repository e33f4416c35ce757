from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from ..core.mlp import MlpParams, layer_dims, mlp_forward
from ..errors import ConsistencyError, InputError
from .lora import adapters_from_params, merge_into
from .registry import register_shapes


@dataclass(frozen=True)
class Provenance:
    requirement: str = ''
    checkpoint_id: Optional[str] = None
    generated_at: Optional[str] = None


def utc_now():
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


@dataclass
class GeneratedModel:
    """A ready-to-run target: architecture, weights, and where they came from."""
    spec: object
    params: MlpParams
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        expected = [(fan_out, fan_in) for fan_in, fan_out in
                    layer_dims(self.spec.in_dim, self.spec.hidden_dim, self.spec.n_layers,
                               self.spec.out_dim)]
        actual = [w.shape for w, _ in self.params.layers]
        if actual != expected:
            raise ConsistencyError(f"model weights {actual} do not match architecture {expected}")

    def forward(self, x):
        return mlp_forward(self.params, x)

    def predict(self, x):
        out = self.forward(x)
        if self.spec.out_dim > 1:
            return out.argmax(axis=1)
        return out[:, 0]


def assemble_model(spec, params, base=None, provenance=None):
    """Aggregate a generated ParameterSet into a usable model."""
    provenance = provenance or Provenance(generated_at=utc_now())
    registry = register_shapes(spec)
    missing = [name for name in registry.names if name not in params]
    if missing:
        raise ConsistencyError(f"parameter set lacks {', '.join(missing)}")
    for entry in registry:
        if tuple(np.shape(params[entry.name])) != entry.shape:
            raise ConsistencyError(f"{entry.name} has shape {np.shape(params[entry.name])}, "
                                   f"registry says {entry.shape}")

    if spec.adapter_mode == 'full_weights':
        mlp = MlpParams.from_named({name: np.array(params[name]) for name in registry.names})
        return GeneratedModel(spec, mlp, provenance)

    if base is None:
        raise InputError("lora mode needs base parameters to merge adapters into")
    adapters = adapters_from_params(params, spec.lora_config, len(base.layers))
    merged = merge_into(base, adapters, biases=params)
    return GeneratedModel(spec, merged, provenance)
