from dataclasses import dataclass

from ..core.mlp import layer_dims, layer_name
from ..core.tensor import numel
from ..errors import ConfigError, InputError

ENTRY_KINDS = ('weight', 'bias', 'lora_A', 'lora_B')


@dataclass(frozen=True)
class ShapeEntry:
    name: str
    shape: tuple
    kind: str
    fan_in: int

    @property
    def numel(self):
        return numel(self.shape)

    @property
    def key(self):
        """Head key: parameter name qualified by its shape."""
        return f"{self.name}@{'x'.join(str(d) for d in self.shape)}"


@dataclass(frozen=True)
class ShapeRegistry:
    """Ordered table of the tensors a target needs, layer by layer, weight before bias."""
    entries: tuple

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate registry names in {names}")
        for entry in self.entries:
            if entry.kind not in ENTRY_KINDS:
                raise InputError(f"unknown entry kind {entry.kind!r}")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def names(self):
        return [e.name for e in self.entries]

    @property
    def total_elements(self):
        return sum(e.numel for e in self.entries)


def register_shapes(spec):
    entries = []
    dims = layer_dims(spec.in_dim, spec.hidden_dim, spec.n_layers, spec.out_dim)
    for k, (fan_in, fan_out) in enumerate(dims):
        name = layer_name(k)
        if spec.adapter_mode == 'full_weights':
            entries.append(ShapeEntry(f'{name}.weight', (fan_out, fan_in), 'weight', fan_in))
            entries.append(ShapeEntry(f'{name}.bias', (fan_out,), 'bias', fan_in))
            continue
        lora = spec.lora_config
        if not lora.targets(name):
            continue
        if lora.r > min(fan_in, fan_out):
            raise ConfigError(f"lora r={lora.r} exceeds min({fan_in}, {fan_out}) for {name}")
        entries.append(ShapeEntry(f'{name}.lora_A', (lora.r, fan_in), 'lora_A', fan_in))
        entries.append(ShapeEntry(f'{name}.lora_B', (fan_out, lora.r), 'lora_B', lora.r))
        if lora.bias == 'all':
            entries.append(ShapeEntry(f'{name}.bias', (fan_out,), 'bias', fan_in))
    return ShapeRegistry(tuple(entries))
