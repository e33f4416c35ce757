from .architecture import (ArchitectureSpec, LoraConfig, RuleTable, SizeProfile, TaskType,
                           build_arch_spec, infer_task_type)
from .assemble import GeneratedModel, Provenance, assemble_model
from .encoder import EncoderParams, encode, fnv1a_64, tokenize
from .generator import GeneratorParams, generate
from .lora import LoraAdapter, merge_lora
from .network import HyperNetwork
from .registry import ShapeEntry, ShapeRegistry, register_shapes
from .transform import TransformParams, transform
