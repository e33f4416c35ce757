from .pipeline import HyperGen
