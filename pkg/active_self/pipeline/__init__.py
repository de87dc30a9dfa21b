from .run_config import ABLATION_VARIANTS, VARIANT_STEPS, VARIANTS, RunConfig
from .pool import PSEUDO, LabeledPool, assemble_pool
from .snapshot import SCHEMA_VERSION, AdaptationReport, IterationSnapshot, write_json, write_snapshot

__all__ = [
    "ABLATION_VARIANTS",
    "VARIANT_STEPS",
    "VARIANTS",
    "RunConfig",
    "PSEUDO",
    "LabeledPool",
    "assemble_pool",
    "SCHEMA_VERSION",
    "AdaptationReport",
    "IterationSnapshot",
    "write_json",
    "write_snapshot",
]
