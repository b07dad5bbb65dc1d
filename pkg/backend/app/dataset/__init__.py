from .augment import mirror_augment, mirror_sample
from .encoding import encode_sample
from .generator import generate_dataset, generate_sample
from .records import SampleRecord
from .sampling import sample_load_case
from .storage import read_dataset, read_field, write_dataset, write_fields
from .templates import BC_TEMPLATES, get_templates

__all__ = [
    "BC_TEMPLATES",
    "SampleRecord",
    "encode_sample",
    "generate_dataset",
    "generate_sample",
    "get_templates",
    "mirror_augment",
    "mirror_sample",
    "read_dataset",
    "read_field",
    "sample_load_case",
    "write_dataset",
    "write_fields",
]
