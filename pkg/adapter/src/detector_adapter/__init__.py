"""Detection-stream exporter for the instance-level background subtraction
pipeline. Pure producer: it never decides foreground/background.
"""

from .backends import BACKENDS, Source, open_source, rle_counts
from .config import AdapterConfig, AdapterError
from .export import export_stream

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "BACKENDS",
    "Source",
    "export_stream",
    "open_source",
    "rle_counts",
]
