"""CNN feature extraction into portable .ifp feature packs."""

from .backbone import Backbone, ExtractorConfig
from .extract import ExtractionError, extract, find_images
from .packio import PackReport, read_class_manifest, verify_pack, write_pack

__all__ = [
    "Backbone",
    "ExtractorConfig",
    "ExtractionError",
    "PackReport",
    "extract",
    "find_images",
    "read_class_manifest",
    "verify_pack",
    "write_pack",
]
