"""Adapters that run segmentation models and export their outputs as
orgamask exchange files (RLE masks, candidate stacks, boxes, points).

This package talks to orgamask only through files and its CLI; it has
its own encoders so the exchange formats stay a two-sided contract.
"""

from .backends import AdapterError, get_backend
from .exchange import (
    CandidateEntry,
    ExportedCandidateStack,
    mask_doc,
    rle_runs,
    write_boxes,
    write_mask,
    write_points,
    write_stack,
)
from .exporters import (
    DEFAULT_TEXT_PROMPT,
    export_gdino_boxes,
    export_organoid_masks,
    export_sam_auto,
    export_sam_from_boxes,
    export_sam_from_points,
    load_image,
)
from .geometry import component_centroids, connected_components

__version__ = "0.1.0"

__all__ = [
    "AdapterError",
    "CandidateEntry",
    "DEFAULT_TEXT_PROMPT",
    "ExportedCandidateStack",
    "__version__",
    "component_centroids",
    "connected_components",
    "export_gdino_boxes",
    "export_organoid_masks",
    "export_sam_auto",
    "export_sam_from_boxes",
    "export_sam_from_points",
    "get_backend",
    "load_image",
    "mask_doc",
    "rle_runs",
    "write_boxes",
    "write_mask",
    "write_points",
    "write_stack",
]
