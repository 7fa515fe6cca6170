"""Binary-mask comparison toolkit for organoid segmentation evaluation.

Core pieces:

  masks        BinaryMask, IOU, overlap, union, connected components
  morphometry  area, centroid, eccentricity, solidity, convex hulls
  fusion       candidate fusion, centroid prompts, hybrid arbitration
  evaluation   per-image records, mean IOU, agreement curves
  formats      RLE codec, image and JSON exchange files
  manifest     batch-run declarations
  pipeline     batch driver and deterministic report bundles
"""

__version__ = "0.1.0"

from .evaluation import (
    EMPTY_PREDICTION_ECCENTRICITY,
    EMPTY_PREDICTION_IOU,
    EMPTY_PREDICTION_RELATIVE_AREA,
    EMPTY_PREDICTION_SOLIDITY,
    AbstentionPolicy,
    AgreementCurve,
    CurveKind,
    EvaluationRecord,
    MeanIouRow,
    MeanIouTable,
    PairedCurves,
    abstained_record,
    agreement_curve,
    default_grid,
    evaluate_image,
    iov_compare,
    mean_iou,
)
from .formats import (
    RleMask,
    load_candidate_set,
    load_mask,
    load_points,
    rle_decode,
    rle_encode,
    save_candidate_stack,
    save_mask,
    save_points,
    validate_boxes_file,
    validate_mask_file,
    validate_stack_file,
)
from .fusion import (
    CandidateSet,
    FusionConfig,
    FusionResult,
    HybridConfig,
    HybridResult,
    centroid_prompts,
    composite_fuse,
    hybrid_select,
)
from .manifest import (
    SECOND_ANNOTATOR_METHOD_ID,
    Manifest,
    ManifestError,
    MethodKind,
    load_manifest,
)
from .masks import (
    BinaryMask,
    LabeledMask,
    OverlapMode,
    area,
    centroid,
    connected_components,
    iou,
    largest_component,
    overlap_fraction,
    union,
)
from .morphometry import (
    RegionMetrics,
    central_second_moments,
    convex_hull_mask,
    eccentricity,
    per_component_metrics,
    region_metrics,
    solidity,
)
from .pipeline import (
    PipelineFailure,
    ReportBundle,
    read_records_csv,
    run_pipeline,
    write_reports,
)

__all__ = [
    "__version__",
    "BinaryMask",
    "LabeledMask",
    "OverlapMode",
    "iou",
    "overlap_fraction",
    "union",
    "connected_components",
    "largest_component",
    "area",
    "centroid",
    "RegionMetrics",
    "central_second_moments",
    "eccentricity",
    "solidity",
    "convex_hull_mask",
    "region_metrics",
    "per_component_metrics",
    "CandidateSet",
    "FusionConfig",
    "FusionResult",
    "HybridConfig",
    "HybridResult",
    "composite_fuse",
    "centroid_prompts",
    "hybrid_select",
    "EvaluationRecord",
    "AbstentionPolicy",
    "AgreementCurve",
    "CurveKind",
    "MeanIouRow",
    "MeanIouTable",
    "PairedCurves",
    "EMPTY_PREDICTION_IOU",
    "EMPTY_PREDICTION_RELATIVE_AREA",
    "EMPTY_PREDICTION_ECCENTRICITY",
    "EMPTY_PREDICTION_SOLIDITY",
    "evaluate_image",
    "abstained_record",
    "mean_iou",
    "agreement_curve",
    "iov_compare",
    "default_grid",
    "RleMask",
    "rle_encode",
    "rle_decode",
    "load_mask",
    "save_mask",
    "load_candidate_set",
    "save_candidate_stack",
    "load_points",
    "save_points",
    "validate_mask_file",
    "validate_stack_file",
    "validate_boxes_file",
    "Manifest",
    "ManifestError",
    "MethodKind",
    "SECOND_ANNOTATOR_METHOD_ID",
    "load_manifest",
    "PipelineFailure",
    "ReportBundle",
    "run_pipeline",
    "write_reports",
    "read_records_csv",
]
