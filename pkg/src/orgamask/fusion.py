"""Mask-combination strategies: composite fusion of candidate masks
against a prototype, centroid prompt extraction, and hybrid arbitration
between finalist masks with abstention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .masks import (
    BinaryMask,
    OverlapMode,
    centroid,
    connected_components,
    iou,
    overlap_fraction,
    union,
)

__all__ = [
    "CandidateSet",
    "FusionConfig",
    "FusionResult",
    "HybridConfig",
    "HybridResult",
    "composite_fuse",
    "centroid_prompts",
    "hybrid_select",
]


@dataclass(frozen=True)
class CandidateSet:
    """An ordered collection of candidate masks sharing one grid."""

    dims: tuple[int, int]
    candidates: tuple[tuple[str, BinaryMask], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        seen: set[str] = set()
        for cid, mask in self.candidates:
            if cid in seen:
                raise ValueError(f"duplicate candidate id {cid!r}")
            seen.add(cid)
            if mask.dims != self.dims:
                raise ValueError(
                    f"candidate {cid!r} is {mask.width}x{mask.height}, "
                    f"expected {self.dims[0]}x{self.dims[1]}"
                )

    def __len__(self) -> int:
        return len(self.candidates)

    def ids(self) -> list[str]:
        return [cid for cid, _ in self.candidates]


@dataclass(frozen=True)
class FusionConfig:
    """Acceptance rule for composite fusion.

    A candidate is accepted when its overlap with the prototype, measured
    per ``mode``, strictly exceeds ``overlap_threshold``. The threshold
    must be positive: at 0 every candidate, including empty ones, would
    be accepted.
    """

    overlap_threshold: float = 0.5
    mode: OverlapMode = OverlapMode.CANDIDATE_FRACTION

    def __post_init__(self) -> None:
        if not 0.0 < self.overlap_threshold <= 1.0:
            raise ValueError(
                f"overlap_threshold must be in (0, 1], got {self.overlap_threshold}"
            )
        object.__setattr__(self, "mode", OverlapMode(self.mode))


@dataclass(frozen=True)
class FusionResult:
    """Outcome of composite fusion: the merged mask, which candidates were
    accepted, and every candidate's overlap score in input order."""

    fused: BinaryMask
    accepted_ids: tuple[str, ...]
    per_candidate_overlap: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class HybridConfig:
    """Abstention rule for hybrid arbitration: abstain when the best
    finalist's IOU with the prototype falls below the threshold.
    The boundary is inclusive (max IOU equal to the threshold selects)."""

    abstention_threshold: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.abstention_threshold <= 1.0:
            raise ValueError(
                f"abstention_threshold must be in [0, 1], got {self.abstention_threshold}"
            )


@dataclass(frozen=True)
class HybridResult:
    """Outcome of hybrid arbitration.

    ``finalist_id`` always names the best-matching finalist. When the
    selection abstained, ``mask`` is None and ``iou_with_prototype`` is
    the best (insufficient) IOU.
    """

    abstained: bool
    finalist_id: str
    iou_with_prototype: float
    mask: BinaryMask | None
    per_finalist_iou: tuple[tuple[str, float], ...] = field(default=())


def composite_fuse(
    prototype: BinaryMask, candidates: CandidateSet, config: FusionConfig
) -> FusionResult:
    """Stitch together the candidates that sufficiently overlap a prototype.

    Every candidate whose overlap with the prototype strictly exceeds the
    configured threshold is accepted, and the fused output is the pixel
    union of the accepted candidates. An empty prototype or an empty
    candidate list yields an empty fused mask.
    """
    if prototype.dims != candidates.dims:
        raise ValueError(
            f"prototype is {prototype.width}x{prototype.height}, candidates are "
            f"{candidates.dims[0]}x{candidates.dims[1]}"
        )
    overlaps = [
        (cid, overlap_fraction(mask, prototype, config.mode))
        for cid, mask in candidates.candidates
    ]
    accepted = [
        (cid, mask)
        for (cid, mask), (_, score) in zip(candidates.candidates, overlaps)
        if score > config.overlap_threshold
    ]
    fused = union([mask for _, mask in accepted], dims=prototype.dims)
    return FusionResult(
        fused=fused,
        accepted_ids=tuple(cid for cid, _ in accepted),
        per_candidate_overlap=tuple(overlaps),
    )


def centroid_prompts(mask: BinaryMask) -> list[tuple[float, float]]:
    """Centroid (row, col) of each 8-connected component, in label order.

    The points are meant as per-object prompts for downstream segmenters;
    an empty mask yields an empty list.
    """
    labeled = connected_components(mask)
    return [
        centroid(labeled.component_mask(label))
        for label in range(1, labeled.num_components + 1)
    ]


def hybrid_select(
    prototype: BinaryMask, finalists: CandidateSet, config: HybridConfig
) -> HybridResult:
    """Pick the finalist mask that best matches the prototype by IOU.

    Ties break toward the earliest finalist in the input order. When even
    the best IOU is below the abstention threshold, no mask is returned
    and the result records the best id and its IOU.
    """
    if prototype.is_empty:
        raise ValueError("hybrid selection needs a nonempty prototype mask")
    if len(finalists) == 0:
        raise ValueError("hybrid selection needs at least one finalist")
    if prototype.dims != finalists.dims:
        raise ValueError(
            f"prototype is {prototype.width}x{prototype.height}, finalists are "
            f"{finalists.dims[0]}x{finalists.dims[1]}"
        )
    scores = [(cid, iou(mask, prototype)) for cid, mask in finalists.candidates]
    best_index = max(range(len(scores)), key=lambda i: scores[i][1])
    # max() keeps the earliest index on exact ties
    best_id, best_iou = scores[best_index]
    if best_iou < config.abstention_threshold:
        return HybridResult(
            abstained=True,
            finalist_id=best_id,
            iou_with_prototype=best_iou,
            mask=None,
            per_finalist_iou=tuple(scores),
        )
    return HybridResult(
        abstained=False,
        finalist_id=best_id,
        iou_with_prototype=best_iou,
        mask=finalists.candidates[best_index][1],
        per_finalist_iou=tuple(scores),
    )
