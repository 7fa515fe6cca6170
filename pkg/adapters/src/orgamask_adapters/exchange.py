"""Writers for the exchange formats the orgamask CLI consumes.

Deliberately independent of the orgamask package: the formats are a
contract between two codebases, so this side encodes them on its own.
Masks are boolean numpy arrays shaped (height, width).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import groupby
from pathlib import Path
from typing import Any

import numpy as np

RLE_ORDER = "row-major"

PRODUCERS = (
    "sam_auto",
    "sam_point",
    "sam_box",
    "organoid_trained",
    "organoid_untrained",
    "gdino_box",
)


def rle_runs(mask: np.ndarray) -> list[int]:
    """Row-major run lengths, first run counting background pixels."""
    flat = np.asarray(mask, dtype=bool).ravel().tolist()
    runs = [len(list(group)) for _, group in groupby(flat)]
    if flat and flat[0]:
        runs.insert(0, 0)
    if not flat:
        raise ValueError("mask has no pixels")
    return runs


def mask_doc(mask: np.ndarray) -> dict[str, Any]:
    height, width = mask.shape
    return {
        "width": int(width),
        "height": int(height),
        "order": RLE_ORDER,
        "runs": rle_runs(mask),
    }


def _dump(doc: Any, path: Path) -> None:
    path.write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")


def write_mask(mask: np.ndarray, path: str | Path) -> None:
    _dump(mask_doc(mask), Path(path))


@dataclass(frozen=True)
class CandidateEntry:
    candidate_id: str
    producer: str
    mask: np.ndarray
    prompt: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        if self.producer not in PRODUCERS:
            raise ValueError(
                f"unknown producer {self.producer!r}, expected one of {PRODUCERS}"
            )


@dataclass(frozen=True)
class ExportedCandidateStack:
    image_id: str
    dims: tuple[int, int]  # (width, height)
    candidates: tuple[CandidateEntry, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        width, height = self.dims
        seen: set[str] = set()
        for entry in self.candidates:
            if entry.mask.shape != (height, width):
                raise ValueError(
                    f"candidate {entry.candidate_id!r} is "
                    f"{entry.mask.shape[1]}x{entry.mask.shape[0]}, "
                    f"stack is {width}x{height}"
                )
            if entry.candidate_id in seen:
                raise ValueError(f"duplicate candidate id {entry.candidate_id!r}")
            seen.add(entry.candidate_id)

    def to_doc(self) -> dict[str, Any]:
        width, height = self.dims
        doc: dict[str, Any] = {
            "image_id": self.image_id,
            "width": int(width),
            "height": int(height),
            "candidates": [],
        }
        for entry in self.candidates:
            item: dict[str, Any] = {
                "id": entry.candidate_id,
                "producer": entry.producer,
                "runs": rle_runs(entry.mask),
            }
            if entry.prompt is not None:
                item["prompt"] = entry.prompt
            doc["candidates"].append(item)
        return doc


def write_stack(stack: ExportedCandidateStack, path: str | Path) -> None:
    _dump(stack.to_doc(), Path(path))


def write_boxes(
    boxes: list[dict[str, float]],
    dims: tuple[int, int],
    path: str | Path,
    *,
    prompt: str | None = None,
) -> None:
    """Write detections as {boxes, width, height} so bounds are checkable."""
    width, height = dims
    doc: dict[str, Any] = {
        "width": int(width),
        "height": int(height),
        "boxes": boxes,
    }
    if prompt is not None:
        doc["prompt"] = prompt
    _dump(doc, Path(path))


def write_points(points: list[tuple[float, float]], path: str | Path) -> None:
    _dump([{"row": row, "col": col} for row, col in points], Path(path))
