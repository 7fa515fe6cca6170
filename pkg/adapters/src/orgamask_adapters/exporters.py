"""Turn backend outputs into exchange-format records.

Backends return raw masks/boxes; nothing here fills holes, smooths, or
otherwise edits them. Candidate ids embed the producer tag and a
stable index so reruns with the same inputs export identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .backends.base import AdapterError, Backend
from .exchange import CandidateEntry, ExportedCandidateStack
from .geometry import component_centroids

DEFAULT_TEXT_PROMPT = "a dark, solid cluster"


def load_image(path: str | Path) -> np.ndarray:
    """Read any PIL-supported image as uint8 grayscale."""
    path = Path(path)
    if not path.is_file():
        raise AdapterError(f"image not found: {path}")
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise AdapterError(f"unreadable image: {path} ({exc})") from exc


def _stack(
    image: np.ndarray,
    image_id: str,
    producer: str,
    masks: list[np.ndarray],
    prompts: list[dict] | None = None,
) -> ExportedCandidateStack:
    height, width = image.shape
    entries = []
    for index, mask in enumerate(masks):
        entries.append(
            CandidateEntry(
                candidate_id=f"{producer}_{index:03d}",
                producer=producer,
                mask=mask,
                prompt=None if prompts is None else prompts[index],
            )
        )
    return ExportedCandidateStack(
        image_id=image_id, dims=(width, height), candidates=tuple(entries)
    )


def export_sam_auto(
    image_path: str | Path, backend: Backend, *, image_id: str | None = None
) -> ExportedCandidateStack:
    image = load_image(image_path)
    masks = backend.propose_masks(image)
    return _stack(image, image_id or Path(image_path).stem, "sam_auto", masks)


def export_sam_from_points(
    image_path: str | Path,
    points: list[tuple[float, float]],
    backend: Backend,
    *,
    image_id: str | None = None,
) -> ExportedCandidateStack:
    image = load_image(image_path)
    masks = backend.masks_from_points(image, points)
    prompts = [{"row": row, "col": col} for row, col in points]
    return _stack(image, image_id or Path(image_path).stem, "sam_point", masks, prompts)


def export_sam_from_boxes(
    image_path: str | Path,
    boxes: list[tuple[float, float, float, float]],
    backend: Backend,
    *,
    image_id: str | None = None,
) -> ExportedCandidateStack:
    image = load_image(image_path)
    masks = backend.masks_from_boxes(image, boxes)
    prompts = [{"x0": x0, "y0": y0, "x1": x1, "y1": y1} for x0, y0, x1, y1 in boxes]
    return _stack(image, image_id or Path(image_path).stem, "sam_box", masks, prompts)


def export_gdino_boxes(
    image_path: str | Path,
    backend: Backend,
    *,
    prompt: str = DEFAULT_TEXT_PROMPT,
) -> tuple[list[dict[str, float]], tuple[int, int]]:
    """Detections plus (width, height), ready for write_boxes."""
    image = load_image(image_path)
    height, width = image.shape
    boxes = [
        {"x0": x0, "y0": y0, "x1": x1, "y1": y1, "score": score}
        for x0, y0, x1, y1, score in backend.detect_boxes(image, prompt)
    ]
    return boxes, (width, height)


def export_organoid_masks(
    image_path: str | Path,
    backend: Backend,
    *,
    variant: str = "trained",
) -> tuple[np.ndarray, list[tuple[float, float]]]:
    """Prototype mask plus one centroid per 8-connected component."""
    image = load_image(image_path)
    mask = backend.prototype_mask(image, variant)
    return mask, component_centroids(mask)
