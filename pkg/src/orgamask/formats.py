"""Bit-exact mask exchange: run-length JSON documents, 8-bit image
masks, candidate stacks, and the small point/box JSON formats.

Run-length runs are row-major and alternate background/foreground,
always starting with a background run (which may be 0 for a mask whose
first pixel is foreground). The runs must sum to exactly width*height.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

from .fusion import CandidateSet
from .masks import BinaryMask

__all__ = [
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
]

RLE_ORDER = "row-major"
_IMAGE_FOREGROUND = 255


@dataclass(frozen=True)
class RleMask:
    """Run-length form of a binary mask."""

    width: int
    height: int
    runs: tuple[int, ...]
    order: str = RLE_ORDER

    def __post_init__(self) -> None:
        object.__setattr__(self, "runs", tuple(int(r) for r in self.runs))
        if self.order != RLE_ORDER:
            raise ValueError(f"unsupported run order {self.order!r}, expected {RLE_ORDER!r}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"mask dimensions must be positive, got {self.width}x{self.height}")
        if any(r < 0 for r in self.runs):
            raise ValueError("run lengths must be nonnegative")
        total = sum(self.runs)
        expected = self.width * self.height
        if total != expected:
            raise ValueError(
                f"runs sum to {total}, expected width*height = {expected}"
            )

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "width": self.width,
            "height": self.height,
            "order": self.order,
            "runs": list(self.runs),
        }

    @classmethod
    def from_json_dict(cls, doc: Any, *, context: str = "RLE document") -> "RleMask":
        if not isinstance(doc, dict):
            raise ValueError(f"{context}: expected a JSON object, got {type(doc).__name__}")
        for key in ("width", "height", "runs"):
            if key not in doc:
                raise ValueError(f"{context}: missing required key {key!r}")
        runs = doc["runs"]
        if not isinstance(runs, list) or not all(
            isinstance(r, int) and not isinstance(r, bool) for r in runs
        ):
            raise ValueError(f"{context}: 'runs' must be a list of integers")
        return cls(
            width=doc["width"],
            height=doc["height"],
            runs=tuple(runs),
            order=doc.get("order", RLE_ORDER),
        )


def rle_encode(mask: BinaryMask) -> RleMask:
    """Canonical run-length encoding: no zero-length interior runs."""
    flat = mask.data.ravel()
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs = [0] + runs
    return RleMask(width=mask.width, height=mask.height, runs=tuple(runs))


def rle_decode(rle: RleMask) -> BinaryMask:
    """Expand runs back into a mask; composing with encode canonicalizes."""
    values = (np.arange(len(rle.runs)) % 2).astype(bool)
    flat = np.repeat(values, rle.runs)
    return BinaryMask(flat.reshape(rle.height, rle.width))


def _load_image_mask(path: Path) -> BinaryMask:
    try:
        with Image.open(path) as img:
            if img.mode != "L":
                raise ValueError(
                    f"{path}: expected an 8-bit single-channel mask image "
                    f"(mode L), got mode {img.mode}"
                )
            data = np.asarray(img)
    except UnidentifiedImageError as exc:
        raise ValueError(f"{path}: not a readable image file") from exc
    return BinaryMask(data != 0)


def load_mask(path: str | Path) -> BinaryMask:
    """Read a mask from an 8-bit single-channel image or an RLE JSON file.

    Image pixels with any nonzero value are foreground.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"mask file not found: {path}")
    if path.suffix.lower() == ".json":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: invalid JSON: {exc}") from exc
        if isinstance(doc, dict) and "candidates" in doc:
            raise ValueError(
                f"{path}: this is a candidate stack, not a single mask"
            )
        try:
            return rle_decode(RleMask.from_json_dict(doc))
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from exc
    return _load_image_mask(path)


def _dump_json(doc: Any, path: Path) -> None:
    path.write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    """Write a mask losslessly: RLE JSON for .json paths, 8-bit image
    (foreground 255) otherwise."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        _dump_json(rle_encode(mask).to_json_dict(), path)
        return
    img = Image.fromarray(
        np.where(mask.data, _IMAGE_FOREGROUND, 0).astype(np.uint8), mode="L"
    )
    img.save(path)


def _parse_stack_doc(doc: Any, *, context: str) -> tuple[tuple[int, int], list[tuple[str, BinaryMask]], list[str]]:
    """Parse a candidate-stack JSON document, accumulating error strings."""
    errors: list[str] = []
    if not isinstance(doc, dict):
        return (0, 0), [], [f"{context}: expected a JSON object"]
    for key in ("width", "height", "candidates"):
        if key not in doc:
            errors.append(f"{context}: missing required key {key!r}")
    if errors:
        return (0, 0), [], errors
    width, height = doc["width"], doc["height"]
    if not isinstance(doc["candidates"], list):
        return (0, 0), [], [f"{context}: 'candidates' must be a list"]
    entries: list[tuple[str, BinaryMask]] = []
    seen: set[str] = set()
    for i, entry in enumerate(doc["candidates"]):
        if not isinstance(entry, dict) or "id" not in entry:
            errors.append(f"{context}: candidate #{i} lacks an 'id'")
            continue
        cid = str(entry["id"])
        if cid in seen:
            errors.append(f"{context}: duplicate candidate id {cid!r}")
            continue
        seen.add(cid)
        try:
            rle = RleMask.from_json_dict(
                {"width": width, "height": height, "runs": entry.get("runs"),
                 "order": entry.get("order", RLE_ORDER)},
                context=f"candidate {cid!r}",
            )
            entries.append((cid, rle_decode(rle)))
        except ValueError as exc:
            errors.append(f"{context}: {exc}")
    return (width, height), entries, errors


def load_candidate_set(path: str | Path) -> CandidateSet:
    """Load candidates from a stack JSON file or a directory of mask files.

    Directory entries are taken in sorted filename order with the stem as
    the candidate id; all masks must share one grid.
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file())
        if not files:
            raise ValueError(f"{path}: candidate directory is empty")
        entries = [(p.stem, load_mask(p)) for p in files]
        dims = entries[0][1].dims
        return CandidateSet(dims=dims, candidates=tuple(entries))
    if not path.is_file():
        raise FileNotFoundError(f"candidate stack not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    dims, entries, errors = _parse_stack_doc(doc, context=str(path))
    if errors:
        raise ValueError("; ".join(errors))
    return CandidateSet(dims=dims, candidates=tuple(entries))


def save_candidate_stack(
    candidates: CandidateSet,
    path: str | Path,
    *,
    image_id: str | None = None,
) -> None:
    """Write a candidate set as a stack JSON document."""
    doc: dict[str, Any] = {}
    if image_id is not None:
        doc["image_id"] = image_id
    doc["width"], doc["height"] = candidates.dims
    doc["candidates"] = [
        {"id": cid, "runs": list(rle_encode(mask).runs)}
        for cid, mask in candidates.candidates
    ]
    _dump_json(doc, Path(path))


def load_points(path: str | Path) -> list[tuple[float, float]]:
    """Read a JSON list of {row, col} points."""
    with open(Path(path), "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise ValueError(f"{path}: expected a JSON list of points")
    points = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict) or "row" not in entry or "col" not in entry:
            raise ValueError(f"{path}: point #{i} must be an object with 'row' and 'col'")
        points.append((float(entry["row"]), float(entry["col"])))
    return points


def save_points(points: Sequence[tuple[float, float]], path: str | Path) -> None:
    doc = [{"row": row, "col": col} for row, col in points]
    _dump_json(doc, Path(path))


def validate_mask_file(path: str | Path) -> list[str]:
    """Errors preventing a file from being read as a single mask."""
    try:
        load_mask(path)
    except (ValueError, FileNotFoundError, OSError) as exc:
        return [str(exc)]
    return []


def validate_stack_file(path: str | Path) -> list[str]:
    """Errors preventing a file from being read as a candidate stack."""
    path = Path(path)
    if not path.is_file():
        return [f"candidate stack not found: {path}"]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, OSError) as exc:
        return [f"{path}: invalid JSON: {exc}"]
    dims, entries, errors = _parse_stack_doc(doc, context=str(path))
    if not errors:
        try:
            CandidateSet(dims=dims, candidates=tuple(entries))
        except ValueError as exc:
            errors.append(f"{path}: {exc}")
    return errors


def validate_boxes_file(path: str | Path) -> list[str]:
    """Errors preventing a file from being read as a box-detection list.

    Accepts either a bare JSON list of {x0, y0, x1, y1, score} objects or
    an object with a 'boxes' list plus optional 'width'/'height' used for
    bounds checking.
    """
    path = Path(path)
    if not path.is_file():
        return [f"boxes file not found: {path}"]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, OSError) as exc:
        return [f"{path}: invalid JSON: {exc}"]
    width = height = None
    if isinstance(doc, dict):
        boxes = doc.get("boxes")
        width, height = doc.get("width"), doc.get("height")
    else:
        boxes = doc
    if not isinstance(boxes, list):
        return [f"{path}: expected a JSON list of boxes (or an object with a 'boxes' list)"]
    errors = []
    for i, box in enumerate(boxes):
        if not isinstance(box, dict):
            errors.append(f"{path}: box #{i} must be an object")
            continue
        missing = [k for k in ("x0", "y0", "x1", "y1", "score") if k not in box]
        if missing:
            errors.append(f"{path}: box #{i} missing keys {missing}")
            continue
        try:
            x0, y0, x1, y1 = (float(box[k]) for k in ("x0", "y0", "x1", "y1"))
            float(box["score"])
        except (TypeError, ValueError):
            errors.append(f"{path}: box #{i} has non-numeric coordinates")
            continue
        if x1 < x0 or y1 < y0:
            errors.append(f"{path}: box #{i} is inverted ({x0},{y0})-({x1},{y1})")
        if width is not None and height is not None:
            if x0 < 0 or y0 < 0 or x1 > width or y1 > height:
                errors.append(
                    f"{path}: box #{i} exceeds the {width}x{height} image bounds"
                )
    return errors
