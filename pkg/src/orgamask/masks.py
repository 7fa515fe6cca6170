"""Binary masks and pixel-set algebra: IOU, overlap fractions, unions,
connected components, areas and centroids.

All operations are pure functions on immutable values. Pixel counts use
exact integer arithmetic; a single floating-point division produces each
reported fraction, so results are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

__all__ = [
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
]

# Foreground connectivity: diagonal neighbours belong to the same component.
_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

# Guards against absurd grids, checked before allocating anything. The
# per-side cap also keeps every int64 moment sum downstream overflow-free.
_MAX_PIXELS = 2**28
_MAX_SIDE = 2**17


class OverlapMode(str, Enum):
    """How a candidate mask's overlap with a prototype is measured.

    ``candidate_fraction`` is the fraction of the candidate's own pixels
    that fall inside the prototype (one-sided: a small candidate fully
    inside a large prototype scores 1.0). ``iou`` is the symmetric
    intersection-over-union of the two masks.
    """

    CANDIDATE_FRACTION = "candidate_fraction"
    IOU = "iou"


def _validate_dims(width: int, height: int) -> None:
    if width < 1 or height < 1:
        raise ValueError(f"mask dimensions must be positive, got {width}x{height}")
    if width > _MAX_SIDE or height > _MAX_SIDE or width * height > _MAX_PIXELS:
        raise ValueError(
            f"mask dimensions {width}x{height} overflow the supported grid size "
            f"(max {_MAX_SIDE} per side, {_MAX_PIXELS} pixels total)"
        )


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """A rectangular grid of foreground/background pixels.

    Stored as a read-only boolean array of shape ``(height, width)``,
    row-major with origin at the top-left. Pixel coordinates are
    ``(row, col)`` pairs; membership and equality are exact. The empty
    mask (no foreground) is a valid value.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=bool, order="C")
        if arr.ndim != 2:
            raise ValueError(f"mask grid must be 2-D, got shape {arr.shape}")
        _validate_dims(arr.shape[1], arr.shape[0])
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def empty(cls, width: int, height: int) -> "BinaryMask":
        _validate_dims(width, height)
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def full(cls, width: int, height: int) -> "BinaryMask":
        _validate_dims(width, height)
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def from_pixels(
        cls, width: int, height: int, pixels: Iterable[tuple[int, int]]
    ) -> "BinaryMask":
        """Build a mask from explicit foreground (row, col) coordinates."""
        _validate_dims(width, height)
        grid = np.zeros((height, width), dtype=bool)
        for row, col in pixels:
            if not (0 <= row < height and 0 <= col < width):
                raise ValueError(
                    f"pixel ({row}, {col}) outside {width}x{height} grid"
                )
            grid[row, col] = True
        return cls(grid)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        """(width, height) of the pixel grid."""
        return (self.width, self.height)

    @property
    def is_empty(self) -> bool:
        return not self.data.any()

    def pixels(self) -> list[tuple[int, int]]:
        """Foreground coordinates as (row, col) tuples in raster order."""
        return [(int(r), int(c)) for r, c in np.argwhere(self.data)]

    def __contains__(self, pixel: tuple[int, int]) -> bool:
        row, col = pixel
        if not (0 <= row < self.height and 0 <= col < self.width):
            return False
        return bool(self.data[row, col])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )

    __hash__ = None  # mutable-free but equality is by value; not hashable

    def __repr__(self) -> str:
        return f"BinaryMask({self.width}x{self.height}, area={int(self.data.sum())})"


@dataclass(frozen=True, eq=False)
class LabeledMask:
    """Integer-labeled component map: 0 is background, labels run 1..K."""

    labels: np.ndarray
    num_components: int

    def __post_init__(self) -> None:
        arr = np.array(self.labels, dtype=np.int32, order="C")
        if arr.ndim != 2:
            raise ValueError(f"label grid must be 2-D, got shape {arr.shape}")
        _validate_dims(arr.shape[1], arr.shape[0])
        counts = np.bincount(arr.ravel(), minlength=self.num_components + 1)
        if len(counts) != self.num_components + 1 or (
            self.num_components > 0 and (counts[1:] == 0).any()
        ):
            raise ValueError(
                f"labels must be contiguous 1..{self.num_components} with every label present"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def component_mask(self, label: int) -> BinaryMask:
        """The binary mask of one labeled component."""
        if not 1 <= label <= self.num_components:
            raise ValueError(
                f"label {label} out of range 1..{self.num_components}"
            )
        return BinaryMask(self.labels == label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledMask):
            return NotImplemented
        return self.num_components == other.num_components and bool(
            np.array_equal(self.labels, other.labels)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"LabeledMask({self.width}x{self.height}, K={self.num_components})"


def _require_same_dims(a: BinaryMask, b: BinaryMask) -> None:
    if a.dims != b.dims:
        raise ValueError(
            f"mask dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection-over-union of two same-size masks.

    Counts are exact integers; the single division happens in double
    precision. When both masks are empty the union is empty and the
    result is defined as 0.0.
    """
    _require_same_dims(a, b)
    inter = int(np.count_nonzero(a.data & b.data))
    uni = int(np.count_nonzero(a.data | b.data))
    if uni == 0:
        return 0.0
    return inter / uni


def overlap_fraction(
    candidate: BinaryMask, prototype: BinaryMask, mode: OverlapMode
) -> float:
    """Overlap of a candidate mask with a prototype, per the chosen mode.

    ``candidate_fraction``: |candidate ∩ prototype| / |candidate|, with an
    empty candidate scoring 0. ``iou``: plain intersection-over-union.
    """
    _require_same_dims(candidate, prototype)
    mode = OverlapMode(mode)
    if mode is OverlapMode.IOU:
        return iou(candidate, prototype)
    denom = int(np.count_nonzero(candidate.data))
    if denom == 0:
        return 0.0
    inter = int(np.count_nonzero(candidate.data & prototype.data))
    return inter / denom


def union(
    masks: Sequence[BinaryMask], dims: tuple[int, int] | None = None
) -> BinaryMask:
    """Pixel-set union of masks sharing one grid.

    An empty list is allowed only when ``dims`` (width, height) supplies
    the grid explicitly; the result is then the empty mask.
    """
    masks = list(masks)
    if not masks:
        if dims is None:
            raise ValueError("union of an empty list needs explicit dims=(width, height)")
        return BinaryMask.empty(*dims)
    first = masks[0]
    if dims is not None and first.dims != dims:
        raise ValueError(
            f"mask dimensions differ: {first.width}x{first.height} vs {dims[0]}x{dims[1]}"
        )
    out = first.data.copy()
    for m in masks[1:]:
        _require_same_dims(first, m)
        out |= m.data
    return BinaryMask(out)


def connected_components(mask: BinaryMask) -> LabeledMask:
    """Label 8-connected foreground components 1..K in raster discovery order.

    Labels are assigned by the position of each component's first pixel in
    row-major scan order, so repeated runs on identical input produce
    identical labelings.
    """
    raw, n = ndimage.label(mask.data, structure=_EIGHT_CONNECTED)
    if n == 0:
        return LabeledMask(np.zeros_like(raw, dtype=np.int32), 0)
    flat = raw.ravel()
    nz = np.flatnonzero(flat)
    present, first_pos = np.unique(flat[nz], return_index=True)
    discovery = present[np.argsort(first_pos, kind="stable")]
    remap = np.zeros(n + 1, dtype=np.int32)
    remap[discovery] = np.arange(1, n + 1, dtype=np.int32)
    return LabeledMask(remap[raw], n)


def largest_component(mask: BinaryMask) -> BinaryMask:
    """The single largest 8-connected component of a mask.

    Ties go to the smallest label, i.e. the component discovered earliest
    in raster order. The empty mask maps to itself.
    """
    labeled = connected_components(mask)
    if labeled.num_components == 0:
        return BinaryMask.empty(mask.width, mask.height)
    counts = np.bincount(labeled.labels.ravel(), minlength=labeled.num_components + 1)
    best = int(np.argmax(counts[1:])) + 1  # argmax keeps the earliest label on ties
    return labeled.component_mask(best)


def area(mask: BinaryMask) -> int:
    """Number of foreground pixels."""
    return int(np.count_nonzero(mask.data))


def centroid(mask: BinaryMask) -> tuple[float, float]:
    """Arithmetic mean (row, col) of the foreground pixel centers.

    Raises ValueError on the empty mask; callers that need an empty-mask
    convention apply it upstream.
    """
    rows, cols = np.nonzero(mask.data)
    n = rows.size
    if n == 0:
        raise ValueError("centroid of an empty mask is undefined")
    return (int(rows.sum(dtype=np.int64)) / n, int(cols.sum(dtype=np.int64)) / n)
