"""Shape descriptors for mask regions: second-moment eccentricity,
convex-hull solidity, and the combined per-region metrics record.

Geometry works on pixel centers at integer lattice points. Hull
construction and rasterization use exact integer arithmetic, so boundary
pixels are classified deterministically; the nominal 1e-9 boundary
tolerance of the point-in-polygon definition is subsumed by exactness
(any nonzero integer cross product is at least 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .masks import BinaryMask, LabeledMask, area, centroid

__all__ = [
    "RegionMetrics",
    "bounding_box",
    "central_second_moments",
    "eccentricity",
    "convex_hull_mask",
    "solidity",
    "region_metrics",
    "per_component_metrics",
]


@dataclass(frozen=True)
class RegionMetrics:
    """Morphometric summary of one nonempty region.

    ``bbox`` is (min_row, min_col, max_row, max_col), inclusive on all
    sides. Eccentricity lies in [0, 1]; solidity in (0, 1].
    """

    area: int
    centroid: tuple[float, float]
    eccentricity: float
    solidity: float
    bbox: tuple[int, int, int, int]


def _foreground_coords(mask: BinaryMask) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.nonzero(mask.data)
    if rows.size == 0:
        raise ValueError("metric undefined for an empty mask")
    return rows.astype(np.int64), cols.astype(np.int64)


def bounding_box(mask: BinaryMask) -> tuple[int, int, int, int]:
    """Tight inclusive bounds (min_row, min_col, max_row, max_col)."""
    rows, cols = _foreground_coords(mask)
    return (int(rows.min()), int(cols.min()), int(rows.max()), int(cols.max()))


def central_second_moments(mask: BinaryMask) -> tuple[float, float, float]:
    """Area-normalized central second moments (m_rr, m_cc, m_rc).

    m_rr = sum((r - mean_r)^2) / N and likewise for the other two.
    Sums are exact integers over bbox-shifted coordinates (central moments
    are translation invariant); each moment is one double division.
    """
    rows, cols = _foreground_coords(mask)
    r = rows - rows.min()
    c = cols - cols.min()
    n = int(r.size)
    sr = int(r.sum())
    sc = int(c.sum())
    srr = int((r * r).sum())
    scc = int((c * c).sum())
    src = int((r * c).sum())
    nn = n * n
    m_rr = (n * srr - sr * sr) / nn
    m_cc = (n * scc - sc * sc) / nn
    m_rc = (n * src - sr * sc) / nn
    return (m_rr, m_cc, m_rc)


def eccentricity(mask: BinaryMask) -> float:
    """Eccentricity of the ellipse sharing the mask's second moments.

    With eigenvalues lam1 >= lam2 >= 0 of the central second-moment
    matrix, returns sqrt(1 - lam2/lam1). A single pixel (lam1 = 0) has
    eccentricity 0; a 1-pixel-wide line (lam2 = 0) has eccentricity 1.
    """
    m_rr, m_cc, m_rc = central_second_moments(mask)
    half_trace = 0.5 * (m_rr + m_cc)
    half_gap = math.hypot(0.5 * (m_rr - m_cc), m_rc)
    lam1 = half_trace + half_gap
    lam2 = half_trace - half_gap
    if lam1 <= 0.0:
        return 0.0
    ratio = min(max(lam2 / lam1, 0.0), 1.0)
    return math.sqrt(1.0 - ratio)


def _hull_vertices(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Convex hull of integer (x, y) points, counterclockwise, via
    monotone chain with exact integer cross products. Collinear inputs
    degenerate to 2 vertices, a single point to 1."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o: tuple[int, int], a: tuple[int, int], b: tuple[int, int]) -> int:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _rasterize_hull(
    vertices: list[tuple[int, int]], width: int, height: int
) -> np.ndarray:
    """Grid of pixels whose centers lie inside or on the hull polygon.

    For each row, the admissible column range is derived by intersecting
    the integer half-plane constraints of all directed edges; a convex
    polygon meets a row in a single interval. All arithmetic is integer.
    """
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    grid = np.zeros((height, width), dtype=bool)

    if len(vertices) == 1:
        grid[y_min, x_min] = True
        return grid
    if len(vertices) == 2:
        # Degenerate hull: opposing half-planes pin pixels onto the segment.
        edges = [(vertices[0], vertices[1]), (vertices[1], vertices[0])]
    else:
        edges = list(zip(vertices, vertices[1:] + vertices[:1]))

    ex1 = np.array([e[0][0] for e in edges], dtype=np.int64)
    ey1 = np.array([e[0][1] for e in edges], dtype=np.int64)
    ex2 = np.array([e[1][0] for e in edges], dtype=np.int64)
    ey2 = np.array([e[1][1] for e in edges], dtype=np.int64)
    a = ey2 - ey1
    rows = np.arange(y_min, y_max + 1, dtype=np.int64)[:, None]
    # Inside-or-on for edge e and point (x, row): a*x <= b[row, e].
    b = (ex2 - ex1)[None, :] * (rows - ey1[None, :]) + (a * ex1)[None, :]

    n_rows = y_max - y_min + 1
    lo = np.full(n_rows, x_min, dtype=np.int64)
    hi = np.full(n_rows, x_max, dtype=np.int64)
    feasible = np.ones(n_rows, dtype=bool)
    pos = a > 0
    if pos.any():
        hi = np.minimum(hi, (b[:, pos] // a[pos]).min(axis=1))
    neg = a < 0
    if neg.any():
        q = -a[neg]
        lo = np.maximum(lo, (-(b[:, neg] // q)).max(axis=1))
    horiz = a == 0
    if horiz.any():
        feasible &= (b[:, horiz] >= 0).all(axis=1)

    for i in range(n_rows):
        if feasible[i] and lo[i] <= hi[i]:
            grid[y_min + i, lo[i] : hi[i] + 1] = True
    return grid


def convex_hull_mask(mask: BinaryMask) -> BinaryMask:
    """Rasterized convex hull of the foreground pixel centers.

    A pixel belongs to the output iff its center lies inside or on the
    hull polygon, so the input is always a subset of the output and the
    operation is idempotent. The empty mask is its own hull.
    """
    if mask.is_empty:
        return mask
    rows, cols = _foreground_coords(mask)
    # Only each row's extreme columns can be hull vertices.
    row_ids, first = np.unique(rows, return_index=True)
    last = np.r_[first[1:], rows.size] - 1
    points = [(int(cols[i]), int(r)) for r, i in zip(row_ids, first)]
    points += [(int(cols[i]), int(r)) for r, i in zip(row_ids, last)]
    hull = _hull_vertices(points)
    return BinaryMask(_rasterize_hull(hull, mask.width, mask.height))


def solidity(mask: BinaryMask) -> float:
    """Foreground area divided by convex-hull area; 1 for convex shapes."""
    if mask.is_empty:
        raise ValueError("metric undefined for an empty mask")
    hull = convex_hull_mask(mask)
    return area(mask) / area(hull)


def region_metrics(mask: BinaryMask) -> RegionMetrics:
    """All shape descriptors of one nonempty mask region."""
    return RegionMetrics(
        area=area(mask),
        centroid=centroid(mask),
        eccentricity=eccentricity(mask),
        solidity=solidity(mask),
        bbox=bounding_box(mask),
    )


def per_component_metrics(labeled: LabeledMask) -> list[tuple[int, RegionMetrics]]:
    """Metrics for every labeled component, ordered by label."""
    return [
        (label, region_metrics(labeled.component_mask(label)))
        for label in range(1, labeled.num_components + 1)
    ]
