"""Connected components and centroids for exported masks.

Mirrors the conventions the orgamask CLI documents for its `centroids`
command: 8-connected components, labels assigned in raster discovery
order, centroid = mean pixel coordinate per component. Implemented here
independently so exported point files can be cross-checked against the
other side.
"""

from __future__ import annotations

from collections import deque

import numpy as np

_NEIGHBORS = tuple(
    (dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)
)


def connected_components(mask: np.ndarray) -> list[list[tuple[int, int]]]:
    """Pixel lists per component, ordered by first raster-scan pixel."""
    grid = np.asarray(mask, dtype=bool)
    height, width = grid.shape
    seen = np.zeros_like(grid, dtype=bool)
    components: list[list[tuple[int, int]]] = []
    for row in range(height):
        for col in range(width):
            if not grid[row, col] or seen[row, col]:
                continue
            pixels = []
            queue = deque([(row, col)])
            seen[row, col] = True
            while queue:
                r, c = queue.popleft()
                pixels.append((r, c))
                for dr, dc in _NEIGHBORS:
                    nr, nc = r + dr, c + dc
                    if 0 <= nr < height and 0 <= nc < width:
                        if grid[nr, nc] and not seen[nr, nc]:
                            seen[nr, nc] = True
                            queue.append((nr, nc))
            components.append(pixels)
    return components


def component_centroids(mask: np.ndarray) -> list[tuple[float, float]]:
    """(row, col) centroid per component, in component label order."""
    centroids = []
    for pixels in connected_components(mask):
        rows = sum(r for r, _ in pixels)
        cols = sum(c for _, c in pixels)
        count = len(pixels)
        centroids.append((rows / count, cols / count))
    return centroids
