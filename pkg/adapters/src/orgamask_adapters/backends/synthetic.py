"""Weight-free stand-in backend.

Segments dark objects on a light background by thresholding at fixed
fractions of the image's value range, then splitting into 8-connected
components. Everything is a pure function of the pixels, so reruns
produce byte-identical exports; the seed parameter exists only to keep
the flag surface uniform with the real backends.
"""

from __future__ import annotations

import numpy as np

from ..geometry import connected_components
from .base import AdapterError

_LEVELS = (0.3, 0.5, 0.7)  # fractions of the value range, darkest first
_PROTOTYPE_LEVEL = {"trained": 0.5, "untrained": 0.7}


class SyntheticBackend:
    name = "synthetic"

    def __init__(self, seed: int = 0, min_area: int = 4, max_proposals: int = 64):
        self.seed = int(seed)
        self.min_area = int(min_area)
        self.max_proposals = int(max_proposals)

    def _foreground(self, image: np.ndarray, level: float) -> np.ndarray:
        lo = int(image.min())
        hi = int(image.max())
        if hi == lo:
            return np.zeros(image.shape, dtype=bool)
        return image < lo + level * (hi - lo)

    def _components(self, image: np.ndarray, level: float) -> list[np.ndarray]:
        foreground = self._foreground(image, level)
        masks = []
        for pixels in connected_components(foreground):
            if len(pixels) < self.min_area:
                continue
            mask = np.zeros(image.shape, dtype=bool)
            rows, cols = zip(*pixels)
            mask[list(rows), list(cols)] = True
            masks.append(mask)
        return masks

    def propose_masks(self, image: np.ndarray) -> list[np.ndarray]:
        proposals: list[np.ndarray] = []
        for level in _LEVELS:
            for mask in self._components(image, level):
                if any(np.array_equal(mask, seen) for seen in proposals):
                    continue
                proposals.append(mask)
                if len(proposals) >= self.max_proposals:
                    return proposals
        return proposals

    def masks_from_points(
        self, image: np.ndarray, points: list[tuple[float, float]]
    ) -> list[np.ndarray]:
        components = self._components(image, _LEVELS[1])
        masks = []
        for row, col in points:
            r, c = int(round(row)), int(round(col))
            hit = np.zeros(image.shape, dtype=bool)
            for component in components:
                if 0 <= r < image.shape[0] and 0 <= c < image.shape[1]:
                    if component[r, c]:
                        hit = component
                        break
            masks.append(hit)
        return masks

    def masks_from_boxes(
        self, image: np.ndarray, boxes: list[tuple[float, float, float, float]]
    ) -> list[np.ndarray]:
        foreground = self._foreground(image, _LEVELS[1])
        height, width = image.shape
        masks = []
        for x0, y0, x1, y1 in boxes:
            window = np.zeros((height, width), dtype=bool)
            r0 = max(0, int(np.floor(y0)))
            c0 = max(0, int(np.floor(x0)))
            r1 = min(height, int(np.ceil(y1)))
            c1 = min(width, int(np.ceil(x1)))
            window[r0:r1, c0:c1] = True
            clipped = foreground & window
            components = connected_components(clipped)
            best = np.zeros((height, width), dtype=bool)
            if components:
                pixels = max(components, key=len)
                rows, cols = zip(*pixels)
                best[list(rows), list(cols)] = True
            masks.append(best)
        return masks

    def detect_boxes(
        self, image: np.ndarray, prompt: str
    ) -> list[tuple[float, float, float, float, float]]:
        # the text prompt selects nothing here; detection is intensity-based
        del prompt
        image_mean = float(image.mean())
        boxes = []
        for mask in self._components(image, _LEVELS[1]):
            rows, cols = np.nonzero(mask)
            darkness = image_mean - float(image[rows, cols].mean())
            score = max(0.0, min(1.0, darkness / 255.0 + 0.5))
            boxes.append((
                float(cols.min()),
                float(rows.min()),
                float(cols.max() + 1),
                float(rows.max() + 1),
                round(score, 6),
            ))
        return boxes

    def prototype_mask(self, image: np.ndarray, variant: str) -> np.ndarray:
        if variant not in _PROTOTYPE_LEVEL:
            raise AdapterError(
                f"unknown weights variant {variant!r}; "
                f"expected one of {sorted(_PROTOTYPE_LEVEL)}"
            )
        combined = np.zeros(image.shape, dtype=bool)
        for mask in self._components(image, _PROTOTYPE_LEVEL[variant]):
            combined |= mask
        return combined
