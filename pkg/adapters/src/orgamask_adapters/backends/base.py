from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np


class AdapterError(RuntimeError):
    """Raised for missing weights, missing packages, or unreadable inputs."""


@runtime_checkable
class Backend(Protocol):
    """What an exporter needs from a model.

    Images are uint8 grayscale arrays (height, width); masks come back
    as boolean arrays of the same shape. Not every backend implements
    every capability; unsupported ones raise AdapterError.
    """

    def propose_masks(self, image: np.ndarray) -> list[np.ndarray]:
        """Segment everything: one mask per detected object."""
        ...

    def masks_from_points(
        self, image: np.ndarray, points: list[tuple[float, float]]
    ) -> list[np.ndarray]:
        """One mask per (row, col) point prompt, aligned with the input."""
        ...

    def masks_from_boxes(
        self, image: np.ndarray, boxes: list[tuple[float, float, float, float]]
    ) -> list[np.ndarray]:
        """One mask per (x0, y0, x1, y1) box prompt, aligned with the input."""
        ...

    def detect_boxes(
        self, image: np.ndarray, prompt: str
    ) -> list[tuple[float, float, float, float, float]]:
        """Text-prompted detection: (x0, y0, x1, y1, score) per hit."""
        ...

    def prototype_mask(self, image: np.ndarray, variant: str) -> np.ndarray:
        """Whole-image foreground mask; variant picks the weight set."""
        ...


def unsupported(backend_name: str, capability: str) -> AdapterError:
    return AdapterError(f"backend {backend_name!r} does not provide {capability}")
