"""Segment Anything backend (automatic, point-prompted, box-prompted).

The framework import happens inside the constructor so the package
works without torch installed until someone actually selects this
backend.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .base import AdapterError, unsupported

_MODEL_TYPES = ("vit_h", "vit_l", "vit_b")


class SamBackend:
    name = "sam"

    def __init__(self, checkpoint: str | None = None, model_type: str = "vit_h", seed: int = 0):
        if checkpoint is None:
            raise AdapterError(
                "the sam backend needs --checkpoint pointing at a "
                "segment-anything weights file"
            )
        if not Path(checkpoint).is_file():
            raise AdapterError(f"SAM checkpoint not found: {checkpoint}")
        if model_type not in _MODEL_TYPES:
            raise AdapterError(
                f"unknown SAM model type {model_type!r}; expected one of {_MODEL_TYPES}"
            )
        try:
            import torch  # noqa: F401
            from segment_anything import (
                SamAutomaticMaskGenerator,
                SamPredictor,
                sam_model_registry,
            )
        except ImportError as exc:
            raise AdapterError(
                "the sam backend needs the 'torch' and 'segment_anything' "
                f"packages installed ({exc})"
            ) from exc
        torch.manual_seed(seed)
        model = sam_model_registry[model_type](checkpoint=checkpoint)
        self._generator = SamAutomaticMaskGenerator(model)
        self._predictor = SamPredictor(model)

    @staticmethod
    def _rgb(image: np.ndarray) -> np.ndarray:
        return np.repeat(image[..., None], 3, axis=2)

    def propose_masks(self, image: np.ndarray) -> list[np.ndarray]:
        proposals = self._generator.generate(self._rgb(image))
        # fixed ordering so exported ids are stable across runs
        proposals.sort(key=lambda p: (-p["area"], p["bbox"][1], p["bbox"][0]))
        return [np.asarray(p["segmentation"], dtype=bool) for p in proposals]

    def masks_from_points(
        self, image: np.ndarray, points: list[tuple[float, float]]
    ) -> list[np.ndarray]:
        self._predictor.set_image(self._rgb(image))
        masks = []
        for row, col in points:
            result, scores, _ = self._predictor.predict(
                point_coords=np.array([[col, row]], dtype=np.float32),
                point_labels=np.array([1]),
                multimask_output=False,
            )
            masks.append(np.asarray(result[int(scores.argmax())], dtype=bool))
        return masks

    def masks_from_boxes(
        self, image: np.ndarray, boxes: list[tuple[float, float, float, float]]
    ) -> list[np.ndarray]:
        self._predictor.set_image(self._rgb(image))
        masks = []
        for x0, y0, x1, y1 in boxes:
            result, scores, _ = self._predictor.predict(
                box=np.array([x0, y0, x1, y1], dtype=np.float32),
                multimask_output=False,
            )
            masks.append(np.asarray(result[int(scores.argmax())], dtype=bool))
        return masks

    def detect_boxes(self, image, prompt):
        raise unsupported(self.name, "text-prompted detection")

    def prototype_mask(self, image, variant):
        raise unsupported(self.name, "whole-image prototype masks")
