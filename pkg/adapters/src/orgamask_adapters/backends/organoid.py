"""OrganoID backend: whole-image prototype masks from a trained U-Net.

The variant name ("trained" for domain-retrained weights, "untrained"
for the stock release) is only a tag carried into the export; the
actual weights file always comes from the caller.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .base import AdapterError, unsupported

VARIANTS = ("trained", "untrained")


class OrganoIDBackend:
    name = "organoid"

    def __init__(self, weights: str | None = None, threshold: float = 0.5, seed: int = 0):
        if weights is None:
            raise AdapterError(
                "the organoid backend needs --weights pointing at an "
                "OrganoID model file"
            )
        if not Path(weights).is_file():
            raise AdapterError(f"OrganoID weights not found: {weights}")
        try:
            import tensorflow as tf
        except ImportError as exc:
            raise AdapterError(
                f"the organoid backend needs the 'tensorflow' package installed ({exc})"
            ) from exc
        tf.random.set_seed(seed)
        self._model = tf.keras.models.load_model(weights, compile=False)
        self._threshold = float(threshold)

    def prototype_mask(self, image: np.ndarray, variant: str) -> np.ndarray:
        if variant not in VARIANTS:
            raise AdapterError(
                f"unknown weights variant {variant!r}; expected one of {VARIANTS}"
            )
        scaled = image.astype(np.float32) / 255.0
        batch = scaled[None, ..., None]
        prediction = np.asarray(self._model.predict(batch, verbose=0))[0, ..., 0]
        return prediction >= self._threshold

    def propose_masks(self, image):
        raise unsupported(self.name, "mask proposals")

    def masks_from_points(self, image, points):
        raise unsupported(self.name, "point-prompted masks")

    def masks_from_boxes(self, image, boxes):
        raise unsupported(self.name, "box-prompted masks")

    def detect_boxes(self, image, prompt):
        raise unsupported(self.name, "text-prompted detection")
