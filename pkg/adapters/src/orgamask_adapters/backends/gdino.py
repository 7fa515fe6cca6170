"""Grounding DINO backend: text-prompted box detection."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .base import AdapterError, unsupported


class GroundingDinoBackend:
    name = "gdino"

    def __init__(
        self,
        checkpoint: str | None = None,
        config: str | None = None,
        box_threshold: float = 0.35,
        text_threshold: float = 0.25,
        seed: int = 0,
    ):
        if checkpoint is None or config is None:
            raise AdapterError(
                "the gdino backend needs --checkpoint and --model-config "
                "pointing at Grounding DINO weights and config files"
            )
        for label, path in (("checkpoint", checkpoint), ("config", config)):
            if not Path(path).is_file():
                raise AdapterError(f"Grounding DINO {label} not found: {path}")
        try:
            import torch
            from groundingdino.util.inference import load_model, predict
        except ImportError as exc:
            raise AdapterError(
                "the gdino backend needs the 'torch' and 'groundingdino' "
                f"packages installed ({exc})"
            ) from exc
        torch.manual_seed(seed)
        self._model = load_model(config, checkpoint)
        self._predict = predict
        self._box_threshold = box_threshold
        self._text_threshold = text_threshold

    def detect_boxes(
        self, image: np.ndarray, prompt: str
    ) -> list[tuple[float, float, float, float, float]]:
        import torch

        height, width = image.shape
        rgb = np.repeat(image[..., None], 3, axis=2).astype(np.float32) / 255.0
        tensor = torch.from_numpy(rgb).permute(2, 0, 1)
        boxes, logits, _ = self._predict(
            model=self._model,
            image=tensor,
            caption=prompt,
            box_threshold=self._box_threshold,
            text_threshold=self._text_threshold,
        )
        detections = []
        for (cx, cy, w, h), score in zip(boxes.tolist(), logits.tolist()):
            # boxes arrive center-normalized; convert to pixel corners
            x0 = max(0.0, (cx - w / 2) * width)
            y0 = max(0.0, (cy - h / 2) * height)
            x1 = min(float(width), (cx + w / 2) * width)
            y1 = min(float(height), (cy + h / 2) * height)
            detections.append((x0, y0, x1, y1, float(score)))
        detections.sort(key=lambda d: (-d[4], d[0], d[1]))
        return detections

    def propose_masks(self, image):
        raise unsupported(self.name, "mask proposals")

    def masks_from_points(self, image, points):
        raise unsupported(self.name, "point-prompted masks")

    def masks_from_boxes(self, image, boxes):
        raise unsupported(self.name, "box-prompted masks")

    def prototype_mask(self, image, variant):
        raise unsupported(self.name, "whole-image prototype masks")
