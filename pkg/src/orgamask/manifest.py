"""Declarative batch-evaluation manifests.

A manifest JSON names image sets, per-image ground truth (and optional
second-annotator masks), and the methods to evaluate. Methods come in
three kinds: a ready final mask, a prototype plus candidate stack to
fuse, or a hybrid bundle of finalist masks to arbitrate.

Validation is strict and runs at load time: every referenced file must
exist, ids must be unique, and all images within a set must list the
same method ids. Errors are collected and reported together, naming the
offending id or path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from .evaluation import AbstentionPolicy
from .fusion import FusionConfig, HybridConfig
from .masks import OverlapMode

__all__ = [
    "MethodKind",
    "FinalistSpec",
    "MethodSpec",
    "ImageSpec",
    "SetSpec",
    "Manifest",
    "ManifestError",
    "load_manifest",
    "SECOND_ANNOTATOR_METHOD_ID",
]

# Method id reserved for the second human annotation evaluated alongside
# the declared methods.
SECOND_ANNOTATOR_METHOD_ID = "second_annotator"


class MethodKind(str, Enum):
    FINAL_MASK = "final_mask"
    PROTOTYPE_PLUS_CANDIDATES = "prototype_plus_candidates"
    HYBRID_BUNDLE = "hybrid_bundle"


class ManifestError(ValueError):
    """Aggregated manifest validation failure."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__(
            "manifest validation failed:\n" + "\n".join(f"  - {e}" for e in self.errors)
        )


@dataclass(frozen=True)
class FinalistSpec:
    finalist_id: str
    path: Path


@dataclass(frozen=True)
class MethodSpec:
    method_id: str
    kind: MethodKind
    mask: Path | None = None
    prototype: Path | None = None
    candidates: Path | None = None
    finalists: tuple[FinalistSpec, ...] = ()


@dataclass(frozen=True)
class ImageSpec:
    image_id: str
    ground_truth: Path
    methods: tuple[MethodSpec, ...]
    second_annotator: Path | None = None


@dataclass(frozen=True)
class SetSpec:
    set_id: str
    images: tuple[ImageSpec, ...]


@dataclass(frozen=True)
class Manifest:
    sets: tuple[SetSpec, ...]
    fusion: FusionConfig = field(default_factory=FusionConfig)
    hybrid: HybridConfig = field(default_factory=HybridConfig)
    abstention_policy: AbstentionPolicy = AbstentionPolicy.EXCLUDE
    output_dir: Path | None = None


def _parse_method(
    entry: Any, base: Path, where: str, errors: list[str]
) -> MethodSpec | None:
    if not isinstance(entry, dict):
        errors.append(f"{where}: method entry must be an object")
        return None
    method_id = entry.get("method_id")
    if not method_id or not isinstance(method_id, str):
        errors.append(f"{where}: method entry lacks a 'method_id'")
        return None
    where = f"{where}, method {method_id!r}"
    if method_id == SECOND_ANNOTATOR_METHOD_ID:
        errors.append(
            f"{where}: method id {SECOND_ANNOTATOR_METHOD_ID!r} is reserved "
            f"for the second-annotator baseline"
        )
        return None
    try:
        kind = MethodKind(entry.get("kind"))
    except ValueError:
        valid = ", ".join(k.value for k in MethodKind)
        errors.append(f"{where}: unknown kind {entry.get('kind')!r} (expected one of {valid})")
        return None

    def path_of(key: str) -> Path | None:
        value = entry.get(key)
        if not value or not isinstance(value, str):
            errors.append(f"{where}: kind {kind.value!r} requires a {key!r} path")
            return None
        resolved = base / value
        if not resolved.is_file():
            errors.append(f"{where}: {key} file not found: {resolved}")
        return resolved

    if kind is MethodKind.FINAL_MASK:
        mask = path_of("mask")
        return MethodSpec(method_id=method_id, kind=kind, mask=mask)
    if kind is MethodKind.PROTOTYPE_PLUS_CANDIDATES:
        prototype = path_of("prototype")
        candidates = entry.get("candidates")
        if not candidates or not isinstance(candidates, str):
            errors.append(f"{where}: kind {kind.value!r} requires a 'candidates' path")
            resolved_candidates = None
        else:
            resolved_candidates = base / candidates
            if not (resolved_candidates.is_file() or resolved_candidates.is_dir()):
                errors.append(f"{where}: candidates path not found: {resolved_candidates}")
        return MethodSpec(
            method_id=method_id, kind=kind,
            prototype=prototype, candidates=resolved_candidates,
        )
    prototype = path_of("prototype")
    raw_finalists = entry.get("finalists")
    finalists: list[FinalistSpec] = []
    if not isinstance(raw_finalists, list) or not raw_finalists:
        errors.append(f"{where}: kind {kind.value!r} requires a nonempty 'finalists' list")
    else:
        seen: set[str] = set()
        for i, fin in enumerate(raw_finalists):
            if not isinstance(fin, dict) or "id" not in fin or "mask" not in fin:
                errors.append(f"{where}: finalist #{i} must be an object with 'id' and 'mask'")
                continue
            fid = str(fin["id"])
            if fid in seen:
                errors.append(f"{where}: duplicate finalist id {fid!r}")
                continue
            seen.add(fid)
            fpath = base / str(fin["mask"])
            if not fpath.is_file():
                errors.append(f"{where}: finalist {fid!r} mask not found: {fpath}")
            finalists.append(FinalistSpec(finalist_id=fid, path=fpath))
    return MethodSpec(
        method_id=method_id, kind=kind,
        prototype=prototype, finalists=tuple(finalists),
    )


def _parse_image(
    entry: Any, base: Path, where: str, errors: list[str]
) -> ImageSpec | None:
    if not isinstance(entry, dict):
        errors.append(f"{where}: image entry must be an object")
        return None
    image_id = entry.get("image_id")
    if not image_id or not isinstance(image_id, str):
        errors.append(f"{where}: image entry lacks an 'image_id'")
        return None
    where = f"{where}, image {image_id!r}"
    gt = entry.get("ground_truth")
    gt_path = None
    if not gt or not isinstance(gt, str):
        errors.append(f"{where}: missing 'ground_truth' path")
    else:
        gt_path = base / gt
        if not gt_path.is_file():
            errors.append(f"{where}: ground truth not found: {gt_path}")
    annot = entry.get("second_annotator")
    annot_path = None
    if annot is not None:
        annot_path = base / str(annot)
        if not annot_path.is_file():
            errors.append(f"{where}: second annotator mask not found: {annot_path}")
    methods: list[MethodSpec] = []
    method_ids: set[str] = set()
    raw_methods = entry.get("methods")
    if not isinstance(raw_methods, list) or not raw_methods:
        errors.append(f"{where}: requires a nonempty 'methods' list")
    else:
        for m in raw_methods:
            spec = _parse_method(m, base, where, errors)
            if spec is None:
                continue
            if spec.method_id in method_ids:
                errors.append(f"{where}: duplicate method id {spec.method_id!r}")
                continue
            method_ids.add(spec.method_id)
            methods.append(spec)
    if gt_path is None:
        return None
    return ImageSpec(
        image_id=image_id,
        ground_truth=gt_path,
        methods=tuple(methods),
        second_annotator=annot_path,
    )


def parse_manifest(doc: Any, base: Path) -> Manifest:
    """Build a validated Manifest from a parsed JSON document.

    Relative paths resolve against ``base``. Raises ManifestError listing
    every violation found.
    """
    errors: list[str] = []
    if not isinstance(doc, dict):
        raise ManifestError(["manifest must be a JSON object"])

    try:
        fusion_doc = doc.get("fusion", {}) or {}
        fusion = FusionConfig(
            overlap_threshold=float(fusion_doc.get("overlap_threshold", 0.5)),
            mode=OverlapMode(fusion_doc.get("mode", OverlapMode.CANDIDATE_FRACTION)),
        )
    except (TypeError, ValueError) as exc:
        errors.append(f"fusion config: {exc}")
        fusion = FusionConfig()
    try:
        hybrid_doc = doc.get("hybrid", {}) or {}
        hybrid = HybridConfig(
            abstention_threshold=float(hybrid_doc.get("abstention_threshold", 0.5))
        )
    except (TypeError, ValueError) as exc:
        errors.append(f"hybrid config: {exc}")
        hybrid = HybridConfig()
    try:
        policy = AbstentionPolicy(doc.get("abstention_policy", AbstentionPolicy.EXCLUDE))
    except ValueError as exc:
        errors.append(f"abstention_policy: {exc}")
        policy = AbstentionPolicy.EXCLUDE

    output_dir = doc.get("output_dir")
    output_path = base / output_dir if isinstance(output_dir, str) and output_dir else None

    sets: list[SetSpec] = []
    raw_sets = doc.get("sets")
    if not isinstance(raw_sets, list) or not raw_sets:
        errors.append("manifest requires a nonempty 'sets' list")
        raw_sets = []
    set_ids: set[str] = set()
    for s in raw_sets:
        if not isinstance(s, dict) or not isinstance(s.get("set_id"), str) or not s.get("set_id"):
            errors.append("set entry lacks a 'set_id'")
            continue
        set_id = s["set_id"]
        if set_id in set_ids:
            errors.append(f"duplicate set id {set_id!r}")
            continue
        set_ids.add(set_id)
        where = f"set {set_id!r}"
        images: list[ImageSpec] = []
        image_ids: set[str] = set()
        raw_images = s.get("images")
        if not isinstance(raw_images, list) or not raw_images:
            errors.append(f"{where}: requires a nonempty 'images' list")
            raw_images = []
        for img in raw_images:
            spec = _parse_image(img, base, where, errors)
            if spec is None:
                continue
            if spec.image_id in image_ids:
                errors.append(f"{where}: duplicate image id {spec.image_id!r}")
                continue
            image_ids.add(spec.image_id)
            images.append(spec)
        # Every image in a set must evaluate the same methods.
        if images:
            reference = sorted(m.method_id for m in images[0].methods)
            for img_spec in images[1:]:
                ids = sorted(m.method_id for m in img_spec.methods)
                if ids != reference:
                    errors.append(
                        f"{where}: image {img_spec.image_id!r} lists methods {ids}, "
                        f"but image {images[0].image_id!r} lists {reference}"
                    )
        sets.append(SetSpec(set_id=set_id, images=tuple(images)))

    if errors:
        raise ManifestError(errors)
    return Manifest(
        sets=tuple(sets),
        fusion=fusion,
        hybrid=hybrid,
        abstention_policy=policy,
        output_dir=output_path,
    )


def load_manifest(path: str | Path) -> Manifest:
    """Read and validate a manifest JSON file."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ManifestError([f"{path}: invalid JSON: {exc}"]) from exc
    return parse_manifest(doc, base=path.parent)
