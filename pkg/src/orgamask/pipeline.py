"""Batch evaluation driver and report emission.

Runs every (set, image, method) cell of a manifest, producing one
EvaluationRecord per cell, then writes a report bundle:

  records.csv              per-record metrics
  mean_iou.csv             mean IOU per (set, method)
  agreement_<metric>.csv   agreement curves, overall and per set
  summary.json             configs, version, counts, failures

Reports are byte-identical across runs on identical inputs: rows are
fully sorted, floats use 9 significant digits, and nothing time- or
host-dependent is written.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .evaluation import (
    AbstentionPolicy,
    AgreementCurve,
    CurveKind,
    EvaluationRecord,
    abstained_record,
    agreement_curve,
    default_grid,
    evaluate_image,
    mean_iou,
)
from .formats import load_candidate_set, load_mask
from .fusion import CandidateSet, composite_fuse, hybrid_select
from .manifest import (
    SECOND_ANNOTATOR_METHOD_ID,
    ImageSpec,
    Manifest,
    MethodKind,
    MethodSpec,
)
from .masks import BinaryMask

__all__ = [
    "PipelineFailure",
    "ReportBundle",
    "run_pipeline",
    "write_reports",
    "read_records_csv",
    "format_float",
    "RECORD_COLUMNS",
]

RECORD_COLUMNS = (
    "set_id",
    "image_id",
    "method_id",
    "abstained",
    "iou",
    "relative_area",
    "ecc_pred",
    "ecc_truth",
    "ecc_diff",
    "sol_pred",
    "sol_truth",
    "sol_diff",
)

_CURVE_FILES = {
    CurveKind.IOU: "agreement_iou.csv",
    CurveKind.RELATIVE_AREA: "agreement_relative_area.csv",
    CurveKind.ECCENTRICITY: "agreement_eccentricity.csv",
    CurveKind.SOLIDITY: "agreement_solidity.csv",
}


def format_float(value: float) -> str:
    """Fixed report formatting: 9 significant digits."""
    return "%.9g" % value


@dataclass(frozen=True)
class PipelineFailure:
    """A cell that could not be evaluated (bad file, dim mismatch, ...)."""

    set_id: str
    image_id: str
    method_id: str | None
    message: str


@dataclass
class ReportBundle:
    records: list[EvaluationRecord]
    failures: list[PipelineFailure] = field(default_factory=list)
    output_dir: Path | None = None
    paths: dict[str, Path] = field(default_factory=dict)

    @property
    def abstention_count(self) -> int:
        return sum(1 for r in self.records if r.abstained)


def _predict(method: MethodSpec, manifest: Manifest) -> BinaryMask | None:
    """Produce the method's prediction; None means it abstained."""
    if method.kind is MethodKind.FINAL_MASK:
        assert method.mask is not None
        return load_mask(method.mask)
    if method.kind is MethodKind.PROTOTYPE_PLUS_CANDIDATES:
        assert method.prototype is not None and method.candidates is not None
        prototype = load_mask(method.prototype)
        candidates = load_candidate_set(method.candidates)
        return composite_fuse(prototype, candidates, manifest.fusion).fused
    assert method.prototype is not None
    prototype = load_mask(method.prototype)
    finalists = CandidateSet(
        dims=prototype.dims,
        candidates=tuple(
            (f.finalist_id, load_mask(f.path)) for f in method.finalists
        ),
    )
    result = hybrid_select(prototype, finalists, manifest.hybrid)
    return None if result.abstained else result.mask


def run_pipeline(manifest: Manifest, strict: bool = False) -> ReportBundle:
    """Evaluate every cell of the manifest.

    With strict=False a failing cell is recorded and skipped; with
    strict=True the first failure raises.
    """
    records: list[EvaluationRecord] = []
    failures: list[PipelineFailure] = []

    def run_image(set_id: str, image: ImageSpec) -> None:
        try:
            truth = load_mask(image.ground_truth)
            if truth.is_empty:
                raise ValueError(f"ground truth is empty: {image.ground_truth}")
        except (ValueError, OSError) as exc:
            if strict:
                raise
            failures.append(PipelineFailure(set_id, image.image_id, None, str(exc)))
            return
        cells: list[tuple[str, MethodSpec | None]] = [
            (m.method_id, m) for m in image.methods
        ]
        if image.second_annotator is not None:
            cells.append((SECOND_ANNOTATOR_METHOD_ID, None))
        for method_id, method in cells:
            try:
                if method is None:
                    assert image.second_annotator is not None
                    prediction = load_mask(image.second_annotator)
                else:
                    prediction = _predict(method, manifest)
                if prediction is None:
                    records.append(
                        abstained_record(
                            image_id=image.image_id,
                            set_id=set_id,
                            method_id=method_id,
                        )
                    )
                else:
                    records.append(
                        evaluate_image(
                            prediction,
                            truth,
                            image_id=image.image_id,
                            set_id=set_id,
                            method_id=method_id,
                        )
                    )
            except (ValueError, OSError) as exc:
                if strict:
                    raise
                failures.append(
                    PipelineFailure(set_id, image.image_id, method_id, str(exc))
                )

    for set_spec in manifest.sets:
        for image in set_spec.images:
            run_image(set_spec.set_id, image)
    return ReportBundle(records=records, failures=failures)


def _record_row(r: EvaluationRecord) -> list[str]:
    def cell(value: float | None) -> str:
        return "" if value is None else format_float(value)

    return [
        r.set_id,
        r.image_id,
        r.method_id,
        "true" if r.abstained else "false",
        cell(r.iou),
        cell(r.relative_area),
        cell(r.ecc_pred),
        cell(r.ecc_truth),
        cell(r.ecc_diff),
        cell(r.sol_pred),
        cell(r.sol_truth),
        cell(r.sol_diff),
    ]


def write_records_csv(records: list[EvaluationRecord], path: Path) -> None:
    ordered = sorted(records, key=lambda r: (r.set_id, r.image_id, r.method_id))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for r in ordered:
            writer.writerow(_record_row(r))


def read_records_csv(path: str | Path) -> list[EvaluationRecord]:
    """Re-ingest a records.csv written by write_records_csv."""
    path = Path(path)
    records: list[EvaluationRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RECORD_COLUMNS:
            raise ValueError(
                f"{path}: expected columns {','.join(RECORD_COLUMNS)}, "
                f"got {reader.fieldnames}"
            )
        for line, row in enumerate(reader, start=2):
            abstained_text = row["abstained"]
            if abstained_text not in ("true", "false"):
                raise ValueError(
                    f"{path}:{line}: abstained must be 'true' or 'false', "
                    f"got {abstained_text!r}"
                )
            abstained = abstained_text == "true"

            def num(key: str) -> float | None:
                text = row[key]
                if text == "":
                    return None
                try:
                    return float(text)
                except ValueError:
                    raise ValueError(f"{path}:{line}: bad number in {key}: {text!r}")

            records.append(
                EvaluationRecord(
                    image_id=row["image_id"],
                    set_id=row["set_id"],
                    method_id=row["method_id"],
                    iou=num("iou"),
                    relative_area=num("relative_area"),
                    ecc_pred=num("ecc_pred"),
                    ecc_truth=num("ecc_truth"),
                    ecc_diff=num("ecc_diff"),
                    sol_pred=num("sol_pred"),
                    sol_truth=num("sol_truth"),
                    sol_diff=num("sol_diff"),
                    abstained=abstained,
                )
            )
    return records


def write_mean_iou_csv(
    records: list[EvaluationRecord], path: Path, policy: AbstentionPolicy
) -> None:
    table = mean_iou(records, policy=policy)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["set_id", "method_id", "mean_iou", "count"])
        for row in table.rows:
            writer.writerow(
                [row.set_id, row.method_id, format_float(row.mean_iou), str(row.count)]
            )


def _curves_for_kind(
    records: list[EvaluationRecord], kind: CurveKind, policy: AbstentionPolicy
) -> list[tuple[str, str, AgreementCurve]]:
    """(scope, method_id, curve) rows; scope 'all' plus one per set."""
    grid = default_grid(kind)
    method_ids = sorted({r.method_id for r in records})
    set_ids = sorted({r.set_id for r in records})
    scopes: list[tuple[str, list[EvaluationRecord]]] = [("all", records)]
    scopes += [(s, [r for r in records if r.set_id == s]) for s in set_ids]
    out: list[tuple[str, str, AgreementCurve]] = []
    for scope, scoped in scopes:
        for method_id in method_ids:
            subset = [r for r in scoped if r.method_id == method_id]
            if not subset:
                continue
            try:
                curve = agreement_curve(subset, kind, grid, policy=policy)
            except ValueError:
                # Every record excluded (all abstained under EXCLUDE).
                continue
            out.append((scope, method_id, curve))
    return out


def write_agreement_csv(
    records: list[EvaluationRecord],
    kind: CurveKind,
    path: Path,
    policy: AbstentionPolicy,
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["scope", "method_id", "threshold", "fraction"])
        for scope, method_id, curve in _curves_for_kind(records, kind, policy):
            for t, frac in zip(curve.thresholds, curve.fractions):
                writer.writerow([scope, method_id, format_float(t), format_float(frac)])


def write_reports(
    bundle: ReportBundle, manifest: Manifest, output_dir: str | Path
) -> ReportBundle:
    """Write the full report bundle into output_dir (created if needed)."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    policy = manifest.abstention_policy
    records = bundle.records

    paths: dict[str, Path] = {}
    paths["records"] = output_dir / "records.csv"
    write_records_csv(records, paths["records"])
    paths["mean_iou"] = output_dir / "mean_iou.csv"
    write_mean_iou_csv(records, paths["mean_iou"], policy)
    for kind, name in _CURVE_FILES.items():
        paths[f"agreement_{kind.value}"] = output_dir / name
        write_agreement_csv(records, kind, paths[f"agreement_{kind.value}"], policy)

    abstentions = sorted(
        (r.set_id, r.image_id, r.method_id) for r in records if r.abstained
    )
    summary = {
        "version": __version__,
        "fusion": {
            "overlap_threshold": manifest.fusion.overlap_threshold,
            "mode": manifest.fusion.mode.value,
        },
        "hybrid": {"abstention_threshold": manifest.hybrid.abstention_threshold},
        "abstention_policy": policy.value,
        "counts": {
            "sets": len(manifest.sets),
            "images": sum(len(s.images) for s in manifest.sets),
            "records": len(records),
            "abstained": len(abstentions),
            "failures": len(bundle.failures),
        },
        "abstentions": [
            {"set_id": s, "image_id": i, "method_id": m} for s, i, m in abstentions
        ],
        "failures": [
            {
                "set_id": f.set_id,
                "image_id": f.image_id,
                "method_id": f.method_id,
                "message": f.message,
            }
            for f in sorted(
                bundle.failures,
                key=lambda f: (f.set_id, f.image_id, f.method_id or ""),
            )
        ],
        "outputs": {key: p.name for key, p in sorted(paths.items())},
    }
    paths["summary"] = output_dir / "summary.json"
    with open(paths["summary"], "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    bundle.output_dir = output_dir
    bundle.paths = paths
    return bundle
