"""Command-line interface.

Subcommands operate on the exchange formats (mask images, RLE JSON,
candidate stacks, points, manifests) and call straight into the library.
Exit status is nonzero only for input errors; an abstention from
``hybrid`` is a valid outcome and exits 0.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .evaluation import AbstentionPolicy, CurveKind, default_grid
from .formats import (
    load_candidate_set,
    load_mask,
    save_mask,
    save_points,
    validate_boxes_file,
    validate_mask_file,
    validate_stack_file,
)
from .fusion import (
    CandidateSet,
    FusionConfig,
    HybridConfig,
    centroid_prompts,
    composite_fuse,
    hybrid_select,
)
from .manifest import ManifestError, load_manifest
from .masks import OverlapMode, connected_components
from .morphometry import per_component_metrics, region_metrics
from .pipeline import read_records_csv, run_pipeline, write_reports

_METRIC_ALIASES = {
    "iou": CurveKind.IOU,
    "area": CurveKind.RELATIVE_AREA,
    "relative_area": CurveKind.RELATIVE_AREA,
    "ecc": CurveKind.ECCENTRICITY,
    "eccentricity": CurveKind.ECCENTRICITY,
    "sol": CurveKind.SOLIDITY,
    "solidity": CurveKind.SOLIDITY,
}


def _fail(message: str) -> None:
    raise click.ClickException(message)


def _write_json(doc: object, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def parse_grid(spec: str) -> tuple[float, ...]:
    """Parse a threshold-grid spec.

    Forms: "start:stop:count" (even spacing, endpoints included),
    "geom:start:stop:count" (geometric spacing), or a comma list of
    explicit values.
    """
    spec = spec.strip()
    if not spec:
        raise ValueError("empty grid spec")
    if "," in spec:
        return tuple(float(part) for part in spec.split(","))
    parts = spec.split(":")
    geometric = False
    if parts[0] == "geom":
        geometric = True
        parts = parts[1:]
    if len(parts) != 3:
        raise ValueError(
            f"grid spec must be 'start:stop:count', 'geom:start:stop:count', "
            f"or a comma list, got {spec!r}"
        )
    start, stop = float(parts[0]), float(parts[1])
    count = int(parts[2])
    if count < 1:
        raise ValueError(f"grid count must be >= 1, got {count}")
    if count == 1:
        return (start,)
    if geometric:
        if start <= 0 or stop <= 0:
            raise ValueError("geometric grids need positive endpoints")
        ratio = (stop / start) ** (1.0 / (count - 1))
        return tuple(start * ratio**i for i in range(count))
    step = (stop - start) / (count - 1)
    return tuple(start + step * i for i in range(count))


@click.group()
@click.version_option(version=__version__, prog_name="orgamask")
def main() -> None:
    """Binary-mask fusion, morphometry, and batch evaluation."""


@main.command()
@click.option("--prototype", "prototype_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Prototype mask (image or RLE JSON).")
@click.option("--candidates", "candidates_path", required=True,
              type=click.Path(exists=True, path_type=Path),
              help="Candidate stack JSON or a directory of mask files.")
@click.option("--threshold", type=float, default=0.5, show_default=True,
              help="Overlap acceptance threshold (strict).")
@click.option("--mode", type=click.Choice([m.value for m in OverlapMode]),
              default=OverlapMode.CANDIDATE_FRACTION.value, show_default=True,
              help="Overlap measure used against the prototype.")
@click.option("-o", "--output", "output_path", type=click.Path(path_type=Path),
              default=None, help="Fused mask destination (image or RLE JSON).")
@click.option("--report", "report_path", type=click.Path(path_type=Path),
              default=None, help="Optional JSON report of per-candidate overlaps.")
@click.option("--validate-only", is_flag=True,
              help="Check the inputs and print a summary without fusing.")
def fuse(
    prototype_path: Path,
    candidates_path: Path,
    threshold: float,
    mode: str,
    output_path: Path | None,
    report_path: Path | None,
    validate_only: bool,
) -> None:
    """Fuse candidates that sufficiently overlap a prototype mask."""
    try:
        config = FusionConfig(overlap_threshold=threshold, mode=OverlapMode(mode))
        prototype = load_mask(prototype_path)
        candidates = load_candidate_set(candidates_path)
        if prototype.dims != candidates.dims:
            _fail(
                f"prototype is {prototype.width}x{prototype.height}, candidates "
                f"are {candidates.dims[0]}x{candidates.dims[1]}"
            )
        if validate_only:
            click.echo(
                f"ok: prototype {prototype.width}x{prototype.height}, "
                f"{len(candidates)} candidates"
            )
            return
        if output_path is None:
            _fail("missing -o/--output (or pass --validate-only)")
        result = composite_fuse(prototype, candidates, config)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    save_mask(result.fused, output_path)
    click.echo(
        f"accepted {len(result.accepted_ids)}/{len(candidates)} candidates "
        f"-> {output_path}"
    )
    if report_path is not None:
        _write_json(
            {
                "threshold": threshold,
                "mode": mode,
                "accepted_ids": list(result.accepted_ids),
                "per_candidate_overlap": [
                    {"id": cid, "overlap": score, "accepted": cid in result.accepted_ids}
                    for cid, score in result.per_candidate_overlap
                ],
            },
            report_path,
        )


@main.command()
@click.option("--prototype", "prototype_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Prototype mask the finalists are matched against.")
@click.option("--finalist", "finalist_specs", multiple=True, required=True,
              metavar="ID=PATH", help="Finalist mask, repeatable.")
@click.option("--abstain-iou", type=float, default=0.5, show_default=True,
              help="Abstain when the best IOU falls below this (inclusive selects).")
@click.option("-o", "--output", "output_path", required=True,
              type=click.Path(path_type=Path),
              help="Selected mask destination; not written on abstention.")
@click.option("--report", "report_path", type=click.Path(path_type=Path),
              default=None, help="Optional JSON report of the arbitration.")
def hybrid(
    prototype_path: Path,
    finalist_specs: tuple[str, ...],
    abstain_iou: float,
    output_path: Path,
    report_path: Path | None,
) -> None:
    """Pick the finalist closest to the prototype, or abstain."""
    entries = []
    for spec in finalist_specs:
        fid, sep, fpath = spec.partition("=")
        if not sep or not fid or not fpath:
            _fail(f"--finalist must be ID=PATH, got {spec!r}")
        entries.append((fid, Path(fpath)))
    try:
        config = HybridConfig(abstention_threshold=abstain_iou)
        prototype = load_mask(prototype_path)
        masks = [(fid, load_mask(fpath)) for fid, fpath in entries]
        finalists = CandidateSet(dims=prototype.dims, candidates=tuple(masks))
        result = hybrid_select(prototype, finalists, config)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if result.abstained:
        click.echo(
            f"abstained: best finalist {result.finalist_id!r} has IOU "
            f"{result.iou_with_prototype:.6g} < {abstain_iou:.6g}"
        )
    else:
        save_mask(result.mask, output_path)
        click.echo(
            f"selected {result.finalist_id!r} (IOU {result.iou_with_prototype:.6g}) "
            f"-> {output_path}"
        )
    if report_path is not None:
        _write_json(
            {
                "abstained": result.abstained,
                "finalist_id": result.finalist_id,
                "iou_with_prototype": result.iou_with_prototype,
                "abstention_threshold": abstain_iou,
                "per_finalist_iou": [
                    {"id": fid, "iou": score}
                    for fid, score in result.per_finalist_iou
                ],
            },
            report_path,
        )


@main.command()
@click.option("--mask", "mask_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-o", "--output", "output_path", required=True,
              type=click.Path(path_type=Path), help="Points JSON destination.")
def centroids(mask_path: Path, output_path: Path) -> None:
    """Write one centroid point per connected component."""
    try:
        mask = load_mask(mask_path)
        points = centroid_prompts(mask)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    save_points(points, output_path)
    click.echo(f"{len(points)} centroids -> {output_path}")


def _metrics_doc(metrics) -> dict:
    return {
        "area": metrics.area,
        "centroid": {"row": metrics.centroid[0], "col": metrics.centroid[1]},
        "eccentricity": metrics.eccentricity,
        "solidity": metrics.solidity,
        "bbox": list(metrics.bbox),
    }


@main.command()
@click.option("--mask", "mask_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--per-component", is_flag=True,
              help="Report each 8-connected component separately.")
@click.option("-o", "--output", "output_path", type=click.Path(path_type=Path),
              default=None, help="Metrics JSON destination (stdout if omitted).")
def metrics(mask_path: Path, per_component: bool, output_path: Path | None) -> None:
    """Morphometrics of a mask: area, centroid, eccentricity, solidity."""
    try:
        mask = load_mask(mask_path)
        if per_component:
            labeled = connected_components(mask)
            doc = {
                "components": [
                    {"label": label, **_metrics_doc(m)}
                    for label, m in per_component_metrics(labeled)
                ]
            }
        else:
            if mask.is_empty:
                _fail(f"{mask_path}: mask is empty; no region to measure")
            doc = _metrics_doc(region_metrics(mask))
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if output_path is None:
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    else:
        _write_json(doc, output_path)
        click.echo(f"metrics -> {output_path}")


@main.command()
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-o", "--output", "output_path", type=click.Path(path_type=Path),
              default=None,
              help="Report directory (defaults to the manifest's output_dir).")
@click.option("--strict", is_flag=True,
              help="Abort on the first failing image instead of recording it.")
def evaluate(manifest_path: Path, output_path: Path | None, strict: bool) -> None:
    """Run a manifest end to end and write the report bundle."""
    try:
        manifest = load_manifest(manifest_path)
    except (ManifestError, FileNotFoundError) as exc:
        _fail(str(exc))
    out_dir = output_path or manifest.output_dir
    if out_dir is None:
        _fail("no output directory: pass -o or set output_dir in the manifest")
    try:
        bundle = run_pipeline(manifest, strict=strict)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    write_reports(bundle, manifest, out_dir)
    click.echo(
        f"{len(bundle.records)} records, {bundle.abstention_count} abstentions, "
        f"{len(bundle.failures)} failures -> {out_dir}"
    )
    for failure in bundle.failures:
        target = failure.method_id or "(ground truth)"
        click.echo(
            f"failure: set {failure.set_id!r} image {failure.image_id!r} "
            f"{target}: {failure.message}",
            err=True,
        )
    if bundle.failures:
        sys.exit(1)


@main.command()
@click.option("--records", "records_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="records.csv written by `evaluate`.")
@click.option("--metric", required=True,
              type=click.Choice(sorted(_METRIC_ALIASES)),
              help="Which agreement curve to compute.")
@click.option("--grid", "grid_spec", default=None,
              help="start:stop:count, geom:start:stop:count, or comma list "
                   "(default: the metric's standard grid).")
@click.option("--method", "method_id", default=None,
              help="Method to aggregate (required when the file has several).")
@click.option("--compare-to", "reference_id", default=None,
              help="Also aggregate this method and emit paired curves.")
@click.option("--policy", type=click.Choice([p.value for p in AbstentionPolicy]),
              default=AbstentionPolicy.EXCLUDE.value, show_default=True,
              help="How abstentions enter the curve.")
@click.option("-o", "--output", "output_path", required=True,
              type=click.Path(path_type=Path), help="Curve CSV destination.")
def agreement(
    records_path: Path,
    metric: str,
    grid_spec: str | None,
    method_id: str | None,
    reference_id: str | None,
    policy: str,
    output_path: Path,
) -> None:
    """Aggregate records into an agreement curve CSV."""
    import csv as _csv

    from .evaluation import agreement_curve, iov_compare

    kind = _METRIC_ALIASES[metric]
    try:
        records = read_records_csv(records_path)
        grid = parse_grid(grid_spec) if grid_spec else default_grid(kind)
        methods = sorted({r.method_id for r in records})
        if method_id is None:
            non_reference = [m for m in methods if m != reference_id]
            if len(non_reference) != 1:
                _fail(
                    f"--method is required; the records cover {methods}"
                )
            method_id = non_reference[0]
        subset = [r for r in records if r.method_id == method_id]
        if not subset:
            _fail(f"no records for method {method_id!r} (file has {methods})")
        if reference_id is not None:
            reference = [r for r in records if r.method_id == reference_id]
            if not reference:
                _fail(f"no records for method {reference_id!r} (file has {methods})")
            paired = iov_compare(
                subset, reference, kind, grid, policy=AbstentionPolicy(policy)
            )
        else:
            curve = agreement_curve(
                subset, kind, grid, policy=AbstentionPolicy(policy)
            )
    except (ValueError, OSError) as exc:
        _fail(str(exc))

    from .pipeline import format_float

    with open(output_path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        if reference_id is not None:
            writer.writerow(
                ["metric", "method_id", "reference_id", "threshold",
                 "fraction_method", "fraction_reference", "difference"]
            )
            rows = zip(
                paired.thresholds,
                paired.fraction_method,
                paired.fraction_reference,
                paired.difference,
            )
            for t, fm, fr, diff in rows:
                writer.writerow(
                    [kind.value, method_id, reference_id, format_float(t),
                     format_float(fm), format_float(fr), format_float(diff)]
                )
        else:
            writer.writerow(["metric", "method_id", "threshold", "fraction"])
            for t, frac in zip(curve.thresholds, curve.fractions):
                writer.writerow(
                    [kind.value, method_id, format_float(t), format_float(frac)]
                )
    click.echo(f"{len(grid)} grid points -> {output_path}")


def _detect_kind(path: Path) -> str:
    if path.suffix.lower() != ".json":
        return "mask"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return "mask"  # the mask validator reports the parse error
    if isinstance(doc, dict):
        if "sets" in doc:
            return "manifest"
        if "candidates" in doc:
            return "stack"
        if "boxes" in doc:
            return "boxes"
        return "mask"
    if isinstance(doc, list) and doc and isinstance(doc[0], dict) and "x0" in doc[0]:
        return "boxes"
    return "boxes" if isinstance(doc, list) else "mask"


@main.command()
@click.argument("paths", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--kind", type=click.Choice(["auto", "mask", "stack", "boxes", "manifest"]),
              default="auto", show_default=True,
              help="Force the format instead of detecting it per file.")
def validate(paths: tuple[Path, ...], kind: str) -> None:
    """Check exchange files; exit nonzero if any file is invalid."""
    total_errors = 0
    for path in paths:
        file_kind = _detect_kind(path) if kind == "auto" else kind
        if file_kind == "manifest":
            try:
                load_manifest(path)
                errors: list[str] = []
            except ManifestError as exc:
                errors = exc.errors
        elif file_kind == "stack":
            errors = validate_stack_file(path)
        elif file_kind == "boxes":
            errors = validate_boxes_file(path)
        else:
            errors = validate_mask_file(path)
        if errors:
            total_errors += len(errors)
            click.echo(f"INVALID {file_kind} {path}")
            for e in errors:
                click.echo(f"  - {e}")
        else:
            click.echo(f"ok {file_kind} {path}")
    if total_errors:
        click.echo(f"{total_errors} error(s)", err=True)
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service wrapping the same operations."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
