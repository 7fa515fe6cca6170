"""Command line for the export adapters.

Every command reads an image, runs one backend capability, and writes
an exchange file the orgamask CLI can validate and consume. The
default backend is the weight-free synthetic one; real model backends
take their weight paths via flags.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from . import __version__
from .backends import AdapterError, get_backend
from .exchange import write_boxes, write_mask, write_points, write_stack
from .exporters import (
    DEFAULT_TEXT_PROMPT,
    export_gdino_boxes,
    export_organoid_masks,
    export_sam_auto,
    export_sam_from_boxes,
    export_sam_from_points,
)

_BACKENDS = ("synthetic", "sam", "gdino", "organoid")


def _build_backend(name: str, seed: int, **options):
    filtered = {key: value for key, value in options.items() if value is not None}
    try:
        return get_backend(name, seed=seed, **filtered)
    except AdapterError as exc:
        raise click.ClickException(str(exc))
    except TypeError:
        raise click.ClickException(
            f"backend {name!r} does not accept these options: {sorted(filtered)}"
        )


def _run(action):
    try:
        return action()
    except AdapterError as exc:
        raise click.ClickException(str(exc))


@click.group()
@click.version_option(version=__version__, prog_name="orgamask-adapters")
def main() -> None:
    """Export model outputs as orgamask exchange files."""


backend_option = click.option(
    "--backend", type=click.Choice(_BACKENDS), default="synthetic", show_default=True
)
seed_option = click.option(
    "--seed", type=int, default=0, show_default=True,
    help="Seed forwarded to backends with stochastic stages.",
)
checkpoint_option = click.option(
    "--checkpoint", type=click.Path(), default=None,
    help="Model checkpoint path (real backends only).",
)


@main.command("sam-auto")
@click.argument("image", type=click.Path())
@click.option("-o", "--output", type=click.Path(), required=True)
@click.option("--image-id", default=None, help="Stack id; defaults to the image stem.")
@backend_option
@seed_option
@checkpoint_option
@click.option("--model-type", default="vit_h", show_default=True)
def sam_auto(image, output, image_id, backend, seed, checkpoint, model_type):
    """Segment everything in IMAGE; write all proposals as one stack."""
    options = {"checkpoint": checkpoint}
    if backend == "sam":
        options["model_type"] = model_type
    model = _build_backend(backend, seed, **options)
    stack = _run(lambda: export_sam_auto(image, model, image_id=image_id))
    write_stack(stack, output)
    click.echo(f"{len(stack.candidates)} candidates -> {output}")


@main.command("sam-points")
@click.argument("image", type=click.Path())
@click.option("--points", "points_path", type=click.Path(), required=True,
              help="JSON list of {row, col} prompts (e.g. orgamask centroids output).")
@click.option("-o", "--output", type=click.Path(), required=True)
@click.option("--image-id", default=None)
@backend_option
@seed_option
@checkpoint_option
def sam_points(image, points_path, output, image_id, backend, seed, checkpoint):
    """One mask per point prompt, each entry tagged with its prompt."""
    points = _run(lambda: _load_points(points_path))
    model = _build_backend(backend, seed, checkpoint=checkpoint)
    stack = _run(
        lambda: export_sam_from_points(image, points, model, image_id=image_id)
    )
    write_stack(stack, output)
    click.echo(f"{len(stack.candidates)} candidates -> {output}")


@main.command("sam-boxes")
@click.argument("image", type=click.Path())
@click.option("--boxes", "boxes_path", type=click.Path(), required=True,
              help="Boxes JSON (e.g. from the gdino command).")
@click.option("-o", "--output", type=click.Path(), required=True)
@click.option("--image-id", default=None)
@backend_option
@seed_option
@checkpoint_option
def sam_boxes(image, boxes_path, output, image_id, backend, seed, checkpoint):
    """One mask per box prompt, each entry tagged with its prompt."""
    boxes = _run(lambda: _load_boxes(boxes_path))
    model = _build_backend(backend, seed, checkpoint=checkpoint)
    stack = _run(
        lambda: export_sam_from_boxes(image, boxes, model, image_id=image_id)
    )
    write_stack(stack, output)
    click.echo(f"{len(stack.candidates)} candidates -> {output}")


@main.command()
@click.argument("image", type=click.Path())
@click.option("-o", "--output", type=click.Path(), required=True)
@click.option("--prompt", default=DEFAULT_TEXT_PROMPT, show_default=True,
              help="Text prompt describing the objects to detect.")
@backend_option
@seed_option
@checkpoint_option
@click.option("--model-config", type=click.Path(), default=None,
              help="Model config path (gdino backend).")
def gdino(image, output, prompt, backend, seed, checkpoint, model_config):
    """Text-prompted box detection; writes a boxes JSON file."""
    options = {"checkpoint": checkpoint}
    if backend == "gdino":
        options["config"] = model_config
    model = _build_backend(backend, seed, **options)
    boxes, dims = _run(lambda: export_gdino_boxes(image, model, prompt=prompt))
    write_boxes(boxes, dims, output, prompt=prompt)
    click.echo(f"{len(boxes)} boxes -> {output}")


@main.command()
@click.argument("image", type=click.Path())
@click.option("-o", "--output", type=click.Path(), required=True,
              help="Prototype mask output (RLE JSON).")
@click.option("--centroids", "centroids_path", type=click.Path(), default=None,
              help="Also write per-component centroids to this JSON file.")
@click.option("--variant", type=click.Choice(("trained", "untrained")),
              default="trained", show_default=True)
@click.option("--weights", type=click.Path(), default=None,
              help="Weights file (organoid backend).")
@backend_option
@seed_option
def organoid(image, output, centroids_path, variant, weights, backend, seed):
    """Whole-image prototype mask plus component centroids."""
    options = {"weights": weights} if backend == "organoid" else {}
    model = _build_backend(backend, seed, **options)
    mask, centroids = _run(
        lambda: export_organoid_masks(image, model, variant=variant)
    )
    write_mask(mask, output)
    message = f"{int(mask.sum())} foreground pixels -> {output}"
    if centroids_path is not None:
        write_points(centroids, centroids_path)
        message += f"; {len(centroids)} centroids -> {centroids_path}"
    click.echo(message)


def _load_points(path) -> list[tuple[float, float]]:
    doc = _load_json(path)
    if not isinstance(doc, list):
        raise AdapterError(f"{path}: expected a JSON list of points")
    points = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict) or "row" not in entry or "col" not in entry:
            raise AdapterError(f"{path}: point #{i} needs 'row' and 'col'")
        points.append((float(entry["row"]), float(entry["col"])))
    return points


def _load_boxes(path) -> list[tuple[float, float, float, float]]:
    doc = _load_json(path)
    entries = doc.get("boxes") if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise AdapterError(f"{path}: expected a boxes list")
    boxes = []
    for i, box in enumerate(entries):
        try:
            boxes.append(tuple(float(box[k]) for k in ("x0", "y0", "x1", "y1")))
        except (TypeError, KeyError) as exc:
            raise AdapterError(f"{path}: box #{i} is malformed ({exc})")
    return boxes


def _load_json(path):
    file = Path(path)
    if not file.is_file():
        raise AdapterError(f"file not found: {file}")
    try:
        return json.loads(file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AdapterError(f"{file}: invalid JSON: {exc}")


if __name__ == "__main__":
    main()
