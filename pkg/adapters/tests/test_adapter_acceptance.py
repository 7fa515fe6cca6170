"""Acceptance gate for the adapters: every export must be accepted by
the orgamask CLI as-is, and centroid files must agree with what that
CLI computes on the exported mask. The primary package is exercised
only through its installed command, never imported.
"""

import json
import shutil
import subprocess

import pytest
from click.testing import CliRunner

from orgamask_adapters.cli import main

ORGAMASK = shutil.which("orgamask")


def run_primary(*args):
    assert ORGAMASK, "the orgamask CLI must be installed for acceptance tests"
    return subprocess.run(
        [ORGAMASK, *args], capture_output=True, text=True, timeout=120
    )


@pytest.fixture(scope="module")
def exports(well_png, tmp_path_factory):
    """One export of every kind from the same image."""
    root = tmp_path_factory.mktemp("exports")
    runner = CliRunner()
    paths = {
        "mask": root / "proto.json",
        "points": root / "pts.json",
        "auto": root / "auto_stack.json",
        "boxes": root / "boxes.json",
        "point_stack": root / "point_stack.json",
        "box_stack": root / "box_stack.json",
    }
    commands = [
        ["organoid", str(well_png), "-o", str(paths["mask"]),
         "--centroids", str(paths["points"])],
        ["sam-auto", str(well_png), "-o", str(paths["auto"])],
        ["gdino", str(well_png), "-o", str(paths["boxes"])],
        ["sam-points", str(well_png), "--points", str(paths["points"]),
         "-o", str(paths["point_stack"])],
        ["sam-boxes", str(well_png), "--boxes", str(paths["boxes"]),
         "-o", str(paths["box_stack"])],
    ]
    for command in commands:
        result = runner.invoke(main, command)
        assert result.exit_code == 0, f"{command}: {result.output}"
    return {"root": root, "paths": paths, "commands": commands}


def test_every_export_passes_primary_validation(exports):
    paths = exports["paths"]
    result = run_primary(
        "validate",
        "--kind", "mask", str(paths["mask"]),
    )
    assert result.returncode == 0, result.stdout + result.stderr
    for key in ("auto", "point_stack", "box_stack"):
        result = run_primary("validate", "--kind", "stack", str(paths[key]))
        assert result.returncode == 0, f"{key}: {result.stdout}{result.stderr}"
    result = run_primary("validate", "--kind", "boxes", str(paths["boxes"]))
    assert result.returncode == 0, result.stdout + result.stderr


def test_stacks_pass_fuse_ingestion(exports):
    paths = exports["paths"]
    for key in ("auto", "point_stack", "box_stack"):
        result = run_primary(
            "fuse",
            "--prototype", str(paths["mask"]),
            "--candidates", str(paths[key]),
            "--validate-only",
        )
        assert result.returncode == 0, f"{key}: {result.stdout}{result.stderr}"


def test_centroids_agree_with_primary_within_1e6(exports):
    paths = exports["paths"]
    primary_pts = exports["root"] / "primary_pts.json"
    result = run_primary(
        "centroids", "--mask", str(paths["mask"]), "-o", str(primary_pts)
    )
    assert result.returncode == 0, result.stdout + result.stderr
    ours = json.loads(paths["points"].read_text())
    theirs = json.loads(primary_pts.read_text())
    assert len(ours) == len(theirs) and len(ours) > 0
    for mine, other in zip(ours, theirs):
        assert abs(mine["row"] - other["row"]) <= 1e-6
        assert abs(mine["col"] - other["col"]) <= 1e-6


def test_reruns_are_byte_identical(exports, tmp_path):
    # rerun every command into a fresh directory, then compare bytes
    runner = CliRunner()
    for command in exports["commands"]:
        fresh = []
        replaced = {}
        for i, token in enumerate(command):
            if i > 0 and command[i - 1] in ("-o", "--centroids"):
                new = tmp_path / ("rerun_" + token.rsplit("/", 1)[-1])
                replaced[token] = new
                fresh.append(str(new))
            else:
                fresh.append(token)
        result = runner.invoke(main, fresh)
        assert result.exit_code == 0, result.output
        for old, new in replaced.items():
            assert new.read_bytes() == open(old, "rb").read(), fresh


def test_blank_image_exports_validate(blank_png, tmp_path):
    runner = CliRunner()
    stack = tmp_path / "stack.json"
    result = runner.invoke(main, ["sam-auto", str(blank_png), "-o", str(stack)])
    assert result.exit_code == 0, result.output
    assert json.loads(stack.read_text())["candidates"] == []
    check = run_primary("validate", "--kind", "stack", str(stack))
    assert check.returncode == 0, check.stdout + check.stderr

    boxes = tmp_path / "boxes.json"
    result = runner.invoke(main, ["gdino", str(blank_png), "-o", str(boxes)])
    assert result.exit_code == 0
    assert json.loads(boxes.read_text())["boxes"] == []
    check = run_primary("validate", "--kind", "boxes", str(boxes))
    assert check.returncode == 0, check.stdout + check.stderr
