"""Acceptance gate: one test per required behavior of the package.

Each test is self-contained and checks production code against an
independent oracle or a hand-derived value; `pytest -v` prints one
pass/fail line per criterion.
"""

import json
import time

import numpy as np
import pytest
from click.testing import CliRunner

from orgamask import (
    BinaryMask,
    CandidateSet,
    CurveKind,
    EvaluationRecord,
    FusionConfig,
    HybridConfig,
    RleMask,
    agreement_curve,
    composite_fuse,
    convex_hull_mask,
    default_grid,
    eccentricity,
    evaluate_image,
    hybrid_select,
    iou,
    load_mask,
    rle_decode,
    rle_encode,
    save_mask,
    solidity,
    union,
)
from orgamask.cli import main as cli_main

from maskgen import random_blob, random_mask
from oracles import (
    best_finalist_by_iou,
    eccentricity_eigvalsh,
    solidity_exhaustive,
)

SEED = 20260816


def test_iou_matches_pixel_counting_on_1000_random_pairs():
    rng = np.random.default_rng(SEED)
    started = time.monotonic()
    for _ in range(1000):
        w = int(rng.integers(1, 65))
        h = int(rng.integers(1, 65))
        density = float(rng.uniform(0.0, 1.0))
        a = random_mask(rng, w, h, density)
        b = random_mask(rng, w, h, density)
        assert iou(a, b) == iou_counting(a, b)
    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"1,000 IOU comparisons took {elapsed:.2f}s"


def iou_counting(a, b):
    # integer numerator/denominator, pure python
    inter = 0
    union_count = 0
    for pa, pb in zip(a.data.ravel().tolist(), b.data.ravel().tolist()):
        if pa and pb:
            inter += 1
        if pa or pb:
            union_count += 1
    if union_count == 0:
        return 0.0
    return inter / union_count


def test_empty_prediction_conventions():
    truth = BinaryMask.from_pixels(8, 8, [(r, c) for r in range(2, 6) for c in range(2, 6)])
    record = evaluate_image(
        BinaryMask.empty(8, 8), truth,
        image_id="im", set_id="s", method_id="m",
    )
    assert record.iou == 0.0
    assert record.relative_area == 0.0
    assert record.ecc_pred == 1.0
    assert record.sol_pred == 0.0


def test_eccentricity_golden_values_and_oracle():
    for n in range(1, 13):
        square = BinaryMask.full(n, n)
        assert eccentricity(square) == pytest.approx(0.0, abs=1e-9)
    for n in range(2, 40):
        line = BinaryMask.from_pixels(n, 1, [(0, c) for c in range(n)])
        assert eccentricity(line) == 1.0
    rect = BinaryMask.full(4, 2)
    assert eccentricity(rect) == pytest.approx(0.894427191, abs=1e-9)

    rng = np.random.default_rng(SEED)
    for _ in range(500):
        w = int(rng.integers(4, 49))
        h = int(rng.integers(4, 49))
        blob = random_blob(rng, w, h)
        assert eccentricity(blob) == pytest.approx(
            eccentricity_eigvalsh(blob), abs=1e-9
        )


def test_solidity_matches_exhaustive_hull_count():
    rng = np.random.default_rng(SEED)
    cases = []
    for _ in range(500):
        w = int(rng.integers(2, 49))
        h = int(rng.integers(2, 49))
        cases.append(random_blob(rng, w, h))
    for blob in cases:
        assert solidity(blob) == solidity_exhaustive(blob)

    convex = [
        BinaryMask.full(5, 5),
        BinaryMask.full(1, 7),
        BinaryMask.from_pixels(9, 9, [(4, 4)]),
        BinaryMask.from_pixels(10, 10, [(r, c) for r in range(2, 8) for c in range(3, 7)]),
    ]
    for mask in convex:
        assert solidity(mask) == 1.0

    for mask in cases + convex:
        hull = convex_hull_mask(mask)
        assert convex_hull_mask(hull) == hull


def _suite(rng, count):
    w = int(rng.integers(12, 33))
    h = int(rng.integers(12, 33))
    proto = random_blob(rng, w, h)
    candidates = CandidateSet(
        dims=(w, h),
        candidates=tuple(
            (f"c{i}", random_blob(rng, w, h)) for i in range(count)
        ),
    )
    return proto, candidates


def test_fusion_laws():
    rng = np.random.default_rng(SEED)
    ladder = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
    for _ in range(40):
        proto, candidates = _suite(rng, 6)
        by_id = dict(candidates.candidates)

        previous = None
        for threshold in ladder:
            result = composite_fuse(
                proto, candidates, FusionConfig(overlap_threshold=threshold)
            )
            accepted = set(result.accepted_ids)
            if previous is not None:
                assert accepted <= previous  # raising the bar never adds masks
            previous = accepted
            rebuilt = union(
                [by_id[cid] for cid in result.accepted_ids], dims=proto.dims
            )
            assert result.fused == rebuilt

        config = FusionConfig(overlap_threshold=0.5)
        base = composite_fuse(proto, candidates, config)
        order = rng.permutation(len(candidates.candidates))
        shuffled = CandidateSet(
            dims=candidates.dims,
            candidates=tuple(candidates.candidates[i] for i in order),
        )
        assert composite_fuse(proto, shuffled, config).fused == base.fused

        identity = composite_fuse(
            proto,
            CandidateSet(dims=proto.dims, candidates=(("self", proto),)),
            config,
        )
        assert identity.fused == proto


def test_hybrid_arbitration_against_brute_force():
    rng = np.random.default_rng(SEED)
    select_all = HybridConfig(abstention_threshold=0.0)
    for _ in range(200):
        w = int(rng.integers(8, 33))
        h = int(rng.integers(8, 33))
        proto = random_blob(rng, w, h)
        finalists = CandidateSet(
            dims=(w, h),
            candidates=tuple(
                (f"f{i}", random_blob(rng, w, h))
                for i in range(int(rng.integers(1, 7)))
            ),
        )
        _, best_id, best_score = best_finalist_by_iou(proto, finalists.candidates)

        result = hybrid_select(proto, finalists, select_all)
        assert not result.abstained
        assert result.finalist_id == best_id
        assert result.iou_with_prototype == best_score

        # exact-threshold boundary selects rather than abstains
        at_boundary = hybrid_select(
            proto, finalists, HybridConfig(abstention_threshold=best_score)
        )
        assert not at_boundary.abstained

        # any strictly higher threshold abstains, still naming the argmax
        if best_score < 1.0:
            above = hybrid_select(
                proto,
                finalists,
                HybridConfig(abstention_threshold=(best_score + 1.0) / 2.0),
            )
            assert above.abstained
            assert above.finalist_id == best_id
            assert above.iou_with_prototype == best_score
            assert above.mask is None

        order = rng.permutation(len(finalists.candidates))
        shuffled = CandidateSet(
            dims=finalists.dims,
            candidates=tuple(finalists.candidates[i] for i in order),
        )
        permuted = hybrid_select(proto, shuffled, select_all)
        assert permuted.iou_with_prototype == best_score
        ties = {
            fid
            for fid, mask in finalists.candidates
            if iou(proto, mask) == best_score
        }
        assert permuted.finalist_id in ties


def _record(image_id, **metrics):
    values = {
        "iou": 1.0, "relative_area": 1.0,
        "ecc_pred": 0.0, "ecc_truth": 0.0, "ecc_diff": 0.0,
        "sol_pred": 1.0, "sol_truth": 1.0, "sol_diff": 0.0,
    }
    values.update(metrics)
    return EvaluationRecord(
        image_id=image_id, set_id="s", method_id="m", abstained=False, **values
    )


def test_agreement_curves_hand_counted_and_monotone():
    iou_records = [
        _record(f"i{k}", iou=v) for k, v in enumerate((1.0, 0.75, 0.5, 0.25, 0.0))
    ]
    curve = agreement_curve(
        iou_records, CurveKind.IOU, (0.0, 0.25, 0.5, 0.75, 1.0)
    )
    assert curve.fractions == (1.0, 0.8, 0.6, 0.4, 0.2)
    assert curve.fractions[0] == 1.0  # t=0 with no abstentions

    area_records = [
        _record(f"a{k}", relative_area=v) for k, v in enumerate((1.0, 2.0, 0.5, 3.0))
    ]
    curve = agreement_curve(area_records, CurveKind.RELATIVE_AREA, (1.0, 2.0, 3.0))
    assert curve.fractions == (0.25, 0.75, 1.0)

    ecc_records = [
        _record(f"e{k}", ecc_diff=v) for k, v in enumerate((0.0, 0.1, -0.5))
    ]
    curve = agreement_curve(ecc_records, CurveKind.ECCENTRICITY, (0.0, 0.1, 0.2, 1.0))
    assert curve.fractions == (1 / 3, 2 / 3, 2 / 3, 1.0)

    sol_records = [
        _record(f"s{k}", sol_diff=v) for k, v in enumerate((0.05, -0.2, 0.0))
    ]
    curve = agreement_curve(sol_records, CurveKind.SOLIDITY, (0.0, 0.1, 0.3))
    assert curve.fractions == (1 / 3, 2 / 3, 1.0)

    rng = np.random.default_rng(SEED)
    random_records = [
        _record(
            f"r{k}",
            iou=float(rng.uniform(0, 1)),
            relative_area=float(rng.uniform(0.1, 10)),
            ecc_diff=float(rng.uniform(-1, 1)),
            sol_diff=float(rng.uniform(-1, 1)),
        )
        for k in range(50)
    ]
    for kind in CurveKind:
        fractions = agreement_curve(
            random_records, kind, default_grid(kind)
        ).fractions
        diffs = np.diff(fractions)
        if kind is CurveKind.IOU:
            assert (diffs <= 0).all()  # stricter threshold, fewer pass
        else:
            assert (diffs >= 0).all()  # looser tolerance, more pass
    zero_start = agreement_curve(
        random_records, CurveKind.IOU, default_grid(CurveKind.IOU)
    )
    assert zero_start.fractions[0] == 1.0


def test_codec_round_trips(tmp_path):
    rng = np.random.default_rng(SEED)
    png = tmp_path / "roundtrip.png"
    for _ in range(1000):
        w = int(rng.integers(1, 33))
        h = int(rng.integers(1, 33))
        mask = random_mask(rng, w, h, float(rng.uniform(0, 1)))
        assert rle_decode(rle_encode(mask)) == mask
        save_mask(mask, png)
        assert load_mask(png) == mask

    assert rle_encode(BinaryMask.empty(2, 2)).runs == (4,)
    assert rle_encode(BinaryMask.full(2, 2)).runs == (0, 4)
    diagonal = BinaryMask.from_pixels(2, 2, [(0, 0), (1, 1)])
    assert rle_encode(diagonal).runs == (0, 1, 2, 1)


SIZE = 1024
IMAGES = 144
CANDIDATES = 20


def _rect_runs(r0, r1, c0, c1):
    """Row-major runs for a solid rectangle, rows r0:r1 and cols c0:c1."""
    width = SIZE
    runs = [r0 * width + c0, c1 - c0]
    for _ in range(r1 - r0 - 1):
        runs.extend([width - (c1 - c0), c1 - c0])
    runs.append((SIZE - r1) * width + (width - c1))
    assert sum(runs) == SIZE * SIZE
    return runs


def _write_benchmark_tree(root):
    from PIL import Image

    rng = np.random.default_rng(SEED)
    images = []
    for index in range(IMAGES):
        image_id = f"im{index:03d}"
        r0, c0 = (int(v) for v in rng.integers(100, 500, size=2))
        gt_h, gt_w = (int(v) for v in rng.integers(120, 400, size=2))
        r1, c1 = r0 + gt_h, c0 + gt_w

        canvas = np.zeros((SIZE, SIZE), dtype=np.uint8)
        canvas[r0:r1, c0:c1] = 255
        canvas[r1 : r1 + 60, c0 : c0 + 80] = 255  # lip makes the shape non-convex
        Image.fromarray(canvas, mode="L").save(root / f"{image_id}_gt.png")

        proto_doc = RleMask(
            width=SIZE, height=SIZE, runs=tuple(_rect_runs(r0, r1, c0, c1))
        ).to_json_dict()
        (root / f"{image_id}_proto.json").write_text(json.dumps(proto_doc))

        entries = []
        for k in range(CANDIDATES):
            if k % 2 == 0:  # overlapping slabs that should fuse
                band = (r1 - r0) // (CANDIDATES // 2)
                cr0 = r0 + (k // 2) * band
                cr1 = min(r1, cr0 + band + 12)
                runs = _rect_runs(cr0, cr1, c0, c1)
            else:  # far-away clutter that should be rejected
                fr0 = int(rng.integers(650, 900))
                fc0 = int(rng.integers(650, 900))
                runs = _rect_runs(fr0, fr0 + 40, fc0, fc0 + 40)
            entries.append({"id": f"cand{k:02d}", "runs": runs})
        stack = {"width": SIZE, "height": SIZE, "candidates": entries}
        (root / f"{image_id}_stack.json").write_text(json.dumps(stack))

        images.append({
            "image_id": image_id,
            "ground_truth": f"{image_id}_gt.png",
            "methods": [{
                "method_id": "composite",
                "kind": "prototype_plus_candidates",
                "prototype": f"{image_id}_proto.json",
                "candidates": f"{image_id}_stack.json",
            }],
        })

    manifest = {
        "sets": [{"set_id": "bench", "images": images}],
        "output_dir": "reports",
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest))
    return path


def test_end_to_end_determinism_and_throughput(tmp_path):
    manifest = _write_benchmark_tree(tmp_path)
    report_dir = tmp_path / "reports"
    runner = CliRunner()

    started = time.monotonic()
    result = runner.invoke(cli_main, ["evaluate", "--manifest", str(manifest)])
    elapsed = time.monotonic() - started
    assert result.exit_code == 0, result.output
    assert f"{IMAGES} records" in result.output
    assert elapsed < 60.0, f"evaluate took {elapsed:.1f}s on {IMAGES} images"

    first = {
        p.name: p.read_bytes() for p in sorted(report_dir.iterdir())
    }
    assert "records.csv" in first and "summary.json" in first

    rerun = runner.invoke(cli_main, ["evaluate", "--manifest", str(manifest)])
    assert rerun.exit_code == 0, rerun.output
    second = {
        p.name: p.read_bytes() for p in sorted(report_dir.iterdir())
    }
    assert first == second
