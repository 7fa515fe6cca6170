"""Ground-truth comparison and aggregation.

Per-image evaluation records (with the fixed empty-prediction
conventions: iou 0, relative area 0, eccentricity 1, solidity 0),
mean-IOU tables, agreement-at-tolerance curves, and paired comparison
against a second annotator's records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .masks import BinaryMask, area, largest_component, iou as mask_iou
from .morphometry import eccentricity, solidity

__all__ = [
    "AbstentionPolicy",
    "CurveKind",
    "EvaluationRecord",
    "MeanIouRow",
    "MeanIouTable",
    "AgreementCurve",
    "PairedCurves",
    "evaluate_image",
    "abstained_record",
    "mean_iou",
    "agreement_curve",
    "iov_compare",
    "default_grid",
]

# Conventions recorded when a method predicts an empty mask.
EMPTY_PREDICTION_IOU = 0.0
EMPTY_PREDICTION_RELATIVE_AREA = 0.0
EMPTY_PREDICTION_ECCENTRICITY = 1.0
EMPTY_PREDICTION_SOLIDITY = 0.0


class AbstentionPolicy(str, Enum):
    """How abstained records enter aggregations.

    ``exclude`` drops them from the denominator entirely;
    ``count_as_zero`` keeps them, scoring IOU 0 and failing every
    agreement tolerance (abstained records carry no metric values).
    """

    EXCLUDE = "exclude"
    COUNT_AS_ZERO = "count_as_zero"


class CurveKind(str, Enum):
    IOU = "iou"
    RELATIVE_AREA = "relative_area"
    ECCENTRICITY = "eccentricity"
    SOLIDITY = "solidity"


@dataclass(frozen=True)
class EvaluationRecord:
    """One (image, method) comparison against ground truth.

    Differences are signed, prediction minus truth. An abstained record
    carries no metric values at all.
    """

    image_id: str
    set_id: str
    method_id: str
    iou: float | None
    relative_area: float | None
    ecc_pred: float | None
    ecc_truth: float | None
    ecc_diff: float | None
    sol_pred: float | None
    sol_truth: float | None
    sol_diff: float | None
    abstained: bool = False

    _METRIC_FIELDS = (
        "iou",
        "relative_area",
        "ecc_pred",
        "ecc_truth",
        "ecc_diff",
        "sol_pred",
        "sol_truth",
        "sol_diff",
    )

    def __post_init__(self) -> None:
        values = [getattr(self, name) for name in self._METRIC_FIELDS]
        if self.abstained:
            if any(v is not None for v in values):
                raise ValueError("abstained records carry no metric values")
        elif any(v is None for v in values):
            missing = [n for n, v in zip(self._METRIC_FIELDS, values) if v is None]
            raise ValueError(f"non-abstained record missing values: {missing}")


def evaluate_image(
    pred: BinaryMask,
    truth: BinaryMask,
    *,
    image_id: str,
    set_id: str,
    method_id: str,
) -> EvaluationRecord:
    """Compare one predicted mask against its ground truth.

    IOU is taken over the full masks. Relative area, eccentricity and
    solidity are computed on the largest connected component of each
    mask, and an empty prediction receives the fixed conventions
    (iou 0, relative area 0, eccentricity 1, solidity 0).
    """
    if pred.dims != truth.dims:
        raise ValueError(
            f"prediction is {pred.width}x{pred.height}, "
            f"truth is {truth.width}x{truth.height}"
        )
    if truth.is_empty:
        raise ValueError(f"ground truth mask for {image_id!r} is empty")

    truth_main = largest_component(truth)
    ecc_truth = eccentricity(truth_main)
    sol_truth = solidity(truth_main)

    if pred.is_empty:
        rel_area = EMPTY_PREDICTION_RELATIVE_AREA
        ecc_pred = EMPTY_PREDICTION_ECCENTRICITY
        sol_pred = EMPTY_PREDICTION_SOLIDITY
        full_iou = EMPTY_PREDICTION_IOU
    else:
        pred_main = largest_component(pred)
        rel_area = area(pred_main) / area(truth_main)
        ecc_pred = eccentricity(pred_main)
        sol_pred = solidity(pred_main)
        full_iou = mask_iou(pred, truth)

    return EvaluationRecord(
        image_id=image_id,
        set_id=set_id,
        method_id=method_id,
        iou=full_iou,
        relative_area=rel_area,
        ecc_pred=ecc_pred,
        ecc_truth=ecc_truth,
        ecc_diff=ecc_pred - ecc_truth,
        sol_pred=sol_pred,
        sol_truth=sol_truth,
        sol_diff=sol_pred - sol_truth,
    )


def abstained_record(
    *, image_id: str, set_id: str, method_id: str
) -> EvaluationRecord:
    """A record for an image the method declined to segment."""
    return EvaluationRecord(
        image_id=image_id,
        set_id=set_id,
        method_id=method_id,
        iou=None,
        relative_area=None,
        ecc_pred=None,
        ecc_truth=None,
        ecc_diff=None,
        sol_pred=None,
        sol_truth=None,
        sol_diff=None,
        abstained=True,
    )


@dataclass(frozen=True)
class MeanIouRow:
    set_id: str
    method_id: str
    mean_iou: float
    count: int


@dataclass(frozen=True)
class MeanIouTable:
    """Mean IOU per (set, method), sorted by that key."""

    rows: tuple[MeanIouRow, ...]

    def get(self, set_id: str, method_id: str) -> MeanIouRow | None:
        for row in self.rows:
            if row.set_id == set_id and row.method_id == method_id:
                return row
        return None


def _effective_iou(
    record: EvaluationRecord, policy: AbstentionPolicy
) -> float | None:
    """IOU contribution of a record under the abstention policy, or None
    when the record is dropped from the denominator."""
    if not record.abstained:
        return record.iou
    if policy is AbstentionPolicy.COUNT_AS_ZERO:
        return 0.0
    return None


def mean_iou(
    records: Iterable[EvaluationRecord],
    policy: AbstentionPolicy = AbstentionPolicy.EXCLUDE,
) -> MeanIouTable:
    """Arithmetic mean IOU per (set, method) group.

    Groups left empty by the abstention policy are omitted.
    """
    policy = AbstentionPolicy(policy)
    groups: dict[tuple[str, str], list[float]] = {}
    for record in records:
        value = _effective_iou(record, policy)
        if value is None:
            continue
        groups.setdefault((record.set_id, record.method_id), []).append(value)
    rows = [
        MeanIouRow(set_id, method_id, math.fsum(values) / len(values), len(values))
        for (set_id, method_id), values in sorted(groups.items())
    ]
    return MeanIouTable(tuple(rows))


@dataclass(frozen=True)
class AgreementCurve:
    """Fraction of records within tolerance, per grid point.

    IOU curves are non-increasing in the threshold; the other kinds are
    non-decreasing in the tolerance. Both properties are checked on
    construction.
    """

    kind: CurveKind
    thresholds: tuple[float, ...]
    fractions: tuple[float, ...]
    record_count: int

    def __post_init__(self) -> None:
        if len(self.thresholds) != len(self.fractions):
            raise ValueError("thresholds and fractions must have equal length")
        if any(not 0.0 <= f <= 1.0 for f in self.fractions):
            raise ValueError("curve fractions must lie in [0, 1]")
        pairs = zip(self.fractions, self.fractions[1:])
        if self.kind is CurveKind.IOU:
            ok = all(a >= b for a, b in pairs)
        else:
            ok = all(a <= b for a, b in pairs)
        if not ok:
            raise ValueError(f"curve for {self.kind.value} violates monotonicity")


def _record_passes(
    record: EvaluationRecord, kind: CurveKind, value: float
) -> bool:
    if record.abstained:
        return False
    if kind is CurveKind.IOU:
        return record.iou >= value
    if kind is CurveKind.RELATIVE_AREA:
        return 1.0 / value <= record.relative_area <= value
    if kind is CurveKind.ECCENTRICITY:
        return abs(record.ecc_diff) <= value
    return abs(record.sol_diff) <= value


def _validate_grid(kind: CurveKind, grid: Sequence[float]) -> tuple[float, ...]:
    grid = tuple(float(g) for g in grid)
    if not grid:
        raise ValueError("grid must contain at least one value")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be sorted ascending")
    if kind is CurveKind.RELATIVE_AREA and grid[0] < 1.0:
        raise ValueError(
            f"relative-area tolerances must be >= 1, got {grid[0]}"
        )
    return grid


def agreement_curve(
    records: Sequence[EvaluationRecord],
    kind: CurveKind,
    grid: Sequence[float],
    policy: AbstentionPolicy = AbstentionPolicy.EXCLUDE,
) -> AgreementCurve:
    """Fraction of a single method's records passing each grid value.

    Pass criteria: iou >= t for IOU; 1/x <= R <= x for relative area at
    tolerance x; |difference| <= tolerance for eccentricity and solidity.
    """
    kind = CurveKind(kind)
    policy = AbstentionPolicy(policy)
    grid = _validate_grid(kind, grid)
    methods = {r.method_id for r in records}
    if len(methods) > 1:
        raise ValueError(
            f"agreement curves are per-method; records mix {sorted(methods)}"
        )
    if policy is AbstentionPolicy.EXCLUDE:
        records = [r for r in records if not r.abstained]
    if not records:
        raise ValueError("no records to aggregate")
    total = len(records)
    fractions = tuple(
        sum(1 for r in records if _record_passes(r, kind, value)) / total
        for value in grid
    )
    return AgreementCurve(
        kind=kind, thresholds=grid, fractions=fractions, record_count=total
    )


@dataclass(frozen=True)
class PairedCurves:
    """Two agreement curves on a shared grid plus their difference
    (method minus reference), for reading parity against a baseline."""

    kind: CurveKind
    thresholds: tuple[float, ...]
    fraction_method: tuple[float, ...]
    fraction_reference: tuple[float, ...]
    difference: tuple[float, ...]


def iov_compare(
    records_method: Sequence[EvaluationRecord],
    records_reference: Sequence[EvaluationRecord],
    kind: CurveKind,
    grid: Sequence[float],
    policy: AbstentionPolicy = AbstentionPolicy.EXCLUDE,
) -> PairedCurves:
    """Compare a method's agreement curve against a reference annotator's.

    Both record sets must cover exactly the same (set, image) pairs; the
    mismatch error lists the offending ids.
    """
    keys_method = {(r.set_id, r.image_id) for r in records_method}
    keys_reference = {(r.set_id, r.image_id) for r in records_reference}
    if keys_method != keys_reference:
        only_method = sorted(keys_method - keys_reference)
        only_reference = sorted(keys_reference - keys_method)
        parts = []
        if only_method:
            parts.append(f"missing from reference records: {only_method}")
        if only_reference:
            parts.append(f"missing from method records: {only_reference}")
        raise ValueError("image ids differ; " + "; ".join(parts))
    curve_m = agreement_curve(records_method, kind, grid, policy)
    curve_r = agreement_curve(records_reference, kind, grid, policy)
    return PairedCurves(
        kind=curve_m.kind,
        thresholds=curve_m.thresholds,
        fraction_method=curve_m.fractions,
        fraction_reference=curve_r.fractions,
        difference=tuple(
            m - r for m, r in zip(curve_m.fractions, curve_r.fractions)
        ),
    )


def default_grid(kind: CurveKind) -> tuple[float, ...]:
    """Default tolerance grids: 101 even points on [0, 1], or a
    101-point geometric grid on [1, 10] for relative area."""
    kind = CurveKind(kind)
    if kind is CurveKind.RELATIVE_AREA:
        return tuple(10.0 ** (i / 100.0) for i in range(101))
    return tuple(i / 100.0 for i in range(101))
