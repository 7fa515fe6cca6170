"""HTTP service exposing the core mask operations.

Masks travel as run-length documents (same convention as the .json
exchange files: row-major, first run is background, run lengths sum to
width*height). Invalid payloads get a 422 with the library's message.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .evaluation import (
    AbstentionPolicy,
    CurveKind,
    EvaluationRecord,
    agreement_curve,
    default_grid,
)
from .formats import RleMask, rle_decode, rle_encode
from .fusion import (
    CandidateSet,
    FusionConfig,
    HybridConfig,
    centroid_prompts,
    composite_fuse,
    hybrid_select,
)
from .masks import BinaryMask, OverlapMode, connected_components, iou
from .morphometry import per_component_metrics, region_metrics

app = FastAPI(
    title="orgamask",
    version=__version__,
    description="Binary-mask fusion, morphometry, and agreement scoring.",
)


class RleMaskModel(BaseModel):
    width: int
    height: int
    runs: list[int]

    def to_mask(self) -> BinaryMask:
        return rle_decode(RleMask(width=self.width, height=self.height, runs=tuple(self.runs)))

    @classmethod
    def from_mask(cls, mask: BinaryMask) -> "RleMaskModel":
        rle = rle_encode(mask)
        return cls(width=rle.width, height=rle.height, runs=list(rle.runs))


class NamedRuns(BaseModel):
    id: str
    runs: list[int]


class PointModel(BaseModel):
    row: float
    col: float


def _decode(model: RleMaskModel, what: str) -> BinaryMask:
    try:
        return model.to_mask()
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=f"{what}: {exc}")


def _decode_named(
    entries: list[NamedRuns], width: int, height: int, what: str
) -> CandidateSet:
    masks = []
    for entry in entries:
        masks.append(
            (
                entry.id,
                _decode(
                    RleMaskModel(width=width, height=height, runs=entry.runs),
                    f"{what} {entry.id!r}",
                ),
            )
        )
    try:
        return CandidateSet(dims=(width, height), candidates=tuple(masks))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


class IouRequest(BaseModel):
    a: RleMaskModel
    b: RleMaskModel


class IouResponse(BaseModel):
    iou: float


@app.post("/iou", response_model=IouResponse)
def compute_iou(req: IouRequest) -> IouResponse:
    a = _decode(req.a, "mask a")
    b = _decode(req.b, "mask b")
    try:
        return IouResponse(iou=iou(a, b))
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


class FuseRequest(BaseModel):
    prototype: RleMaskModel
    candidates: list[NamedRuns]
    overlap_threshold: float = 0.5
    mode: OverlapMode = OverlapMode.CANDIDATE_FRACTION


class CandidateOverlap(BaseModel):
    id: str
    overlap: float
    accepted: bool


class FuseResponse(BaseModel):
    fused: RleMaskModel
    accepted_ids: list[str]
    per_candidate_overlap: list[CandidateOverlap]


@app.post("/fuse", response_model=FuseResponse)
def fuse_endpoint(req: FuseRequest) -> FuseResponse:
    prototype = _decode(req.prototype, "prototype")
    candidates = _decode_named(
        req.candidates, req.prototype.width, req.prototype.height, "candidate"
    )
    try:
        config = FusionConfig(overlap_threshold=req.overlap_threshold, mode=req.mode)
        result = composite_fuse(prototype, candidates, config)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    accepted = set(result.accepted_ids)
    return FuseResponse(
        fused=RleMaskModel.from_mask(result.fused),
        accepted_ids=list(result.accepted_ids),
        per_candidate_overlap=[
            CandidateOverlap(id=cid, overlap=score, accepted=cid in accepted)
            for cid, score in result.per_candidate_overlap
        ],
    )


class HybridRequest(BaseModel):
    prototype: RleMaskModel
    finalists: list[NamedRuns]
    abstention_threshold: float = 0.5


class FinalistIou(BaseModel):
    id: str
    iou: float


class HybridResponse(BaseModel):
    abstained: bool
    finalist_id: str
    iou_with_prototype: float
    mask: RleMaskModel | None
    per_finalist_iou: list[FinalistIou]


@app.post("/hybrid", response_model=HybridResponse)
def hybrid_endpoint(req: HybridRequest) -> HybridResponse:
    prototype = _decode(req.prototype, "prototype")
    finalists = _decode_named(
        req.finalists, req.prototype.width, req.prototype.height, "finalist"
    )
    try:
        config = HybridConfig(abstention_threshold=req.abstention_threshold)
        result = hybrid_select(prototype, finalists, config)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return HybridResponse(
        abstained=result.abstained,
        finalist_id=result.finalist_id,
        iou_with_prototype=result.iou_with_prototype,
        mask=None if result.mask is None else RleMaskModel.from_mask(result.mask),
        per_finalist_iou=[
            FinalistIou(id=fid, iou=score) for fid, score in result.per_finalist_iou
        ],
    )


class MaskRequest(BaseModel):
    mask: RleMaskModel


class CentroidsResponse(BaseModel):
    points: list[PointModel]


@app.post("/centroids", response_model=CentroidsResponse)
def centroids_endpoint(req: MaskRequest) -> CentroidsResponse:
    mask = _decode(req.mask, "mask")
    return CentroidsResponse(
        points=[PointModel(row=r, col=c) for r, c in centroid_prompts(mask)]
    )


class MetricsRequest(BaseModel):
    mask: RleMaskModel
    per_component: bool = False


class RegionMetricsModel(BaseModel):
    area: int
    centroid: PointModel
    eccentricity: float
    solidity: float
    bbox: list[int]
    label: int | None = None


class MetricsResponse(BaseModel):
    components: list[RegionMetricsModel]


def _metrics_model(m, label: int | None = None) -> RegionMetricsModel:
    return RegionMetricsModel(
        area=m.area,
        centroid=PointModel(row=m.centroid[0], col=m.centroid[1]),
        eccentricity=m.eccentricity,
        solidity=m.solidity,
        bbox=list(m.bbox),
        label=label,
    )


@app.post("/metrics", response_model=MetricsResponse)
def metrics_endpoint(req: MetricsRequest) -> MetricsResponse:
    mask = _decode(req.mask, "mask")
    try:
        if req.per_component:
            labeled = connected_components(mask)
            return MetricsResponse(
                components=[
                    _metrics_model(m, label)
                    for label, m in per_component_metrics(labeled)
                ]
            )
        if mask.is_empty:
            raise HTTPException(status_code=422, detail="mask is empty; no region to measure")
        return MetricsResponse(components=[_metrics_model(region_metrics(mask))])
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


class RecordModel(BaseModel):
    image_id: str
    set_id: str
    method_id: str
    abstained: bool = False
    iou: float | None = None
    relative_area: float | None = None
    ecc_pred: float | None = None
    ecc_truth: float | None = None
    ecc_diff: float | None = None
    sol_pred: float | None = None
    sol_truth: float | None = None
    sol_diff: float | None = None


class AgreementRequest(BaseModel):
    records: list[RecordModel]
    metric: CurveKind
    grid: list[float] | None = None
    policy: AbstentionPolicy = AbstentionPolicy.EXCLUDE


class AgreementResponse(BaseModel):
    metric: CurveKind
    thresholds: list[float]
    fractions: list[float]
    record_count: int


@app.post("/agreement", response_model=AgreementResponse)
def agreement_endpoint(req: AgreementRequest) -> AgreementResponse:
    try:
        records = [
            EvaluationRecord(**record.model_dump()) for record in req.records
        ]
        grid = tuple(req.grid) if req.grid else default_grid(req.metric)
        curve = agreement_curve(records, req.metric, grid, policy=req.policy)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return AgreementResponse(
        metric=curve.kind,
        thresholds=list(curve.thresholds),
        fractions=list(curve.fractions),
        record_count=curve.record_count,
    )
