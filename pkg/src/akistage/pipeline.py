"""Per-subject orchestration: grid, impute, baseline, stage, merge, summarize.

Subjects are independent, so annotation parallelizes across them; output is
normalized by (subject_id, timestamp) regardless of execution order, and a
run with N workers is byte-identical to a serial run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .baseline import baseline_series
from .core import (
    HourlyGrid,
    ObservationSeries,
    PatientProfile,
    Signal,
    Stage,
    StageRecord,
    StagingError,
    Unit,
    merge_stages,
)
from .io import DatasetBundle
from .preprocess import build_subject_grid, forward_fill
from .probes import (
    ProbeConfig,
    abs_scr_stage_series,
    dialysis_stage_series,
    rel_scr_stage_series,
    uo_stage_series,
)


class UnknownSubject(StagingError):
    """The requested subject has no patient profile in the bundle."""


class EmptySubject(StagingError):
    """The requested subject has no observations in any signal."""


class EmptyInput(StagingError):
    """summarize() was given no records."""


class MixedSubjects(StagingError):
    """summarize() was given records from more than one subject."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs beyond the input files themselves."""

    probe: ProbeConfig = field(default_factory=ProbeConfig)
    max_gap_hours: int = 5
    imputation_enabled: bool = True
    creatinine_unit: Unit = Unit.MG_DL

    def __post_init__(self) -> None:
        if self.max_gap_hours < 0:
            raise ValueError("max_gap_hours must be >= 0")
        if self.creatinine_unit not in (Unit.MG_DL, Unit.UMOL_L):
            raise ValueError("creatinine_unit must be mg/dL or umol/L")


@dataclass(frozen=True)
class PatientSummary:
    """First AKI hour and maximum stage per pathway and overall."""

    subject_id: str
    hours_observed: int
    first_aki_time: Mapping[str, Optional[datetime]]
    max_stage: Mapping[str, Stage]


def _annotate_grid(
    grid: HourlyGrid, probe_cfg: ProbeConfig, profile: PatientProfile
) -> List[StageRecord]:
    uo = uo_stage_series(grid, probe_cfg)
    rel_base = baseline_series(grid, probe_cfg.rel_baseline, profile)
    abs_base = baseline_series(grid, probe_cfg.abs_baseline, profile)
    rel = rel_scr_stage_series(grid, rel_base)
    abs_ = abs_scr_stage_series(grid, abs_base)
    dialysis = dialysis_stage_series(grid)
    records = []
    for t in range(len(grid)):
        records.append(
            StageRecord(
                subject_id=grid.subject_id,
                timestamp=grid.hour_at(t),
                uo_stage=uo[t],
                abs_scr_stage=abs_[t],
                rel_scr_stage=rel[t],
                dialysis_stage=dialysis[t],
                overall_stage=merge_stages(uo[t], abs_[t], rel[t], dialysis[t]),
                baseline_rel=rel_base[t],
                baseline_abs=abs_base[t],
            )
        )
    return records


def _annotate_payload(
    payload: Tuple[PatientProfile, Dict[Signal, ObservationSeries], RunConfig]
) -> List[StageRecord]:
    profile, series, cfg = payload
    grid = build_subject_grid(series, profile)
    if cfg.imputation_enabled:
        grid = forward_fill(grid, cfg.max_gap_hours)
    return _annotate_grid(grid, cfg.probe, profile)


def annotate_subject(
    bundle: DatasetBundle, subject_id: str, cfg: RunConfig
) -> List[StageRecord]:
    """Stage one subject: one record per hour over the union of all signals'
    time ranges, with the baselines used carried in the audit fields."""
    profile = bundle.profiles.get(subject_id)
    if profile is None:
        raise UnknownSubject(subject_id)
    series = bundle.series_for(subject_id)
    if not series:
        raise EmptySubject(subject_id)
    return _annotate_payload((profile, series, cfg))


def annotate_bundle(
    bundle: DatasetBundle, cfg: RunConfig, jobs: int = 1
) -> List[StageRecord]:
    """Stage every subject that has data, sorted by (subject_id, timestamp)."""
    subject_ids = bundle.subject_ids()
    payloads = [
        (bundle.profiles[sid], bundle.series_for(sid), cfg) for sid in subject_ids
    ]
    if jobs <= 1 or len(payloads) <= 1:
        per_subject = [_annotate_payload(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_subject = list(pool.map(_annotate_payload, payloads))
    records: List[StageRecord] = []
    for chunk in per_subject:
        records.extend(chunk)
    return records


def summarize(records: Sequence[StageRecord]) -> PatientSummary:
    """Reduce one subject's hourly records to first-AKI times and maxima.

    UNKNOWN hours never start an AKI episode; a pathway's maximum is UNKNOWN
    only when the pathway was UNKNOWN at every hour.
    """
    if not records:
        raise EmptyInput("no records to summarize")
    subject_ids = {r.subject_id for r in records}
    if len(subject_ids) > 1:
        raise MixedSubjects(f"records span subjects {sorted(subject_ids)}")
    for a, b in zip(records, records[1:]):
        if b.timestamp - a.timestamp != timedelta(hours=1):
            raise ValueError(
                f"records not hourly-contiguous at {a.timestamp.isoformat()}"
            )
    first: Dict[str, Optional[datetime]] = {}
    peak: Dict[str, Stage] = {}
    for category in ("uo", "abs_scr", "rel_scr", "dialysis", "overall"):
        stages = [r.stage_of(category) for r in records]
        first[category] = next(
            (r.timestamp for r, s in zip(records, stages) if s >= Stage.STAGE_1), None
        )
        peak[category] = max(stages)
    return PatientSummary(
        subject_id=records[0].subject_id,
        hours_observed=len(records),
        first_aki_time=first,
        max_stage=peak,
    )


def summarize_all(records: Sequence[StageRecord]) -> List[PatientSummary]:
    """Group a sorted multi-subject record list and summarize each subject."""
    by_subject: Dict[str, List[StageRecord]] = {}
    for r in records:
        by_subject.setdefault(r.subject_id, []).append(r)
    return [summarize(by_subject[sid]) for sid in sorted(by_subject)]
