"""Hourly KDIGO acute-kidney-injury staging for clinical time series.

The engine grids raw observations onto hourly cells, evaluates the four
staging pathways (urine output, absolute and relative creatinine elevation,
dialysis) at every hour, merges them into an overall stage, and can score
its own output against gold labels.  All arithmetic at decision boundaries
is exact fixed-point integer math.
"""

from .baseline import (
    BaselineKind,
    BaselineMethod,
    DEFAULT_ASSUMED_GFR,
    MissingDemographics,
    WindowStat,
    adjusted_body_weight,
    baseline_at,
    baseline_series,
    cockcroft_gault_clearance,
    cockcroft_gault_clearance_exact,
    cockcroft_gault_scr,
    cockcroft_gault_scr_exact,
)
from .core import (
    MICRO,
    STAGE_CATEGORIES,
    HourCell,
    HourlyGrid,
    ObservationSeries,
    PatientProfile,
    Quantity,
    Sex,
    Signal,
    Stage,
    StageRecord,
    StagingError,
    UndefinedConversion,
    Unit,
    convert_unit,
    merge_stages,
)
from .io import (
    DatasetBundle,
    IntegrityError,
    ParseError,
    SchemaError,
    load_dataset,
    write_stage_records,
    write_summaries,
)
from .pipeline import (
    EmptyInput,
    EmptySubject,
    MixedSubjects,
    PatientSummary,
    RunConfig,
    UnknownSubject,
    annotate_bundle,
    annotate_subject,
    summarize,
    summarize_all,
)
from .preprocess import EmptySeries, build_subject_grid, forward_fill, resample_hourly
from .probes import (
    ProbeConfig,
    UoMode,
    abs_scr_stage,
    dialysis_stage,
    rel_scr_stage,
    uo_stage,
    uo_stage_series,
)
from .validate import (
    AccuracyReport,
    KeyMismatch,
    LabelRow,
    brute_force_uo_oracle,
    load_labels,
    score,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "BaselineKind",
    "BaselineMethod",
    "DEFAULT_ASSUMED_GFR",
    "DatasetBundle",
    "EmptyInput",
    "EmptySeries",
    "EmptySubject",
    "HourCell",
    "HourlyGrid",
    "IntegrityError",
    "KeyMismatch",
    "LabelRow",
    "MICRO",
    "MissingDemographics",
    "MixedSubjects",
    "ObservationSeries",
    "ParseError",
    "PatientProfile",
    "PatientSummary",
    "ProbeConfig",
    "Quantity",
    "RunConfig",
    "STAGE_CATEGORIES",
    "SchemaError",
    "Sex",
    "Signal",
    "Stage",
    "StageRecord",
    "StagingError",
    "UndefinedConversion",
    "Unit",
    "UnknownSubject",
    "UoMode",
    "WindowStat",
    "abs_scr_stage",
    "adjusted_body_weight",
    "annotate_bundle",
    "annotate_subject",
    "baseline_at",
    "baseline_series",
    "brute_force_uo_oracle",
    "build_subject_grid",
    "cockcroft_gault_clearance",
    "cockcroft_gault_clearance_exact",
    "cockcroft_gault_scr",
    "cockcroft_gault_scr_exact",
    "convert_unit",
    "dialysis_stage",
    "forward_fill",
    "load_dataset",
    "load_labels",
    "merge_stages",
    "rel_scr_stage",
    "resample_hourly",
    "score",
    "summarize",
    "summarize_all",
    "uo_stage",
    "uo_stage_series",
    "write_report",
    "write_stage_records",
    "write_summaries",
]
