"""Shared domain types: stages, fixed-point quantities, series, grids, records.

Every measurement in this package is an exact integer count of micro-units
(1e-6 of the physical unit).  All staging thresholds downstream are compared
as integers, so a value sitting exactly on a clinical cutoff is classified
the same way every time, on every platform.  Floats appear only at the
presentation layer (``Quantity.value``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime, timedelta
from decimal import Decimal, InvalidOperation, ROUND_HALF_UP
from typing import Optional, Tuple, Union

MICRO = 10**6

#: Pathway names, in the column order used by stage-record files.
STAGE_CATEGORIES = ("uo", "abs_scr", "rel_scr", "dialysis", "overall")


class StagingError(Exception):
    """Base class for errors raised by this package."""


class UndefinedConversion(StagingError):
    """Requested a unit conversion with no defined factor."""


class Stage(enum.IntEnum):
    """Per-hour stage of one pathway.

    UNKNOWN marks hours where a criterion cannot be evaluated (value missing,
    or no baseline available).  It sorts below stage 0 so that ``max`` folds
    it away when pathways are merged: a single evaluable pathway is enough to
    stage the hour.
    """

    UNKNOWN = -1
    NONE = 0
    STAGE_1 = 1
    STAGE_2 = 2
    STAGE_3 = 3

    def label(self) -> str:
        """Serialized form: the digit, or an empty field for UNKNOWN."""
        return "" if self is Stage.UNKNOWN else str(int(self))

    @classmethod
    def parse(cls, text: str) -> "Stage":
        text = text.strip()
        if text == "":
            return cls.UNKNOWN
        if text in ("0", "1", "2", "3"):
            return cls(int(text))
        raise ValueError(f"not a stage label: {text!r}")


def merge_stages(uo: Stage, abs_scr: Stage, rel_scr: Stage, dialysis: Stage) -> Stage:
    """Overall stage: the ordered maximum of the four pathways.

    UNKNOWN is the lowest element, so the result is UNKNOWN only when all
    four pathways are UNKNOWN.
    """
    return max(uo, abs_scr, rel_scr, dialysis)


class Unit(enum.Enum):
    ML = "mL"
    MG_DL = "mg/dL"
    UMOL_L = "umol/L"
    ML_KG_H = "mL/kg/h"
    ML_MIN = "mL/min"
    KG = "kg"
    CM = "cm"
    YEARS = "years"


class Sex(enum.Enum):
    FEMALE = "f"
    MALE = "m"


class Signal(enum.Enum):
    URINE_OUTPUT = "urine_output"
    CREATININE = "creatinine"
    DIALYSIS = "dialysis"


def round_div(num: int, den: int) -> int:
    """Integer division rounded half away from zero.  ``den`` must be positive."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((2 * -num + den) // (2 * den))


@dataclass(frozen=True)
class Quantity:
    """A measurement: ``raw`` micro-units of ``unit``.

    ``raw`` is exact; construction from text goes through ``Decimal`` so that
    e.g. ``"0.3"`` becomes exactly 300000 micro-units with no binary-float
    detour.  Inputs with more than six decimal places are rounded half up to
    the micro-unit grid.
    """

    raw: int
    unit: Unit

    def __post_init__(self) -> None:
        if not isinstance(self.raw, int) or isinstance(self.raw, bool):
            raise TypeError(f"raw must be int, got {type(self.raw).__name__}")
        if not isinstance(self.unit, Unit):
            raise TypeError(f"unit must be Unit, got {self.unit!r}")

    @classmethod
    def parse(cls, text: str, unit: Unit) -> "Quantity":
        try:
            scaled = Decimal(text.strip()).scaleb(6)
        except InvalidOperation:
            raise ValueError(f"not a decimal number: {text!r}") from None
        raw = int(scaled.quantize(Decimal(1), rounding=ROUND_HALF_UP))
        return cls(raw, unit)

    @classmethod
    def of(cls, value: Union[int, str, float, Decimal], unit: Unit) -> "Quantity":
        """Convenience constructor for literals in code and tests."""
        if isinstance(value, int) and not isinstance(value, bool):
            return cls(value * MICRO, unit)
        return cls.parse(str(value), unit)

    @property
    def value(self) -> float:
        """Float view, for display and plotting only."""
        return self.raw / MICRO

    def decimal(self) -> Decimal:
        return Decimal(self.raw).scaleb(-6)

    def __str__(self) -> str:
        sign = "-" if self.raw < 0 else ""
        whole, frac = divmod(abs(self.raw), MICRO)
        if frac == 0:
            return f"{sign}{whole}"
        return f"{sign}{whole}.{frac:06d}".rstrip("0")

    def __format__(self, spec: str) -> str:
        if spec:
            return format(self.value, spec)
        return str(self)


_CONVERSION_FACTORS = {
    # creatinine: 88.4 umol/L == 1 mg/dL, expressed as exact integer ratios
    (Unit.UMOL_L, Unit.MG_DL): (10, 884),
    (Unit.MG_DL, Unit.UMOL_L): (884, 10),
}


def convert_unit(q: Quantity, target: Unit) -> Quantity:
    """Convert ``q`` to ``target`` exactly in fixed point.

    Only the creatinine pair umol/L <-> mg/dL is defined (plus identity);
    anything else raises UndefinedConversion.
    """
    if q.unit is target:
        return q
    try:
        num, den = _CONVERSION_FACTORS[(q.unit, target)]
    except KeyError:
        raise UndefinedConversion(
            f"no conversion from {q.unit.value} to {target.value}"
        ) from None
    return Quantity(round_div(q.raw * num, den), target)


def truncate_to_hour(ts: datetime) -> datetime:
    return ts.replace(minute=0, second=0, microsecond=0)


ObservationValue = Union[Quantity, bool]
Point = Tuple[datetime, ObservationValue]


@dataclass(frozen=True)
class ObservationSeries:
    """Raw timestamped measurements of one signal for one subject.

    Timestamps are timezone-naive wall-clock datetimes, strictly increasing.
    Urine output is a per-interval volume in mL (>= 0), creatinine a
    concentration in mg/dL (> 0), dialysis a boolean flag.
    """

    subject_id: str
    signal: Signal
    points: Tuple[Point, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError(f"{self.subject_id}/{self.signal.value}: empty series")
        prev: Optional[datetime] = None
        for ts, value in self.points:
            if ts.tzinfo is not None:
                raise ValueError(f"{self.subject_id}/{self.signal.value}: timezone-aware timestamp {ts}")
            if prev is not None and ts <= prev:
                raise ValueError(
                    f"{self.subject_id}/{self.signal.value}: timestamps not strictly increasing at {ts}"
                )
            prev = ts
            self._check_value(ts, value)

    def _check_value(self, ts: datetime, value: ObservationValue) -> None:
        label = f"{self.subject_id}/{self.signal.value}@{ts}"
        if self.signal is Signal.DIALYSIS:
            if not isinstance(value, bool):
                raise ValueError(f"{label}: dialysis value must be boolean")
        elif self.signal is Signal.URINE_OUTPUT:
            if not isinstance(value, Quantity) or value.unit is not Unit.ML:
                raise ValueError(f"{label}: urine output must be a Quantity in mL")
            if value.raw < 0:
                raise ValueError(f"{label}: urine output must be >= 0")
        else:
            if not isinstance(value, Quantity) or value.unit is not Unit.MG_DL:
                raise ValueError(f"{label}: creatinine must be a Quantity in mg/dL")
            if value.raw <= 0:
                raise ValueError(f"{label}: creatinine must be > 0")

    @property
    def first_time(self) -> datetime:
        return self.points[0][0]

    @property
    def last_time(self) -> datetime:
        return self.points[-1][0]


@dataclass(frozen=True)
class PatientProfile:
    """Demographics for weight-normalized rates and creatinine back-calculation.

    Weight is required; height, age, and sex are optional but become
    mandatory for specific baseline methods.  Ages below 18 are rejected:
    the pediatric stage-3 criterion is out of scope.
    """

    subject_id: str
    weight: Quantity
    height: Optional[Quantity] = None
    age: Optional[Quantity] = None
    sex: Optional[Sex] = None

    def __post_init__(self) -> None:
        if self.weight.unit is not Unit.KG or self.weight.raw <= 0:
            raise ValueError(f"{self.subject_id}: weight must be a positive Quantity in kg")
        if self.height is not None and (self.height.unit is not Unit.CM or self.height.raw <= 0):
            raise ValueError(f"{self.subject_id}: height must be a positive Quantity in cm")
        if self.age is not None:
            if self.age.unit is not Unit.YEARS:
                raise ValueError(f"{self.subject_id}: age must be a Quantity in years")
            if not (18 * MICRO <= self.age.raw <= 130 * MICRO):
                raise ValueError(f"{self.subject_id}: age must be within [18, 130] years")


@dataclass(frozen=True)
class HourCell:
    """One hour of the regular grid; None marks a missing value."""

    uo_ml: Optional[Quantity] = None
    uo_rate: Optional[Quantity] = None
    scr: Optional[Quantity] = None
    dialysis_active: Optional[bool] = None


@dataclass(frozen=True)
class HourlyGrid:
    """Contiguous hourly cells for one subject, starting on an hour boundary."""

    subject_id: str
    start: datetime
    cells: Tuple[HourCell, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError(f"{self.subject_id}: empty grid")
        if self.start != truncate_to_hour(self.start):
            raise ValueError(f"{self.subject_id}: grid start {self.start} not on an hour boundary")

    def __len__(self) -> int:
        return len(self.cells)

    def hour_at(self, t: int) -> datetime:
        return self.start + timedelta(hours=t)

    def uo_rate_raws(self) -> list:
        return [c.uo_rate.raw if c.uo_rate is not None else None for c in self.cells]

    def scr_raws(self) -> list:
        return [c.scr.raw if c.scr is not None else None for c in self.cells]

    def dialysis_flags(self) -> list:
        return [c.dialysis_active for c in self.cells]


@dataclass(frozen=True)
class StageRecord:
    """Stages of every pathway for one subject-hour, plus the baselines used.

    The overall stage is derived, never stored independently: construction
    re-checks that it equals the merge of the four pathway stages.
    """

    subject_id: str
    timestamp: datetime
    uo_stage: Stage
    abs_scr_stage: Stage
    rel_scr_stage: Stage
    dialysis_stage: Stage
    overall_stage: Stage
    baseline_rel: Optional[Quantity] = None
    baseline_abs: Optional[Quantity] = None

    def __post_init__(self) -> None:
        expected = merge_stages(
            self.uo_stage, self.abs_scr_stage, self.rel_scr_stage, self.dialysis_stage
        )
        if self.overall_stage is not expected:
            raise ValueError(
                f"{self.subject_id}@{self.timestamp}: overall stage {self.overall_stage} "
                f"does not equal merged pathway maximum {expected}"
            )

    def stage_of(self, category: str) -> Stage:
        return {
            "uo": self.uo_stage,
            "abs_scr": self.abs_scr_stage,
            "rel_scr": self.rel_scr_stage,
            "dialysis": self.dialysis_stage,
            "overall": self.overall_stage,
        }[category]
