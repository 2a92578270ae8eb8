"""Per-hour serum-creatinine baselines.

Four strategies: a fixed known value, a statistic over a window at the start
of the stay, the same statistic over a rolling window of prior hours, and a
back-calculation from an assumed glomerular filtration rate via the
Cockcroft-Gault formula.  Rolling windows use only hours strictly before the
one being staged, so a fresh creatinine peak is never compared against
itself.

The Cockcroft-Gault pair

    clearance [mL/min] = (140 - age) * weight [kg] * (0.85 if female) / (72 * scr [mg/dL])
    scr [mg/dL]        = (140 - age) * weight [kg] * (0.85 if female) / (72 * clearance [mL/min])

are algebraic inverses; both are computed from a shared exact integer
numerator with a single rounding at the micro-unit boundary, and exact
Fraction-valued variants are provided for verification of the round trip.
When a height is on file, the weight term uses the adjusted body weight.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .core import (
    MICRO,
    HourlyGrid,
    PatientProfile,
    Quantity,
    Sex,
    StagingError,
    Unit,
    round_div,
)


class MissingDemographics(StagingError):
    """A baseline method needs a demographic field the profile lacks."""


DEFAULT_ASSUMED_GFR = Quantity(75 * MICRO, Unit.ML_MIN)

# Devine ideal-body-weight parameters: base weight by sex, 0.9 kg per cm of
# height above 152.4 cm, and a 0.4 default correction toward actual weight.
_IBW_BASE_RAW = {Sex.MALE: 50 * MICRO, Sex.FEMALE: 45_500_000}
_IBW_HEIGHT_PIVOT_RAW = 152_400_000
DEFAULT_ABW_CORRECTION_PERCENT = 40


class BaselineKind(enum.Enum):
    FIXED_VALUE = "fixed"
    INITIAL_WINDOW = "initial"
    ROLLING_WINDOW = "rolling"
    COCKCROFT_GAULT = "cockcroft-gault"


class WindowStat(enum.Enum):
    MIN = "min"
    MEAN = "mean"
    FIRST = "first"


@dataclass(frozen=True)
class BaselineMethod:
    """Baseline strategy selector; build via the classmethod constructors."""

    kind: BaselineKind
    stat: Optional[WindowStat] = None
    length_hours: Optional[int] = None
    value: Optional[Quantity] = None
    assumed_gfr: Optional[Quantity] = None

    def __post_init__(self) -> None:
        if self.kind is BaselineKind.FIXED_VALUE:
            if self.value is None or self.value.unit is not Unit.MG_DL or self.value.raw <= 0:
                raise ValueError("fixed baseline needs a positive mg/dL value")
        elif self.kind is BaselineKind.COCKCROFT_GAULT:
            if self.assumed_gfr is None or self.assumed_gfr.raw <= 0:
                raise ValueError("cockcroft-gault baseline needs a positive assumed GFR")
        else:
            if self.stat is None:
                raise ValueError(f"{self.kind.value} baseline needs a window statistic")
            if self.length_hours is None or self.length_hours < 1:
                raise ValueError(f"{self.kind.value} baseline needs length_hours >= 1")

    @classmethod
    def fixed_value(cls, value: Quantity) -> "BaselineMethod":
        return cls(BaselineKind.FIXED_VALUE, value=value)

    @classmethod
    def initial_window(cls, stat: WindowStat, length_hours: int) -> "BaselineMethod":
        return cls(BaselineKind.INITIAL_WINDOW, stat=stat, length_hours=length_hours)

    @classmethod
    def rolling_window(cls, stat: WindowStat, length_hours: int) -> "BaselineMethod":
        return cls(BaselineKind.ROLLING_WINDOW, stat=stat, length_hours=length_hours)

    @classmethod
    def cockcroft_gault(cls, assumed_gfr: Quantity = DEFAULT_ASSUMED_GFR) -> "BaselineMethod":
        return cls(BaselineKind.COCKCROFT_GAULT, assumed_gfr=assumed_gfr)

    @classmethod
    def parse(cls, spec: str) -> "BaselineMethod":
        """Parse a compact spec string.

        Formats: ``fixed:<mg/dL>``, ``initial:<stat>:<hours>``,
        ``rolling:<stat>:<hours>``, ``cockcroft-gault[:<gfr mL/min>]``.
        """
        parts = spec.strip().split(":")
        kind = parts[0].replace("_", "-").lower()
        try:
            if kind == "fixed" and len(parts) == 2:
                return cls.fixed_value(Quantity.parse(parts[1], Unit.MG_DL))
            if kind in ("initial", "rolling") and len(parts) == 3:
                stat = WindowStat(parts[1].lower())
                ctor = cls.initial_window if kind == "initial" else cls.rolling_window
                return ctor(stat, int(parts[2]))
            if kind == "cockcroft-gault" and len(parts) in (1, 2):
                gfr = DEFAULT_ASSUMED_GFR if len(parts) == 1 else Quantity.parse(parts[1], Unit.ML_MIN)
                return cls.cockcroft_gault(gfr)
        except (ValueError, KeyError):
            pass
        raise ValueError(f"not a baseline spec: {spec!r}")

    def describe(self) -> str:
        if self.kind is BaselineKind.FIXED_VALUE:
            return f"fixed:{self.value}"
        if self.kind is BaselineKind.COCKCROFT_GAULT:
            return f"cockcroft-gault:{self.assumed_gfr}"
        return f"{self.kind.value}:{self.stat.value}:{self.length_hours}"


def adjusted_body_weight(
    profile: PatientProfile, correction_percent: int = DEFAULT_ABW_CORRECTION_PERCENT
) -> Quantity:
    """Devine ideal body weight plus a fraction of the excess above it.

    Height and sex are required.  Heights at or below 152.4 cm use the bare
    sex-specific base weight; actual weight at or below ideal is returned
    unchanged (no downward adjustment).
    """
    if profile.height is None or profile.sex is None:
        raise MissingDemographics(
            f"{profile.subject_id}: adjusted body weight needs height and sex"
        )
    above = max(0, profile.height.raw - _IBW_HEIGHT_PIVOT_RAW)
    ibw_raw = _IBW_BASE_RAW[profile.sex] + round_div(9 * above, 10)
    excess = profile.weight.raw - ibw_raw
    if excess <= 0:
        return profile.weight
    return Quantity(ibw_raw + round_div(correction_percent * excess, 100), Unit.KG)


def _cg_weight(profile: PatientProfile) -> Quantity:
    return adjusted_body_weight(profile) if profile.height is not None else profile.weight


def _cg_numerator(profile: PatientProfile) -> int:
    """Shared Cockcroft-Gault numerator, scaled so that dividing by
    (72 * other_quantity.raw) yields the result in micro-units.

    Age enters in whole years (fractional ages truncated).
    """
    if profile.age is None or profile.sex is None:
        raise MissingDemographics(
            f"{profile.subject_id}: Cockcroft-Gault needs age, sex, and weight"
        )
    age_years = profile.age.raw // MICRO
    sex_pct = 85 if profile.sex is Sex.FEMALE else 100
    # (140 - age) * weight_raw * sex_pct spans micro-kg * percent; the extra
    # 10^4 makes numerator / (72 * raw) land exactly on the micro-unit grid.
    return (140 - age_years) * _cg_weight(profile).raw * sex_pct * 10_000


def cockcroft_gault_clearance(scr: Quantity, profile: PatientProfile) -> Quantity:
    """Estimated creatinine clearance in mL/min from a serum creatinine."""
    if scr.unit is not Unit.MG_DL or scr.raw <= 0:
        raise ValueError("scr must be a positive Quantity in mg/dL")
    return Quantity(round_div(_cg_numerator(profile), 72 * scr.raw), Unit.ML_MIN)


def cockcroft_gault_scr(
    profile: PatientProfile, assumed_gfr: Quantity = DEFAULT_ASSUMED_GFR
) -> Quantity:
    """Back-calculated serum creatinine under an assumed filtration rate."""
    if assumed_gfr.raw <= 0:
        raise ValueError("assumed_gfr must be positive")
    return Quantity(round_div(_cg_numerator(profile), 72 * assumed_gfr.raw), Unit.MG_DL)


def cockcroft_gault_scr_exact(
    profile: PatientProfile, assumed_gfr: Quantity = DEFAULT_ASSUMED_GFR
) -> Fraction:
    """Exact (unquantized) back-calculated creatinine, in mg/dL."""
    return Fraction(_cg_numerator(profile), 72 * assumed_gfr.raw * MICRO)


def cockcroft_gault_clearance_exact(scr: Fraction, profile: PatientProfile) -> Fraction:
    """Exact clearance in mL/min from an exact creatinine in mg/dL.

    Composed with ``cockcroft_gault_scr_exact`` this recovers the assumed
    filtration rate exactly; the quantized pair differs only by the final
    micro-unit roundings.
    """
    return Fraction(_cg_numerator(profile), MICRO**2) / (72 * scr)


def _window_stat(raws: Sequence[int], stat: WindowStat) -> int:
    if stat is WindowStat.MIN:
        return min(raws)
    if stat is WindowStat.MEAN:
        return round_div(sum(raws), len(raws))
    return raws[0]


def baseline_at(
    grid: HourlyGrid, t: int, method: BaselineMethod, profile: PatientProfile
) -> Optional[Quantity]:
    """Baseline creatinine for hour ``t``, or None when it cannot be known.

    Window methods scan the grid directly; ``baseline_series`` computes the
    same values incrementally and is preferred inside the pipeline.
    """
    if not 0 <= t < len(grid):
        raise IndexError(f"hour index {t} outside grid of {len(grid)} hours")
    if method.kind is BaselineKind.FIXED_VALUE:
        return method.value
    if method.kind is BaselineKind.COCKCROFT_GAULT:
        return cockcroft_gault_scr(profile, method.assumed_gfr)
    scr = grid.scr_raws()
    if method.kind is BaselineKind.INITIAL_WINDOW:
        window = scr[0 : method.length_hours]
    else:
        window = scr[max(0, t - method.length_hours) : t]
    present = [v for v in window if v is not None]
    if not present:
        return None
    return Quantity(_window_stat(present, method.stat), Unit.MG_DL)


def baseline_series(
    grid: HourlyGrid, method: BaselineMethod, profile: PatientProfile
) -> List[Optional[Quantity]]:
    """Baselines for every hour of the grid, computed in one pass.

    Rolling windows use a monotonic deque (min), a sliding sum (mean), or an
    index deque (first), so the whole series costs O(len(grid)).
    """
    n = len(grid)
    if method.kind is BaselineKind.FIXED_VALUE:
        return [method.value] * n
    if method.kind is BaselineKind.COCKCROFT_GAULT:
        return [cockcroft_gault_scr(profile, method.assumed_gfr)] * n
    scr = grid.scr_raws()
    length = method.length_hours
    if method.kind is BaselineKind.INITIAL_WINDOW:
        present = [v for v in scr[0:length] if v is not None]
        constant = Quantity(_window_stat(present, method.stat), Unit.MG_DL) if present else None
        return [constant] * n

    out: List[Optional[Quantity]] = []
    if method.stat is WindowStat.MIN:
        dq: deque = deque()  # (index, raw), raws increasing
        for t in range(n):
            i = t - 1
            if i >= 0 and scr[i] is not None:
                while dq and dq[-1][1] >= scr[i]:
                    dq.pop()
                dq.append((i, scr[i]))
            while dq and dq[0][0] < t - length:
                dq.popleft()
            out.append(Quantity(dq[0][1], Unit.MG_DL) if dq else None)
    elif method.stat is WindowStat.MEAN:
        total = 0
        count = 0
        for t in range(n):
            i = t - 1
            if i >= 0 and scr[i] is not None:
                total += scr[i]
                count += 1
            gone = t - 1 - length
            if gone >= 0 and scr[gone] is not None:
                total -= scr[gone]
                count -= 1
            out.append(Quantity(round_div(total, count), Unit.MG_DL) if count else None)
    else:
        idx: deque = deque()  # present indices, increasing
        for t in range(n):
            i = t - 1
            if i >= 0 and scr[i] is not None:
                idx.append(i)
            while idx and idx[0] < t - length:
                idx.popleft()
            out.append(Quantity(scr[idx[0]], Unit.MG_DL) if idx else None)
    return out
