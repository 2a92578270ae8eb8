"""The four per-hour staging pathways.

Urine output stages on weight-normalized rates: below 0.5 mL/kg/h for 6
hours is stage 1 and for 12 hours stage 2; below 0.3 mL/kg/h for 24 hours or
anuria for 12 hours is stage 3.  Creatinine stages either on the absolute
rise over a baseline (>= 0.3 mg/dL, or >= 4.0 mg/dL outright) or on the
ratio to a baseline (1.5x / 2x / 3x, read as half-open bands so every ratio
maps to exactly one stage).  Any active dialysis is stage 3.

All comparisons are exact integer comparisons on micro-unit raws; ratio
thresholds are cross-multiplied rather than divided.  Hours whose required
input is missing produce UNKNOWN, and a missing rate breaks an oliguria run
rather than bridging it: the alternative would stage on unobserved data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from .baseline import BaselineMethod, WindowStat, baseline_at
from .core import HourlyGrid, PatientProfile, Quantity, Stage, Unit

RATE_LOW_RAW = 500_000  # 0.5 mL/kg/h
RATE_VERY_LOW_RAW = 300_000  # 0.3 mL/kg/h
SCR_ABS_RISE_RAW = 300_000  # 0.3 mg/dL over baseline
SCR_STAGE3_RAW = 4_000_000  # 4.0 mg/dL, irrespective of baseline

HOURS_STAGE1 = 6
HOURS_STAGE2 = 12
HOURS_ANURIA = 12
HOURS_VERY_LOW = 24


class UoMode(enum.Enum):
    STRICT_CONSECUTIVE = "strict-consecutive"
    TRAILING_MEAN = "trailing-mean"


def _default_rel_baseline() -> BaselineMethod:
    return BaselineMethod.rolling_window(WindowStat.MIN, 168)


def _default_abs_baseline() -> BaselineMethod:
    return BaselineMethod.rolling_window(WindowStat.MIN, 48)


@dataclass(frozen=True)
class ProbeConfig:
    """Staging knobs; defaults reproduce the validation-study configuration
    (rolling 7-day minimum for the relative baseline, rolling 48-hour minimum
    for the absolute one, strict consecutive-hour urine evaluation, strict
    anuria at exactly zero output)."""

    uo_mode: UoMode = UoMode.STRICT_CONSECUTIVE
    anuria_threshold: Quantity = Quantity(0, Unit.ML_KG_H)
    rel_baseline: BaselineMethod = field(default_factory=_default_rel_baseline)
    abs_baseline: BaselineMethod = field(default_factory=_default_abs_baseline)

    def __post_init__(self) -> None:
        if self.anuria_threshold.unit is not Unit.ML_KG_H:
            raise ValueError("anuria_threshold must be in mL/kg/h")
        if not 0 <= self.anuria_threshold.raw < RATE_VERY_LOW_RAW:
            raise ValueError("anuria_threshold must be in [0, 0.3) mL/kg/h")


def uo_stage_series(grid: HourlyGrid, cfg: ProbeConfig) -> List[Stage]:
    """Urine-output stages for every hour, one forward pass.

    Strict mode tracks the consecutive-hour runs below each threshold ending
    at the current hour.  Trailing-mean mode applies the same thresholds to
    window means over the last 24/12/6 hours (anuria still by consecutive
    run); a window only counts when it lies fully inside the grid with every
    rate present.  A missing rate yields UNKNOWN and resets all runs.
    """
    rates = grid.uo_rate_raws()
    anuria_raw = cfg.anuria_threshold.raw
    out: List[Stage] = []
    if cfg.uo_mode is UoMode.STRICT_CONSECUTIVE:
        n05 = n03 = na = 0
        for raw in rates:
            if raw is None:
                n05 = n03 = na = 0
                out.append(Stage.UNKNOWN)
                continue
            n05 = n05 + 1 if raw < RATE_LOW_RAW else 0
            n03 = n03 + 1 if raw < RATE_VERY_LOW_RAW else 0
            na = na + 1 if raw <= anuria_raw else 0
            if n03 >= HOURS_VERY_LOW or na >= HOURS_ANURIA:
                out.append(Stage.STAGE_3)
            elif n05 >= HOURS_STAGE2:
                out.append(Stage.STAGE_2)
            elif n05 >= HOURS_STAGE1:
                out.append(Stage.STAGE_1)
            else:
                out.append(Stage.NONE)
    else:
        prefix = [0]
        for raw in rates:
            prefix.append(prefix[-1] + (raw if raw is not None else 0))
        present_run = 0
        na = 0
        for t, raw in enumerate(rates):
            if raw is None:
                present_run = 0
                na = 0
                out.append(Stage.UNKNOWN)
                continue
            present_run += 1
            na = na + 1 if raw <= anuria_raw else 0

            def mean_below(width: int, threshold_raw: int) -> bool:
                if present_run < width:
                    return False
                return prefix[t + 1] - prefix[t + 1 - width] < threshold_raw * width

            if mean_below(HOURS_VERY_LOW, RATE_VERY_LOW_RAW) or na >= HOURS_ANURIA:
                out.append(Stage.STAGE_3)
            elif mean_below(HOURS_STAGE2, RATE_LOW_RAW):
                out.append(Stage.STAGE_2)
            elif mean_below(HOURS_STAGE1, RATE_LOW_RAW):
                out.append(Stage.STAGE_1)
            else:
                out.append(Stage.NONE)
    return out


def uo_stage(grid: HourlyGrid, t: int, cfg: ProbeConfig) -> Stage:
    """Urine-output stage for hour ``t``; depends only on hours <= t."""
    if not 0 <= t < len(grid):
        raise IndexError(f"hour index {t} outside grid of {len(grid)} hours")
    return uo_stage_series(grid, cfg)[t]


def classify_abs(scr_raw: Optional[int], baseline_raw: Optional[int]) -> Stage:
    """Absolute-elevation pathway on raw micro-mg/dL values."""
    if scr_raw is None:
        return Stage.UNKNOWN
    if scr_raw >= SCR_STAGE3_RAW:
        return Stage.STAGE_3
    if baseline_raw is None:
        return Stage.UNKNOWN
    if scr_raw - baseline_raw >= SCR_ABS_RISE_RAW:
        return Stage.STAGE_1
    return Stage.NONE


def classify_rel(scr_raw: Optional[int], baseline_raw: Optional[int]) -> Stage:
    """Fold-increase pathway; bands [1.5, 2), [2, 3), [3, inf) over baseline."""
    if scr_raw is None or baseline_raw is None:
        return Stage.UNKNOWN
    if scr_raw >= 3 * baseline_raw:
        return Stage.STAGE_3
    if scr_raw >= 2 * baseline_raw:
        return Stage.STAGE_2
    if 2 * scr_raw >= 3 * baseline_raw:
        return Stage.STAGE_1
    return Stage.NONE


def abs_scr_stage(
    grid: HourlyGrid, t: int, cfg: ProbeConfig, profile: PatientProfile
) -> Stage:
    """Stage by absolute creatinine elevation over cfg.abs_baseline.

    A creatinine of 4.0 mg/dL or more is stage 3 with no baseline needed;
    otherwise a known baseline is required and a rise of 0.3 mg/dL or more
    is stage 1.
    """
    b = baseline_at(grid, t, cfg.abs_baseline, profile)
    scr = grid.cells[t].scr
    return classify_abs(
        scr.raw if scr is not None else None, b.raw if b is not None else None
    )


def rel_scr_stage(
    grid: HourlyGrid, t: int, cfg: ProbeConfig, profile: PatientProfile
) -> Stage:
    """Stage by fold increase of creatinine over cfg.rel_baseline."""
    b = baseline_at(grid, t, cfg.rel_baseline, profile)
    scr = grid.cells[t].scr
    return classify_rel(
        scr.raw if scr is not None else None, b.raw if b is not None else None
    )


def abs_scr_stage_series(
    grid: HourlyGrid, baselines: Sequence[Optional[Quantity]]
) -> List[Stage]:
    scr = grid.scr_raws()
    return [
        classify_abs(scr[t], baselines[t].raw if baselines[t] is not None else None)
        for t in range(len(grid))
    ]


def rel_scr_stage_series(
    grid: HourlyGrid, baselines: Sequence[Optional[Quantity]]
) -> List[Stage]:
    scr = grid.scr_raws()
    return [
        classify_rel(scr[t], baselines[t].raw if baselines[t] is not None else None)
        for t in range(len(grid))
    ]


def dialysis_stage(grid: HourlyGrid, t: int) -> Stage:
    """Active dialysis is stage 3; inactive is 0; missing is UNKNOWN."""
    flag = grid.cells[t].dialysis_active
    if flag is None:
        return Stage.UNKNOWN
    return Stage.STAGE_3 if flag else Stage.NONE


def dialysis_stage_series(grid: HourlyGrid) -> List[Stage]:
    return [dialysis_stage(grid, t) for t in range(len(grid))]
