"""Regularize raw observations onto the hourly grid.

Timestamps are truncated to the hour.  Within one hour, urine output is
summed (a volume is additive), creatinine keeps the last value (a point
measurement), and dialysis is true if any observation in the hour is true.
Gap-limited forward filling is separate and optional: callers who pre-grid
their own data can skip it entirely.
"""

from __future__ import annotations

from datetime import datetime, timedelta
from typing import Mapping, Optional, Tuple

from .core import (
    MICRO,
    HourCell,
    HourlyGrid,
    ObservationSeries,
    PatientProfile,
    Quantity,
    Signal,
    StagingError,
    Unit,
    round_div,
    truncate_to_hour,
)


class EmptySeries(StagingError):
    """Resampling was asked to grid a series with no observations."""


def _span_hours(start: datetime, end: datetime) -> int:
    return int((end - start) // timedelta(hours=1)) + 1


def _hourly_uo(series: ObservationSeries, start: datetime, n: int) -> list:
    """Sum of urine volume per hour, raw micro-mL; None where no observation."""
    sums: list = [None] * n
    for ts, value in series.points:
        idx = int((truncate_to_hour(ts) - start) // timedelta(hours=1))
        sums[idx] = value.raw if sums[idx] is None else sums[idx] + value.raw
    return sums


def _hourly_scr(series: ObservationSeries, start: datetime, n: int) -> list:
    """Last creatinine value per hour, raw micro-mg/dL."""
    vals: list = [None] * n
    for ts, value in series.points:
        idx = int((truncate_to_hour(ts) - start) // timedelta(hours=1))
        vals[idx] = value.raw
    return vals


def _hourly_dialysis(series: ObservationSeries, start: datetime, n: int) -> list:
    """Any-true per hour."""
    flags: list = [None] * n
    for ts, value in series.points:
        idx = int((truncate_to_hour(ts) - start) // timedelta(hours=1))
        flags[idx] = bool(flags[idx]) or value
    return flags


def uo_rate_raw(uo_ml_raw: int, weight: Quantity) -> int:
    """Weight-normalized rate in micro-mL/kg/h from a micro-mL hourly volume."""
    return round_div(uo_ml_raw * MICRO, weight.raw)


def _cells_from_columns(
    n: int,
    weight: Quantity,
    uo: Optional[list] = None,
    scr: Optional[list] = None,
    dialysis: Optional[list] = None,
) -> Tuple[HourCell, ...]:
    cells = []
    for t in range(n):
        uo_raw = uo[t] if uo is not None else None
        cells.append(
            HourCell(
                uo_ml=Quantity(uo_raw, Unit.ML) if uo_raw is not None else None,
                uo_rate=Quantity(uo_rate_raw(uo_raw, weight), Unit.ML_KG_H)
                if uo_raw is not None
                else None,
                scr=Quantity(scr[t], Unit.MG_DL) if scr is not None and scr[t] is not None else None,
                dialysis_active=dialysis[t] if dialysis is not None else None,
            )
        )
    return tuple(cells)


def resample_hourly(series: ObservationSeries, profile: PatientProfile) -> HourlyGrid:
    """Grid a single signal: one cell per hour from floor(first) to floor(last).

    Only the fields of the series' own signal are populated; the others stay
    missing.  Urine-output cells also carry the weight-normalized rate.
    """
    if not series.points:
        raise EmptySeries(f"{series.subject_id}/{series.signal.value}")
    start = truncate_to_hour(series.first_time)
    n = _span_hours(start, truncate_to_hour(series.last_time))
    if series.signal is Signal.URINE_OUTPUT:
        cells = _cells_from_columns(n, profile.weight, uo=_hourly_uo(series, start, n))
    elif series.signal is Signal.CREATININE:
        cells = _cells_from_columns(n, profile.weight, scr=_hourly_scr(series, start, n))
    else:
        cells = _cells_from_columns(n, profile.weight, dialysis=_hourly_dialysis(series, start, n))
    return HourlyGrid(series.subject_id, start, cells)


def build_subject_grid(
    series_by_signal: Mapping[Signal, ObservationSeries], profile: PatientProfile
) -> HourlyGrid:
    """Union grid across all of a subject's signals.

    The span runs from the earliest to the latest observation over every
    signal; a signal contributes values only inside its own observed range,
    so pathways without data in an hour stay missing rather than shrinking
    the annotated span.
    """
    if not series_by_signal:
        raise EmptySeries(profile.subject_id)
    start = truncate_to_hour(min(s.first_time for s in series_by_signal.values()))
    end = truncate_to_hour(max(s.last_time for s in series_by_signal.values()))
    n = _span_hours(start, end)
    uo = scr = dialysis = None
    for signal, series in series_by_signal.items():
        if signal is Signal.URINE_OUTPUT:
            uo = _hourly_uo(series, start, n)
        elif signal is Signal.CREATININE:
            scr = _hourly_scr(series, start, n)
        else:
            dialysis = _hourly_dialysis(series, start, n)
    return HourlyGrid(
        profile.subject_id, start, _cells_from_columns(n, profile.weight, uo, scr, dialysis)
    )


def _fill_column(values: list, max_gap_hours: int) -> list:
    """Fill missing runs of length <= max_gap_hours with the preceding value.

    Leading runs have no preceding value and stay missing; runs longer than
    the limit stay missing in full (no partial fill).
    """
    out = list(values)
    n = len(out)
    i = 0
    while i < n:
        if out[i] is not None:
            i += 1
            continue
        j = i
        while j < n and out[j] is None:
            j += 1
        if i > 0 and (j - i) <= max_gap_hours:
            for k in range(i, j):
                out[k] = out[i - 1]
        i = j
    return out


def forward_fill(grid: HourlyGrid, max_gap_hours: int) -> HourlyGrid:
    """Gap-limited forward fill, each signal independently.

    Creatinine and dialysis copy the last present value; urine output copies
    the last observed hourly amount (and its rate: weight is constant, so the
    rate of a copied volume equals the copied rate).  max_gap_hours = 0 is
    the identity.
    """
    if max_gap_hours < 0:
        raise ValueError("max_gap_hours must be >= 0")
    if max_gap_hours == 0:
        return grid
    uo = _fill_column([c.uo_ml for c in grid.cells], max_gap_hours)
    rate = _fill_column([c.uo_rate for c in grid.cells], max_gap_hours)
    scr = _fill_column([c.scr for c in grid.cells], max_gap_hours)
    dialysis = _fill_column([c.dialysis_active for c in grid.cells], max_gap_hours)
    cells = tuple(
        HourCell(uo_ml=uo[t], uo_rate=rate[t], scr=scr[t], dialysis_active=dialysis[t])
        for t in range(len(grid))
    )
    return HourlyGrid(grid.subject_id, grid.start, cells)
