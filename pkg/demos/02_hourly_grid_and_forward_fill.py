"""
Gridding raw observations onto hourly cells
===========================================

Real charting is irregular: urine is logged whenever the bag is emptied,
creatinine whenever blood is drawn.  The engine truncates timestamps to the
hour, sums urine volumes within an hour, keeps the last creatinine of the
hour, and optionally forward-fills short gaps.
"""

from datetime import datetime

from akistage import (
    ObservationSeries,
    PatientProfile,
    Quantity,
    Signal,
    Unit,
    build_subject_grid,
    forward_fill,
)

profile = PatientProfile("demo", Quantity.of(80, Unit.KG))

############################################################
# Two bag volumes inside 10:00-11:00 sum to one hourly amount, and the
# weight-normalized rate comes out exact: 80 mL / 80 kg = 1.0 mL/kg/h

urine = ObservationSeries(
    "demo",
    Signal.URINE_OUTPUT,
    (
        (datetime(2023, 5, 1, 10, 15), Quantity.of(50, Unit.ML)),
        (datetime(2023, 5, 1, 10, 45), Quantity.of(30, Unit.ML)),
        (datetime(2023, 5, 1, 13, 5), Quantity.of(40, Unit.ML)),
    ),
)

############################################################
# Creatinine measured at 10:30 and again at 15:10: the hours in between
# have no observation yet

creatinine = ObservationSeries(
    "demo",
    Signal.CREATININE,
    (
        (datetime(2023, 5, 1, 10, 30), Quantity.of("1.1", Unit.MG_DL)),
        (datetime(2023, 5, 1, 15, 10), Quantity.of("1.4", Unit.MG_DL)),
    ),
)

grid = build_subject_grid(
    {Signal.URINE_OUTPUT: urine, Signal.CREATININE: creatinine}, profile
)
print("grid spans", len(grid), "hours from", grid.start)
for t, cell in enumerate(grid.cells):
    print(f"  {grid.hour_at(t):%H:%M}  uo={cell.uo_ml}  rate={cell.uo_rate}  scr={cell.scr}")

############################################################
# Forward filling copies the last observed value across gaps of at most
# max_gap_hours; the 4-hour creatinine gap fills, and refilling is a no-op

filled = forward_fill(grid, max_gap_hours=5)
print("\nafter forward fill (max gap 5 h):")
print("  scr column:", [str(c.scr) if c.scr else None for c in filled.cells])
refilled = forward_fill(filled, max_gap_hours=5)
print("  idempotent:", refilled.cells == filled.cells)
