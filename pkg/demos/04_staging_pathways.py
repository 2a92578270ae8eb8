"""
The four staging pathways, hour by hour
=======================================

A patient whose urine output collapses, whose creatinine then climbs, and
who finally needs dialysis walks through every pathway.  Each pathway is
staged independently per hour; the overall stage is their maximum.
"""

from datetime import datetime

from akistage import (
    ProbeConfig,
    Quantity,
    Unit,
    UoMode,
    brute_force_uo_oracle,
    uo_stage_series,
)
from akistage.core import HourCell, HourlyGrid
from akistage.probes import classify_abs, classify_rel

############################################################
# Urine output: six hours below 0.5 mL/kg/h is stage 1, twelve is stage 2,
# twelve hours of anuria is stage 3

rates = ["1.2"] * 4 + ["0.4"] * 14 + ["0"] * 12
grid = HourlyGrid(
    "demo",
    datetime(2023, 5, 1),
    tuple(HourCell(uo_rate=Quantity.of(r, Unit.ML_KG_H)) for r in rates),
)
cfg = ProbeConfig()
print("hour  rate   stage")
for t, stage in enumerate(uo_stage_series(grid, cfg)):
    print(f"{t:4d}  {rates[t]:>5}  {int(stage)}")

############################################################
# The same series through the deliberately naive reference implementation
# used by the validation harness -- always in exact agreement

oracle = brute_force_uo_oracle([c.uo_rate for c in grid.cells], cfg)
print("oracle agrees:", oracle == uo_stage_series(grid, cfg))

############################################################
# The trailing-mean mode stages on window averages instead of strictly
# consecutive hours, for compatibility with mean-based chart review

mean_cfg = ProbeConfig(uo_mode=UoMode.TRAILING_MEAN)
print("trailing-mean stages:", [int(s) for s in uo_stage_series(grid, mean_cfg)])

############################################################
# Creatinine pathways at a glance: absolute rise over baseline and fold
# increase, with the 4.0 mg/dL rule needing no baseline at all

b = Quantity.of("1.0", Unit.MG_DL).raw
for text in ("1.2", "1.3", "1.9", "2.0", "3.0", "4.0"):
    c = Quantity.of(text, Unit.MG_DL).raw
    print(
        f"scr {text}: absolute -> stage {int(classify_abs(c, b))}, "
        f"relative -> stage {int(classify_rel(c, b))}"
    )
print("scr 4.2 with no baseline:", int(classify_abs(Quantity.of('4.2', Unit.MG_DL).raw, None)))
