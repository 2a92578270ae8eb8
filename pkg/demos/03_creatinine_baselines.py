"""
Choosing a creatinine baseline
==============================

Creatinine staging needs a reference value, and practice varies: a known
preoperative value, a statistic over the start of the stay, a rolling
look-back, or -- as a last resort -- a back-calculation from an assumed
filtration rate via the Cockcroft-Gault formula.
"""

from akistage import (
    BaselineMethod,
    PatientProfile,
    Quantity,
    Sex,
    Unit,
    WindowStat,
    adjusted_body_weight,
    baseline_at,
    baseline_series,
    cockcroft_gault_clearance,
    cockcroft_gault_scr,
)
from akistage.core import HourCell, HourlyGrid
from datetime import datetime

scr_values = ["1.0", "0.8", None, "1.2", "2.4", "2.6"]
grid = HourlyGrid(
    "demo",
    datetime(2023, 5, 1),
    tuple(
        HourCell(scr=Quantity.of(v, Unit.MG_DL) if v else None) for v in scr_values
    ),
)
profile = PatientProfile(
    "demo",
    Quantity.of(100, Unit.KG),
    height=Quantity.of("177.8", Unit.CM),
    age=Quantity.of(60, Unit.YEARS),
    sex=Sex.MALE,
)

############################################################
# A rolling window uses only hours strictly before the one being staged:
# the 2.4 at hour 4 is compared against the prior minimum, not itself

method = BaselineMethod.rolling_window(WindowStat.MIN, 168)
print("rolling 7-day minimum:")
for t, b in enumerate(baseline_series(grid, method, profile)):
    print(f"  hour {t}: scr={scr_values[t]}  baseline={b}")

############################################################
# An initial window is one constant per stay; a fixed value needs no data

initial = BaselineMethod.initial_window(WindowStat.MEAN, 2)
print("initial 2-hour mean:", baseline_at(grid, 5, initial, profile))
fixed = BaselineMethod.fixed_value(Quantity.of("0.9", Unit.MG_DL))
print("fixed preoperative value:", baseline_at(grid, 5, fixed, profile))

############################################################
# Cockcroft-Gault back-calculation under the default assumed clearance of
# 75 mL/min.  The 100 kg patient has a height on file, so the adjusted body
# weight enters the formula instead of the actual weight

print("adjusted body weight:", adjusted_body_weight(profile), "kg")
expected_scr = cockcroft_gault_scr(profile)
print("back-calculated creatinine:", expected_scr, "mg/dL")
print("clearance recovered from it:", cockcroft_gault_clearance(expected_scr, profile), "mL/min")
