"""
Exact quantities and stage merging
==================================

Every measurement in the engine is a fixed-point integer count of
micro-units, so values like 0.3 mg/dL sit exactly on their threshold and
comparisons never drift with platform float behavior.
"""

from akistage import Quantity, Stage, Unit, convert_unit, merge_stages

############################################################
# Quantities parse from decimal text without a float detour

scr = Quantity.parse("1.3", Unit.MG_DL)
print("parsed:", scr, "-> raw micro-units:", scr.raw)

############################################################
# Creatinine reported in umol/L converts once, at ingest, with the exact
# 88.4 factor

reported = Quantity.parse("176.8", Unit.UMOL_L)
print(reported, reported.unit.value, "=", convert_unit(reported, Unit.MG_DL), "mg/dL")

############################################################
# A fresh creatinine rise of exactly 0.3 mg/dL is stage 1; one micro-unit
# less is stage 0 -- the comparison is integer equality, not epsilon math

baseline = Quantity.parse("1.0", Unit.MG_DL)
for text in ("1.299999", "1.3", "1.300001"):
    value = Quantity.parse(text, Unit.MG_DL)
    rise = value.raw - baseline.raw
    fires = rise >= Quantity.parse("0.3", Unit.MG_DL).raw
    print(f"rise to {value}: stage 1 fires -> {fires}")

############################################################
# The overall hourly stage is the maximum over the four pathways; UNKNOWN
# sorts lowest, so one evaluable pathway is enough to stage the hour

print(merge_stages(Stage.STAGE_1, Stage.NONE, Stage.STAGE_3, Stage.NONE))
print(merge_stages(Stage.UNKNOWN, Stage.UNKNOWN, Stage.STAGE_1, Stage.UNKNOWN))
print(merge_stages(Stage.UNKNOWN, Stage.UNKNOWN, Stage.UNKNOWN, Stage.UNKNOWN))
