#!/usr/bin/env python3
"""Build the bundled synthetic validation corpus and its gold labels.

Each subject is defined by per-hour columns below.  The input CSVs are
emitted in the engine's file formats; the gold labels are derived without
the engine's staging code: urine-output stages come from the brute-force
oracle, creatinine stages from literal window rescans in plain Fraction
arithmetic, dialysis stages are read off the flag.  Forward filling and
hourly gridding are reimplemented here as naive loops.

The outputs under tests/data/golden/ are committed; rerun this script only
when the corpus definition changes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from akistage import ProbeConfig, Quantity, Unit, brute_force_uo_oracle

START = datetime(2023, 3, 1)
MAX_GAP_HOURS = 5
REL_WINDOW = 168
ABS_WINDOW = 48
OUT_DIR = Path(__file__).resolve().parents[1] / "tests" / "data" / "golden"


@dataclass
class Subject:
    sid: str
    weight: int  # kg; integer so volume/weight rates stay exact in micro-units
    uo: List[Optional[str]]  # hourly volume in mL, None = not observed
    scr: List[Optional[str]]  # hourly mg/dL, None = not observed
    dialysis: List[Optional[bool]]
    # exercise sub-hourly aggregation: emit the volume as two in-hour rows
    split_uo_rows: bool = False
    # exercise last-in-hour reduction: emit a decoy value earlier in the hour
    shadow_scr_rows: bool = False


def build_corpus() -> List[Subject]:
    subjects = []

    # control: nothing abnormal anywhere, split urine rows
    subjects.append(
        Subject(
            sid="control",
            weight=80,
            uo=["80"] * 72,
            scr=["0.9"] * 72,
            dialysis=[False] * 72,
            split_uo_rows=True,
        )
    )

    # mild oliguria: one 8-hour run just below 0.5 mL/kg/h
    uo = ["80"] * 48
    for h in range(20, 28):
        uo[h] = "32"  # 0.4 mL/kg/h at 80 kg
    subjects.append(
        Subject(sid="oliguria_mild", weight=80, uo=uo, scr=["1.1"] * 48, dialysis=[False] * 48)
    )

    # severe oliguria: 30 hours at 0.25 mL/kg/h walks through stages 1, 2, 3
    uo = ["80"] * 60
    for h in range(10, 40):
        uo[h] = "20"
    subjects.append(
        Subject(sid="oliguria_severe", weight=80, uo=uo, scr=["1.0"] * 60, dialysis=[False] * 60)
    )

    # anuria: 16 hours of zero output
    uo = ["90"] * 40
    for h in range(5, 21):
        uo[h] = "0"
    subjects.append(
        Subject(sid="anuric", weight=60, uo=uo, scr=["0.8"] * 40, dialysis=[False] * 40)
    )

    # creatinine riser: absolute rise, each relative band, then the 4.0 rule
    levels = [
        ("1.0", range(0, 10)),
        ("1.35", range(10, 20)),
        ("1.6", range(20, 30)),
        ("2.2", range(30, 40)),
        ("3.1", range(40, 50)),
        ("4.1", range(50, 60)),
        ("1.0", range(60, 80)),
    ]
    scr = [None] * 80
    for value, hours in levels:
        for h in hours:
            scr[h] = value
    subjects.append(
        Subject(
            sid="scr_riser",
            weight=75,
            uo=["75"] * 80,
            scr=scr,
            dialysis=[False] * 80,
            shadow_scr_rows=True,
        )
    )

    # creatinine already at stage-3 level on admission, then recovery
    scr = ["4.2"] * 6 + ["1.0"] * 18
    subjects.append(
        Subject(sid="high_start", weight=90, uo=["90"] * 24, scr=scr, dialysis=[False] * 24)
    )

    # dialysis for four hours, everything else normal
    dialysis = [h in (12, 13, 14, 15) for h in range(30)]
    subjects.append(
        Subject(sid="dialysis_run", weight=70, uo=["70"] * 30, scr=["0.95"] * 30, dialysis=dialysis)
    )

    # sparse observations: short creatinine gaps fill, a 7-hour urine gap and
    # the post-hour-9 dialysis tail stay missing
    uo = ["65"] * 50
    for h in range(30, 37):
        uo[h] = None
    for h in range(37, 50):
        uo[h] = "26"  # 0.4 mL/kg/h at 65 kg
    scr = [("1.2" if h % 4 == 0 else None) for h in range(49)] + [None]
    dialysis = [False] * 10 + [None] * 40
    subjects.append(Subject(sid="gappy", weight=65, uo=uo, scr=scr, dialysis=dialysis))

    return subjects


def forward_fill(column, max_gap=MAX_GAP_HOURS):
    out = list(column)
    i, n = 0, len(out)
    while i < n:
        if out[i] is not None:
            i += 1
            continue
        j = i
        while j < n and out[j] is None:
            j += 1
        if i > 0 and (j - i) <= max_gap:
            out[i:j] = [out[i - 1]] * (j - i)
        i = j
    return out


def exact_rate(volume: str, weight: int) -> Quantity:
    raw = Fraction(volume) * 10**6 / weight
    assert raw.denominator == 1, f"rate {volume}/{weight} not exact in micro-units"
    return Quantity(int(raw), Unit.ML_KG_H)


def rel_stage(c: Optional[Fraction], b: Optional[Fraction]) -> str:
    if c is None or b is None:
        return ""
    ratio = c / b
    if ratio >= 3:
        return "3"
    if ratio >= 2:
        return "2"
    if ratio >= Fraction(3, 2):
        return "1"
    return "0"


def abs_stage(c: Optional[Fraction], b: Optional[Fraction]) -> str:
    if c is None:
        return ""
    if c >= 4:
        return "3"
    if b is None:
        return ""
    if c - b >= Fraction(3, 10):
        return "1"
    return "0"


def window_min(values, lo: int, hi: int) -> Optional[Fraction]:
    present = [v for v in values[max(0, lo) : hi] if v is not None]
    return min(present) if present else None


def dialysis_label(flag: Optional[bool]) -> str:
    if flag is None:
        return ""
    return "3" if flag else "0"


def overall_label(labels) -> str:
    known = [int(v) for v in labels if v != ""]
    return str(max(known)) if known else ""


def gold_rows(subject: Subject):
    uo_filled = forward_fill(subject.uo)
    scr_filled = forward_fill(subject.scr)
    dialysis_filled = forward_fill(subject.dialysis)

    rates = [None if v is None else exact_rate(v, subject.weight) for v in uo_filled]
    uo_labels = [s.label() for s in brute_force_uo_oracle(rates, ProbeConfig())]

    scr_fractions = [None if v is None else Fraction(v) for v in scr_filled]
    rows = []
    for t in range(len(subject.uo)):
        c = scr_fractions[t]
        rel = rel_stage(c, window_min(scr_fractions, t - REL_WINDOW, t))
        abs_ = abs_stage(c, window_min(scr_fractions, t - ABS_WINDOW, t))
        dial = dialysis_label(dialysis_filled[t])
        overall = overall_label([uo_labels[t], abs_, rel, dial])
        ts = (START + timedelta(hours=t)).isoformat()
        rows.append([subject.sid, ts, uo_labels[t], abs_, rel, dial, overall])
    return rows


def input_rows(subject: Subject):
    uo_rows, scr_rows, dialysis_rows = [], [], []
    for t, volume in enumerate(subject.uo):
        if volume is None:
            continue
        hour = START + timedelta(hours=t)
        if subject.split_uo_rows and Fraction(volume).denominator == 1 and int(volume) >= 2:
            part = int(volume) // 3
            uo_rows.append([subject.sid, (hour + timedelta(minutes=15)).isoformat(), str(part)])
            uo_rows.append(
                [subject.sid, (hour + timedelta(minutes=45)).isoformat(), str(int(volume) - part)]
            )
        else:
            uo_rows.append([subject.sid, hour.isoformat(), volume])
    for t, value in enumerate(subject.scr):
        if value is None:
            continue
        hour = START + timedelta(hours=t)
        if subject.shadow_scr_rows:
            scr_rows.append([subject.sid, (hour + timedelta(minutes=10)).isoformat(), "9.9"])
            scr_rows.append([subject.sid, (hour + timedelta(minutes=40)).isoformat(), value])
        else:
            scr_rows.append([subject.sid, hour.isoformat(), value])
    for t, flag in enumerate(subject.dialysis):
        if flag is None:
            continue
        ts = (START + timedelta(hours=t)).isoformat()
        dialysis_rows.append([subject.sid, ts, "1" if flag else "0"])
    return uo_rows, scr_rows, dialysis_rows


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    subjects = build_corpus()

    uo_rows, scr_rows, dialysis_rows, patient_rows, gold = [], [], [], [], []
    for subject in subjects:
        u, s, d = input_rows(subject)
        uo_rows.extend(u)
        scr_rows.extend(s)
        dialysis_rows.extend(d)
        patient_rows.append([subject.sid, str(subject.weight), "", "", ""])
        gold.extend(gold_rows(subject))

    write_csv(OUT_DIR / "urine_output.csv", ("subject_id", "timestamp", "urineoutput_ml"), uo_rows)
    write_csv(OUT_DIR / "creatinine.csv", ("subject_id", "timestamp", "creatinine"), scr_rows)
    write_csv(OUT_DIR / "dialysis.csv", ("subject_id", "timestamp", "dialysis_active"), dialysis_rows)
    write_csv(
        OUT_DIR / "patients.csv",
        ("subject_id", "weight_kg", "height_cm", "age_years", "sex"),
        patient_rows,
    )
    gold.sort(key=lambda row: (row[0], row[1]))
    write_csv(
        OUT_DIR / "gold_labels.csv",
        (
            "subject_id",
            "timestamp",
            "uo_stage",
            "abs_scr_stage",
            "rel_scr_stage",
            "dialysis_stage",
            "overall_stage",
        ),
        gold,
    )
    hours = sum(len(s.uo) for s in subjects)
    print(f"wrote {len(subjects)} subjects, {hours} hours to {OUT_DIR}")


if __name__ == "__main__":
    main()
