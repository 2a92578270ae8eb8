"""Delimited-file ingest and output.

All files are header-first delimited text (comma by default) with ISO 8601
timestamps (``YYYY-MM-DDTHH:MM:SS``, timezone-naive).  Rows are parsed
streaming, one at a time; unsorted input is re-sorted per subject.  Unit
conversion (umol/L creatinine to mg/dL) happens exactly once, here.

Error taxonomy: SchemaError for a wrong column set, ParseError for an
unreadable field (with row number and field name), IntegrityError for data
that parses but violates the data model (duplicate keys, negative urine
output, non-positive creatinine, series without a patient profile) -- always
naming the subject, signal, and timestamp that triggered it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (
    ObservationSeries,
    PatientProfile,
    Quantity,
    Sex,
    Signal,
    StageRecord,
    StagingError,
    Unit,
    convert_unit,
)

URINE_COLUMNS = ("subject_id", "timestamp", "urineoutput_ml")
CREATININE_COLUMNS = ("subject_id", "timestamp", "creatinine")
DIALYSIS_COLUMNS = ("subject_id", "timestamp", "dialysis_active")
PATIENT_COLUMNS = ("subject_id", "weight_kg", "height_cm", "age_years", "sex")
STAGE_COLUMNS = (
    "subject_id",
    "timestamp",
    "uo_stage",
    "abs_scr_stage",
    "rel_scr_stage",
    "dialysis_stage",
    "overall_stage",
    "baseline_rel",
    "baseline_abs",
)
SUMMARY_COLUMNS = (
    "subject_id",
    "hours_observed",
    "first_aki_uo",
    "first_aki_abs_scr",
    "first_aki_rel_scr",
    "first_aki_dialysis",
    "first_aki_overall",
    "max_uo",
    "max_abs_scr",
    "max_rel_scr",
    "max_dialysis",
    "max_overall",
)

_TRUE_LITERALS = {"1", "true"}
_FALSE_LITERALS = {"0", "false"}


class SchemaError(StagingError):
    """A file's header does not match the expected column set."""


class ParseError(StagingError):
    """A field could not be parsed; names the file, row, and field."""


class IntegrityError(StagingError):
    """Parsed data violates the data model."""


@dataclass(frozen=True)
class DatasetBundle:
    """Validated in-memory dataset: profiles plus per-signal series."""

    profiles: Mapping[str, PatientProfile]
    series: Mapping[Tuple[str, Signal], ObservationSeries]

    def __post_init__(self) -> None:
        for (subject_id, signal), s in self.series.items():
            if subject_id not in self.profiles:
                raise IntegrityError(
                    f"series {subject_id}/{signal.value}@{s.first_time}: no patient profile"
                )

    def subject_ids(self) -> List[str]:
        """Subjects that have at least one observation, sorted."""
        return sorted({sid for sid, _ in self.series})

    def series_for(self, subject_id: str) -> Dict[Signal, ObservationSeries]:
        return {
            signal: s for (sid, signal), s in self.series.items() if sid == subject_id
        }


def _check_header(name: str, header: Sequence[str], expected: Sequence[str]) -> None:
    if tuple(h.strip() for h in header) != tuple(expected):
        missing = [c for c in expected if c not in header]
        extra = [c for c in header if c not in expected]
        raise SchemaError(
            f"{name}: expected columns {','.join(expected)}"
            + (f"; missing {missing}" if missing else "")
            + (f"; unexpected {extra}" if extra else "")
        )


def _parse_timestamp(name: str, row_no: int, text: str) -> datetime:
    try:
        ts = datetime.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(f"{name} row {row_no}: bad timestamp {text!r}") from None
    if ts.tzinfo is not None:
        raise ParseError(f"{name} row {row_no}: timestamp {text!r} must be timezone-naive")
    return ts


def _parse_quantity(name: str, row_no: int, field: str, text: str, unit: Unit) -> Quantity:
    try:
        return Quantity.parse(text, unit)
    except ValueError:
        raise ParseError(f"{name} row {row_no}: bad {field} {text!r}") from None


def _parse_dialysis_flag(name: str, row_no: int, text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in _TRUE_LITERALS:
        return True
    if lowered in _FALSE_LITERALS:
        return False
    raise ParseError(f"{name} row {row_no}: bad dialysis_active {text!r}")


def _iter_rows(path, name: str, columns: Sequence[str], delimiter: str):
    with open(path, "r", newline="") as f:
        reader = csv.reader(f, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{name}: file is empty (no header)") from None
        _check_header(name, header, columns)
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise ParseError(f"{name} row {row_no}: expected {len(columns)} fields, got {len(row)}")
            yield row_no, row


def _load_measurements(
    path,
    name: str,
    columns: Sequence[str],
    signal: Signal,
    delimiter: str,
    parse_value,
    check_value,
) -> Dict[str, list]:
    by_subject: Dict[str, list] = {}
    for row_no, row in _iter_rows(path, name, columns, delimiter):
        subject_id = row[0].strip()
        if not subject_id:
            raise ParseError(f"{name} row {row_no}: empty subject_id")
        ts = _parse_timestamp(name, row_no, row[1])
        value = parse_value(row_no, row[2])
        check_value(subject_id, ts, value)
        by_subject.setdefault(subject_id, []).append((ts, value))
    for subject_id, points in by_subject.items():
        points.sort(key=lambda p: p[0])
        for a, b in zip(points, points[1:]):
            if a[0] == b[0]:
                raise IntegrityError(
                    f"duplicate observation for {subject_id}/{signal.value}@{a[0].isoformat()}"
                )
    return by_subject


def _load_patients(path, delimiter: str) -> Dict[str, PatientProfile]:
    profiles: Dict[str, PatientProfile] = {}
    name = "patients_file"
    for row_no, row in _iter_rows(path, name, PATIENT_COLUMNS, delimiter):
        subject_id = row[0].strip()
        if not subject_id:
            raise ParseError(f"{name} row {row_no}: empty subject_id")
        if subject_id in profiles:
            raise IntegrityError(f"duplicate patient profile for {subject_id}")
        weight = _parse_quantity(name, row_no, "weight_kg", row[1], Unit.KG)
        height = (
            _parse_quantity(name, row_no, "height_cm", row[2], Unit.CM)
            if row[2].strip()
            else None
        )
        age = (
            _parse_quantity(name, row_no, "age_years", row[3], Unit.YEARS)
            if row[3].strip()
            else None
        )
        sex_text = row[4].strip().lower()
        if sex_text in ("f", "female"):
            sex = Sex.FEMALE
        elif sex_text in ("m", "male"):
            sex = Sex.MALE
        elif sex_text == "":
            sex = None
        else:
            raise ParseError(f"{name} row {row_no}: bad sex {row[4]!r}")
        try:
            profiles[subject_id] = PatientProfile(subject_id, weight, height, age, sex)
        except ValueError as exc:
            raise IntegrityError(f"{name} row {row_no}: {exc}") from None
    return profiles


def load_dataset(
    *,
    urine_output_file,
    creatinine_file,
    dialysis_file,
    patients_file,
    creatinine_unit: Unit = Unit.MG_DL,
    delimiter: str = ",",
) -> DatasetBundle:
    """Parse and validate the three measurement files and the patient table.

    Creatinine given in umol/L is converted to mg/dL here and nowhere else.
    Every observation series must have a matching patient profile.
    """
    if creatinine_unit not in (Unit.MG_DL, Unit.UMOL_L):
        raise ValueError("creatinine_unit must be mg/dL or umol/L")

    profiles = _load_patients(patients_file, delimiter)

    def check_uo(subject_id, ts, value):
        if value.raw < 0:
            raise IntegrityError(
                f"negative urine output for {subject_id}/urine_output@{ts.isoformat()}"
            )

    def check_scr(subject_id, ts, value):
        if value.raw <= 0:
            raise IntegrityError(
                f"non-positive creatinine for {subject_id}/creatinine@{ts.isoformat()}"
            )

    uo = _load_measurements(
        urine_output_file,
        "urine_output_file",
        URINE_COLUMNS,
        Signal.URINE_OUTPUT,
        delimiter,
        lambda row_no, text: _parse_quantity(
            "urine_output_file", row_no, "urineoutput_ml", text, Unit.ML
        ),
        check_uo,
    )
    scr = _load_measurements(
        creatinine_file,
        "creatinine_file",
        CREATININE_COLUMNS,
        Signal.CREATININE,
        delimiter,
        lambda row_no, text: convert_unit(
            _parse_quantity("creatinine_file", row_no, "creatinine", text, creatinine_unit),
            Unit.MG_DL,
        ),
        check_scr,
    )
    dialysis = _load_measurements(
        dialysis_file,
        "dialysis_file",
        DIALYSIS_COLUMNS,
        Signal.DIALYSIS,
        delimiter,
        lambda row_no, text: _parse_dialysis_flag("dialysis_file", row_no, text),
        lambda subject_id, ts, value: None,
    )

    series: Dict[Tuple[str, Signal], ObservationSeries] = {}
    for signal, table in (
        (Signal.URINE_OUTPUT, uo),
        (Signal.CREATININE, scr),
        (Signal.DIALYSIS, dialysis),
    ):
        for subject_id, points in table.items():
            if subject_id not in profiles:
                raise IntegrityError(
                    f"series {subject_id}/{signal.value}@{points[0][0].isoformat()}: "
                    "no patient profile"
                )
            series[(subject_id, signal)] = ObservationSeries(
                subject_id, signal, tuple(points)
            )
    return DatasetBundle(profiles=profiles, series=series)


def _quantity_field(q: Optional[Quantity]) -> str:
    return "" if q is None else str(q)


def write_stage_records(records: Sequence[StageRecord], path) -> None:
    """One row per subject-hour; UNKNOWN stages and missing baselines are
    empty fields.  Records must already be sorted by (subject_id, timestamp).
    """
    keys = [(r.subject_id, r.timestamp) for r in records]
    if keys != sorted(keys):
        raise ValueError("records must be sorted by (subject_id, timestamp)")
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(STAGE_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.subject_id,
                    r.timestamp.isoformat(),
                    r.uo_stage.label(),
                    r.abs_scr_stage.label(),
                    r.rel_scr_stage.label(),
                    r.dialysis_stage.label(),
                    r.overall_stage.label(),
                    _quantity_field(r.baseline_rel),
                    _quantity_field(r.baseline_abs),
                ]
            )


def write_summaries(summaries, path) -> None:
    """Per-patient summary rows; absent times and UNKNOWN maxima are empty."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            row = [s.subject_id, str(s.hours_observed)]
            for category in ("uo", "abs_scr", "rel_scr", "dialysis", "overall"):
                ts = s.first_aki_time[category]
                row.append(ts.isoformat() if ts is not None else "")
            for category in ("uo", "abs_scr", "rel_scr", "dialysis", "overall"):
                row.append(s.max_stage[category].label())
            writer.writerow(row)
