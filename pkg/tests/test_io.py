from datetime import datetime

import pytest

from akistage import (
    IntegrityError,
    ParseError,
    Quantity,
    SchemaError,
    Sex,
    Signal,
    Stage,
    StageRecord,
    Unit,
    load_dataset,
    load_labels,
    write_stage_records,
)

from conftest import T0


def write(path, text):
    path.write_text(text)
    return path


@pytest.fixture
def paths(tmp_path):
    """Minimal well-formed one-subject dataset."""
    return dict(
        urine_output_file=write(
            tmp_path / "uo.csv",
            "subject_id,timestamp,urineoutput_ml\n"
            "s1,2023-01-01T00:00:00,60\n"
            "s1,2023-01-01T01:00:00,55\n"
            "s1,2023-01-01T02:00:00,50\n",
        ),
        creatinine_file=write(
            tmp_path / "scr.csv",
            "subject_id,timestamp,creatinine\ns1,2023-01-01T00:30:00,1.2\n",
        ),
        dialysis_file=write(
            tmp_path / "dial.csv",
            "subject_id,timestamp,dialysis_active\ns1,2023-01-01T00:00:00,0\n",
        ),
        patients_file=write(
            tmp_path / "patients.csv",
            "subject_id,weight_kg,height_cm,age_years,sex\ns1,70,177.8,60,m\n",
        ),
    )


class TestLoadDataset:
    def test_happy_path(self, paths):
        bundle = load_dataset(**paths)
        series = bundle.series[("s1", Signal.URINE_OUTPUT)]
        assert len(series.points) == 3
        assert series.points[0][1] == Quantity.of(60, Unit.ML)
        profile = bundle.profiles["s1"]
        assert profile.weight == Quantity.of(70, Unit.KG)
        assert profile.sex is Sex.MALE
        assert bundle.subject_ids() == ["s1"]

    def test_umol_conversion_at_ingest(self, paths, tmp_path):
        paths["creatinine_file"] = write(
            tmp_path / "scr2.csv",
            "subject_id,timestamp,creatinine\ns1,2023-01-01T00:30:00,88.4\n",
        )
        bundle = load_dataset(**paths, creatinine_unit=Unit.UMOL_L)
        point = bundle.series[("s1", Signal.CREATININE)].points[0]
        assert point[1] == Quantity.of(1, Unit.MG_DL)

    def test_unsorted_rows_are_resorted(self, paths, tmp_path):
        paths["creatinine_file"] = write(
            tmp_path / "scr3.csv",
            "subject_id,timestamp,creatinine\n"
            "s1,2023-01-01T05:00:00,1.4\n"
            "s1,2023-01-01T01:00:00,1.1\n",
        )
        bundle = load_dataset(**paths)
        times = [ts for ts, _ in bundle.series[("s1", Signal.CREATININE)].points]
        assert times == sorted(times)

    def test_duplicate_key_is_integrity_error(self, paths, tmp_path):
        paths["creatinine_file"] = write(
            tmp_path / "scr4.csv",
            "subject_id,timestamp,creatinine\n"
            "s1,2023-01-01T01:00:00,1.1\n"
            "s1,2023-01-01T01:00:00,1.2\n",
        )
        with pytest.raises(IntegrityError) as exc:
            load_dataset(**paths)
        message = str(exc.value)
        assert "s1" in message and "creatinine" in message and "2023-01-01T01:00:00" in message

    def test_missing_column_is_schema_error(self, paths, tmp_path):
        paths["urine_output_file"] = write(
            tmp_path / "uo2.csv", "subject_id,timestamp\ns1,2023-01-01T00:00:00\n"
        )
        with pytest.raises(SchemaError, match="urineoutput_ml"):
            load_dataset(**paths)

    def test_extra_column_is_schema_error(self, paths, tmp_path):
        paths["dialysis_file"] = write(
            tmp_path / "d2.csv",
            "subject_id,timestamp,dialysis_active,extra\ns1,2023-01-01T00:00:00,0,x\n",
        )
        with pytest.raises(SchemaError, match="extra"):
            load_dataset(**paths)

    def test_empty_file_is_schema_error(self, paths, tmp_path):
        paths["patients_file"] = write(tmp_path / "p2.csv", "")
        with pytest.raises(SchemaError, match="empty"):
            load_dataset(**paths)

    def test_bad_number_is_parse_error_with_row(self, paths, tmp_path):
        paths["urine_output_file"] = write(
            tmp_path / "uo3.csv",
            "subject_id,timestamp,urineoutput_ml\n"
            "s1,2023-01-01T00:00:00,60\n"
            "s1,2023-01-01T01:00:00,sixty\n",
        )
        with pytest.raises(ParseError, match="row 3"):
            load_dataset(**paths)

    def test_bad_timestamp_is_parse_error(self, paths, tmp_path):
        paths["urine_output_file"] = write(
            tmp_path / "uo4.csv",
            "subject_id,timestamp,urineoutput_ml\ns1,yesterday,60\n",
        )
        with pytest.raises(ParseError, match="timestamp"):
            load_dataset(**paths)

    def test_timezone_aware_timestamp_rejected(self, paths, tmp_path):
        paths["urine_output_file"] = write(
            tmp_path / "uo5.csv",
            "subject_id,timestamp,urineoutput_ml\ns1,2023-01-01T00:00:00+01:00,60\n",
        )
        with pytest.raises(ParseError, match="timezone"):
            load_dataset(**paths)

    def test_negative_urine_is_integrity_error(self, paths, tmp_path):
        paths["urine_output_file"] = write(
            tmp_path / "uo6.csv",
            "subject_id,timestamp,urineoutput_ml\ns1,2023-01-01T00:00:00,-5\n",
        )
        with pytest.raises(IntegrityError) as exc:
            load_dataset(**paths)
        assert "s1" in str(exc.value) and "urine_output" in str(exc.value)

    def test_nonpositive_creatinine_is_integrity_error(self, paths, tmp_path):
        paths["creatinine_file"] = write(
            tmp_path / "scr5.csv",
            "subject_id,timestamp,creatinine\ns1,2023-01-01T00:00:00,0\n",
        )
        with pytest.raises(IntegrityError, match="non-positive creatinine"):
            load_dataset(**paths)

    def test_series_without_profile(self, paths, tmp_path):
        paths["urine_output_file"] = write(
            tmp_path / "uo7.csv",
            "subject_id,timestamp,urineoutput_ml\nghost,2023-01-01T00:00:00,60\n",
        )
        with pytest.raises(IntegrityError) as exc:
            load_dataset(**paths)
        message = str(exc.value)
        assert "ghost" in message and "urine_output" in message and "2023-01-01T00:00:00" in message

    def test_dialysis_literals(self, paths, tmp_path):
        paths["dialysis_file"] = write(
            tmp_path / "d3.csv",
            "subject_id,timestamp,dialysis_active\n"
            "s1,2023-01-01T00:00:00,0\n"
            "s1,2023-01-01T01:00:00,1\n"
            "s1,2023-01-01T02:00:00,true\n"
            "s1,2023-01-01T03:00:00,false\n"
            "s1,2023-01-01T04:00:00,True\n"
            "s1,2023-01-01T05:00:00,False\n",
        )
        bundle = load_dataset(**paths)
        flags = [v for _, v in bundle.series[("s1", Signal.DIALYSIS)].points]
        assert flags == [False, True, True, False, True, False]

    def test_bad_dialysis_literal(self, paths, tmp_path):
        paths["dialysis_file"] = write(
            tmp_path / "d4.csv",
            "subject_id,timestamp,dialysis_active\ns1,2023-01-01T00:00:00,yes\n",
        )
        with pytest.raises(ParseError, match="dialysis_active"):
            load_dataset(**paths)

    def test_duplicate_patient_row(self, paths, tmp_path):
        paths["patients_file"] = write(
            tmp_path / "p3.csv",
            "subject_id,weight_kg,height_cm,age_years,sex\ns1,70,,,\ns1,80,,,\n",
        )
        with pytest.raises(IntegrityError, match="duplicate patient"):
            load_dataset(**paths)

    def test_pediatric_age_rejected(self, paths, tmp_path):
        paths["patients_file"] = write(
            tmp_path / "p4.csv",
            "subject_id,weight_kg,height_cm,age_years,sex\ns1,70,,17,m\n",
        )
        with pytest.raises(IntegrityError, match="18"):
            load_dataset(**paths)

    def test_optional_fields_empty(self, paths, tmp_path):
        paths["patients_file"] = write(
            tmp_path / "p5.csv",
            "subject_id,weight_kg,height_cm,age_years,sex\ns1,70,,,\n",
        )
        profile = load_dataset(**paths).profiles["s1"]
        assert profile.height is None and profile.age is None and profile.sex is None

    def test_measurement_values_round_trip_exactly(self, paths):
        bundle = load_dataset(**paths)
        scr = bundle.series[("s1", Signal.CREATININE)].points[0][1]
        assert str(scr) == "1.2"
        uo = bundle.series[("s1", Signal.URINE_OUTPUT)].points[0][1]
        assert str(uo) == "60"


def record(
    subject_id="s1",
    timestamp=T0,
    uo=Stage.NONE,
    abs_scr=Stage.NONE,
    rel_scr=Stage.NONE,
    dialysis=Stage.NONE,
    baseline_rel=None,
    baseline_abs=None,
):
    from akistage import merge_stages

    return StageRecord(
        subject_id,
        timestamp,
        uo_stage=uo,
        abs_scr_stage=abs_scr,
        rel_scr_stage=rel_scr,
        dialysis_stage=dialysis,
        overall_stage=merge_stages(uo, abs_scr, rel_scr, dialysis),
        baseline_rel=baseline_rel,
        baseline_abs=baseline_abs,
    )


class TestWriteStageRecords:
    def test_empty_records_header_only(self, tmp_path):
        out = tmp_path / "out.csv"
        write_stage_records([], out)
        assert out.read_text() == (
            "subject_id,timestamp,uo_stage,abs_scr_stage,rel_scr_stage,"
            "dialysis_stage,overall_stage,baseline_rel,baseline_abs\n"
        )

    def test_all_zero_row(self, tmp_path):
        out = tmp_path / "out.csv"
        write_stage_records([record()], out)
        assert out.read_text().splitlines()[1] == "s1,2023-01-01T00:00:00,0,0,0,0,0,,"

    def test_unknown_serialized_as_empty(self, tmp_path):
        out = tmp_path / "out.csv"
        write_stage_records([record(uo=Stage.UNKNOWN, dialysis=Stage.STAGE_3)], out)
        assert out.read_text().splitlines()[1] == "s1,2023-01-01T00:00:00,,0,0,3,3,,"

    def test_baselines_serialized_canonically(self, tmp_path):
        out = tmp_path / "out.csv"
        write_stage_records(
            [
                record(
                    baseline_rel=Quantity(1_037_037, Unit.MG_DL),
                    baseline_abs=Quantity.of(1, Unit.MG_DL),
                )
            ],
            out,
        )
        assert out.read_text().splitlines()[1].endswith(",1.037037,1")

    def test_unsorted_records_rejected(self, tmp_path):
        records = [record(timestamp=datetime(2023, 1, 1, 5)), record(timestamp=T0)]
        with pytest.raises(ValueError, match="sorted"):
            write_stage_records(records, tmp_path / "out.csv")

    def test_write_read_round_trip(self, tmp_path):
        records = [
            record(uo=Stage.STAGE_1, baseline_rel=Quantity.of("0.9", Unit.MG_DL)),
            record(timestamp=datetime(2023, 1, 1, 1), dialysis=Stage.UNKNOWN),
        ]
        out = tmp_path / "out.csv"
        write_stage_records(records, out)
        rows = load_labels(out)
        assert len(rows) == 2
        assert rows[0].stage_of("uo") is Stage.STAGE_1
        assert rows[0].stage_of("overall") is Stage.STAGE_1
        assert rows[1].stage_of("dialysis") is Stage.UNKNOWN
        # rewriting parsed labels must not change a single byte of the stages
        assert [r.stage_of("overall") for r in rows] == [
            r.overall_stage for r in records
        ]


class TestLoadLabels:
    def test_accepts_gold_shaped_files(self, tmp_path):
        gold = write(
            tmp_path / "gold.csv",
            "subject_id,timestamp,uo_stage,abs_scr_stage,rel_scr_stage,dialysis_stage,overall_stage\n"
            "s1,2023-01-01T00:00:00,0,,1,0,1\n",
        )
        rows = load_labels(gold)
        assert rows[0].stage_of("abs_scr") is Stage.UNKNOWN
        assert rows[0].stage_of("overall") is Stage.STAGE_1

    def test_rejects_unknown_header(self, tmp_path):
        bad = write(tmp_path / "bad.csv", "a,b\n1,2\n")
        with pytest.raises(SchemaError):
            load_labels(bad)

    def test_rejects_duplicate_keys(self, tmp_path):
        gold = write(
            tmp_path / "gold.csv",
            "subject_id,timestamp,uo_stage,abs_scr_stage,rel_scr_stage,dialysis_stage,overall_stage\n"
            "s1,2023-01-01T00:00:00,0,0,0,0,0\n"
            "s1,2023-01-01T00:00:00,1,0,0,0,1\n",
        )
        with pytest.raises(ParseError, match="duplicate"):
            load_labels(gold)

    def test_rejects_bad_stage(self, tmp_path):
        gold = write(
            tmp_path / "gold.csv",
            "subject_id,timestamp,uo_stage,abs_scr_stage,rel_scr_stage,dialysis_stage,overall_stage\n"
            "s1,2023-01-01T00:00:00,5,0,0,0,0\n",
        )
        with pytest.raises(ParseError, match="stage"):
            load_labels(gold)
