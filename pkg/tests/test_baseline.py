import random
from fractions import Fraction

import pytest

from akistage import (
    MICRO,
    BaselineKind,
    BaselineMethod,
    MissingDemographics,
    Quantity,
    Sex,
    Unit,
    WindowStat,
    adjusted_body_weight,
    baseline_at,
    baseline_series,
    cockcroft_gault_clearance,
    cockcroft_gault_clearance_exact,
    cockcroft_gault_scr,
    cockcroft_gault_scr_exact,
)

from conftest import make_grid, make_profile, random_scr_column


def grid_with_scr(values):
    return make_grid(scrs=values)


class TestBaselineMethod:
    def test_constructors_validate(self):
        with pytest.raises(ValueError):
            BaselineMethod.fixed_value(Quantity.of(0, Unit.MG_DL))
        with pytest.raises(ValueError):
            BaselineMethod.rolling_window(WindowStat.MIN, 0)
        with pytest.raises(ValueError):
            BaselineMethod.cockcroft_gault(Quantity.of(0, Unit.ML_MIN))

    @pytest.mark.parametrize(
        "spec",
        ["fixed:1.2", "initial:mean:24", "rolling:min:168", "cockcroft-gault", "cockcroft-gault:60"],
    )
    def test_parse_describe_round_trip(self, spec):
        method = BaselineMethod.parse(spec)
        assert BaselineMethod.parse(method.describe()) == method

    @pytest.mark.parametrize("spec", ["", "rolling:min", "fixed", "initial:median:24", "x:1"])
    def test_parse_rejects(self, spec):
        with pytest.raises(ValueError):
            BaselineMethod.parse(spec)


class TestWindowBaselines:
    def test_rolling_min_example(self):
        grid = grid_with_scr(["1.0", "0.8", "1.2", "1.5"])
        method = BaselineMethod.rolling_window(WindowStat.MIN, 168)
        assert baseline_at(grid, 3, method, make_profile()) == Quantity.of("0.8", Unit.MG_DL)

    def test_rolling_empty_window_is_unknown(self):
        grid = grid_with_scr(["1.0", "1.1"])
        method = BaselineMethod.rolling_window(WindowStat.MIN, 48)
        assert baseline_at(grid, 0, method, make_profile()) is None

    def test_rolling_excludes_current_hour(self):
        grid = grid_with_scr(["1.0", "0.5"])
        method = BaselineMethod.rolling_window(WindowStat.MIN, 48)
        assert baseline_at(grid, 1, method, make_profile()) == Quantity.of("1.0", Unit.MG_DL)

    def test_rolling_window_length_limits_lookback(self):
        grid = grid_with_scr(["0.5", "1.0", "1.2", "1.4"])
        method = BaselineMethod.rolling_window(WindowStat.MIN, 2)
        # window for t=3 is hours [1, 2]; the 0.5 at hour 0 has aged out
        assert baseline_at(grid, 3, method, make_profile()) == Quantity.of("1.0", Unit.MG_DL)

    def test_rolling_mean_rounds_to_micro(self):
        grid = grid_with_scr(["1.0", "1.1", "1.0", None])
        method = BaselineMethod.rolling_window(WindowStat.MEAN, 48)
        # mean of 1.0, 1.1, 1.0 = 1.0333333...
        assert baseline_at(grid, 3, method, make_profile()).raw == 1_033_333

    def test_rolling_first_skips_missing(self):
        grid = grid_with_scr([None, "0.9", "1.5", "1.0"])
        method = BaselineMethod.rolling_window(WindowStat.FIRST, 48)
        assert baseline_at(grid, 3, method, make_profile()) == Quantity.of("0.9", Unit.MG_DL)

    def test_initial_window_constant_over_t(self):
        grid = grid_with_scr(["1.2", "0.9", "2.0", "3.0", "4.0"])
        method = BaselineMethod.initial_window(WindowStat.MIN, 2)
        profile = make_profile()
        values = [baseline_at(grid, t, method, profile) for t in range(len(grid))]
        assert values == [Quantity.of("0.9", Unit.MG_DL)] * 5

    def test_initial_window_all_missing_is_unknown(self):
        grid = grid_with_scr([None, None, "1.0"])
        method = BaselineMethod.initial_window(WindowStat.MIN, 2)
        assert baseline_at(grid, 2, method, make_profile()) is None

    def test_fixed_value(self):
        grid = grid_with_scr([None, "9.0"])
        method = BaselineMethod.fixed_value(Quantity.of("1.1", Unit.MG_DL))
        assert baseline_at(grid, 0, method, make_profile()) == Quantity.of("1.1", Unit.MG_DL)

    def test_out_of_range_index(self):
        grid = grid_with_scr(["1.0"])
        with pytest.raises(IndexError):
            baseline_at(grid, 1, BaselineMethod.fixed_value(Quantity.of(1, Unit.MG_DL)), make_profile())

    def test_series_matches_point_function(self, rng):
        profile = make_profile(age=60, sex=Sex.MALE, height=170)
        methods = [
            BaselineMethod.rolling_window(stat, hours)
            for stat in WindowStat
            for hours in (1, 2, 7, 48)
        ] + [
            BaselineMethod.initial_window(stat, hours)
            for stat in WindowStat
            for hours in (1, 6, 24)
        ] + [
            BaselineMethod.fixed_value(Quantity.of("1.3", Unit.MG_DL)),
            BaselineMethod.cockcroft_gault(),
        ]
        for _ in range(40):
            n = rng.randrange(1, 80)
            grid = make_grid(scrs=random_scr_column(rng, n))
            for method in methods:
                series = baseline_series(grid, method, profile)
                points = [baseline_at(grid, t, method, profile) for t in range(n)]
                assert series == points, method.describe()

    def test_rolling_min_antitone(self, rng):
        # adding a value into the window never increases the min baseline
        method = BaselineMethod.rolling_window(WindowStat.MIN, 48)
        profile = make_profile()
        for _ in range(100):
            n = rng.randrange(2, 40)
            scrs = random_scr_column(rng, n)
            t = n - 1
            missing = [i for i in range(t) if scrs[i] is None]
            if not missing:
                continue
            before = baseline_at(make_grid(scrs=scrs), t, method, profile)
            added = list(scrs)
            added[rng.choice(missing)] = rng.randrange(300_000, 5_000_000)
            after = baseline_at(make_grid(scrs=added), t, method, profile)
            if before is not None:
                assert after is not None and after.raw <= before.raw

    def test_appending_at_t_never_changes_rolling_baseline(self, rng):
        profile = make_profile()
        for stat in WindowStat:
            method = BaselineMethod.rolling_window(stat, 24)
            for _ in range(50):
                n = rng.randrange(1, 40)
                scrs = random_scr_column(rng, n)
                t = n - 1
                with_value = list(scrs)
                with_value[t] = rng.randrange(300_000, 5_000_000)
                without = list(scrs)
                without[t] = None
                assert baseline_at(make_grid(scrs=with_value), t, method, profile) == baseline_at(
                    make_grid(scrs=without), t, method, profile
                )


class TestCockcroftGault:
    def test_back_calculated_scr_male(self):
        profile = make_profile(weight=70, age=60, sex=Sex.MALE)
        scr = cockcroft_gault_scr(profile)
        assert scr.unit is Unit.MG_DL
        assert scr.raw == 1_037_037  # (140-60)*70/(72*75) = 1.037037...

    def test_back_calculated_scr_female(self):
        profile = make_profile(weight=70, age=60, sex=Sex.FEMALE)
        assert cockcroft_gault_scr(profile).raw == 881_481  # male value * 0.85

    def test_clearance_hand_value(self):
        profile = make_profile(weight=70, age=60, sex=Sex.MALE)
        clearance = cockcroft_gault_clearance(Quantity.of(1, Unit.MG_DL), profile)
        assert clearance.unit is Unit.ML_MIN
        assert clearance.raw == 77_777_778  # 5600/72 = 77.77777...

    def test_clearance_halves_when_scr_doubles(self):
        profile = make_profile(weight=70, age=60, sex=Sex.MALE)
        c1 = cockcroft_gault_clearance_exact(Fraction(1), profile)
        c2 = cockcroft_gault_clearance_exact(Fraction(2), profile)
        assert c2 * 2 == c1

    def test_female_factor_is_exactly_085(self):
        male = make_profile(weight=80, age=45, sex=Sex.MALE)
        female = make_profile(weight=80, age=45, sex=Sex.FEMALE)
        cm = cockcroft_gault_clearance_exact(Fraction(3, 2), male)
        cf = cockcroft_gault_clearance_exact(Fraction(3, 2), female)
        assert cf == cm * Fraction(85, 100)

    def test_age_truncated_to_whole_years(self):
        base = make_profile(weight=70, age=60, sex=Sex.MALE)
        fractional = make_profile(weight=70, age="60.9", sex=Sex.MALE)
        assert cockcroft_gault_scr(fractional) == cockcroft_gault_scr(base)

    def test_missing_demographics(self):
        with pytest.raises(MissingDemographics):
            cockcroft_gault_scr(make_profile(weight=70, sex=Sex.MALE))
        with pytest.raises(MissingDemographics):
            cockcroft_gault_clearance(Quantity.of(1, Unit.MG_DL), make_profile(age=60))

    def test_uses_adjusted_weight_when_height_present(self):
        heavy = make_profile(weight=100, age=60, sex=Sex.MALE, height="177.8")
        abw = adjusted_body_weight(heavy)
        equivalent = make_profile(weight=str(abw), age=60, sex=Sex.MALE)
        assert cockcroft_gault_scr(heavy) == cockcroft_gault_scr(equivalent)

    def test_exact_round_trip_recovers_gfr(self, rng):
        for _ in range(500):
            profile = make_profile(
                weight=str(rng.randrange(30_000, 250_000) / 1000),
                age=rng.randrange(18, 131),
                sex=rng.choice([Sex.MALE, Sex.FEMALE]),
                height=str(rng.randrange(1400, 2100) / 10) if rng.random() < 0.5 else None,
            )
            gfr = Quantity(rng.randrange(5 * MICRO, 200 * MICRO), Unit.ML_MIN)
            scr_exact = cockcroft_gault_scr_exact(profile, gfr)
            recovered = cockcroft_gault_clearance_exact(scr_exact, profile)
            assert recovered == Fraction(gfr.raw, MICRO)

    def test_baseline_method_integration(self):
        profile = make_profile(weight=70, age=60, sex=Sex.MALE)
        grid = grid_with_scr(["2.0", "2.4"])
        method = BaselineMethod.cockcroft_gault()
        assert baseline_at(grid, 1, method, profile).raw == 1_037_037


class TestAdjustedBodyWeight:
    def test_devine_hand_case(self):
        profile = make_profile(weight=100, age=60, sex=Sex.MALE, height="177.8")
        abw = adjusted_body_weight(profile)
        # IBW = 50 + 0.9 * 25.4 = 72.86; ABW = 72.86 + 0.4 * 27.14 = 83.716
        assert abw == Quantity.of("83.716", Unit.KG)

    def test_female_base(self):
        profile = make_profile(weight=80, sex=Sex.FEMALE, height="162.4")
        # IBW = 45.5 + 0.9 * 10 = 54.5; ABW = 54.5 + 0.4 * 25.5 = 64.7
        assert adjusted_body_weight(profile) == Quantity.of("64.7", Unit.KG)

    def test_actual_below_ideal_returns_actual(self):
        profile = make_profile(weight=60, sex=Sex.MALE, height="177.8")
        assert adjusted_body_weight(profile) == profile.weight

    def test_actual_equal_ideal(self):
        profile = make_profile(weight="72.86", sex=Sex.MALE, height="177.8")
        assert adjusted_body_weight(profile) == profile.weight

    def test_short_patient_uses_base_weight(self):
        profile = make_profile(weight=70, sex=Sex.MALE, height=150)
        # no downward extrapolation below the 152.4 cm pivot
        assert adjusted_body_weight(profile) == Quantity.of(58, Unit.KG)

    def test_correction_factor_configurable(self):
        profile = make_profile(weight=100, sex=Sex.MALE, height="177.8")
        assert adjusted_body_weight(profile, correction_percent=0) == Quantity.of(
            "72.86", Unit.KG
        )

    def test_missing_demographics(self):
        with pytest.raises(MissingDemographics):
            adjusted_body_weight(make_profile(weight=100, sex=Sex.MALE))
        with pytest.raises(MissingDemographics):
            adjusted_body_weight(make_profile(weight=100, height=170))
