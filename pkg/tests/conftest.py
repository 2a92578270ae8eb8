import random
from datetime import datetime

import pytest

from akistage import (
    HourCell,
    HourlyGrid,
    PatientProfile,
    Quantity,
    Sex,
    Unit,
)

T0 = datetime(2023, 1, 1, 0, 0, 0)


def make_profile(
    subject_id="s1", weight=70, height=None, age=None, sex=None
) -> PatientProfile:
    return PatientProfile(
        subject_id,
        Quantity.of(weight, Unit.KG),
        height=Quantity.of(height, Unit.CM) if height is not None else None,
        age=Quantity.of(age, Unit.YEARS) if age is not None else None,
        sex=sex,
    )


def _quantity_or_none(value, unit):
    if value is None:
        return None
    if isinstance(value, Quantity):
        return value
    return Quantity.of(value, unit)


def make_grid(uo_rates=None, scrs=None, dialysis=None, subject_id="s1", start=T0):
    """Grid straight from per-hour columns; None marks a missing cell."""
    n = max(len(c) for c in (uo_rates, scrs, dialysis) if c is not None)
    cells = []
    for t in range(n):
        rate = _quantity_or_none(uo_rates[t], Unit.ML_KG_H) if uo_rates else None
        cells.append(
            HourCell(
                uo_ml=None if rate is None else Quantity(rate.raw, Unit.ML),
                uo_rate=rate,
                scr=_quantity_or_none(scrs[t], Unit.MG_DL) if scrs else None,
                dialysis_active=dialysis[t] if dialysis else None,
            )
        )
    return HourlyGrid(subject_id, start, tuple(cells))


def random_rates(rng: random.Random, n: int, missing_prob=0.15):
    """Hourly urine rates biased toward the staging thresholds."""
    rates = []
    for _ in range(n):
        if rng.random() < missing_prob:
            rates.append(None)
            continue
        bucket = rng.random()
        if bucket < 0.15:
            raw = 0
        elif bucket < 0.40:
            raw = rng.randrange(0, 300_000)
        elif bucket < 0.70:
            raw = rng.randrange(300_000, 500_000)
        else:
            raw = rng.randrange(500_000, 2_000_000)
        rates.append(Quantity(raw, Unit.ML_KG_H))
    return rates


def random_scr_column(rng: random.Random, n: int, missing_prob=0.3):
    return [
        None if rng.random() < missing_prob else rng.randrange(300_000, 5_000_000)
        for _ in range(n)
    ]


@pytest.fixture
def rng():
    return random.Random(20230101)
