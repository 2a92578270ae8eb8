"""Scoring against gold labels, and the brute-force staging oracle.

Accuracy definitions (pinned here, since they drive the report layout):
for each pathway category, the overall accuracy is the fraction of
evaluable hours whose predicted stage exactly matches the gold stage, and
the per-stage accuracy is that same fraction restricted to hours whose
*gold* stage is s (recall at stage s; vacuously 1.0 when no gold hour has
stage s).  An hour is evaluable for a category when its gold label is
known; a predicted UNKNOWN against a known gold label counts as a mismatch.

The brute-force urine-output oracle deliberately shares no state or helper
code with the probe implementation: at every hour it rescans the entire
prefix, enumerating runs and windows literally.  It exists to be slow and
obviously correct.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from .core import STAGE_CATEGORIES, Quantity, Stage, StageRecord, StagingError
from .io import ParseError, SchemaError, STAGE_COLUMNS
from .probes import (
    HOURS_ANURIA,
    HOURS_STAGE1,
    HOURS_STAGE2,
    HOURS_VERY_LOW,
    RATE_LOW_RAW,
    RATE_VERY_LOW_RAW,
    ProbeConfig,
    UoMode,
)


class KeyMismatch(StagingError):
    """Prediction and gold files do not cover the same (subject, hour) keys."""


@dataclass(frozen=True)
class LabelRow:
    """One labelled subject-hour, as read from a stage or gold file."""

    subject_id: str
    timestamp: datetime
    stages: Mapping[str, Stage]

    def stage_of(self, category: str) -> Stage:
        return self.stages[category]


def load_labels(path, delimiter: str = ",") -> List[LabelRow]:
    """Read a stage-record or gold file into label rows.

    The five stage columns are required; the two audit baseline columns are
    optional and ignored, so engine output files can be scored drop-in.
    """
    gold_columns = STAGE_COLUMNS[:7]
    rows: List[LabelRow] = []
    seen = set()
    with open(path, "r", newline="") as f:
        reader = csv.reader(f, delimiter=delimiter)
        try:
            header = tuple(h.strip() for h in next(reader))
        except StopIteration:
            raise SchemaError(f"{path}: file is empty (no header)") from None
        if header != gold_columns and header != STAGE_COLUMNS:
            raise SchemaError(
                f"{path}: expected columns {','.join(gold_columns)}"
                " (audit baseline columns optional)"
            )
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path} row {row_no}: expected {len(header)} fields")
            subject_id = row[0].strip()
            try:
                ts = datetime.fromisoformat(row[1].strip())
            except ValueError:
                raise ParseError(f"{path} row {row_no}: bad timestamp {row[1]!r}") from None
            try:
                stages = {
                    category: Stage.parse(row[2 + i])
                    for i, category in enumerate(STAGE_CATEGORIES)
                }
            except ValueError as exc:
                raise ParseError(f"{path} row {row_no}: {exc}") from None
            key = (subject_id, ts)
            if key in seen:
                raise ParseError(f"{path} row {row_no}: duplicate key {subject_id}@{ts.isoformat()}")
            seen.add(key)
            rows.append(LabelRow(subject_id, ts, stages))
    return rows


@dataclass(frozen=True)
class StageScore:
    support: int
    matches: int

    @property
    def accuracy(self) -> Fraction:
        if self.support == 0:
            return Fraction(1)
        return Fraction(self.matches, self.support)


@dataclass(frozen=True)
class CategoryScore:
    evaluable: int
    matches: int
    per_stage: Mapping[int, StageScore]  # keys 0..3

    @property
    def overall_accuracy(self) -> Fraction:
        if self.evaluable == 0:
            return Fraction(1)
        return Fraction(self.matches, self.evaluable)


@dataclass(frozen=True)
class AccuracyReport:
    categories: Mapping[str, CategoryScore]

    def is_perfect(self) -> bool:
        return all(c.matches == c.evaluable for c in self.categories.values())

    def rows(self) -> List[Tuple[str, str, int, int, str]]:
        """Machine rows: (category, label, support, matches, accuracy)."""
        out = []
        for category in STAGE_CATEGORIES:
            c = self.categories[category]
            out.append(
                (category, "overall", c.evaluable, c.matches, _format_fraction(c.overall_accuracy))
            )
            for s in range(4):
                ss = c.per_stage[s]
                out.append((category, str(s), ss.support, ss.matches, _format_fraction(ss.accuracy)))
        return out

    def format_table(self) -> str:
        lines = [f"{'category':<10} {'label':<8} {'support':>8} {'accuracy':>9}"]
        for category, label, support, _matches, accuracy in self.rows():
            lines.append(f"{category:<10} {label:<8} {support:>8} {accuracy:>9}")
        return "\n".join(lines)


def _format_fraction(value: Fraction) -> str:
    scaled = round(value * 10**6)
    whole, frac = divmod(scaled, 10**6)
    return f"{whole}.{frac:06d}"


def write_report(report: AccuracyReport, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("category", "label", "support", "matches", "accuracy"))
        for row in report.rows():
            writer.writerow(row)


Labelled = Union[StageRecord, LabelRow]


def score(pred: Sequence[Labelled], gold: Sequence[LabelRow]) -> AccuracyReport:
    """Per-category, per-stage agreement of predictions with gold labels.

    Keys must match exactly; the first divergent (subject, timestamp) key in
    sorted order is reported.  Gold labels must be known stages 0..3 --
    UNKNOWN gold cells mark hours that are not evaluable for that category
    and are excluded from support.
    """
    pred_keys = {(p.subject_id, p.timestamp) for p in pred}
    gold_keys = {(g.subject_id, g.timestamp) for g in gold}
    if len(pred_keys) != len(pred):
        raise KeyMismatch("duplicate keys in predictions")
    if pred_keys != gold_keys:
        divergent = min(pred_keys.symmetric_difference(gold_keys))
        side = "gold" if divergent in pred_keys else "predictions"
        raise KeyMismatch(
            f"key {divergent[0]}@{divergent[1].isoformat()} missing from {side}"
        )
    gold_by_key = {(g.subject_id, g.timestamp): g for g in gold}

    evaluable = {c: 0 for c in STAGE_CATEGORIES}
    matches = {c: 0 for c in STAGE_CATEGORIES}
    support = {c: [0, 0, 0, 0] for c in STAGE_CATEGORIES}
    stage_matches = {c: [0, 0, 0, 0] for c in STAGE_CATEGORIES}

    for p in pred:
        g = gold_by_key[(p.subject_id, p.timestamp)]
        for category in STAGE_CATEGORIES:
            gold_stage = g.stage_of(category)
            if gold_stage is Stage.UNKNOWN:
                continue
            evaluable[category] += 1
            support[category][int(gold_stage)] += 1
            if p.stage_of(category) is gold_stage:
                matches[category] += 1
                stage_matches[category][int(gold_stage)] += 1

    return AccuracyReport(
        categories={
            c: CategoryScore(
                evaluable=evaluable[c],
                matches=matches[c],
                per_stage={
                    s: StageScore(support[c][s], stage_matches[c][s]) for s in range(4)
                },
            )
            for c in STAGE_CATEGORIES
        }
    )


def brute_force_uo_oracle(
    rates: Sequence[Optional[Quantity]], cfg: ProbeConfig
) -> List[Stage]:
    """Reference urine-output stager: full naive rescan at every hour."""
    raws = [r.raw if r is not None else None for r in rates]
    return [_oracle_stage_at(raws, t, cfg) for t in range(len(raws))]


def _oracle_stage_at(raws: Sequence[Optional[int]], t: int, cfg: ProbeConfig) -> Stage:
    if raws[t] is None:
        return Stage.UNKNOWN

    def run_length(limit: int, inclusive: bool) -> int:
        count = 0
        for u in range(t, -1, -1):
            r = raws[u]
            if r is None:
                break
            below = r <= limit if inclusive else r < limit
            if not below:
                break
            count += 1
        return count

    anuric_hours = run_length(cfg.anuria_threshold.raw, inclusive=True)

    if cfg.uo_mode is UoMode.STRICT_CONSECUTIVE:
        low_hours = run_length(RATE_LOW_RAW, inclusive=False)
        very_low_hours = run_length(RATE_VERY_LOW_RAW, inclusive=False)
        if very_low_hours >= HOURS_VERY_LOW or anuric_hours >= HOURS_ANURIA:
            return Stage.STAGE_3
        if low_hours >= HOURS_STAGE2:
            return Stage.STAGE_2
        if low_hours >= HOURS_STAGE1:
            return Stage.STAGE_1
        return Stage.NONE

    def window_mean_below(width: int, threshold_raw: int) -> bool:
        start = t - width + 1
        if start < 0:
            return False
        window = raws[start : t + 1]
        if any(r is None for r in window):
            return False
        return sum(window) < threshold_raw * width

    if window_mean_below(HOURS_VERY_LOW, RATE_VERY_LOW_RAW) or anuric_hours >= HOURS_ANURIA:
        return Stage.STAGE_3
    if window_mean_below(HOURS_STAGE2, RATE_LOW_RAW):
        return Stage.STAGE_2
    if window_mean_below(HOURS_STAGE1, RATE_LOW_RAW):
        return Stage.STAGE_1
    return Stage.NONE
