"""The continuous-valued typology table and what is derived from it."""

from __future__ import annotations

import bisect
import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .extraction import FEATURE_NAMES, TreebankRecord

CSV_HEADER = "treebank,language,feature,count_a,count_b,total,proportion"
DENSITY_HEADER = "feature\tbin_lo\tbin_hi\tcount\tsource"

N_BINS = 10
BIN_EDGES: tuple[float, ...] = tuple(i / N_BINS for i in range(N_BINS + 1))

GRADIENT = "gradient"
CATEGORICAL_REFERENCE = "categorical-reference"

_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Row:
    treebank: str
    language: str
    feature: str
    count_a: int
    count_b: int

    @property
    def total(self) -> int:
        return self.count_a + self.count_b

    @property
    def proportion(self) -> float | None:
        total = self.count_a + self.count_b
        return self.count_a / total if total else None


@dataclass(frozen=True)
class DatasetTable:
    rows: tuple[Row, ...]

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            key = (row.treebank, row.feature)
            if key in seen:
                raise DatasetError(f"duplicate row for treebank {row.treebank}, feature {row.feature}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.rows)

    def features(self) -> list[str]:
        """Feature names in first-appearance order."""
        return list(dict.fromkeys(row.feature for row in self.rows))

    def treebanks(self) -> list[str]:
        return list(dict.fromkeys(row.treebank for row in self.rows))

    def languages(self) -> list[str]:
        return sorted({row.language for row in self.rows})


@dataclass(frozen=True)
class HistogramSeries:
    feature: str
    bin_edges: tuple[float, ...]
    bin_counts: tuple[int, ...]
    source: str = GRADIENT


def aggregate(records: Iterable[TreebankRecord]) -> DatasetTable:
    rows = []
    seen = set()
    for rec in records:
        if rec.treebank_id in seen:
            raise DatasetError(f"duplicate treebank id {rec.treebank_id!r}")
        seen.add(rec.treebank_id)
        for fc in rec.counts.values():
            rows.append(Row(rec.treebank_id, rec.language_code, fc.feature, fc.count_a, fc.count_b))
    return DatasetTable(tuple(rows))


def select_one_treebank_per_language(table: DatasetTable, seed: int) -> DatasetTable:
    """Keep the rows of one randomly chosen treebank for every language.

    Candidates are sorted by id and languages are visited in sorted order,
    so the choice depends only on the table's content and ``seed``.
    """
    by_lang: dict[str, set[str]] = {}
    for row in table.rows:
        by_lang.setdefault(row.language, set()).add(row.treebank)
    rng = np.random.default_rng(seed)
    keep = set()
    for lang in sorted(by_lang):
        candidates = sorted(by_lang[lang])
        if len(candidates) == 1:
            keep.add(candidates[0])
        else:
            keep.add(candidates[int(rng.integers(len(candidates)))])
    return DatasetTable(tuple(row for row in table.rows if row.treebank in keep))


def discretize(proportion: float | None) -> int:
    """Map a proportion to a binary category; 0.5 goes to 1."""
    if proportion is None:
        raise DatasetError("cannot discretize an absent proportion")
    if not 0.0 <= proportion <= 1.0:
        raise DatasetError(f"proportion {proportion} outside [0, 1]")
    return 1 if proportion >= 0.5 else 0


def bin_index(value: float) -> int:
    """Index of the [lo, hi) bin holding ``value``; 1.0 goes in the last bin."""
    if not 0.0 <= value <= 1.0:
        raise DatasetError(f"value {value} outside [0, 1]")
    return min(bisect.bisect_right(BIN_EDGES, value) - 1, N_BINS - 1)


def histogram(values: Iterable[float], feature: str, source: str = GRADIENT) -> HistogramSeries:
    counts = [0] * N_BINS
    for v in values:
        counts[bin_index(v)] += 1
    return HistogramSeries(feature, BIN_EDGES, tuple(counts), source)


def density(table: DatasetTable, feature: str) -> HistogramSeries:
    if feature not in FEATURE_NAMES and feature not in table.features():
        raise DatasetError(f"unknown feature {feature!r}")
    values = [row.proportion for row in table.rows
              if row.feature == feature and row.proportion is not None]
    return histogram(values, feature)


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def write_csv(table: DatasetTable, out: TextIO, comment: str | None = None) -> None:
    if comment is not None:
        out.write(f"# {comment}\n")
    out.write(CSV_HEADER + "\n")
    for row in table.rows:
        for ident in (row.treebank, row.language, row.feature):
            if not _ID_RE.match(ident):
                raise DatasetError(f"identifier {ident!r} has characters outside [A-Za-z0-9_-]")
        p = row.proportion
        out.write(",".join([row.treebank, row.language, row.feature, str(row.count_a),
                            str(row.count_b), str(row.total),
                            "" if p is None else _fmt_float(p)]) + "\n")


def read_csv(src: TextIO | str | Path) -> DatasetTable:
    """Parse a dataset CSV. Leading ``#`` lines are skipped."""
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8", newline="") as f:
            return read_csv(f)
    rows = []
    header_seen = False
    for line_no, line in enumerate(src, start=1):
        line = line.rstrip("\r\n")
        if not header_seen:
            if line.startswith("#") or not line:
                continue
            if line != CSV_HEADER:
                raise DatasetError(f"line {line_no}: expected header {CSV_HEADER!r}")
            header_seen = True
            continue
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise DatasetError(f"line {line_no}: expected 7 fields, got {len(parts)}")
        tb, lang, feat, a, b, total, prop = parts
        try:
            row = Row(tb, lang, feat, int(a), int(b))
            total = int(total)
            prop_value = float(prop) if prop else None
        except ValueError as exc:
            raise DatasetError(f"line {line_no}: {exc}") from None
        if row.count_a < 0 or row.count_b < 0 or total != row.total:
            raise DatasetError(f"line {line_no}: inconsistent counts")
        if (prop_value is None) != (row.proportion is None) or (
                prop_value is not None and abs(prop_value - row.proportion) > 1e-12):
            raise DatasetError(f"line {line_no}: proportion does not match counts")
        rows.append(row)
    if not header_seen:
        raise DatasetError("missing header")
    return DatasetTable(tuple(rows))


def table_to_csv(table: DatasetTable, comment: str | None = None) -> str:
    buf = io.StringIO()
    write_csv(table, buf, comment)
    return buf.getvalue()


def write_density(series: Iterable[HistogramSeries], out: TextIO, comment: str | None = None) -> None:
    if comment is not None:
        out.write(f"# {comment}\n")
    out.write(DENSITY_HEADER + "\n")
    for s in series:
        for i, count in enumerate(s.bin_counts):
            out.write(f"{s.feature}\t{s.bin_edges[i]:.1f}\t{s.bin_edges[i + 1]:.1f}\t{count}\t{s.source}\n")


def read_reference(src: TextIO | str | Path) -> list[HistogramSeries]:
    """Histogram an externally supplied categorical reference.

    Expected CSV header ``language,feature,value`` where value is the
    category already mapped onto [0, 1] (e.g. 0, 0.5, 1). One series is
    returned per feature, in first-appearance order.
    """
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8", newline="") as f:
            return read_reference(f)
    values: dict[str, list[float]] = {}
    header_seen = False
    for line_no, line in enumerate(src, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != "language,feature,value":
                raise DatasetError(f"reference line {line_no}: expected header 'language,feature,value'")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DatasetError(f"reference line {line_no}: expected 3 fields")
        try:
            v = float(parts[2])
        except ValueError:
            raise DatasetError(f"reference line {line_no}: non-numeric value {parts[2]!r}") from None
        if not 0.0 <= v <= 1.0:
            raise DatasetError(f"reference line {line_no}: value {v} outside [0, 1]")
        values.setdefault(parts[1], []).append(v)
    if not header_seen:
        raise DatasetError("reference file is empty")
    return [histogram(vs, feat, CATEGORICAL_REFERENCE) for feat, vs in values.items()]
