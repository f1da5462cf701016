"""Pretrained language vectors and the join with gradient targets."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .dataset import DatasetTable


class VectorError(ValueError):
    pass


@dataclass(frozen=True)
class LanguageVector:
    language_code: str
    values: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RegressionDataset:
    languages: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    feature: str
    source: str = ""

    def __post_init__(self):
        n = len(self.languages)
        if self.X.ndim != 2 or self.X.shape[0] != n or self.y.shape != (n,):
            raise VectorError("X rows, y and languages must have the same length")
        if len(set(self.languages)) != n:
            raise VectorError("duplicate language in regression dataset")

    def __len__(self) -> int:
        return len(self.languages)

    def subset(self, idx) -> RegressionDataset:
        idx = np.asarray(idx, dtype=int)
        return RegressionDataset(tuple(self.languages[i] for i in idx), self.X[idx], self.y[idx],
                                 self.feature, self.source)


def load_vectors(stream: BinaryIO | io.TextIOBase, source_label: str = "") -> dict[str, LanguageVector]:
    """Read ``code v1 v2 ... vd`` lines; d is fixed by the first record.

    Blank lines are skipped. ``source_label`` only appears in error messages.
    """
    where = source_label or "vectors"
    vectors: dict[str, LanguageVector] = {}
    dim = None
    for line_no, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        parts = line.split()
        if not parts:
            continue
        code, fields = parts[0], parts[1:]
        if not fields:
            raise VectorError(f"{where}:{line_no}: no values for {code!r}")
        try:
            values = tuple(float(x) for x in fields)
        except ValueError:
            raise VectorError(f"{where}:{line_no}: non-numeric field") from None
        if not all(math.isfinite(v) for v in values):
            raise VectorError(f"{where}:{line_no}: non-finite value")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise VectorError(f"{where}:{line_no}: expected {dim} values, got {len(values)}")
        if code in vectors:
            raise VectorError(f"{where}:{line_no}: duplicate language code {code!r}")
        vectors[code] = LanguageVector(code, values)
    return vectors


def read_vectors(path: str | Path, source_label: str | None = None) -> dict[str, LanguageVector]:
    path = Path(path)
    with path.open("rb") as f:
        return load_vectors(f, source_label or path.stem)


def load_aliases(path: str | Path) -> dict[str, str]:
    """Two whitespace-separated columns, ``from to``; ``#`` comments allowed."""
    aliases = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise VectorError(f"{path}:{line_no}: expected two columns")
            if parts[0] in aliases:
                raise VectorError(f"{path}:{line_no}: duplicate alias for {parts[0]!r}")
            aliases[parts[0]] = parts[1]
    return aliases


def join(table: DatasetTable, vectors: dict[str, LanguageVector], feature: str,
         aliases: dict[str, str] | None = None, source: str = "") -> RegressionDataset:
    """Inner-join defined proportions of ``feature`` with vectors by language code.

    Table codes are translated through ``aliases`` before lookup. The
    result is sorted by (translated) language code.
    """
    aliases = aliases or {}
    targets: dict[str, float] = {}
    for row in table.rows:
        if row.feature != feature:
            continue
        code = aliases.get(row.language, row.language)
        if code in targets:
            raise VectorError(f"language {code!r} has more than one treebank; select one first")
        p = row.proportion
        if p is not None:
            targets[code] = p
    langs = sorted(code for code in targets if code in vectors)
    if not langs:
        raise VectorError(f"no language has both a vector and a value for {feature}")
    X = np.array([vectors[c].values for c in langs], dtype=float)
    y = np.array([targets[c] for c in langs], dtype=float)
    return RegressionDataset(tuple(langs), X, y, feature, source)
