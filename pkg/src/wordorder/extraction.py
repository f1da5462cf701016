"""Word-order construction counting.

Each feature is named after its two elements in a fixed order, e.g.
``noun-adjective``. ``count_a`` counts instances where the first named
element precedes the second, ``count_b`` the reverse, and the gradient
value is ``count_a / (count_a + count_b)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .conllu import Sentence, Token, base_deprel

HEAD_DEPENDENT = "head-dependent"
SIBLING_PAIR = "sibling-pair"

_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")


@dataclass(frozen=True)
class FeatureSpec:
    """Declarative matching criteria for one word-order feature.

    ``first`` says which element the feature name lists first for
    head-dependent features: ``"head"`` for noun-adjective (the noun is
    the head), ``"dependent"`` for subject-verb. In sibling-pair mode the
    first element is always the ``dependent_deprel`` sibling.
    """

    name: str
    mode: str = HEAD_DEPENDENT
    dependent_upos: str | None = None
    dependent_deprel: str | None = None
    head_upos: str | None = None
    second_dependent_deprel: str | None = None
    first: str = "head"

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"invalid feature name {self.name!r}")
        if self.mode == HEAD_DEPENDENT:
            if self.dependent_upos is None and self.dependent_deprel is None:
                raise ValueError(f"{self.name}: head-dependent feature needs a dependent upos or deprel")
            if self.second_dependent_deprel is not None:
                raise ValueError(f"{self.name}: second_dependent_deprel is only valid for sibling pairs")
            if self.first not in ("head", "dependent"):
                raise ValueError(f"{self.name}: first must be 'head' or 'dependent'")
        elif self.mode == SIBLING_PAIR:
            if not (self.dependent_deprel and self.second_dependent_deprel and self.head_upos):
                raise ValueError(f"{self.name}: sibling-pair feature needs both deprels and a head upos")
        else:
            raise ValueError(f"{self.name}: unknown mode {self.mode!r}")


BUILTIN_FEATURES: tuple[FeatureSpec, ...] = (
    FeatureSpec("noun-adjective", dependent_upos="ADJ", dependent_deprel="amod",
                head_upos="NOUN", first="head"),
    FeatureSpec("noun-numeral", dependent_upos="NUM", dependent_deprel="nummod",
                head_upos="NOUN", first="head"),
    FeatureSpec("subject-verb", dependent_deprel="nsubj", head_upos="VERB", first="dependent"),
    FeatureSpec("object-verb", dependent_deprel="obj", head_upos="VERB", first="dependent"),
    FeatureSpec("object-subject", mode=SIBLING_PAIR, dependent_deprel="obj",
                second_dependent_deprel="nsubj", head_upos="VERB"),
)

FEATURE_NAMES: tuple[str, ...] = tuple(spec.name for spec in BUILTIN_FEATURES)


@dataclass(frozen=True)
class CountOptions:
    """Open choices in how constructions are matched.

    strict_deprel: compare full deprel labels instead of dropping subtypes.
    follow_conj: a ``conj`` dependent inherits the relation of the first
        conjunct, so in "big and red cars" both adjectives count.
    """

    strict_deprel: bool = False
    follow_conj: bool = False


DEFAULT_OPTIONS = CountOptions()


@dataclass(frozen=True)
class FeatureCounts:
    feature: str
    count_a: int = 0
    count_b: int = 0

    @property
    def total(self) -> int:
        return self.count_a + self.count_b

    @property
    def proportion(self) -> float | None:
        total = self.count_a + self.count_b
        if total == 0:
            return None
        return self.count_a / total

    def __add__(self, other: FeatureCounts) -> FeatureCounts:
        if other.feature != self.feature:
            raise ValueError(f"cannot add counts for {self.feature} and {other.feature}")
        return FeatureCounts(self.feature, self.count_a + other.count_a,
                             self.count_b + other.count_b)


@dataclass(frozen=True)
class TreebankRecord:
    treebank_id: str
    language_code: str
    counts: dict[str, FeatureCounts] = field(default_factory=dict)
    sentence_count: int = 0

    def __post_init__(self):
        if not self.language_code:
            raise ValueError(f"treebank {self.treebank_id!r} has an empty language code")


def _relation(sentence: Sentence, tok: Token, options: CountOptions) -> tuple[str, Token | None]:
    """Return (deprel, head) for matching purposes.

    With ``follow_conj`` a conjunct is re-attached to the head of the
    first conjunct of its chain and takes that conjunct's relation.
    """
    rel = tok.deprel if options.strict_deprel else base_deprel(tok.deprel)
    head = sentence.head_of(tok)
    if options.follow_conj and base_deprel(tok.deprel) == "conj":
        seen = {tok.id}
        cur = head
        while cur is not None and base_deprel(cur.deprel) == "conj" and cur.id not in seen:
            seen.add(cur.id)
            cur = sentence.head_of(cur)
        if cur is not None and cur.id not in seen:
            rel = cur.deprel if options.strict_deprel else base_deprel(cur.deprel)
            head = sentence.head_of(cur)
    return rel, head


def count_head_dependent(sentence: Sentence, spec: FeatureSpec,
                         options: CountOptions = DEFAULT_OPTIONS) -> tuple[int, int]:
    """Count matching head-dependent edges as (head first, dependent first)."""
    if spec.mode != HEAD_DEPENDENT:
        raise ValueError(f"{spec.name} is not a head-dependent feature")
    head_first = dep_first = 0
    for tok in sentence.tokens:
        if spec.dependent_upos is not None and tok.upos != spec.dependent_upos:
            continue
        rel, head = _relation(sentence, tok, options)
        if spec.dependent_deprel is not None and rel != spec.dependent_deprel:
            continue
        if head is None:
            continue
        if spec.head_upos is not None and head.upos != spec.head_upos:
            continue
        if head.id < tok.id:
            head_first += 1
        else:
            dep_first += 1
    return head_first, dep_first


def count_sibling_pair(sentence: Sentence, spec: FeatureSpec,
                       options: CountOptions = DEFAULT_OPTIONS) -> tuple[int, int]:
    """Count co-dependents of one head as (first sibling first, second sibling first).

    Every (first, second) pair under the same head is counted.
    """
    if spec.mode != SIBLING_PAIR:
        raise ValueError(f"{spec.name} is not a sibling-pair feature")
    firsts: dict[int, list[int]] = {}
    seconds: dict[int, list[int]] = {}
    for tok in sentence.tokens:
        rel, head = _relation(sentence, tok, options)
        if head is None or head.upos != spec.head_upos:
            continue
        if rel == spec.dependent_deprel:
            firsts.setdefault(head.id, []).append(tok.id)
        elif rel == spec.second_dependent_deprel:
            seconds.setdefault(head.id, []).append(tok.id)

    first_first = second_first = 0
    for head_id, a_ids in firsts.items():
        for b in seconds.get(head_id, ()):
            for a in a_ids:
                if a < b:
                    first_first += 1
                else:
                    second_first += 1
    return first_first, second_first


def count_feature(sentence: Sentence, spec: FeatureSpec,
                  options: CountOptions = DEFAULT_OPTIONS) -> tuple[int, int]:
    """Return (count_a, count_b) for one sentence in the feature's own orientation."""
    if spec.mode == SIBLING_PAIR:
        return count_sibling_pair(sentence, spec, options)
    head_first, dep_first = count_head_dependent(sentence, spec, options)
    if spec.first == "head":
        return head_first, dep_first
    return dep_first, head_first


def extract_treebank(sentences: Iterable[Sentence], treebank_id: str, language_code: str,
                     features: Iterable[FeatureSpec] = BUILTIN_FEATURES,
                     options: CountOptions = DEFAULT_OPTIONS) -> TreebankRecord:
    features = tuple(features)
    a = [0] * len(features)
    b = [0] * len(features)
    n_sent = 0
    for sentence in sentences:
        n_sent += 1
        for i, spec in enumerate(features):
            ca, cb = count_feature(sentence, spec, options)
            a[i] += ca
            b[i] += cb
    counts = {spec.name: FeatureCounts(spec.name, a[i], b[i]) for i, spec in enumerate(features)}
    return TreebankRecord(treebank_id, language_code, counts, n_sent)


def merge_records(records: Iterable[TreebankRecord]) -> TreebankRecord:
    """Sum records of the same treebank (e.g. its train/dev/test files)."""
    records = list(records)
    if not records:
        raise ValueError("nothing to merge")
    first = records[0]
    counts = dict(first.counts)
    n_sent = first.sentence_count
    for rec in records[1:]:
        if rec.treebank_id != first.treebank_id or rec.counts.keys() != counts.keys():
            raise ValueError(f"cannot merge {rec.treebank_id} into {first.treebank_id}")
        counts = {name: counts[name] + rec.counts[name] for name in counts}
        n_sent += rec.sentence_count
    return TreebankRecord(first.treebank_id, first.language_code, counts, n_sent)


def load_feature_config(path: str | Path) -> list[FeatureSpec]:
    """Read extra head-dependent features from a key=value file.

    Blocks are separated by blank lines; each block starts with ``name=``.
    Recognised keys: name, dependent_upos, dependent_deprel, head_upos,
    first (``head`` or ``dependent``). ``#`` starts a comment line.
    """
    allowed = {"name", "dependent_upos", "dependent_deprel", "head_upos", "first"}
    specs = []
    block: dict[str, str] = {}

    def flush():
        if block:
            if "name" not in block:
                raise ValueError(f"{path}: feature block without a name")
            specs.append(FeatureSpec(**block))
            block.clear()

    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                flush()
                continue
            if line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in allowed:
                raise ValueError(f"{path}:{line_no}: expected one of {sorted(allowed)} as key=value")
            if key == "name":
                flush()
            block[key] = value
    flush()
    names = [s.name for s in specs]
    clash = set(names) & set(FEATURE_NAMES) or {n for n in names if names.count(n) > 1}
    if clash:
        raise ValueError(f"{path}: duplicate feature name(s) {sorted(clash)}")
    return specs
