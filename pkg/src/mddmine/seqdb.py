"""Sequence database model, SPMF ingestion, and attribute tooling.

The database is a list of event sequences.  Every event carries one item
identifier (a non-negative integer) plus one integer value per declared
attribute; the same item may occur with different attribute values at
different positions.  When an ordering attribute is declared (typically
``time``), its values must be strictly increasing along each sequence.

Two on-disk formats are understood:

* SPMF sequences: one line per sequence, integer tokens, ``-1`` closes an
  itemset and ``-2`` closes the line.  Only single-item itemsets are
  accepted; multi-item itemsets are rejected rather than flattened because
  flattening would change support semantics.
* Attribute tables: tab-separated with header ``sid<TAB>pos<TAB><attr>...``,
  one row per event, rows sorted by (sid, pos), positions 1-based.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence as SequenceT


class SeqDbError(ValueError):
    """Base class for database construction and ingestion errors."""


class SpmfFormatError(SeqDbError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedItemsetError(SpmfFormatError):
    """Multi-item (or empty) itemsets are outside the supported format."""


class AttributeCoverageError(SeqDbError):
    """An attribute table row is missing, duplicated, or out of range."""


class OrderingError(SeqDbError):
    """The declared ordering attribute is not strictly increasing."""


@dataclass(frozen=True, eq=True)
class Event:
    item: int
    attrs: Mapping[str, int] = field(default_factory=dict)


@dataclass
class Sequence:
    """One ordered event sequence with a 1-based identifier."""

    sid: int
    events: list[Event]

    @property
    def items(self) -> tuple[int, ...]:
        return tuple(e.item for e in self.events)

    def attr_values(self, name: str) -> tuple[int, ...]:
        return tuple(e.attrs[name] for e in self.events)

    def __len__(self) -> int:
        return len(self.events)


@dataclass
class AttributedDatabase:
    sequences: list[Sequence]
    attribute_names: tuple[str, ...] = ()
    ordering_attribute: str | None = None

    def __post_init__(self):
        self.attribute_names = tuple(self.attribute_names)
        for idx, seq in enumerate(self.sequences, start=1):
            if seq.sid != idx:
                raise SeqDbError(f"sequence ids must be contiguous from 1, got {seq.sid} at {idx}")
            if not seq.events:
                raise SeqDbError(f"sequence {seq.sid} is empty")
            for pos, event in enumerate(seq.events, start=1):
                if event.item < 0:
                    raise SeqDbError(f"negative item id at sid {seq.sid} pos {pos}")
                for name in self.attribute_names:
                    if name not in event.attrs:
                        raise SeqDbError(
                            f"event at sid {seq.sid} pos {pos} lacks attribute {name!r}"
                        )
        if self.ordering_attribute is not None:
            if self.ordering_attribute not in self.attribute_names:
                raise SeqDbError(
                    f"ordering attribute {self.ordering_attribute!r} is not declared"
                )
            _check_ordering(self.sequences, self.ordering_attribute)
        self._columns: dict[str, list[tuple[int, ...]]] = {}

    @property
    def item_universe(self) -> frozenset[int]:
        return frozenset(e.item for seq in self.sequences for e in seq.events)

    def __len__(self) -> int:
        return len(self.sequences)

    def columns(self, name: str) -> list[tuple[int, ...]]:
        """Per-sequence value tuples for one attribute (cached)."""
        cached = self._columns.get(name)
        if cached is None:
            cached = [seq.attr_values(name) for seq in self.sequences]
            self._columns[name] = cached
        return cached


def _check_ordering(sequences: list[Sequence], name: str) -> None:
    for seq in sequences:
        values = seq.attr_values(name)
        for j in range(1, len(values)):
            if values[j] <= values[j - 1]:
                raise OrderingError(
                    f"attribute {name!r} not strictly increasing in sequence "
                    f"{seq.sid} at position {j + 1}"
                )


def make_database(
    item_lists: SequenceT[SequenceT[int]],
    attrs: Mapping[str, SequenceT[SequenceT[int]]] | None = None,
    ordering_attribute: str | None = None,
) -> AttributedDatabase:
    """Build a database from parallel item and attribute-value lists."""
    attrs = attrs or {}
    names = tuple(attrs)
    sequences = []
    for i, items in enumerate(item_lists):
        events = [
            Event(item, {name: attrs[name][i][j] for name in names})
            for j, item in enumerate(items)
        ]
        sequences.append(Sequence(i + 1, events))
    return AttributedDatabase(sequences, names, ordering_attribute)


# --- SPMF format --------------------------------------------------------------

def parse_spmf(text: str) -> AttributedDatabase:
    """Parse SPMF sequence lines into an attribute-free database."""
    sequences: list[Sequence] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        tokens = []
        for tok in raw.split():
            try:
                tokens.append(int(tok))
            except ValueError:
                raise SpmfFormatError(f"malformed token {tok!r}", lineno) from None
        events: list[Event] = []
        itemset: list[int] = []
        closed = False
        for tok in tokens:
            if closed:
                raise SpmfFormatError("tokens after -2 terminator", lineno)
            if tok == -2:
                if itemset:
                    raise SpmfFormatError("itemset not closed by -1 before -2", lineno)
                closed = True
            elif tok == -1:
                if not itemset:
                    raise UnsupportedItemsetError("empty itemset", lineno)
                if len(itemset) > 1:
                    raise UnsupportedItemsetError(
                        f"itemset with {len(itemset)} items; only single-item events "
                        "are supported",
                        lineno,
                    )
                events.append(Event(itemset[0]))
                itemset = []
            elif tok < 0:
                raise SpmfFormatError(f"malformed token {tok}", lineno)
            else:
                itemset.append(tok)
        if not closed:
            raise SpmfFormatError("missing -2 terminator", lineno)
        if not events:
            raise SpmfFormatError("sequence without events", lineno)
        sequences.append(Sequence(len(sequences) + 1, events))
    return AttributedDatabase(sequences)


def to_spmf(db: AttributedDatabase) -> str:
    lines = []
    for seq in db.sequences:
        parts: list[str] = []
        for event in seq.events:
            parts.append(str(event.item))
            parts.append("-1")
        parts.append("-2")
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


# --- attribute tables ---------------------------------------------------------

@dataclass
class AttributeTable:
    """Attribute rows: (sid, 1-based pos, values aligned with ``names``)."""

    names: tuple[str, ...]
    rows: list[tuple[int, int, tuple[int, ...]]]


def format_attribute_tsv(table: AttributeTable) -> str:
    lines = ["\t".join(("sid", "pos") + table.names)]
    for sid, pos, values in sorted(table.rows):
        lines.append("\t".join(str(v) for v in (sid, pos) + values))
    return "\n".join(lines) + "\n"


def parse_attribute_tsv(text: str) -> AttributeTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        return AttributeTable((), [])
    header = lines[0].split("\t")
    if header[:2] != ["sid", "pos"]:
        raise SeqDbError("attribute table header must start with 'sid\\tpos'")
    names = tuple(header[2:])
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != len(header):
            raise SeqDbError(f"attribute row {lineno} has {len(fields)} fields, "
                             f"expected {len(header)}")
        try:
            numbers = [int(f) for f in fields]
        except ValueError:
            raise SeqDbError(f"attribute row {lineno}: non-integer field") from None
        rows.append((numbers[0], numbers[1], tuple(numbers[2:])))
    return AttributeTable(names, rows)


def attach_attributes(
    db: AttributedDatabase,
    table: AttributeTable,
    ordering_attribute: str | None = None,
) -> AttributedDatabase:
    """Return a new database whose events carry the table's attributes.

    The table must cover every (sid, pos) pair exactly once.  Any attributes
    already present on the database are replaced.
    """
    by_key: dict[tuple[int, int], tuple[int, ...]] = {}
    for sid, pos, values in table.rows:
        key = (sid, pos)
        if key in by_key:
            raise AttributeCoverageError(f"duplicate attribute row for sid {sid} pos {pos}")
        by_key[key] = values
    expected = {(seq.sid, pos) for seq in db.sequences for pos in range(1, len(seq) + 1)}
    missing = expected - set(by_key)
    extra = set(by_key) - expected
    if missing:
        sid, pos = min(missing)
        raise AttributeCoverageError(f"missing attribute row for sid {sid} pos {pos}")
    if extra:
        sid, pos = min(extra)
        raise AttributeCoverageError(f"attribute row for unknown sid {sid} pos {pos}")
    sequences = []
    for seq in db.sequences:
        events = [
            Event(e.item, dict(zip(table.names, by_key[(seq.sid, j + 1)])))
            for j, e in enumerate(seq.events)
        ]
        sequences.append(Sequence(seq.sid, events))
    return AttributedDatabase(sequences, table.names, ordering_attribute)


# --- attribute generation -----------------------------------------------------

#: profile kinds: "time" accumulates per-click delays into timestamps,
#: "uniform" draws an independent value in [1, 100] per event
GenProfile = SequenceT[tuple[str, str]]
DEFAULT_PROFILE: GenProfile = (("time", "time"), ("price", "uniform"), ("quality", "uniform"))

LONG_DELAY_PROBABILITY = 0.05
SHORT_DELAY_RANGE = (0, 600)
LONG_DELAY_RANGE = (3600, 36000)
UNIFORM_RANGE = (1, 100)


def generate_attributes(
    db: AttributedDatabase, seed: int, profile: GenProfile = DEFAULT_PROFILE
) -> AttributeTable:
    """Generate synthetic attribute rows, deterministically for a given seed.

    The time profile draws a per-click delay, uniform in [0, 600] seconds but
    with probability 5% uniform in [3600, 36000] (a user leaving the session),
    and accumulates delays into strictly increasing timestamps.  Zero delays
    are clamped to one second to keep the ordering strict.
    """
    names = tuple(name for name, _ in profile)
    kinds = dict(profile)
    for name, kind in profile:
        if kind not in ("time", "uniform"):
            raise ValueError(f"unknown generation profile kind {kind!r} for {name!r}")
    rng = random.Random(seed)
    columns: dict[str, list[list[int]]] = {}
    for name in names:
        per_seq: list[list[int]] = []
        if kinds[name] == "time":
            for seq in db.sequences:
                clock = 0
                stamps = []
                for _ in seq.events:
                    if rng.random() < LONG_DELAY_PROBABILITY:
                        delta = rng.randint(*LONG_DELAY_RANGE)
                    else:
                        delta = rng.randint(*SHORT_DELAY_RANGE)
                    clock += max(delta, 1)
                    stamps.append(clock)
                per_seq.append(stamps)
        else:
            for seq in db.sequences:
                per_seq.append([rng.randint(*UNIFORM_RANGE) for _ in seq.events])
        columns[name] = per_seq
    rows = []
    for i, seq in enumerate(db.sequences):
        for j in range(len(seq)):
            rows.append((seq.sid, j + 1, tuple(columns[name][i][j] for name in names)))
    return AttributeTable(names, rows)


# --- statistics ---------------------------------------------------------------

@dataclass(frozen=True)
class DbStats:
    n_sequences: int
    n_items: int
    max_len: int
    avg_len: Fraction


def stats(db: AttributedDatabase) -> DbStats:
    if not db.sequences:
        return DbStats(0, 0, 0, Fraction(0))
    lengths = [len(seq) for seq in db.sequences]
    return DbStats(
        n_sequences=len(db.sequences),
        n_items=len(db.item_universe),
        max_len=max(lengths),
        avg_len=Fraction(sum(lengths), len(lengths)),
    )
