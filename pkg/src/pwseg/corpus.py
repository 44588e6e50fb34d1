"""Corpus ingestion: BMES tagging, unit vocabularies, sentence encoding.

Corpus files follow the SIGHAN convention: UTF-8, one sentence per line,
words separated by single ASCII spaces.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import EmptySentence
from .transducer import CodeTable, annotate

# Tag ids are fixed and written into checkpoints; decoding never depends on
# runtime configuration.
B, M, E, S = 0, 1, 2, 3
TAG_NAMES = "BMES"
NUM_TAGS = 4

UNK = "<UNK>"

DEFAULT_MAX_SENTENCE_LENGTH = 80


@dataclass(frozen=True)
class TaggedSentence:
    chars: str
    tags: tuple[int, ...]

    def __post_init__(self):
        assert len(self.chars) == len(self.tags)

    @property
    def words(self) -> list[str]:
        from .evaluate import tags_to_spans

        return [self.chars[s:e] for s, e in tags_to_spans(self.tags)]


def word_tags(n: int) -> list[int]:
    """BMES tags for a single word of n characters."""
    if n == 1:
        return [S]
    return [B] + [M] * (n - 2) + [E]


def parse_segmented_line(line: str) -> TaggedSentence:
    """Convert one space-segmented line into characters plus BMES tags.

    Consecutive spaces produce empty words, which are skipped. Raises
    EmptySentence if nothing remains.
    """
    words = [w for w in line.strip().split(" ") if w]
    if not words:
        raise EmptySentence("no words in line")
    chars = "".join(words)
    tags: list[int] = []
    for w in words:
        tags.extend(word_tags(len(w)))
    return TaggedSentence(chars, tuple(tags))


def read_corpus(path: str) -> list[TaggedSentence]:
    """Parse every non-empty line of a segmented corpus file."""
    sentences = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            try:
                sentences.append(parse_segmented_line(line))
            except EmptySentence:
                continue
    return sentences


class UnitVocab:
    """Bijection between unit strings and dense ids, with a reserved UNK slot.

    Id 0 is always "<UNK>"; remaining units are ordered by descending
    frequency, ties broken by the unit string, so vocabulary files are
    byte-identical for identical input multisets.
    """

    def __init__(self, units: Sequence[str]):
        if not units or units[0] != UNK:
            raise ValueError("unit list must start with <UNK>")
        self.units = list(units)
        self.index = {u: i for i, u in enumerate(self.units)}
        if len(self.index) != len(self.units):
            raise ValueError("duplicate units")

    unk_id = 0

    def __len__(self) -> int:
        return len(self.units)

    def lookup(self, unit: str) -> int:
        return self.index.get(unit, self.unk_id)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for u in self.units:
                f.write(u + "\n")

    @classmethod
    def load(cls, path: str) -> "UnitVocab":
        with open(path, encoding="utf-8") as f:
            units = [line.rstrip("\n") for line in f]
        return cls(units)


def build_vocab(sequences: Iterable[Sequence[str]], min_count: int = 1) -> UnitVocab:
    """Count units across sequences and keep those with frequency >= min_count."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts: Counter[str] = Counter()
    for seq in sequences:
        counts.update(seq)
    counts.pop(UNK, None)
    kept = sorted(
        (u for u, c in counts.items() if c >= min_count),
        key=lambda u: (-counts[u], u),
    )
    return UnitVocab([UNK] + kept)


@dataclass(frozen=True)
class EncodedSentence:
    char_ids: tuple[int, ...]
    pinyin_ids: tuple[int, ...]
    wubi_ids: tuple[int, ...]
    tags: tuple[int, ...]

    def __post_init__(self):
        n = len(self.char_ids)
        assert len(self.pinyin_ids) == len(self.wubi_ids) == len(self.tags) == n

    @property
    def length(self) -> int:
        return len(self.char_ids)


def encode_sentence(
    sentence: TaggedSentence,
    char_vocab: UnitVocab,
    pinyin_vocab: UnitVocab,
    wubi_vocab: UnitVocab,
    pinyin_table: CodeTable,
    wubi_table: CodeTable,
    max_len: int = DEFAULT_MAX_SENTENCE_LENGTH,
) -> EncodedSentence:
    """Map one tagged sentence to aligned id sequences for the three streams.

    Sentences longer than max_len are truncated (tags included); unknown
    units map to each vocabulary's UNK id.
    """
    chars = sentence.chars[:max_len]
    tags = sentence.tags[: len(chars)]
    py_units, wb_units = annotate(pinyin_table, wubi_table, chars)
    return EncodedSentence(
        char_ids=tuple(char_vocab.lookup(c) for c in chars),
        pinyin_ids=tuple(pinyin_vocab.lookup(u) for u in py_units),
        wubi_ids=tuple(wubi_vocab.lookup(u) for u in wb_units),
        tags=tags,
    )


def unit_streams(
    sentences: Iterable[TaggedSentence],
    pinyin_table: CodeTable,
    wubi_table: CodeTable,
) -> Iterator[tuple[str | Sequence[str], list[str], list[str]]]:
    """Yield (chars, pinyin units, wubi units) per sentence."""
    for s in sentences:
        py, wb = annotate(pinyin_table, wubi_table, s.chars)
        yield s.chars, py, wb


def build_vocabs(
    sentences: Sequence[TaggedSentence],
    pinyin_table: CodeTable,
    wubi_table: CodeTable,
    min_count: int = 1,
) -> tuple[UnitVocab, UnitVocab, UnitVocab]:
    """Build the character, Pinyin and Wubi vocabularies in one pass."""
    streams = list(unit_streams(sentences, pinyin_table, wubi_table))
    return (
        build_vocab((cs for cs, _, _ in streams), min_count),
        build_vocab((py for _, py, _ in streams), min_count),
        build_vocab((wb for _, _, wb in streams), min_count),
    )
