"""Static character-to-code lookup tables for Pinyin and Wubi units.

Tables are TSV files (`char<TAB>code`). One canonical code per character:
polyphones get a single context-free Pinyin reading, tones stripped, and a
whole Wubi code string (e.g. "RSH") is one atomic unit.
"""

from __future__ import annotations

import importlib.resources
import string
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParseError

PINYIN = "pinyin"
WUBI = "wubi"

UNK_CODE = "<NOCODE>"

# Wubi uses 25 keys; Z is a wildcard and never appears in table entries.
_WUBI_LETTERS = set(string.ascii_uppercase) - {"Z"}


@dataclass
class CodeTable:
    kind: str
    mapping: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.mapping)

    def lookup(self, char: str) -> str:
        return self.mapping.get(char, UNK_CODE)


def _validate_code(kind: str, code: str) -> bool:
    if not code or not code.isascii():
        return False
    if kind == WUBI:
        return 1 <= len(code) <= 4 and all(c in _WUBI_LETTERS for c in code)
    return all(c in string.ascii_lowercase for c in code)


def load_table(path: str, kind: str) -> CodeTable:
    """Load a TSV code table; later duplicate entries override earlier ones."""
    if kind not in (PINYIN, WUBI):
        raise ValueError(f"unknown table kind {kind!r}")
    table = CodeTable(kind=kind)
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise ParseError(f"{path}:{lineno}: expected char<TAB>code")
            char, code = line.split("\t", 1)
            if len(char) != 1:
                raise ParseError(f"{path}:{lineno}: key must be a single character")
            if not _validate_code(kind, code):
                raise ParseError(f"{path}:{lineno}: invalid {kind} code {code!r}")
            table.mapping[char] = code
    return table


def pinyin_of(table: CodeTable, char: str) -> str:
    """Tone-stripped lowercase syllable for one character, or <NOCODE>."""
    assert table.kind == PINYIN
    return table.lookup(char)


def wubi_of(table: CodeTable, char: str) -> str:
    """Full Wubi code string for one character, or <NOCODE>."""
    assert table.kind == WUBI
    return table.lookup(char)


def annotate(
    pinyin_table: CodeTable, wubi_table: CodeTable, chars: Sequence[str]
) -> tuple[list[str], list[str]]:
    """Positionally aligned Pinyin and Wubi unit sequences for chars."""
    return (
        [pinyin_table.lookup(c) for c in chars],
        [wubi_table.lookup(c) for c in chars],
    )


def bundled_path(name: str) -> str:
    """Absolute path of one of the data files shipped with the package."""
    return str(importlib.resources.files("pwseg").joinpath("data", name))


def load_bundled(kind: str) -> CodeTable:
    return load_table(bundled_path(f"{kind}_table.tsv"), kind)
