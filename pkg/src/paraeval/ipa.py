"""IPA to pseudo-word conversion.

Non-word productions transcribed in IPA are rendered as readable grapheme
pseudo-words in two steps: greedy longest-match segmentation of the IPA
string into phones, then a fixed phone-to-grapheme substitution. Both
mapping tables ship as editable data files (see ``tables/``) and can be
overridden per run.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ConversionError

# Stress, length and syllable marks carry no grapheme content; they are
# removed before segmentation. Combining diacritics (category Mn) and
# modifier letters (category Lm, which covers the IPA stress/length marks)
# are stripped wholesale.
_EXPLICIT_STRIP = {".", "'", "’", "ˈ", "ˌ", "ː", "ˑ", "‿"}


def _strip_marks(ipa: str) -> str:
    out = []
    for ch in ipa:
        if ch in _EXPLICIT_STRIP:
            continue
        if unicodedata.category(ch) in ("Mn", "Lm"):
            continue
        out.append(ch)
    return "".join(out)


@dataclass(frozen=True)
class PhoneSequence:
    """Ordered phones from the converter's inventory. Never empty."""

    phones: tuple[str, ...]

    def __post_init__(self):
        if not self.phones:
            raise ConversionError("phone sequence must be non-empty")

    def __iter__(self):
        return iter(self.phones)

    def __len__(self):
        return len(self.phones)


def _read_table(path: Path) -> dict[str, str]:
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ConversionError(f"{path}:{lineno}: expected two tab-separated columns")
            key, value = parts
            if key in table:
                raise ConversionError(f"{path}:{lineno}: duplicate entry for {key!r}")
            table[key] = value
    return table


class ConversionTables:
    """Loaded IPA->phone and phone->grapheme tables.

    Immutable after construction, so instances are safe to share across
    threads.
    """

    def __init__(self, ipa_to_phone: dict[str, str], phone_to_grapheme: dict[str, str]):
        missing = sorted(set(ipa_to_phone.values()) - set(phone_to_grapheme))
        if missing:
            raise ConversionError(f"phones without grapheme mappings: {', '.join(missing)}")
        for phone, grapheme in phone_to_grapheme.items():
            if not (grapheme.isascii() and grapheme.isalpha() and grapheme.islower()):
                raise ConversionError(f"grapheme for {phone} must be lowercase a-z, got {grapheme!r}")
        self._ipa_to_phone = dict(ipa_to_phone)
        self._phone_to_grapheme = dict(phone_to_grapheme)
        self._max_symbol_len = max(len(s) for s in ipa_to_phone)

    @property
    def inventory(self) -> frozenset[str]:
        return frozenset(self._phone_to_grapheme)

    @classmethod
    def from_files(cls, ipa_table_path: str | Path, phone_table_path: str | Path) -> "ConversionTables":
        return cls(_read_table(Path(ipa_table_path)), _read_table(Path(phone_table_path)))

    @classmethod
    def bundled(cls) -> "ConversionTables":
        return _bundled_tables()

    def segment(self, ipa: str) -> list[tuple[str, str]]:
        """Greedy longest-match segmentation into (ipa_symbol, phone) pairs.

        The concatenation of the matched symbols reproduces the mark-stripped
        input exactly.
        """
        if not ipa:
            raise ConversionError("empty IPA input")
        text = _strip_marks(ipa.lower())
        if not text:
            raise ConversionError(f"IPA input {ipa!r} is empty after removing stress/length marks")
        pairs: list[tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            for width in range(min(self._max_symbol_len, len(text) - pos), 0, -1):
                symbol = text[pos : pos + width]
                phone = self._ipa_to_phone.get(symbol)
                if phone is not None:
                    pairs.append((symbol, phone))
                    pos += width
                    break
            else:
                raise ConversionError(
                    f"unmappable IPA character {text[pos]!r} at offset {pos} in {text!r}",
                    symbol=text[pos],
                    offset=pos,
                )
        return pairs

    def ipa_to_phones(self, ipa: str) -> PhoneSequence:
        """Segment an IPA string into phones by greedy longest match."""
        return PhoneSequence(tuple(phone for _, phone in self.segment(ipa)))

    def phones_to_graphemes(self, phones: PhoneSequence) -> str:
        chunks = []
        for phone in phones:
            grapheme = self._phone_to_grapheme.get(phone)
            if grapheme is None:
                raise ConversionError(f"phone {phone!r} not in inventory")
            chunks.append(grapheme)
        return "".join(chunks)

    def ipa_to_pseudoword(self, ipa: str) -> str:
        return self.phones_to_graphemes(self.ipa_to_phones(ipa))


@lru_cache(maxsize=1)
def _bundled_tables() -> ConversionTables:
    root = resources.files("paraeval") / "tables"
    with resources.as_file(root / "ipa_phones.tsv") as ipa_path, resources.as_file(
        root / "phone_graphemes.tsv"
    ) as phone_path:
        return ConversionTables.from_files(ipa_path, phone_path)


def ipa_to_phones(ipa: str, tables: ConversionTables | None = None) -> PhoneSequence:
    return (tables or ConversionTables.bundled()).ipa_to_phones(ipa)


def phones_to_graphemes(phones: PhoneSequence, tables: ConversionTables | None = None) -> str:
    return (tables or ConversionTables.bundled()).phones_to_graphemes(phones)


def ipa_to_pseudoword(ipa: str, tables: ConversionTables | None = None) -> str:
    return (tables or ConversionTables.bundled()).ipa_to_pseudoword(ipa)
