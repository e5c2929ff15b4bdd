"""CHAT transcript parsing and oracle label extraction.

Reads the main speaker tiers of CHAT-format (.cha) files, filters out
material that cannot be scored (interviewer speech, unintelligible or
overlapping utterances), and normalizes the kept utterances into lowercase,
punctuation-free word sequences with one paraphasia label per word.

Only the subset of CHAT needed for that job is understood: speaker tiers,
continuation lines, timestamps, target-word annotations ``[: word]``, error
codes ``[* x]``, retracing marks, and ``@u`` IPA forms. Dependent tiers
(%mor, %gra, ...) and header lines are skipped.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ChatParseError
from .ipa import ConversionTables
from .labels import ParaphasiaLabel

#: Speaker-tier prefixes treated as participant speech. AphasiaBank uses PAR.
DEFAULT_PARTICIPANT_PREFIXES = ("PAR",)

#: Punctuation stripped from word tokens. Terminal markers, commas, quote and
#: CHAT-specific symbols; intra-word apostrophes and hyphens are kept so
#: contractions stay single tokens.
PUNCTUATION = set(".,!?;:\"“”‘’«»…‡„()[]<>{}")

_TIER_RE = re.compile(r"^\*([A-Za-z][A-Za-z0-9]*):\s*(.*)$")
_BULLET_TS_RE = re.compile(r"\x15(\d+)_(\d+)\x15")
_PLAIN_TS_RE = re.compile(r"(?<![\w_])(\d+)_(\d+)(?![\w_])")
# One scan token: a bracketed annotation, an angle-bracket word group, or a
# bare word. Annotations and groups may contain spaces; words never do.
_TOKEN_RE = re.compile(r"\[[^\[\]]*\]|<[^<>]*>|\S+")

_OVERLAP_MARKERS = ("[>]", "[<]", "+<")
_RETRACE_MARKERS = {"[/]", "[//]", "[///]"}


class DiscardReason(enum.Enum):
    UNINTELLIGIBLE = "unintelligible"
    OVERLAPPING_SPEECH = "overlapping_speech"
    NON_PARTICIPANT = "non_participant"
    EMPTY_AFTER_NORMALIZATION = "empty_after_normalization"


@dataclass(frozen=True)
class RawChatUtterance:
    """One main-tier utterance as read from a .cha file."""

    speaker_tier: str
    raw_text: str
    timestamps: tuple[int, int] | None
    source_file: str
    line_number: int

    def __post_init__(self):
        if not self.raw_text:
            raise ChatParseError("empty utterance text", self.source_file, self.line_number)
        if self.timestamps is not None:
            start, end = self.timestamps
            if start > end:
                raise ChatParseError(
                    f"timestamp start {start} exceeds end {end}", self.source_file, self.line_number
                )


@dataclass(frozen=True)
class OracleUtterance:
    """Normalized word/label sequence, or a discard record with its reason."""

    utt_id: str
    words: tuple[str, ...]
    labels: tuple[ParaphasiaLabel, ...]
    is_discarded: bool = False
    discard_reason: DiscardReason | None = None

    def __post_init__(self):
        if len(self.words) != len(self.labels):
            raise ValueError(f"{self.utt_id}: {len(self.words)} words vs {len(self.labels)} labels")
        if self.is_discarded and self.discard_reason is None:
            raise ValueError(f"{self.utt_id}: discarded utterance without a reason")

    def serialize(self) -> str:
        """Text form with labels only after paraphasic words, e.g. ``bed [s]``."""
        parts = []
        for word, label in zip(self.words, self.labels):
            parts.append(word)
            if label.is_paraphasia:
                parts.append(label.token)
        return " ".join(parts)


def parse_chat_file(content: str, source_file: str = "<string>") -> list[RawChatUtterance]:
    """Split CHAT text into main-tier utterance records.

    Continuation lines (leading whitespace) are merged into the open tier;
    dependent tiers and headers are skipped. A ``*`` line without a
    well-formed ``*SPK:`` marker raises :class:`ChatParseError`.
    """
    utterances: list[RawChatUtterance] = []
    open_tier: tuple[str, int, list[str]] | None = None  # speaker, line_number, text parts
    in_dependent = False

    def flush():
        nonlocal open_tier
        if open_tier is None:
            return
        speaker, line_number, parts = open_tier
        open_tier = None
        text = " ".join(" ".join(parts).split())
        text, timestamps = _extract_timestamps(text)
        utterances.append(
            RawChatUtterance(
                speaker_tier=speaker,
                raw_text=text,
                timestamps=timestamps,
                source_file=source_file,
                line_number=line_number,
            )
        )

    for line_number, raw_line in enumerate(content.splitlines(), start=1):
        line = raw_line.rstrip()
        if not line:
            flush()
            in_dependent = False
            continue
        if line.startswith("*"):
            flush()
            in_dependent = False
            match = _TIER_RE.match(line)
            if not match:
                raise ChatParseError(f"malformed tier marker {line.split()[0]!r}", source_file, line_number)
            open_tier = (match.group(1), line_number, [match.group(2)])
        elif line.startswith("%"):
            flush()
            in_dependent = True
        elif line.startswith("@"):
            flush()
            in_dependent = False
        elif line[0] in " \t":
            if in_dependent:
                continue
            if open_tier is not None:
                open_tier[2].append(line.strip())
            # stray indented line outside any tier: ignore
        else:
            # bare continuation without indentation; attach if a tier is open
            if open_tier is not None and not in_dependent:
                open_tier[2].append(line.strip())
    flush()
    return utterances


def _extract_timestamps(text: str) -> tuple[str, tuple[int, int] | None]:
    """Pull the first timestamp bullet out of the text; strip all of them."""
    timestamps = None
    match = _BULLET_TS_RE.search(text) or _PLAIN_TS_RE.search(text)
    if match:
        timestamps = (int(match.group(1)), int(match.group(2)))
    text = _BULLET_TS_RE.sub(" ", text)
    text = _PLAIN_TS_RE.sub(" ", text)
    return " ".join(text.split()), timestamps


def filter_utterance(
    u: RawChatUtterance, participant_prefixes: tuple[str, ...] = DEFAULT_PARTICIPANT_PREFIXES
) -> DiscardReason | None:
    """Decide whether an utterance is scorable. ``None`` means keep."""
    if not any(u.speaker_tier.startswith(p) for p in participant_prefixes):
        return DiscardReason.NON_PARTICIPANT
    tokens = u.raw_text.split()
    if "xxx" in tokens:
        return DiscardReason.UNINTELLIGIBLE
    for marker in _OVERLAP_MARKERS:
        if marker in tokens:
            return DiscardReason.OVERLAPPING_SPEECH
    return None


def _normalize_word(token: str, tables: ConversionTables) -> str | None:
    """Lowercase, strip punctuation, convert ``@u`` IPA forms. None to drop."""
    # Non-speech material: events/fillers (&-um, &=laughs) and utterance
    # markers (+..., +//.) carry no scorable words.
    if token.startswith("&") or token.startswith("+"):
        return None
    stripped = "".join(ch for ch in token if ch not in PUNCTUATION)
    if not stripped:
        return None
    if "@" in stripped:
        stem, _, code = stripped.partition("@")
        if not stem:
            return None
        if code == "u":
            return tables.ipa_to_pseudoword(stem)
        stripped = stem  # other @-codes mark word forms; keep the word itself
    word = stripped.lower().strip("'-")
    return word or None


def to_oracle(
    u: RawChatUtterance,
    utt_id: str | None = None,
    tables: ConversionTables | None = None,
) -> OracleUtterance:
    """Normalize a kept utterance into the oracle word/label sequence.

    Error codes ``[* p]``, ``[* n]``, ``[* s]`` label the preceding word (or
    every word of a preceding ``<...>`` group); other error codes are dropped
    and the word keeps C. Target annotations ``[: word]`` and retracing marks
    are removed; the spoken material stays.
    """
    tables = tables or ConversionTables.bundled()
    if utt_id is None:
        utt_id = f"{Path(u.source_file).stem}-{u.line_number:04d}"
    words: list[str] = []
    labels: list[ParaphasiaLabel] = []
    last_group: list[int] = []

    for token in _TOKEN_RE.findall(u.raw_text):
        if token.startswith("[") and token.endswith("]"):
            body = token[1:-1].strip()
            if body.startswith("*"):
                code = body[1:].strip().lower()
                if code in ("p", "n", "s"):
                    if not last_group:
                        raise ChatParseError(
                            f"error code {token!r} has no preceding word",
                            u.source_file,
                            u.line_number,
                        )
                    label = ParaphasiaLabel(code)
                    for index in last_group:
                        labels[index] = label
                # unrecognized error classes are stripped; word keeps C
            # [: target], retracing marks, comments, postcodes: dropped
            continue
        if token.startswith("<") and token.endswith(">"):
            group: list[int] = []
            for inner in token[1:-1].split():
                word = _normalize_word(inner, tables)
                if word is not None:
                    words.append(word)
                    labels.append(ParaphasiaLabel.C)
                    group.append(len(words) - 1)
            if group:
                last_group = group
            continue
        word = _normalize_word(token, tables)
        if word is not None:
            words.append(word)
            labels.append(ParaphasiaLabel.C)
            last_group = [len(words) - 1]

    if not words:
        return OracleUtterance(
            utt_id=utt_id,
            words=(),
            labels=(),
            is_discarded=True,
            discard_reason=DiscardReason.EMPTY_AFTER_NORMALIZATION,
        )
    return OracleUtterance(utt_id=utt_id, words=tuple(words), labels=tuple(labels))


@dataclass(frozen=True)
class ChatProcessingResult:
    """Everything produced from one .cha file: kept and discarded records."""

    kept: tuple[OracleUtterance, ...]
    discarded: tuple[tuple[RawChatUtterance, OracleUtterance], ...] = field(default=())


def process_chat_content(
    content: str,
    source_file: str = "<string>",
    participant_prefixes: tuple[str, ...] = DEFAULT_PARTICIPANT_PREFIXES,
    tables: ConversionTables | None = None,
) -> ChatProcessingResult:
    """Full parse -> filter -> normalize pipeline over one file's text."""
    kept: list[OracleUtterance] = []
    discarded: list[tuple[RawChatUtterance, OracleUtterance]] = []
    stem = Path(source_file).stem
    for raw in parse_chat_file(content, source_file):
        utt_id = f"{stem}-{raw.line_number:04d}"
        reason = filter_utterance(raw, participant_prefixes)
        if reason is not None:
            discarded.append(
                (raw, OracleUtterance(utt_id, (), (), is_discarded=True, discard_reason=reason))
            )
            continue
        oracle = to_oracle(raw, utt_id=utt_id, tables=tables)
        if oracle.is_discarded:
            discarded.append((raw, oracle))
        else:
            kept.append(oracle)
    return ChatProcessingResult(kept=tuple(kept), discarded=tuple(discarded))
