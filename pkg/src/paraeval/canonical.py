"""Canonical word+label sequences and model-output standardization.

Every system under evaluation, whatever its native output format, is reduced
to one canonical form: an ordered sequence of (word, label) pairs. Three
input formats are supported:

``labeled``
    Every word followed by its bracketed label: ``aphasia [c] fekts [p] ...``
``single_seq``
    Labels appear only after paraphasic words: ``aphasia fekts [p] ...``
``multi_seq``
    Two parallel streams, subword tokens and one label per subword, joined
    into words and collapsed by majority vote.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .errors import FormatError
from .labels import VOTE_PRECEDENCE, ParaphasiaLabel, is_label_token

#: Default word-boundary mark for subword token streams (sentencepiece-style
#: prefix). Lines that contain no mark at all are read as one word per token.
BOUNDARY_MARK = "▁"

FORMAT_TAGS = ("labeled", "single_seq", "multi_seq")


@dataclass(frozen=True)
class CanonicalSequence:
    """An utterance as (word, label) pairs, the common currency of scoring."""

    utt_id: str
    words: tuple[str, ...]
    labels: tuple[ParaphasiaLabel, ...]

    def __post_init__(self):
        if len(self.words) != len(self.labels):
            raise ValueError(f"{self.utt_id}: {len(self.words)} words vs {len(self.labels)} labels")
        for word in self.words:
            if not word:
                raise ValueError(f"{self.utt_id}: empty word token")

    @property
    def pairs(self) -> tuple[tuple[str, ParaphasiaLabel], ...]:
        return tuple(zip(self.words, self.labels))

    def __len__(self) -> int:
        return len(self.words)

    def to_labeled_text(self) -> str:
        """Interleaved ``word [x]`` form with every label explicit."""
        return " ".join(f"{w} {l.token}" for w, l in zip(self.words, self.labels))

    def to_single_seq_text(self) -> str:
        """Sparse form: labels only after paraphasic words."""
        parts = []
        for word, label in zip(self.words, self.labels):
            parts.append(word)
            if label.is_paraphasia:
                parts.append(label.token)
        return " ".join(parts)

    def to_record(self) -> str:
        """One-line JSON record (utt_id, words, labels)."""
        return json.dumps(
            {"utt_id": self.utt_id, "words": list(self.words), "labels": [l.value for l in self.labels]},
            ensure_ascii=False,
            sort_keys=True,
        )

    @classmethod
    def from_record(cls, line: str) -> "CanonicalSequence":
        try:
            payload = json.loads(line)
            return cls(
                utt_id=str(payload["utt_id"]),
                words=tuple(payload["words"]),
                labels=tuple(ParaphasiaLabel(l) for l in payload["labels"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad canonical record: {exc}") from exc


@dataclass(frozen=True)
class MultiSeqOutput:
    """Parallel subword-token and label streams from a two-head model.

    ``word_groups`` may spell out the token partition explicitly; otherwise
    tokens are grouped by the boundary mark.
    """

    asr_tokens: tuple[str, ...]
    para_labels: tuple[ParaphasiaLabel, ...]
    boundary_mark: str = BOUNDARY_MARK
    explicit_groups: tuple[tuple[int, ...], ...] | None = field(default=None)

    def __post_init__(self):
        if len(self.asr_tokens) != len(self.para_labels):
            raise FormatError(
                f"{len(self.asr_tokens)} subword tokens vs {len(self.para_labels)} labels"
            )
        if self.explicit_groups is not None:
            flat = [i for group in self.explicit_groups for i in group]
            if sorted(flat) != list(range(len(self.asr_tokens))):
                raise FormatError("explicit word groups must partition the token stream")
            if any(len(group) == 0 for group in self.explicit_groups):
                raise FormatError("empty word group")

    def word_groups(self) -> tuple[tuple[int, ...], ...]:
        """Token indices per word.

        When any token carries the boundary mark, marked tokens start new
        words and unmarked ones continue the previous word. A stream with no
        marks at all is one word per token.
        """
        if self.explicit_groups is not None:
            return self.explicit_groups
        marked = any(t.startswith(self.boundary_mark) for t in self.asr_tokens)
        groups: list[list[int]] = []
        for index, token in enumerate(self.asr_tokens):
            if not marked or token.startswith(self.boundary_mark) or not groups:
                groups.append([index])
            else:
                groups[-1].append(index)
        return tuple(tuple(g) for g in groups)


def _split_tokens(line: str) -> list[str]:
    return line.split()


def parse_labeled_text(line: str, utt_id: str = "") -> CanonicalSequence:
    """Parse strict word/label alternation: ``w0 [l0] w1 [l1] ...``."""
    words: list[str] = []
    labels: list[ParaphasiaLabel] = []
    expecting_label = False
    for index, token in enumerate(_split_tokens(line)):
        if is_label_token(token):
            if not expecting_label:
                raise FormatError("label token without a preceding word", token_index=index)
            try:
                labels.append(ParaphasiaLabel.from_token(token))
            except FormatError as exc:
                raise FormatError(str(exc), token_index=index) from None
            expecting_label = False
        else:
            if expecting_label:
                raise FormatError(f"expected a label token, got {token!r}", token_index=index)
            words.append(token)
            expecting_label = True
    if expecting_label:
        raise FormatError("trailing word without a label", token_index=len(words) + len(labels) - 1)
    return CanonicalSequence(utt_id=utt_id, words=tuple(words), labels=tuple(labels))


def parse_single_seq(line: str, utt_id: str = "") -> CanonicalSequence:
    """Parse the sparse form where a label token marks the preceding word."""
    words: list[str] = []
    labels: list[ParaphasiaLabel] = []
    previous_was_label = True  # a label may not open the sequence
    for index, token in enumerate(_split_tokens(line)):
        if is_label_token(token):
            if previous_was_label or not words:
                raise FormatError("label token without a preceding word", token_index=index)
            try:
                labels[-1] = ParaphasiaLabel.from_token(token)
            except FormatError as exc:
                raise FormatError(str(exc), token_index=index) from None
            previous_was_label = True
        else:
            words.append(token)
            labels.append(ParaphasiaLabel.C)
            previous_was_label = False
    return CanonicalSequence(utt_id=utt_id, words=tuple(words), labels=tuple(labels))


def parse_multi_seq(
    asr_line: str,
    para_line: str,
    utt_id: str = "",
    boundary_mark: str = BOUNDARY_MARK,
) -> MultiSeqOutput:
    """Parse the two parallel multi-seq streams.

    Accepts the ``ASR:`` / ``Para:`` line prefixes as written in inspection
    dumps; labels may be bracketed (``[c]``) or bare letters.
    """
    asr_text = asr_line.strip()
    para_text = para_line.strip()
    if asr_text.lower().startswith("asr:"):
        asr_text = asr_text[4:].strip()
    if para_text.lower().startswith("para:"):
        para_text = para_text[5:].strip()
    tokens = tuple(_split_tokens(asr_text))
    labels = tuple(ParaphasiaLabel.from_token(t) for t in _split_tokens(para_text))
    return MultiSeqOutput(asr_tokens=tokens, para_labels=labels, boundary_mark=boundary_mark)


def expand_word_labels_to_subwords(
    pairs: list[tuple[str, ParaphasiaLabel]] | tuple[tuple[str, ParaphasiaLabel], ...],
    subword_counts: list[int] | tuple[int, ...],
) -> tuple[ParaphasiaLabel, ...]:
    """Repeat each word's label over its subword tokens."""
    if len(pairs) != len(subword_counts):
        raise ValueError(f"{len(pairs)} words vs {len(subword_counts)} subword counts")
    out: list[ParaphasiaLabel] = []
    for (word, label), count in zip(pairs, subword_counts):
        if count < 1:
            raise ValueError(f"word {word!r} has subword count {count}; must be >= 1")
        out.extend([label] * count)
    return tuple(out)


def majority_label(labels: list[ParaphasiaLabel] | tuple[ParaphasiaLabel, ...]) -> ParaphasiaLabel:
    """Majority class of a word's subword labels, ties broken P > N > S > C."""
    if not labels:
        raise ValueError("cannot vote over zero labels")
    counts = Counter(labels)
    return max(counts, key=lambda label: (counts[label], VOTE_PRECEDENCE[label]))


def collapse_subwords(m: MultiSeqOutput, utt_id: str = "") -> CanonicalSequence:
    """Join subwords into words and majority-vote each word's label."""
    words: list[str] = []
    labels: list[ParaphasiaLabel] = []
    for group in m.word_groups():
        text = "".join(m.asr_tokens[i].removeprefix(m.boundary_mark) for i in group)
        if not text:
            raise FormatError("word group collapses to an empty word")
        words.append(text)
        labels.append(majority_label([m.para_labels[i] for i in group]))
    return CanonicalSequence(utt_id=utt_id, words=tuple(words), labels=tuple(labels))


def standardize(
    payload: str | tuple[str, str] | MultiSeqOutput,
    format_tag: str,
    utt_id: str = "",
) -> CanonicalSequence:
    """Dispatch a raw model output to its parser by format tag."""
    if format_tag == "labeled":
        if not isinstance(payload, str):
            raise FormatError("labeled format expects a text line")
        return parse_labeled_text(payload, utt_id=utt_id)
    if format_tag in ("single_seq", "single-seq"):
        if not isinstance(payload, str):
            raise FormatError("single_seq format expects a text line")
        return parse_single_seq(payload, utt_id=utt_id)
    if format_tag in ("multi_seq", "multi-seq"):
        if isinstance(payload, MultiSeqOutput):
            return collapse_subwords(payload, utt_id=utt_id)
        if isinstance(payload, str):
            if "\t" not in payload:
                raise FormatError("multi_seq single-record form needs tab-separated streams")
            asr_line, _, para_line = payload.partition("\t")
            return collapse_subwords(parse_multi_seq(asr_line, para_line), utt_id=utt_id)
        asr_line, para_line = payload
        return collapse_subwords(parse_multi_seq(asr_line, para_line), utt_id=utt_id)
    raise ValueError(f"unknown format tag {format_tag!r}")
