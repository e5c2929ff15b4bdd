"""Corpus metrics: WER, AWER, temporal distance and utterance-level F1.

WER and AWER pool edit counts over the whole corpus before dividing (one
aggregate score), while temporal distance is averaged across per-utterance
values. Temporal distance (TD) measures, along the word alignment of
reference and hypothesis, how far each true paraphasia occurrence is from
the nearest predicted occurrence of the same class, and vice versa; the sum
is normalized by the number of alignment columns. A class occurring on one
side with no counterpart on the other contributes the full (capped)
utterance length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .alignment import align
from .canonical import CanonicalSequence
from .labels import PARAPHASIA_CLASSES, ParaphasiaLabel


@dataclass(frozen=True)
class TdBreakdown:
    """Normalized temporal distances; ``td_all`` is the exact sum of p/n/s."""

    td_binary: float
    td_p: float
    td_n: float
    td_s: float
    td_all: float

    @classmethod
    def build(cls, td_binary: float, td_p: float, td_n: float, td_s: float) -> "TdBreakdown":
        return cls(td_binary=td_binary, td_p=td_p, td_n=td_n, td_s=td_s, td_all=td_p + td_n + td_s)

    def component(self, cls_: ParaphasiaLabel) -> float:
        return {ParaphasiaLabel.P: self.td_p, ParaphasiaLabel.N: self.td_n, ParaphasiaLabel.S: self.td_s}[cls_]


@dataclass(frozen=True)
class CorpusScore:
    """Aggregate report card for one system against a reference corpus."""

    wer: float
    awer: float
    td: TdBreakdown
    f1_p: float
    f1_n: float
    f1_s: float
    n_utterances: int

    def to_dict(self) -> dict:
        return {
            "wer": self.wer,
            "awer": self.awer,
            "td_binary": self.td.td_binary,
            "td_p": self.td.td_p,
            "td_n": self.td.td_n,
            "td_s": self.td.td_s,
            "td_all": self.td.td_all,
            "f1_p": self.f1_p,
            "f1_n": self.f1_n,
            "f1_s": self.f1_s,
            "n_utterances": self.n_utterances,
        }


def _check_paired(refs: Sequence, hyps: Sequence):
    if len(refs) != len(hyps):
        raise ValueError(f"{len(refs)} references vs {len(hyps)} hypotheses")
    if not refs:
        raise ValueError("empty corpus")


def wer(refs: Sequence[Sequence[str]], hyps: Sequence[Sequence[str]]) -> float:
    """Corpus word error rate in percent: pooled edit counts / pooled ref words."""
    _check_paired(refs, hyps)
    total_errors = 0
    total_words = 0
    for ref, hyp in zip(refs, hyps):
        total_errors += align(list(ref), list(hyp)).distance
        total_words += len(ref)
    if total_words == 0:
        raise ValueError("reference corpus has no words")
    return 100.0 * total_errors / total_words


def interleave(seq: CanonicalSequence) -> list[str]:
    """Flatten to the token stream ``w0 [l0] w1 [l1] ...`` used by AWER."""
    out: list[str] = []
    for word, label in zip(seq.words, seq.labels):
        out.append(word)
        out.append(label.token)
    return out


def awer(refs: Sequence[CanonicalSequence], hyps: Sequence[CanonicalSequence]) -> float:
    """Augmented WER: word error rate over interleaved word+label streams."""
    _check_paired(refs, hyps)
    return wer([interleave(r) for r in refs], [interleave(h) for h in hyps])


def _column_labels(
    ref: CanonicalSequence, hyp: CanonicalSequence
) -> tuple[list[ParaphasiaLabel], list[ParaphasiaLabel]]:
    """Index both label sequences over alignment columns; gaps read as C."""
    ops = align(ref.words, hyp.words).ops
    ref_labels = [
        ref.labels[op.ref_index] if op.ref_index is not None else ParaphasiaLabel.C for op in ops
    ]
    hyp_labels = [
        hyp.labels[op.hyp_index] if op.hyp_index is not None else ParaphasiaLabel.C for op in ops
    ]
    return ref_labels, hyp_labels


def _directed_sum(sources: list[int], targets: list[int], cap: int) -> int:
    total = 0
    for i in sources:
        total += min((abs(i - j) for j in targets), default=cap)
    return total


def _class_td(ref_positions: list[int], hyp_positions: list[int], length: int) -> float:
    raw = _directed_sum(ref_positions, hyp_positions, length) + _directed_sum(
        hyp_positions, ref_positions, length
    )
    return raw / length


def td_breakdown(ref: CanonicalSequence, hyp: CanonicalSequence) -> TdBreakdown:
    """Per-utterance temporal distances over the word alignment."""
    ref_labels, hyp_labels = _column_labels(ref, hyp)
    length = len(ref_labels)
    if length == 0:
        return TdBreakdown.build(0.0, 0.0, 0.0, 0.0)

    per_class = {}
    for cls_ in PARAPHASIA_CLASSES:
        ref_pos = [i for i, l in enumerate(ref_labels) if l is cls_]
        hyp_pos = [i for i, l in enumerate(hyp_labels) if l is cls_]
        per_class[cls_] = _class_td(ref_pos, hyp_pos, length)

    ref_any = [i for i, l in enumerate(ref_labels) if l.is_paraphasia]
    hyp_any = [i for i, l in enumerate(hyp_labels) if l.is_paraphasia]
    td_binary = _class_td(ref_any, hyp_any, length)

    return TdBreakdown.build(
        td_binary,
        per_class[ParaphasiaLabel.P],
        per_class[ParaphasiaLabel.N],
        per_class[ParaphasiaLabel.S],
    )


def mean_td(breakdowns: Iterable[TdBreakdown]) -> TdBreakdown:
    """Componentwise mean; ``td_all`` stays the exact sum of the class means."""
    items = list(breakdowns)
    if not items:
        raise ValueError("cannot average zero utterances")
    n = len(items)
    return TdBreakdown.build(
        sum(b.td_binary for b in items) / n,
        sum(b.td_p for b in items) / n,
        sum(b.td_n for b in items) / n,
        sum(b.td_s for b in items) / n,
    )


def utterance_f1(
    refs: Sequence[CanonicalSequence],
    hyps: Sequence[CanonicalSequence],
    cls_: ParaphasiaLabel,
) -> float:
    """Binary F1 over utterances; positive = any word of the class present."""
    if cls_ not in PARAPHASIA_CLASSES:
        raise ValueError(f"utterance F1 is defined for paraphasia classes, not {cls_}")
    _check_paired(refs, hyps)
    tp = fp = fn = 0
    for ref, hyp in zip(refs, hyps):
        true_pos = any(l is cls_ for l in ref.labels)
        pred_pos = any(l is cls_ for l in hyp.labels)
        if true_pos and pred_pos:
            tp += 1
        elif pred_pos:
            fp += 1
        elif true_pos:
            fn += 1
    denominator = 2 * tp + fp + fn
    if denominator == 0:
        return 0.0
    return 2 * tp / denominator


def score_corpus(pairs: Sequence[tuple[CanonicalSequence, CanonicalSequence]]) -> CorpusScore:
    """All corpus metrics for a paired (reference, hypothesis) list."""
    if not pairs:
        raise ValueError("empty corpus")
    refs = [r for r, _ in pairs]
    hyps = [h for _, h in pairs]
    return CorpusScore(
        wer=wer([r.words for r in refs], [h.words for h in hyps]),
        awer=awer(refs, hyps),
        td=mean_td(td_breakdown(r, h) for r, h in pairs),
        f1_p=utterance_f1(refs, hyps, ParaphasiaLabel.P),
        f1_n=utterance_f1(refs, hyps, ParaphasiaLabel.N),
        f1_s=utterance_f1(refs, hyps, ParaphasiaLabel.S),
        n_utterances=len(pairs),
    )
