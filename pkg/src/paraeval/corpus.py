"""Corpus loading, reference/hypothesis pairing and fold handling.

File formats (all UTF-8, line oriented):

``canonical``
    One JSON record per line: ``{"utt_id": ..., "words": [...], "labels": [...]}``.
``labeled`` / ``single_seq``
    One utterance per line, either ``utt_id<TAB>text`` or bare text (ids are
    then generated as ``<file stem>-<line index>``).
``multi_seq``
    Either ``utt_id<TAB>asr tokens<TAB>label tokens`` on one line, or
    consecutive ``ASR:`` / ``Para:`` line pairs.
``chat``
    A .cha file or a directory of them; yields the kept oracle utterances.

Fold manifests are tab-separated ``id<TAB>fold<TAB>split`` rows where split
is train, dev or test. An id matches an utterance if it equals the utt_id or
is a prefix of it up to a ``-`` separator (so speaker-level manifests work).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .canonical import CanonicalSequence, parse_labeled_text, parse_multi_seq, parse_single_seq, collapse_subwords
from .chat import ChatProcessingResult, process_chat_content
from .errors import CorpusError, FormatError
from .ipa import ConversionTables

logger = logging.getLogger(__name__)

SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class PairedCorpus:
    """Reference/hypothesis pairs joined on utt_id."""

    pairs: tuple[tuple[CanonicalSequence, CanonicalSequence], ...]
    ref_only: tuple[str, ...] = ()
    hyp_only: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def refs(self) -> tuple[CanonicalSequence, ...]:
        return tuple(r for r, _ in self.pairs)

    @property
    def hyps(self) -> tuple[CanonicalSequence, ...]:
        return tuple(h for _, h in self.pairs)


@dataclass(frozen=True)
class FoldManifest:
    """Split assignments for one cross-validation fold."""

    fold_id: int
    assignments: dict[str, str]  # id -> train|dev|test

    def ids_for(self, split: str) -> tuple[str, ...]:
        return tuple(i for i, s in self.assignments.items() if s == split)


def _check_unique_ids(seqs: Iterable[CanonicalSequence], where: str):
    seen: set[str] = set()
    for seq in seqs:
        if seq.utt_id in seen:
            raise CorpusError(f"{where}: duplicate utterance id {seq.utt_id!r}")
        seen.add(seq.utt_id)


def _iter_record_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line.strip():
                yield lineno, line


def _split_id(line: str, default_id: str) -> tuple[str, str]:
    if "\t" in line:
        utt_id, _, rest = line.partition("\t")
        return utt_id.strip(), rest
    return default_id, line


def _record_error(message: str, error_sink: list[str] | None):
    """Collect the message when a sink is given, otherwise fail fast."""
    if error_sink is None:
        raise FormatError(message)
    error_sink.append(message)


def _load_text_format(path: Path, fmt: str, error_sink: list[str] | None = None) -> list[CanonicalSequence]:
    parser = parse_labeled_text if fmt == "labeled" else parse_single_seq
    out = []
    for index, (lineno, line) in enumerate(_iter_record_lines(path)):
        utt_id, text = _split_id(line, f"{path.stem}-{index:04d}")
        try:
            out.append(parser(text, utt_id=utt_id))
        except FormatError as exc:
            _record_error(f"{path}:{lineno}: {exc}", error_sink)
    return out


def _load_multi_seq(path: Path, error_sink: list[str] | None = None) -> list[CanonicalSequence]:
    out = []
    pending: tuple[int, str] | None = None  # (lineno, asr text) awaiting its label line
    index = 0
    for lineno, line in _iter_record_lines(path):
        stripped = line.strip()
        try:
            if pending is not None:
                if not stripped.lower().startswith("para:"):
                    raise FormatError("expected a 'Para:' line after 'ASR:'")
                _, asr_text = pending
                pending = None
                out.append(
                    collapse_subwords(
                        parse_multi_seq(asr_text, stripped), utt_id=f"{path.stem}-{index:04d}"
                    )
                )
                index += 1
            elif stripped.lower().startswith("asr:"):
                pending = (lineno, stripped)
            else:
                parts = line.split("\t")
                if len(parts) == 3:
                    utt_id, asr_text, para_text = parts
                    utt_id = utt_id.strip()
                elif len(parts) == 2:
                    utt_id = f"{path.stem}-{index:04d}"
                    asr_text, para_text = parts
                else:
                    raise FormatError(
                        "expected 'id<TAB>asr<TAB>labels', 'asr<TAB>labels' or ASR:/Para: line pairs"
                    )
                out.append(collapse_subwords(parse_multi_seq(asr_text, para_text), utt_id=utt_id))
                index += 1
        except FormatError as exc:
            _record_error(f"{path}:{lineno}: {exc}", error_sink)
    if pending is not None:
        _record_error(f"{path}:{pending[0]}: 'ASR:' line without a matching 'Para:' line", error_sink)
    return out


def _load_canonical(path: Path, error_sink: list[str] | None = None) -> list[CanonicalSequence]:
    out = []
    for lineno, line in _iter_record_lines(path):
        try:
            out.append(CanonicalSequence.from_record(line))
        except FormatError as exc:
            _record_error(f"{path}:{lineno}: {exc}", error_sink)
    return out


def iter_chat_files(path: Path) -> list[Path]:
    if path.is_file():
        return [path]
    files = sorted(p for p in path.rglob("*.cha") if p.is_file())
    return files


def load_chat_corpus(
    path: Path,
    tables: ConversionTables | None = None,
    participant_prefixes: tuple[str, ...] | None = None,
) -> tuple[list[CanonicalSequence], list[ChatProcessingResult]]:
    """Process .cha inputs; returns kept sequences plus per-file results."""
    from .chat import DEFAULT_PARTICIPANT_PREFIXES

    prefixes = participant_prefixes or DEFAULT_PARTICIPANT_PREFIXES
    files = iter_chat_files(path)
    if not files:
        raise CorpusError(f"no .cha files under {path}")
    kept: list[CanonicalSequence] = []
    results: list[ChatProcessingResult] = []
    for file in files:
        result = process_chat_content(
            file.read_text(encoding="utf-8"), source_file=str(file), participant_prefixes=prefixes, tables=tables
        )
        results.append(result)
        for oracle in result.kept:
            kept.append(CanonicalSequence(utt_id=oracle.utt_id, words=oracle.words, labels=oracle.labels))
    return kept, results


def load_corpus(
    path: str | Path,
    format_tag: str = "canonical",
    tables: ConversionTables | None = None,
    error_sink: list[str] | None = None,
) -> list[CanonicalSequence]:
    """Load and validate a corpus file (or .cha tree) in the given format.

    With an ``error_sink`` list, per-record format problems are collected
    there and the offending records skipped instead of raising on the first.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"no such path: {path}")
    fmt = format_tag.replace("-", "_")
    if fmt == "chat":
        seqs, _ = load_chat_corpus(path, tables=tables)
    elif fmt == "canonical":
        seqs = _load_canonical(path, error_sink)
    elif fmt in ("labeled", "single_seq"):
        seqs = _load_text_format(path, fmt, error_sink)
    elif fmt == "multi_seq":
        seqs = _load_multi_seq(path, error_sink)
    else:
        raise ValueError(f"unknown corpus format {format_tag!r}")
    _check_unique_ids(seqs, str(path))
    return seqs


def save_corpus(seqs: Sequence[CanonicalSequence], path: str | Path):
    """Write canonical JSON records, one per line."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for seq in seqs:
            fh.write(seq.to_record())
            fh.write("\n")


def pair_by_id(
    refs: Sequence[CanonicalSequence],
    hyps: Sequence[CanonicalSequence],
    strict: bool = False,
) -> PairedCorpus:
    """Inner-join references and hypotheses on utt_id, in reference order."""
    _check_unique_ids(refs, "references")
    _check_unique_ids(hyps, "hypotheses")
    hyp_by_id = {h.utt_id: h for h in hyps}
    ref_ids = {r.utt_id for r in refs}
    pairs = tuple((r, hyp_by_id[r.utt_id]) for r in refs if r.utt_id in hyp_by_id)
    ref_only = tuple(r.utt_id for r in refs if r.utt_id not in hyp_by_id)
    hyp_only = tuple(h.utt_id for h in hyps if h.utt_id not in ref_ids)
    if not pairs:
        raise CorpusError("no utterance ids in common between references and hypotheses")
    if ref_only or hyp_only:
        message = (
            f"unmatched utterances: {len(ref_only)} reference-only, {len(hyp_only)} hypothesis-only"
        )
        if strict:
            raise CorpusError(message)
        logger.warning(message)
    return PairedCorpus(pairs=pairs, ref_only=ref_only, hyp_only=hyp_only)


def aggregate_folds(folds: Sequence[PairedCorpus]) -> PairedCorpus:
    """Concatenate per-fold test pairs; ids must stay globally unique."""
    seen: set[str] = set()
    pairs: list[tuple[CanonicalSequence, CanonicalSequence]] = []
    for fold in folds:
        for ref, hyp in fold.pairs:
            if ref.utt_id in seen:
                raise CorpusError(f"utterance id {ref.utt_id!r} appears in more than one fold")
            seen.add(ref.utt_id)
            pairs.append((ref, hyp))
    return PairedCorpus(pairs=tuple(pairs))


def load_manifest(path: str | Path) -> list[FoldManifest]:
    """Read ``id<TAB>fold<TAB>split`` rows grouped into per-fold manifests."""
    path = Path(path)
    by_fold: dict[int, dict[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise CorpusError(f"{path}:{lineno}: expected 'id<TAB>fold<TAB>split'")
            utt_id, fold_text, split = (p.strip() for p in parts)
            try:
                fold_id = int(fold_text)
            except ValueError:
                raise CorpusError(f"{path}:{lineno}: fold must be an integer, got {fold_text!r}") from None
            if split not in SPLITS:
                raise CorpusError(f"{path}:{lineno}: split must be one of {SPLITS}, got {split!r}")
            assignments = by_fold.setdefault(fold_id, {})
            if utt_id in assignments:
                raise CorpusError(f"{path}:{lineno}: id {utt_id!r} assigned twice in fold {fold_id}")
            assignments[utt_id] = split
    if not by_fold:
        raise CorpusError(f"{path}: empty manifest")
    return [FoldManifest(fold_id=f, assignments=by_fold[f]) for f in sorted(by_fold)]


def _manifest_match(manifest_id: str, utt_id: str) -> bool:
    return utt_id == manifest_id or utt_id.startswith(manifest_id + "-")


def select_test_pairs(paired: PairedCorpus, manifests: Sequence[FoldManifest]) -> PairedCorpus:
    """Aggregate the test-split pairs of every fold (test sets must be disjoint)."""
    folds = []
    for manifest in manifests:
        test_ids = manifest.ids_for("test")
        selected = tuple(
            (r, h) for r, h in paired.pairs if any(_manifest_match(m, r.utt_id) for m in test_ids)
        )
        folds.append(PairedCorpus(pairs=selected))
    aggregated = aggregate_folds(folds)
    if not aggregated.pairs:
        raise CorpusError("manifest selected no test utterances")
    return aggregated
