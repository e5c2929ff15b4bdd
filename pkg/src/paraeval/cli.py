"""Command-line interface.

Subcommands:

- ``preprocess``   .cha transcripts -> canonical oracle records + discard log
- ``standardize``  model outputs (labeled / single-seq / multi-seq) -> canonical records
- ``score``        reference vs hypothesis corpus -> metric report (JSONL + CSV + table)
- ``compare``      reference vs two systems -> bootstrap / permutation significance
- ``loss-audit``   step probability tables -> sequence loss values

Every flag can also be set through an environment variable named
``PARAEVAL_<FLAG>`` (uppercase, dashes as underscores), e.g.
``PARAEVAL_SEED=7``. Reports are deterministic given identical inputs and
seeds: they embed the tool version, the full configuration and input
digests, and never embed timestamps.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .alignment import align
from .canonical import CanonicalSequence
from .chat import DEFAULT_PARTICIPANT_PREFIXES, filter_utterance, parse_chat_file, to_oracle
from .corpus import (
    PairedCorpus,
    iter_chat_files,
    load_corpus,
    load_manifest,
    pair_by_id,
    save_corpus,
    select_test_pairs,
)
from .errors import ChatParseError, ConversionError, CorpusError, FormatError, ParaevalError
from .ipa import ConversionTables
from .labels import ParaphasiaLabel
from .losses import ClassWeights, StepDistribution, class_weights_from_counts, multi_seq_loss, single_seq_loss
from .metrics import CorpusScore, interleave, score_corpus, td_breakdown
from .significance import bootstrap_compare, paired_permutation_td

FORMAT_CHOICES = ("canonical", "labeled", "single-seq", "multi-seq", "chat")

_ENV_PREFIX = "PARAEVAL_"


def _env_default(flag: str, fallback):
    value = os.environ.get(_ENV_PREFIX + flag.upper().replace("-", "_"))
    return fallback if value is None else value


def _env_flag(flag: str) -> bool:
    value = os.environ.get(_ENV_PREFIX + flag.upper().replace("-", "_"))
    return value is not None and value.lower() not in ("", "0", "false", "no")


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _input_digest(path: Path) -> dict:
    if path.is_dir():
        digest = hashlib.sha256()
        for file in iter_chat_files(path):
            digest.update(str(file.relative_to(path)).encode("utf-8"))
            digest.update(b"\x00")
            digest.update(_sha256_file(file).encode("ascii"))
            digest.update(b"\n")
        return {"path": str(path), "sha256": digest.hexdigest(), "kind": "directory"}
    return {"path": str(path), "sha256": _sha256_file(path), "kind": "file"}


def _json_line(payload: dict) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True)


def _write_jsonl(path: Path, records: list[dict]):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(_json_line(record))
            fh.write("\n")


def _meta_record(command: str, config: dict, inputs: dict) -> dict:
    return {
        "record": "meta",
        "tool": "paraeval",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": inputs,
    }


def _load_tables(args) -> ConversionTables | None:
    if args.ipa_table or args.phone_table:
        if not (args.ipa_table and args.phone_table):
            raise ParaevalError("--ipa-table and --phone-table must be given together")
        return ConversionTables.from_files(args.ipa_table, args.phone_table)
    return None


def _add_table_flags(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--ipa-table", default=_env_default("ipa-table", None), help="override the bundled IPA->phone table"
    )
    parser.add_argument(
        "--phone-table",
        default=_env_default("phone-table", None),
        help="override the bundled phone->grapheme table",
    )


def _add_seed_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=int(_env_default("seed", 1234)))
    parser.add_argument("--iterations", type=int, default=int(_env_default("iterations", 1000)))
    parser.add_argument("--batch-size", type=int, default=int(_env_default("batch-size", 100)))
    parser.add_argument("--confidence", type=float, default=float(_env_default("confidence", 0.95)))
    parser.add_argument("--permutations", type=int, default=int(_env_default("permutations", 10000)))


# ---------------------------------------------------------------- preprocess


def cmd_preprocess(args) -> int:
    chat_path = Path(args.chat_path)
    out_path = Path(args.out)
    tables = _load_tables(args)
    prefixes = tuple(args.participant) if args.participant else DEFAULT_PARTICIPANT_PREFIXES

    try:
        files = iter_chat_files(chat_path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not files:
        print(f"error: no .cha files under {chat_path}", file=sys.stderr)
        return 1

    kept: list[CanonicalSequence] = []
    discards: list[dict] = []
    errors: list[str] = []
    for file in files:
        try:
            raws = parse_chat_file(file.read_text(encoding="utf-8"), source_file=str(file))
        except ChatParseError as exc:
            errors.append(str(exc))
            continue
        for raw in raws:
            utt_id = f"{file.stem}-{raw.line_number:04d}"
            reason = filter_utterance(raw, prefixes)
            if reason is not None:
                discards.append(
                    {
                        "record": "discard",
                        "utt_id": utt_id,
                        "source_file": raw.source_file,
                        "line_number": raw.line_number,
                        "speaker": raw.speaker_tier,
                        "reason": reason.value,
                    }
                )
                continue
            try:
                oracle = to_oracle(raw, utt_id=utt_id, tables=tables)
            except (ConversionError, ChatParseError) as exc:
                errors.append(f"{raw.source_file}:{raw.line_number}: {exc}")
                continue
            if oracle.is_discarded:
                discards.append(
                    {
                        "record": "discard",
                        "utt_id": utt_id,
                        "source_file": raw.source_file,
                        "line_number": raw.line_number,
                        "speaker": raw.speaker_tier,
                        "reason": oracle.discard_reason.value,
                    }
                )
            else:
                kept.append(CanonicalSequence(utt_id=oracle.utt_id, words=oracle.words, labels=oracle.labels))

    for message in errors:
        print(f"error: {message}", file=sys.stderr)
    if errors and not args.allow_partial:
        print(f"error: {len(errors)} utterance(s) failed; rerun with --allow-partial to keep the rest",
              file=sys.stderr)
        return 1
    if not kept:
        print("error: no utterances survived preprocessing", file=sys.stderr)
        return 1

    save_corpus(kept, out_path)
    discard_path = Path(args.discard_log) if args.discard_log else out_path.with_suffix(out_path.suffix + ".discards.jsonl")
    counts: dict[str, int] = {}
    for record in discards:
        counts[record["reason"]] = counts.get(record["reason"], 0) + 1
    _write_jsonl(discard_path, discards + [{"record": "discard_summary", "counts": counts}])

    print(f"kept {len(kept)} utterance(s) from {len(files)} file(s) -> {out_path}")
    print(f"discarded {len(discards)}: " + (", ".join(f"{k}={v}" for k, v in sorted(counts.items())) or "none"))
    if errors:
        print(f"skipped {len(errors)} utterance(s) with errors (partial output)", file=sys.stderr)
    return 0


# --------------------------------------------------------------- standardize


def cmd_standardize(args) -> int:
    in_path = Path(args.input)
    out_path = Path(args.out)
    fmt = args.format.replace("-", "_")
    if fmt == "chat":
        print("error: use the preprocess command for CHAT inputs", file=sys.stderr)
        return 1
    errors: list[str] = []
    try:
        seqs = load_corpus(in_path, fmt, error_sink=errors)
    except (FormatError, CorpusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for message in errors:
        print(f"error: {message}", file=sys.stderr)
    if errors and not args.allow_partial:
        print(f"error: {len(errors)} malformed line(s); rerun with --allow-partial to keep the rest",
              file=sys.stderr)
        return 1
    save_corpus(seqs, out_path)
    print(f"standardized {len(seqs)} utterance(s) -> {out_path}")
    if errors:
        print(f"skipped {len(errors)} malformed line(s) (partial output)", file=sys.stderr)
    return 0


# --------------------------------------------------------------------- score


def _paired_for_scoring(args, ref_format: str, hyp_path: str, hyp_format: str) -> PairedCorpus:
    tables = _load_tables(args)
    refs = load_corpus(args.ref, ref_format, tables=tables)
    hyps = load_corpus(hyp_path, hyp_format, tables=tables)
    paired = pair_by_id(refs, hyps, strict=args.strict)
    if args.manifest:
        manifests = load_manifest(args.manifest)
        paired = select_test_pairs(paired, manifests)
    return paired


def _score_records(score: CorpusScore, system: str) -> dict:
    record = {"record": "score", "system": system}
    record.update(score.to_dict())
    return record


def _td_records(paired: PairedCorpus, system: str) -> list[dict]:
    records = []
    for ref, hyp in paired.pairs:
        td = td_breakdown(ref, hyp)
        records.append(
            {
                "record": "utterance_td",
                "system": system,
                "utt_id": ref.utt_id,
                "td_binary": td.td_binary,
                "td_p": td.td_p,
                "td_n": td.td_n,
                "td_s": td.td_s,
                "td_all": td.td_all,
            }
        )
    return records


_TABLE_HEADER = (
    f"{'system':<12} {'WER':>7} {'AWER':>7} {'TD-bin':>7} "
    f"{'TD-p':>6} {'TD-n':>6} {'TD-s':>6} {'TD-all':>7} "
    f"{'F1-p':>6} {'F1-n':>6} {'F1-s':>6} {'n':>6}"
)


def _table_row(name: str, score: CorpusScore) -> str:
    td = score.td
    return (
        f"{name:<12} {score.wer:>7.1f} {score.awer:>7.1f} {td.td_binary:>7.2f} "
        f"{td.td_p:>6.2f} {td.td_n:>6.2f} {td.td_s:>6.2f} {td.td_all:>7.2f} "
        f"{score.f1_p:>6.2f} {score.f1_n:>6.2f} {score.f1_s:>6.2f} {score.n_utterances:>6d}"
    )


def _write_score_csv(path: Path, score: CorpusScore, td_records: list[dict]):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["utt_id", "wer", "awer", "td_binary", "td_p", "td_n", "td_s", "td_all", "f1_p", "f1_n", "f1_s"]
        )
        td = score.td
        writer.writerow(
            ["ALL", score.wer, score.awer, td.td_binary, td.td_p, td.td_n, td.td_s, td.td_all,
             score.f1_p, score.f1_n, score.f1_s]
        )
        for record in td_records:
            writer.writerow(
                [record["utt_id"], "", "", record["td_binary"], record["td_p"], record["td_n"],
                 record["td_s"], record["td_all"], "", "", ""]
            )


def cmd_score(args) -> int:
    try:
        paired = _paired_for_scoring(args, args.ref_format, args.hyp, args.format)
        score = score_corpus(paired.pairs)
    except (ParaevalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    config = {
        "ref": args.ref,
        "ref_format": args.ref_format,
        "hyp": args.hyp,
        "format": args.format,
        "manifest": args.manifest,
        "strict": args.strict,
    }
    inputs = {"ref": _input_digest(Path(args.ref)), "hyp": _input_digest(Path(args.hyp))}
    td_records = _td_records(paired, "hyp")
    records = [_meta_record("score", config, inputs), _score_records(score, "hyp")] + td_records

    report_path = Path(args.report)
    _write_jsonl(report_path, records)
    csv_path = Path(args.csv) if args.csv else report_path.with_suffix(".csv")
    _write_score_csv(csv_path, score, td_records)

    print(_TABLE_HEADER)
    print(_table_row("hyp", score))
    print(f"report: {report_path}  csv: {csv_path}")
    return 0


# ------------------------------------------------------------------- compare


def _error_pairs(paired: PairedCorpus) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Per-utterance (errors, denominator) pairs for WER and AWER."""
    wer_pairs = []
    awer_pairs = []
    for ref, hyp in paired.pairs:
        wer_pairs.append((align(ref.words, hyp.words).distance, len(ref.words)))
        ref_tokens = interleave(ref)
        hyp_tokens = interleave(hyp)
        awer_pairs.append((align(ref_tokens, hyp_tokens).distance, len(ref_tokens)))
    return wer_pairs, awer_pairs


def cmd_compare(args) -> int:
    try:
        paired_a = _paired_for_scoring(args, args.ref_format, args.hyp_a, args.format)
        paired_b = _paired_for_scoring(args, args.ref_format, args.hyp_b, args.format)
        common = sorted(set(r.utt_id for r, _ in paired_a.pairs) & set(r.utt_id for r, _ in paired_b.pairs))
        if not common:
            raise CorpusError("no utterances shared by both systems")
        by_id_a = {r.utt_id: (r, h) for r, h in paired_a.pairs}
        by_id_b = {r.utt_id: (r, h) for r, h in paired_b.pairs}
        paired_a = PairedCorpus(pairs=tuple(by_id_a[i] for i in common))
        paired_b = PairedCorpus(pairs=tuple(by_id_b[i] for i in common))

        score_a = score_corpus(paired_a.pairs)
        score_b = score_corpus(paired_b.pairs)

        wer_a, awer_a = _error_pairs(paired_a)
        wer_b, awer_b = _error_pairs(paired_b)
        boot_wer = bootstrap_compare(
            wer_a, wer_b, iterations=args.iterations, batch_size=args.batch_size,
            confidence=args.confidence, seed=args.seed, metric_name="wer",
        )
        boot_awer = bootstrap_compare(
            awer_a, awer_b, iterations=args.iterations, batch_size=args.batch_size,
            confidence=args.confidence, seed=args.seed, metric_name="awer",
        )

        td_a = [td_breakdown(r, h) for r, h in paired_a.pairs]
        td_b = [td_breakdown(r, h) for r, h in paired_b.pairs]
        permutation_records = []
        for name, values_a, values_b in (
            ("td_binary", [t.td_binary for t in td_a], [t.td_binary for t in td_b]),
            ("td_p", [t.td_p for t in td_a], [t.td_p for t in td_b]),
            ("td_n", [t.td_n for t in td_a], [t.td_n for t in td_b]),
            ("td_s", [t.td_s for t in td_a], [t.td_s for t in td_b]),
            ("td_all", [t.td_all for t in td_a], [t.td_all for t in td_b]),
        ):
            p_value = paired_permutation_td(values_a, values_b, permutations=args.permutations, seed=args.seed)
            permutation_records.append(
                {
                    "record": "permutation",
                    "metric_name": name,
                    "p_value": p_value,
                    "significant": p_value < 0.05,
                    "permutations": args.permutations,
                    "seed": args.seed,
                }
            )
    except (ParaevalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    config = {
        "ref": args.ref,
        "ref_format": args.ref_format,
        "hyp_a": args.hyp_a,
        "hyp_b": args.hyp_b,
        "format": args.format,
        "manifest": args.manifest,
        "strict": args.strict,
        "seed": args.seed,
        "iterations": args.iterations,
        "batch_size": args.batch_size,
        "confidence": args.confidence,
        "permutations": args.permutations,
    }
    inputs = {
        "ref": _input_digest(Path(args.ref)),
        "hyp_a": _input_digest(Path(args.hyp_a)),
        "hyp_b": _input_digest(Path(args.hyp_b)),
    }
    records = [
        _meta_record("compare", config, inputs),
        _score_records(score_a, "a"),
        _score_records(score_b, "b"),
        {"record": "bootstrap", **boot_wer.to_dict()},
        {"record": "bootstrap", **boot_awer.to_dict()},
        *permutation_records,
    ]
    _write_jsonl(Path(args.report), records)

    print(_TABLE_HEADER)
    print(_table_row("a", score_a))
    print(_table_row("b", score_b))
    for result in (boot_wer, boot_awer):
        marker = "significant" if result.significant else "not significant"
        print(
            f"bootstrap {result.metric_name}: delta(b-a) {result.delta_mean:+.2f} "
            f"[{result.ci_low:+.2f}, {result.ci_high:+.2f}] -> {marker}"
        )
    for record in permutation_records:
        marker = "significant" if record["significant"] else "not significant"
        print(f"permutation {record['metric_name']}: p={record['p_value']:.4f} -> {marker}")
    print(f"report: {args.report}")
    return 0


# ---------------------------------------------------------------- loss-audit


def _steps_from_json(payload, what: str) -> list[StepDistribution]:
    steps = []
    for index, entry in enumerate(payload):
        try:
            steps.append(
                StepDistribution(
                    probabilities=tuple(float(p) for p in entry["probabilities"]),
                    target_index=int(entry["target_index"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParaevalError(f"{what} step {index}: {exc}") from exc
    return steps


def cmd_loss_audit(args) -> int:
    try:
        payload = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        if "steps" in payload:
            loss = single_seq_loss(_steps_from_json(payload["steps"], "sequence"))
            result = {"record": "loss_audit", "mode": "single_seq", "loss": loss}
        elif "asr_steps" in payload and "para_steps" in payload:
            alpha = float(payload.get("alpha", args.alpha))
            if "class_counts" in payload and payload["class_counts"] is not None:
                raw = payload["class_counts"]
                counts = {ParaphasiaLabel.from_letter(str(k)): int(v) for k, v in raw.items()}
                weights = class_weights_from_counts(counts)
            else:
                weights = ClassWeights.uniform()
            losses = multi_seq_loss(
                _steps_from_json(payload["asr_steps"], "ASR"),
                _steps_from_json(payload["para_steps"], "label"),
                weights,
                alpha,
            )
            result = {
                "record": "loss_audit",
                "mode": "multi_seq",
                "alpha": alpha,
                "l_asr": losses.l_asr,
                "l_para": losses.l_para,
                "l_total": losses.l_total,
            }
        else:
            raise ParaevalError("input must contain 'steps' or both 'asr_steps' and 'para_steps'")
    except (ParaevalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    line = _json_line(result)
    print(line)
    if args.report:
        Path(args.report).write_text(line + "\n", encoding="utf-8")
    return 0


# ---------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraeval",
        description="Evaluation toolkit for multiclass paraphasia detection in continuous speech.",
        epilog=f"Flags may be set via environment variables prefixed {_ENV_PREFIX} (e.g. {_ENV_PREFIX}SEED).",
    )
    parser.add_argument("--version", action="version", version=f"paraeval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="convert CHAT transcripts to oracle records")
    p.add_argument("chat_path", help=".cha file or directory")
    p.add_argument("-o", "--out", required=True, help="output canonical records (JSONL)")
    p.add_argument("--discard-log", default=None, help="discard log path (default: <out>.discards.jsonl)")
    p.add_argument("--participant", action="append", default=None,
                   help="speaker tier prefix treated as participant (repeatable; default PAR)")
    p.add_argument("--allow-partial", action="store_true", default=_env_flag("allow-partial"),
                   help="write output even when some utterances fail to convert")
    _add_table_flags(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("standardize", help="convert model outputs to canonical records")
    p.add_argument("input", help="model output file")
    p.add_argument("-o", "--out", required=True, help="output canonical records (JSONL)")
    p.add_argument("--format", choices=FORMAT_CHOICES, default=_env_default("format", "labeled"))
    p.add_argument("--allow-partial", action="store_true", default=_env_flag("allow-partial"),
                   help="write output even when some lines are malformed")
    p.set_defaults(func=cmd_standardize)

    p = sub.add_parser("score", help="score a hypothesis corpus against a reference")
    p.add_argument("--ref", required=True)
    p.add_argument("--ref-format", choices=FORMAT_CHOICES, default=_env_default("ref-format", "canonical"))
    p.add_argument("--hyp", required=True)
    p.add_argument("--format", choices=FORMAT_CHOICES, default=_env_default("format", "canonical"),
                   help="hypothesis format")
    p.add_argument("--report", required=True, help="JSONL report path")
    p.add_argument("--csv", default=None, help="CSV path (default: report with .csv suffix)")
    p.add_argument("--manifest", default=_env_default("manifest", None),
                   help="fold manifest; scores the aggregated test splits")
    p.add_argument("--strict", action="store_true", default=_env_flag("strict"))
    _add_table_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("compare", help="statistically compare two systems against a reference")
    p.add_argument("--ref", required=True)
    p.add_argument("--ref-format", choices=FORMAT_CHOICES, default=_env_default("ref-format", "canonical"))
    p.add_argument("--hyp-a", required=True)
    p.add_argument("--hyp-b", required=True)
    p.add_argument("--format", choices=FORMAT_CHOICES, default=_env_default("format", "canonical"),
                   help="hypothesis format (both systems)")
    p.add_argument("--report", required=True, help="JSONL report path")
    p.add_argument("--manifest", default=_env_default("manifest", None))
    p.add_argument("--strict", action="store_true", default=_env_flag("strict"))
    _add_seed_flags(p)
    _add_table_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("loss-audit", help="evaluate sequence losses on probability tables")
    p.add_argument("input", help="JSON file with step distributions")
    p.add_argument("--alpha", type=float, default=float(_env_default("alpha", 0.5)),
                   help="ASR/label loss mix when the input does not set it")
    p.add_argument("--report", default=None, help="also write the result record to this path")
    p.set_defaults(func=cmd_loss_audit)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
