import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from paraeval.canonical import (
    BOUNDARY_MARK,
    CanonicalSequence,
    MultiSeqOutput,
    collapse_subwords,
    expand_word_labels_to_subwords,
    majority_label,
    parse_labeled_text,
    parse_multi_seq,
    parse_single_seq,
    standardize,
)
from paraeval.errors import FormatError
from paraeval.labels import ParaphasiaLabel

C, P, N, S = ParaphasiaLabel.C, ParaphasiaLabel.P, ParaphasiaLabel.N, ParaphasiaLabel.S

LABELED_ROW = "aphasia [c] fekts [p] my [c] language [c] not [c] my [c] ditikalt [n]"
SINGLE_SEQ_ROW = "aphasia fekts [p] my language not my ditikalt [n]"
MULTI_SEQ_ASR = "ASR: aphasia fekts my language not my ditikalt"
MULTI_SEQ_PARA = "Para: [c] [p] [c] [c] [c] [c] [n]"

EXPECTED_WORDS = ("aphasia", "fekts", "my", "language", "not", "my", "ditikalt")
EXPECTED_LABELS = (C, P, C, C, C, C, N)


class TestParseLabeledText:
    def test_reference_row(self):
        seq = parse_labeled_text(LABELED_ROW)
        assert seq.words == EXPECTED_WORDS
        assert seq.labels == EXPECTED_LABELS

    def test_empty_line(self):
        seq = parse_labeled_text("")
        assert len(seq) == 0

    def test_unknown_label(self):
        with pytest.raises(FormatError) as info:
            parse_labeled_text("word [q]")
        assert info.value.token_index == 1

    def test_consecutive_labels(self):
        with pytest.raises(FormatError):
            parse_labeled_text("word [c] [p]")

    def test_trailing_word(self):
        with pytest.raises(FormatError):
            parse_labeled_text("word [c] dangling")

    def test_leading_label(self):
        with pytest.raises(FormatError):
            parse_labeled_text("[c] word")


class TestParseSingleSeq:
    def test_reference_row(self):
        seq = parse_single_seq(SINGLE_SEQ_ROW)
        assert seq.words == EXPECTED_WORDS
        assert seq.labels == EXPECTED_LABELS

    def test_unlabeled_words_default_to_c(self):
        seq = parse_single_seq("my language")
        assert seq.labels == (C, C)

    def test_leading_label_rejected(self):
        with pytest.raises(FormatError):
            parse_single_seq("[p] word")

    def test_consecutive_labels_rejected(self):
        with pytest.raises(FormatError):
            parse_single_seq("word [p] [n]")

    def test_explicit_c_accepted(self):
        seq = parse_single_seq("word [c] thing [s]")
        assert seq.labels == (C, S)


class TestExpand:
    def test_single_word(self):
        assert expand_word_labels_to_subwords([("fekts", P)], [3]) == (P, P, P)

    def test_two_words(self):
        assert expand_word_labels_to_subwords([("my", C), ("ditikalt", N)], [1, 4]) == (C, N, N, N, N)

    def test_empty(self):
        assert expand_word_labels_to_subwords([], []) == ()

    def test_zero_count_rejected(self):
        with pytest.raises(ValueError):
            expand_word_labels_to_subwords([("w", C)], [0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            expand_word_labels_to_subwords([("w", C)], [1, 2])


class TestMajorityVote:
    def test_majority_wins(self):
        assert majority_label([P, P, C]) == P
        assert majority_label([C, C, P]) == C

    def test_single(self):
        assert majority_label([C]) == C

    def test_paraphasia_beats_c_on_tie(self):
        assert majority_label([C, P]) == P
        assert majority_label([C, N]) == N
        assert majority_label([C, S]) == S

    def test_paraphasia_tie_precedence(self):
        assert majority_label([P, N]) == P
        assert majority_label([N, S]) == N
        assert majority_label([P, S]) == P
        assert majority_label([S, N, P]) == P

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            majority_label([])


class TestCollapse:
    def test_word_per_token_mode(self):
        m = parse_multi_seq(MULTI_SEQ_ASR, MULTI_SEQ_PARA)
        seq = collapse_subwords(m)
        assert seq.words == EXPECTED_WORDS
        assert seq.labels == EXPECTED_LABELS

    def test_boundary_mark_mode(self):
        m = MultiSeqOutput(
            asr_tokens=(f"{BOUNDARY_MARK}di", "ti", "kalt", f"{BOUNDARY_MARK}my"),
            para_labels=(N, N, C, C),
        )
        seq = collapse_subwords(m)
        assert seq.words == ("ditikalt", "my")
        assert seq.labels == (N, C)

    def test_explicit_groups(self):
        m = MultiSeqOutput(
            asr_tokens=("di", "ti", "kalt"),
            para_labels=(N, C, N),
            explicit_groups=((0, 1, 2),),
        )
        seq = collapse_subwords(m)
        assert seq.words == ("ditikalt",)
        assert seq.labels == (N,)

    def test_length_mismatch_rejected(self):
        with pytest.raises(FormatError):
            MultiSeqOutput(asr_tokens=("a", "b"), para_labels=(C,))

    def test_bad_explicit_groups_rejected(self):
        with pytest.raises(FormatError):
            MultiSeqOutput(asr_tokens=("a", "b"), para_labels=(C, C), explicit_groups=((0,),))


class TestStandardize:
    def test_cross_format_agreement(self):
        a = standardize(LABELED_ROW, "labeled", utt_id="u1")
        b = standardize(SINGLE_SEQ_ROW, "single_seq", utt_id="u1")
        c = standardize((MULTI_SEQ_ASR, MULTI_SEQ_PARA), "multi_seq", utt_id="u1")
        assert a == b == c

    def test_tab_form_multi_seq(self):
        tabbed = "aphasia fekts my language not my ditikalt\t[c] [p] [c] [c] [c] [c] [n]"
        assert standardize(tabbed, "multi_seq") == standardize(LABELED_ROW, "labeled")

    def test_unknown_tag(self):
        with pytest.raises(ValueError):
            standardize(LABELED_ROW, "mystery")

    def test_dash_aliases(self):
        assert standardize(SINGLE_SEQ_ROW, "single-seq") == standardize(SINGLE_SEQ_ROW, "single_seq")


class TestCanonicalSequence:
    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            CanonicalSequence("u", ("a",), ())

    def test_empty_word_rejected(self):
        with pytest.raises(ValueError):
            CanonicalSequence("u", ("",), (C,))

    def test_records_round_trip(self):
        seq = parse_labeled_text(LABELED_ROW, utt_id="u7")
        assert CanonicalSequence.from_record(seq.to_record()) == seq

    def test_bad_record(self):
        with pytest.raises(FormatError):
            CanonicalSequence.from_record('{"utt_id": "u", "words": ["a"]}')


word_strategy = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=8)
label_strategy = st.sampled_from([C, P, N, S])
pairs_strategy = st.lists(st.tuples(word_strategy, label_strategy), max_size=12)


@given(pairs_strategy)
def test_labeled_text_round_trip(pairs):
    seq = CanonicalSequence("u", tuple(w for w, _ in pairs), tuple(l for _, l in pairs))
    assert parse_labeled_text(seq.to_labeled_text(), utt_id="u") == seq


@given(pairs_strategy)
def test_single_seq_text_round_trip(pairs):
    seq = CanonicalSequence("u", tuple(w for w, _ in pairs), tuple(l for _, l in pairs))
    assert parse_single_seq(seq.to_single_seq_text(), utt_id="u") == seq


@given(pairs_strategy, st.randoms(use_true_random=False))
def test_expand_collapse_round_trip(pairs, rng):
    counts = [rng.randint(1, 5) for _ in pairs]
    expanded = expand_word_labels_to_subwords(pairs, counts)
    groups = []
    start = 0
    for count in counts:
        groups.append(tuple(range(start, start + count)))
        start += count
    tokens = tuple(f"{w}{i}" for (w, _), count in zip(pairs, counts) for i in range(count))
    m = MultiSeqOutput(asr_tokens=tokens, para_labels=expanded, explicit_groups=tuple(groups))
    collapsed = collapse_subwords(m)
    assert collapsed.labels == tuple(l for _, l in pairs)


def test_serialize_parse_identity_on_canonical_lines():
    rng = random.Random(7)
    alphabet = "abcdefg"
    for _ in range(100):
        words = tuple("".join(rng.choice(alphabet) for _ in range(rng.randint(1, 6))) for _ in range(rng.randint(0, 9)))
        labels = tuple(rng.choice([C, P, N, S]) for _ in words)
        line = CanonicalSequence("u", words, labels).to_labeled_text()
        assert parse_labeled_text(line).to_labeled_text() == line
