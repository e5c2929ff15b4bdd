"""paraeval: evaluation toolkit for multiclass paraphasia detection.

Turns CHAT-format clinical transcripts into oracle word/label sequences,
standardizes heterogeneous model outputs into one canonical form, and scores
systems with WER, augmented WER, temporal distance, utterance-level F1 and
resampling-based significance tests.
"""

__version__ = "0.1.0"

from .alignment import Alignment, EditOp, align, edit_distance
from .canonical import (
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
from .chat import (
    DiscardReason,
    OracleUtterance,
    RawChatUtterance,
    filter_utterance,
    parse_chat_file,
    process_chat_content,
    to_oracle,
)
from .corpus import (
    FoldManifest,
    PairedCorpus,
    aggregate_folds,
    load_corpus,
    load_manifest,
    pair_by_id,
    save_corpus,
    select_test_pairs,
)
from .errors import ChatParseError, ConversionError, CorpusError, FormatError, ParaevalError
from .ipa import ConversionTables, PhoneSequence, ipa_to_phones, ipa_to_pseudoword, phones_to_graphemes
from .labels import CLASS_ORDER, PARAPHASIA_CLASSES, ParaphasiaLabel
from .losses import ClassWeights, MultiSeqLoss, StepDistribution, class_weights_from_counts, multi_seq_loss, single_seq_loss
from .metrics import CorpusScore, TdBreakdown, awer, mean_td, score_corpus, td_breakdown, utterance_f1, wer
from .significance import BootstrapResult, bootstrap_compare, paired_permutation_td

__all__ = [
    "__version__",
    "Alignment",
    "EditOp",
    "align",
    "edit_distance",
    "CanonicalSequence",
    "MultiSeqOutput",
    "collapse_subwords",
    "expand_word_labels_to_subwords",
    "majority_label",
    "parse_labeled_text",
    "parse_multi_seq",
    "parse_single_seq",
    "standardize",
    "DiscardReason",
    "OracleUtterance",
    "RawChatUtterance",
    "filter_utterance",
    "parse_chat_file",
    "process_chat_content",
    "to_oracle",
    "FoldManifest",
    "PairedCorpus",
    "aggregate_folds",
    "load_corpus",
    "load_manifest",
    "pair_by_id",
    "save_corpus",
    "select_test_pairs",
    "ChatParseError",
    "ConversionError",
    "CorpusError",
    "FormatError",
    "ParaevalError",
    "ConversionTables",
    "PhoneSequence",
    "ipa_to_phones",
    "ipa_to_pseudoword",
    "phones_to_graphemes",
    "CLASS_ORDER",
    "PARAPHASIA_CLASSES",
    "ParaphasiaLabel",
    "ClassWeights",
    "MultiSeqLoss",
    "StepDistribution",
    "class_weights_from_counts",
    "multi_seq_loss",
    "single_seq_loss",
    "CorpusScore",
    "TdBreakdown",
    "awer",
    "mean_td",
    "score_corpus",
    "td_breakdown",
    "utterance_f1",
    "wer",
    "BootstrapResult",
    "bootstrap_compare",
    "paired_permutation_td",
]
