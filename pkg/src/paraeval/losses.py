"""Numeric audit of sequence training objectives.

Evaluates the negative-log-likelihood losses that transcription+label
models train with, directly on supplied per-step probability tables, so
external training code can be cross-checked without running any training.
Natural logarithm throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

from .labels import CLASS_ORDER, ParaphasiaLabel

_PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class StepDistribution:
    """One decoding step: a probability table over a finite vocabulary plus
    the index of the target symbol."""

    probabilities: tuple[float, ...]
    target_index: int

    def __post_init__(self):
        if not self.probabilities:
            raise ValueError("empty probability table")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("negative probability")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1 within {_PROB_SUM_TOL}")
        if not 0 <= self.target_index < len(self.probabilities):
            raise ValueError(
                f"target index {self.target_index} out of range for vocabulary of "
                f"{len(self.probabilities)}"
            )

    @property
    def target_probability(self) -> float:
        return self.probabilities[self.target_index]


@dataclass(frozen=True)
class ClassWeights:
    """One positive weight per label class, normalized to sum to the class count."""

    weights: Mapping[ParaphasiaLabel, float]

    def __post_init__(self):
        missing = [c for c in CLASS_ORDER if c not in self.weights]
        if missing:
            raise ValueError(f"missing weights for {missing}")
        if any(w <= 0 for w in self.weights.values()):
            raise ValueError("class weights must be positive")

    def __getitem__(self, cls_: ParaphasiaLabel) -> float:
        return self.weights[cls_]

    @classmethod
    def uniform(cls) -> "ClassWeights":
        return cls({c: 1.0 for c in CLASS_ORDER})


def class_weights_from_counts(counts: Mapping[ParaphasiaLabel, int]) -> ClassWeights:
    """Inverse-count weights, scaled so they sum to the number of classes.

    The scaling makes weights comparable across corpora of different sizes:
    equal counts always yield unit weights, and multiplying every count by a
    constant leaves the weights unchanged.
    """
    missing = [c for c in CLASS_ORDER if c not in counts]
    if missing:
        raise ValueError(f"missing counts for {missing}")
    for cls_, count in counts.items():
        if count < 1:
            raise ValueError(f"count for {cls_} must be >= 1, got {count}")
    inverse = {c: 1.0 / counts[c] for c in CLASS_ORDER}
    scale = len(CLASS_ORDER) / math.fsum(inverse.values())
    return ClassWeights({c: inverse[c] * scale for c in CLASS_ORDER})


def _nll(steps: Sequence[StepDistribution], what: str) -> list[float]:
    terms = []
    for t, step in enumerate(steps):
        p = step.target_probability
        if p == 0.0:
            raise ValueError(f"{what} step {t}: target has probability 0 (infinite loss)")
        terms.append(-math.log(p))
    return terms


def single_seq_loss(steps: Sequence[StepDistribution]) -> float:
    """Summed negative log-likelihood of the targets of a single stream."""
    if not steps:
        raise ValueError("need at least one step")
    return math.fsum(_nll(steps, "sequence"))


class MultiSeqLoss(NamedTuple):
    l_asr: float
    l_para: float
    l_total: float


def multi_seq_loss(
    asr_steps: Sequence[StepDistribution],
    para_steps: Sequence[StepDistribution],
    weights: ClassWeights,
    alpha: float,
) -> MultiSeqLoss:
    """Two-head loss: ``alpha * l_asr + (1 - alpha) * l_para``.

    The two streams share decoder steps, so they must have equal length.
    Label steps are tables over the four classes in C, P, N, S order; each
    term is weighted by the target class's weight.
    """
    if len(asr_steps) != len(para_steps):
        raise ValueError(f"{len(asr_steps)} ASR steps vs {len(para_steps)} label steps")
    if not asr_steps:
        raise ValueError("need at least one step")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    for t, step in enumerate(para_steps):
        if len(step.probabilities) != len(CLASS_ORDER):
            raise ValueError(
                f"label step {t}: expected a table over {len(CLASS_ORDER)} classes, "
                f"got {len(step.probabilities)}"
            )
    l_asr = math.fsum(_nll(asr_steps, "ASR"))
    para_terms = _nll(para_steps, "label")
    l_para = math.fsum(
        weights[CLASS_ORDER[step.target_index]] * term
        for step, term in zip(para_steps, para_terms)
    )
    l_total = alpha * l_asr + (1.0 - alpha) * l_para
    return MultiSeqLoss(l_asr=l_asr, l_para=l_para, l_total=l_total)
