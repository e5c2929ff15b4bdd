"""Statistical comparison of two systems.

WER-style metrics are compared with a bootstrap over utterances: each
iteration resamples a fixed-size batch with replacement (the same batch for
both systems), recomputes the pooled error rates, and the difference's
percentile confidence interval decides significance. Per-utterance temporal
distances are compared with a paired sign-flip permutation test, which is
exact whenever the full enumeration fits inside the requested permutation
budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_ITERATIONS = 1000
DEFAULT_BATCH_SIZE = 100
DEFAULT_CONFIDENCE = 0.95
DEFAULT_PERMUTATIONS = 10000


@dataclass(frozen=True)
class BootstrapResult:
    """Outcome of one bootstrap comparison.

    ``delta`` values are error-rate(B) - error-rate(A) in percent, so a
    positive interval means system A is better. ``p_better`` is the
    empirical probability that A outperforms B (ties split evenly).
    """

    metric_name: str
    delta_mean: float
    ci_low: float
    ci_high: float
    p_better: float
    significant: bool
    seed: int
    iterations: int
    batch_size: int
    confidence: float

    def to_dict(self) -> dict:
        return {
            "metric_name": self.metric_name,
            "delta_mean": self.delta_mean,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "p_better": self.p_better,
            "significant": self.significant,
            "seed": self.seed,
            "iterations": self.iterations,
            "batch_size": self.batch_size,
            "confidence": self.confidence,
        }


def bootstrap_compare(
    errors_a: Sequence[tuple[int, int]],
    errors_b: Sequence[tuple[int, int]],
    iterations: int = DEFAULT_ITERATIONS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    confidence: float = DEFAULT_CONFIDENCE,
    seed: int = 0,
    metric_name: str = "wer",
) -> BootstrapResult:
    """Bootstrap the pooled error-rate difference between systems A and B.

    ``errors_a``/``errors_b`` hold one ``(edit_errors, denominator)`` pair
    per utterance, in the same utterance order for both systems.
    """
    if len(errors_a) != len(errors_b):
        raise ValueError(f"{len(errors_a)} utterances for A vs {len(errors_b)} for B")
    n = len(errors_a)
    if n == 0:
        raise ValueError("empty corpus")
    if iterations < 1 or batch_size < 1:
        raise ValueError("iterations and batch_size must be >= 1")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")

    err_a = np.asarray([e for e, _ in errors_a], dtype=np.float64)
    den_a = np.asarray([d for _, d in errors_a], dtype=np.float64)
    err_b = np.asarray([e for e, _ in errors_b], dtype=np.float64)
    den_b = np.asarray([d for _, d in errors_b], dtype=np.float64)

    rng = np.random.default_rng(seed)
    indices = rng.integers(0, n, size=(iterations, batch_size))
    with np.errstate(divide="ignore", invalid="ignore"):
        rate_a = 100.0 * err_a[indices].sum(axis=1) / den_a[indices].sum(axis=1)
        rate_b = 100.0 * err_b[indices].sum(axis=1) / den_b[indices].sum(axis=1)
    deltas = rate_b - rate_a

    tail = (1.0 - confidence) / 2.0
    ci_low = float(np.quantile(deltas, tail))
    ci_high = float(np.quantile(deltas, 1.0 - tail))
    p_better = float(np.mean(deltas > 0) + 0.5 * np.mean(deltas == 0))
    return BootstrapResult(
        metric_name=metric_name,
        delta_mean=float(np.mean(deltas)),
        ci_low=ci_low,
        ci_high=ci_high,
        p_better=p_better,
        significant=bool(ci_low > 0.0 or ci_high < 0.0),
        seed=seed,
        iterations=iterations,
        batch_size=batch_size,
        confidence=confidence,
    )


def paired_permutation_td(
    td_a: Sequence[float],
    td_b: Sequence[float],
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> float:
    """Two-sided sign-flip permutation p-value for paired per-utterance values.

    Enumerates all ``2**n`` sign assignments when that fits within
    ``permutations``; otherwise falls back to Monte Carlo sampling with the
    add-one correction.
    """
    if len(td_a) != len(td_b):
        raise ValueError(f"{len(td_a)} values for A vs {len(td_b)} for B")
    n = len(td_a)
    if n < 2:
        raise ValueError("need at least 2 paired utterances")
    if permutations < 1:
        raise ValueError("permutations must be >= 1")

    diffs = np.asarray(td_a, dtype=np.float64) - np.asarray(td_b, dtype=np.float64)
    observed = abs(float(diffs.mean()))
    threshold = observed - 1e-12

    if n <= 30 and 2**n <= permutations:
        total = 2**n
        hits = 0
        # enumerate sign patterns in blocks to bound memory
        block = 1 << 16
        bit_cols = np.arange(n)
        for start in range(0, total, block):
            masks = np.arange(start, min(start + block, total), dtype=np.int64)
            signs = (((masks[:, None] >> bit_cols[None, :]) & 1) * 2 - 1).astype(np.float64)
            stats = np.abs(signs @ diffs) / n
            hits += int(np.count_nonzero(stats >= threshold))
        return hits / total

    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(permutations, n)).astype(np.float64) * 2 - 1
    stats = np.abs(signs @ diffs) / n
    hits = int(np.count_nonzero(stats >= threshold))
    return (hits + 1) / (permutations + 1)
