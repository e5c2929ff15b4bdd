"""Minimum-edit-distance alignment between token sequences.

The dynamic program uses unit costs by default (substitution, insertion and
deletion all cost 1; matches are free) and a deterministic backtrace so that
every downstream metric is reproducible: on cost ties the diagonal move
(match/substitute) wins over consuming a reference token (delete), which in
turn wins over consuming a hypothesis token (insert).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

MATCH = "match"
SUBSTITUTE = "substitute"
INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class EditOp:
    """One alignment column.

    match/substitute carry both indices; delete carries only ``ref_index``;
    insert carries only ``hyp_index``.
    """

    kind: str
    ref_index: int | None = None
    hyp_index: int | None = None

    def __post_init__(self):
        if self.kind in (MATCH, SUBSTITUTE):
            ok = self.ref_index is not None and self.hyp_index is not None
        elif self.kind == DELETE:
            ok = self.ref_index is not None and self.hyp_index is None
        elif self.kind == INSERT:
            ok = self.ref_index is None and self.hyp_index is not None
        else:
            raise ValueError(f"unknown edit op kind {self.kind!r}")
        if not ok:
            raise ValueError(f"indices inconsistent with {self.kind} op")


@dataclass(frozen=True)
class Alignment:
    """Ordered edit ops plus the count of non-match ops along the path."""

    ops: tuple[EditOp, ...]
    distance: int

    @property
    def n_columns(self) -> int:
        return len(self.ops)


def edit_distance(ref: Sequence, hyp: Sequence) -> int:
    """Unit-cost edit distance without backtrace (two-row DP)."""
    m, n = len(ref), len(hyp)
    if n == 0:
        return m
    previous = list(range(n + 1))
    for i in range(1, m + 1):
        current = [i] + [0] * n
        ref_tok = ref[i - 1]
        for j in range(1, n + 1):
            diag = previous[j - 1] + (ref_tok != hyp[j - 1])
            current[j] = min(diag, previous[j] + 1, current[j - 1] + 1)
        previous = current
    return previous[n]


def align(
    ref: Sequence,
    hyp: Sequence,
    sub_cost: int = 1,
    ins_cost: int = 1,
    del_cost: int = 1,
) -> Alignment:
    """Full alignment with backtrace.

    ``distance`` is the number of non-match ops on the chosen path, which is
    the minimum edit distance under the default unit costs. Non-default
    costs change which path is chosen, not how distance is counted.
    """
    m, n = len(ref), len(hyp)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = dp[i - 1][0] + del_cost
    for j in range(1, n + 1):
        dp[0][j] = dp[0][j - 1] + ins_cost
    for i in range(1, m + 1):
        ref_tok = ref[i - 1]
        row = dp[i]
        prev = dp[i - 1]
        for j in range(1, n + 1):
            diag = prev[j - 1] + (0 if ref_tok == hyp[j - 1] else sub_cost)
            row[j] = min(diag, prev[j] + del_cost, row[j - 1] + ins_cost)

    ops: list[EditOp] = []
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            diag_cost = 0 if ref[i - 1] == hyp[j - 1] else sub_cost
            if dp[i][j] == dp[i - 1][j - 1] + diag_cost:
                kind = MATCH if diag_cost == 0 else SUBSTITUTE
                ops.append(EditOp(kind, ref_index=i - 1, hyp_index=j - 1))
                i -= 1
                j -= 1
                continue
        if i > 0 and dp[i][j] == dp[i - 1][j] + del_cost:
            ops.append(EditOp(DELETE, ref_index=i - 1))
            i -= 1
            continue
        ops.append(EditOp(INSERT, hyp_index=j - 1))
        j -= 1
    ops.reverse()
    distance = sum(1 for op in ops if op.kind != MATCH)
    return Alignment(ops=tuple(ops), distance=distance)
