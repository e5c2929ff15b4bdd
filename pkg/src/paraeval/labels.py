"""Paraphasia label alphabet.

Every word in an utterance carries exactly one label: ``C`` for regular
(non-paraphasic) words, or one of the three paraphasia classes ``P``
(phonemic), ``N`` (neologistic), ``S`` (semantic).
"""

from __future__ import annotations

import enum

from .errors import FormatError


class ParaphasiaLabel(enum.Enum):
    C = "c"
    P = "p"
    N = "n"
    S = "s"

    @property
    def token(self) -> str:
        """Bracketed text-form token, e.g. ``[p]``."""
        return f"[{self.value}]"

    @property
    def is_paraphasia(self) -> bool:
        return self is not ParaphasiaLabel.C

    @classmethod
    def from_letter(cls, letter: str) -> "ParaphasiaLabel":
        try:
            return cls(letter.lower())
        except ValueError:
            raise FormatError(f"unknown paraphasia label {letter!r}") from None

    @classmethod
    def from_token(cls, token: str) -> "ParaphasiaLabel":
        """Parse a bracketed token like ``[n]`` (or a bare letter)."""
        text = token.strip()
        if text.startswith("[") and text.endswith("]"):
            text = text[1:-1]
        return cls.from_letter(text)


#: Fixed class order used wherever the four classes are indexed positionally
#: (class-count vectors, classifier output tables).
CLASS_ORDER: tuple[ParaphasiaLabel, ...] = (
    ParaphasiaLabel.C,
    ParaphasiaLabel.P,
    ParaphasiaLabel.N,
    ParaphasiaLabel.S,
)

PARAPHASIA_CLASSES: tuple[ParaphasiaLabel, ...] = (
    ParaphasiaLabel.P,
    ParaphasiaLabel.N,
    ParaphasiaLabel.S,
)

#: Tie-break ranking for subword majority voting: any paraphasia class beats
#: C, and tied paraphasia classes resolve P, then N, then S. Documented
#: toolkit convention; deterministic by construction.
VOTE_PRECEDENCE: dict[ParaphasiaLabel, int] = {
    ParaphasiaLabel.P: 3,
    ParaphasiaLabel.N: 2,
    ParaphasiaLabel.S: 1,
    ParaphasiaLabel.C: 0,
}


def is_label_token(token: str) -> bool:
    """True if the whitespace token is a bracketed label token like ``[p]``."""
    return len(token) >= 3 and token.startswith("[") and token.endswith("]")
