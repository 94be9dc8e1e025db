"""Reflection-in-Creative-Experience questionnaire arithmetic.

Nine items on a common scale, ordered Cp1-3 (current process), Se1-3
(self), Ex1-3 (experimentation). Item Ex3 is reverse-worded, so its raw
value is inverted (lo + hi - x) before averaging. The total is the mean of
all nine items after inversion; each factor is the mean of its three.
The instrument is conventionally described as scoring "out of 10" even
though items are commonly administered on a 7-point scale; the scale here
is a parameter and no rescaling is applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import OutOfRangeError, WrongArityError

ITEM_COUNT = 9


@dataclass(frozen=True)
class RiceScore:
    total: float
    cp: float
    se: float
    ex: float

    def as_dict(self) -> dict[str, float]:
        return {"total": self.total, "cp": self.cp, "se": self.se, "ex": self.ex}


def score_rice(items: Sequence[float], lo: float = 1, hi: float = 7) -> RiceScore:
    """Score nine raw ratings; Ex3 (the last item) is reverse-scored."""
    if len(items) != ITEM_COUNT:
        raise WrongArityError(f"expected {ITEM_COUNT} items, got {len(items)}")
    values = [float(v) for v in items]
    for v in values:
        if not lo <= v <= hi:
            raise OutOfRangeError(f"item value {v} outside [{lo}, {hi}]")
    values[8] = lo + hi - values[8]
    cp = sum(values[0:3]) / 3
    se = sum(values[3:6]) / 3
    ex = sum(values[6:9]) / 3
    total = sum(values) / ITEM_COUNT
    return RiceScore(total=total, cp=cp, se=se, ex=ex)
