"""Eventual linearity of regularity sequences, split by the parity of n."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import InsufficientDataError, ParameterError
from .families import f_value
from .models import Extended, decode_extended, encode_extended

LOGGER = logging.getLogger(__name__)

MIN_TERMS = 4
DEFAULT_SUFFIX = 3


def _decoded(value: Any) -> Extended:
    return decode_extended(value) if isinstance(value, str) else value


class Verdict(str, Enum):
    EVENTUALLY_LINEAR = "eventually_linear"
    NOT_LINEAR_IN_RANGE = "not_linear_in_range"


@dataclass(frozen=True)
class ParitySlice:
    """Values at n = 2i + parity, keyed by i."""

    parity: int
    values: Dict[int, Extended]

    @property
    def indices(self) -> List[int]:
        return sorted(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RegSequence:
    """n -> regularity (an integer, or -inf for the zero module)."""

    values: Dict[int, Extended]

    def __post_init__(self) -> None:
        keys = sorted(self.values)
        if keys and keys != list(range(keys[0], keys[-1] + 1)):
            raise ParameterError(f"indices must be contiguous, got {keys}")

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[str, Any]], key: str) -> "RegSequence":
        """Sequence of the ``key`` column; "inf"/"-inf" strings decode to floats."""
        return cls({int(row["n"]): _decoded(row[key]) for row in rows})

    def parity_slice(self, parity: int) -> ParitySlice:
        if parity not in (0, 1):
            raise ParameterError(f"parity must be 0 or 1, got {parity}")
        return ParitySlice(parity, {(n - parity) // 2: v for n, v in self.values.items() if n % 2 == parity})

    def parity_split(self) -> Tuple[ParitySlice, ParitySlice]:
        return self.parity_slice(0), self.parity_slice(1)


@dataclass(frozen=True)
class LinearFit:
    parity: int
    slope: int
    intercept: Extended
    onset: int
    verdict: Verdict

    @property
    def is_linear(self) -> bool:
        return self.verdict is Verdict.EVENTUALLY_LINEAR

    def value(self, i: int) -> Extended:
        return self.slope * i + self.intercept

    def to_json(self) -> Dict[str, Any]:
        return {
            "parity": self.parity,
            "slope": self.slope,
            "intercept": encode_extended(self.intercept),
            "onset": self.onset,
            "verdict": self.verdict.value,
        }


def detect_linear(seq: Union[ParitySlice, Mapping[int, Extended]], min_suffix: int = DEFAULT_SUFFIX) -> LinearFit:
    """Longest tail with constant differences; linear iff it has ``min_suffix`` equal differences.

    A tail of -inf values (zero modules) counts as linear with slope 0.
    """
    if not isinstance(seq, ParitySlice):
        seq = ParitySlice(0, dict(seq))
    indices = seq.indices
    if len(indices) < MIN_TERMS:
        raise InsufficientDataError(f"need at least {MIN_TERMS} terms, got {len(indices)}")
    values = [seq.values[i] for i in indices]

    if values[-1] == -math.inf:
        start = len(values) - 1
        while start > 0 and values[start - 1] == -math.inf:
            start -= 1
        linear = len(values) - 1 - start >= min_suffix
        verdict = Verdict.EVENTUALLY_LINEAR if linear else Verdict.NOT_LINEAR_IN_RANGE
        return LinearFit(seq.parity, 0, -math.inf, indices[start], verdict)
    if any(math.isinf(v) for v in values[-2:]):
        return LinearFit(seq.parity, 0, values[-1], indices[-1], Verdict.NOT_LINEAR_IN_RANGE)

    slope = int(values[-1] - values[-2])
    start = len(values) - 2
    while start > 0 and not math.isinf(values[start - 1]) and values[start] - values[start - 1] == slope:
        start -= 1
    equal_differences = len(values) - 1 - start
    verdict = Verdict.EVENTUALLY_LINEAR if equal_differences >= min_suffix else Verdict.NOT_LINEAR_IN_RANGE
    onset = indices[start]
    intercept = int(values[start]) - slope * onset
    LOGGER.debug("parity %s: slope %s over %s equal differences from i=%s", seq.parity, slope, equal_differences, onset)
    return LinearFit(seq.parity, slope, intercept, onset, verdict)


def slope_weight_check(fit: LinearFit, weights: Sequence[int]) -> bool:
    """True when the slope's absolute value is a degree of a defining relation."""
    if not fit.is_linear:
        raise ParameterError("slope check needs an eventually linear fit")
    return abs(fit.slope) in set(weights)


@dataclass
class RatioStats:
    """reg(n)/n over the window and over its tails."""

    minimum: Fraction
    maximum: Fraction
    argmin: int
    argmax: int
    tails: List[Dict[str, Any]] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "min": str(self.minimum),
            "max": str(self.maximum),
            "argmin": self.argmin,
            "argmax": self.argmax,
            "tails": [{"from": t["from"], "min": str(t["min"]), "max": str(t["max"])} for t in self.tails],
        }


def ratio_stats(seq: Union[RegSequence, Mapping[int, Extended]]) -> RatioStats:
    values = seq.values if isinstance(seq, RegSequence) else dict(seq)
    ratios = {}
    for n, v in sorted(values.items()):
        if n < 1:
            continue
        if math.isinf(v):
            raise ParameterError(f"ratio undefined for infinite value at n={n}")
        ratios[n] = Fraction(int(v), n)
    if not ratios:
        raise InsufficientDataError("no positive indices to take ratios over")
    keys = sorted(ratios)
    tails = []
    low = high = None
    for n in reversed(keys):
        r = ratios[n]
        low = r if low is None else min(low, r)
        high = r if high is None else max(high, r)
        tails.append({"from": n, "min": low, "max": high})
    tails.reverse()
    argmin = min(keys, key=lambda n: (ratios[n], n))
    argmax = max(keys, key=lambda n: (ratios[n], -n))
    return RatioStats(ratios[argmin], ratios[argmax], argmin, argmax, tails)


def density_subsequence(alpha: Union[Fraction, float, str], l_max: int, l_min: int = 2) -> List[Dict[str, Any]]:
    """n(l) = floor(2^l / (alpha - 1)) for 2 < alpha <= 3; the ratios (n + f(n))/n tend to alpha."""
    alpha = Fraction(alpha)
    if not 2 < alpha <= 3:
        raise ParameterError(f"alpha must lie in (2, 3], got {alpha}")
    if l_max < l_min:
        raise ParameterError(f"l_max={l_max} is below l_min={l_min}")
    rows = []
    for l in range(l_min, l_max + 1):
        n = math.floor(Fraction(2**l) / (alpha - 1))
        if n < 1:
            continue
        rows.append({"l": l, "n": n, "ratio": Fraction(n + f_value(n), n)})
    return rows


def f_bounds_hold(tor_regularities: Mapping[int, Extended]) -> Dict[int, bool]:
    """For the second family: f(n) = reg(Tor_n) - n equals the closed form and lies in [n+1, 2n]."""
    out = {}
    for n, reg in sorted(tor_regularities.items()):
        f = reg - n
        out[n] = f == f_value(n) and n + 1 <= f <= 2 * n
    return out


def fit_slices(seq: RegSequence, min_suffix: int = DEFAULT_SUFFIX) -> List[LinearFit]:
    return [detect_linear(s, min_suffix) for s in seq.parity_split()]


def weight_checks(fits: Sequence[LinearFit], weights: Sequence[int]) -> List[Optional[bool]]:
    """``slope_weight_check`` per fit; None where the fit is not linear."""
    return [slope_weight_check(fit, weights) if fit.is_linear else None for fit in fits]
