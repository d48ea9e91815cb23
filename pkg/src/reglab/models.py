"""Dataclasses used throughout the package."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from .graded_core import GradedFreeModule, GradedMatrix, RingSpec

Extended = Union[int, float]  # an integer or one of ±math.inf


def encode_extended(value: Extended) -> Union[int, str]:
    """JSON form of an integer that may be ±∞."""
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return int(value)


def decode_extended(value: Union[int, str]) -> Extended:
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    return int(value)


class ModuleKind(str, Enum):
    COKERNEL = "cokernel"
    KERNEL = "kernel"


@dataclass(frozen=True)
class PresentedModule:
    """A graded module given as the cokernel or the kernel of ``map``."""

    kind: ModuleKind
    map: GradedMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ModuleKind(self.kind))

    @classmethod
    def cokernel(cls, f: GradedMatrix) -> "PresentedModule":
        return cls(ModuleKind.COKERNEL, f)

    @classmethod
    def kernel(cls, f: GradedMatrix) -> "PresentedModule":
        return cls(ModuleKind.KERNEL, f)

    @classmethod
    def free(cls, ring: RingSpec, twists) -> "PresentedModule":
        module = GradedFreeModule(ring, tuple(twists))
        return cls.cokernel(GradedMatrix.zero(GradedFreeModule(ring, ()), module))

    @property
    def ring(self) -> RingSpec:
        return self.map.ring

    @property
    def is_cokernel(self) -> bool:
        return self.kind is ModuleKind.COKERNEL

    @property
    def ambient(self) -> GradedFreeModule:
        """The free module the module is a quotient or a submodule of."""
        return self.map.codomain if self.is_cokernel else self.map.domain

    def describe(self) -> str:
        f = self.map
        return f"{self.kind.value}({f.codomain} <- {f.domain})"


@dataclass
class BettiTable:
    """Graded ranks: (homological index j, internal degree d) -> rank."""

    entries: Dict[tuple, int] = field(default_factory=dict)
    degree_cap: int = 0
    homological_cap: int = 0
    complete: bool = False

    def __post_init__(self) -> None:
        self.entries = {(int(j), int(d)): int(r) for (j, d), r in self.entries.items() if r}

    def rank(self, j: int, d: Optional[int] = None) -> int:
        if d is None:
            return sum(r for (jj, _), r in self.entries.items() if jj == j)
        return self.entries.get((j, d), 0)

    def column(self, j: int) -> Dict[int, int]:
        return {d: r for (jj, d), r in sorted(self.entries.items()) if jj == j}

    @property
    def regularity(self) -> Extended:
        return max((d - j for j, d in self.entries), default=-math.inf)

    @property
    def top_degree(self) -> Extended:
        return max((d for _, d in self.entries), default=-math.inf)

    @property
    def lowest_degree(self) -> Extended:
        return min((d for _, d in self.entries), default=math.inf)

    def same_ranks(self, other: "BettiTable") -> bool:
        return self.entries == other.entries

    def to_json(self) -> List[Dict[str, int]]:
        return [{"j": j, "d": d, "rank": r} for (j, d), r in sorted(self.entries.items())]

    def format(self) -> str:
        """Macaulay-style table: rows are d - j, columns j."""
        if not self.entries:
            return "(zero)"
        js = range(0, max(j for j, _ in self.entries) + 1)
        shifts = sorted({d - j for j, d in self.entries})
        lines = ["     " + " ".join(f"{j:>4}" for j in js)]
        for s in range(shifts[0], shifts[-1] + 1):
            cells = [self.entries.get((j, s + j), 0) for j in js]
            lines.append(f"{s:>4}:" + " ".join(f"{c if c else '.':>4}" for c in cells))
        return "\n".join(lines)


class RegularityMethod(str, Enum):
    BETTI = "betti"
    ARTINIAN_TOP_DEGREE = "artinian_top_degree"


@dataclass
class RegularityReport:
    regularity: Extended
    indeg: Extended
    certified: bool
    method: RegularityMethod
    degree_cap: Optional[int] = None
    betti: Optional[BettiTable] = None
    hilbert: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def zero_module(cls, method: RegularityMethod = RegularityMethod.BETTI, degree_cap: Optional[int] = None) -> "RegularityReport":
        return cls(-math.inf, math.inf, True, method, degree_cap, BettiTable(complete=True))

    @property
    def is_zero(self) -> bool:
        return self.regularity == -math.inf

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "regularity": encode_extended(self.regularity),
            "indeg": encode_extended(self.indeg),
            "certified": self.certified,
            "method": self.method.value,
            "degree_cap": self.degree_cap,
        }
        if self.betti is not None:
            data["betti"] = self.betti.to_json()
        return data


def combine_reports(*reports: RegularityReport) -> RegularityReport:
    """Report for a direct sum: max of regularities, min of indeg."""
    methods = {r.method for r in reports}
    return RegularityReport(
        regularity=max(r.regularity for r in reports),
        indeg=min(r.indeg for r in reports),
        certified=all(r.certified for r in reports),
        method=methods.pop() if len(methods) == 1 else RegularityMethod.BETTI,
    )


@dataclass
class ExactnessReport:
    """Verdict of ``check_complex_exactness``."""

    is_complex: bool
    failures: List[Dict[str, int]] = field(default_factory=list)
    checked: List[Dict[str, int]] = field(default_factory=list)
    nonzero_compositions: List[int] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.is_complex and not self.failures

    def to_json(self) -> Dict[str, Any]:
        return {
            "is_complex": self.is_complex,
            "exact": self.exact,
            "nonzero_compositions": self.nonzero_compositions,
            "failures": self.failures,
            "checked": len(self.checked),
        }


@dataclass
class Resolution:
    """Terms F_0, F_1, ... and differentials d_j : F_j -> F_{j-1} of a minimal resolution."""

    terms: List[GradedFreeModule]
    maps: List[GradedMatrix]
    complete: bool
    degree_cap: int
    homological_cap: int

    def betti_table(self) -> BettiTable:
        entries: Dict[tuple, int] = {}
        for j, module in enumerate(self.terms):
            for a in module.twists:
                entries[(j, a)] = entries.get((j, a), 0) + 1
        return BettiTable(entries, self.degree_cap, self.homological_cap, self.complete)

    def __iter__(self):
        return iter(self.maps)

    def __len__(self) -> int:
        return len(self.maps)


@dataclass
class ComparisonRow:
    """One computed row of a reproduction table."""

    n: int
    values: Dict[str, Any]
    predicted: Dict[str, Any]
    certified: bool

    @property
    def match(self) -> bool:
        return all(self.values.get(key) == value for key, value in self.predicted.items())

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"n": self.n}
        for key, value in self.values.items():
            data[key] = encode_extended(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else value
        for key, value in self.predicted.items():
            data[f"predicted_{key}"] = encode_extended(value) if isinstance(value, (int, float)) and not isinstance(value, bool) else value
        data["certified"] = self.certified
        data["match"] = self.match
        return data


@dataclass
class CheckResult:
    """Outcome of one named verification."""

    check: str
    params: Dict[str, Any]
    passed: bool
    detail: str = ""

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)
