"""Syzygies, minimal resolutions, Koszul Betti tables and regularity.

Koszul homology H_j(x; W)_d is computed from ranks only.  With
``A_j = id ⊗ f`` on Λ^j and ``∂`` the Koszul differentials of the free
modules, for W = Coker(f: F -> G) and P_j = Λ^j ⊗ G:

    dim H_j = dim P_j + rank A_{j-1} - rank [∂_j | A_{j-1}] - rank [A_j | ∂_{j+1}]

(the last term is rank A_v when j = v, the middle two vanish when j = 0),
and for W = Ker(f):

    Z_j = nullity [A_j ; ∂_j],   B_j = nullity A_{j+1} - Z_{j+1},   dim H_j = Z_j - B_j.
"""
from __future__ import annotations

import itertools
import logging
import math
from math import comb
from typing import Dict, List, Optional, Sequence

from .errors import CompositionError, ParameterError, UnsupportedRingError
from .graded_core import (
    GradedFreeModule,
    GradedMatrix,
    Polynomial,
    count_monomials,
    evaluate_in_degree,
    hilbert_function,
    hstack,
    rank_in_degree,
    vstack,
)
from .exactfield import hstack as stack_columns
from .models import (
    BettiTable,
    ExactnessReport,
    PresentedModule,
    RegularityMethod,
    RegularityReport,
    Resolution,
)

LOGGER = logging.getLogger(__name__)


# --- Koszul complexes ----------------------------------------------------------------


def koszul_differential(module: GradedFreeModule, j: int) -> GradedMatrix:
    """``∂_j : Λ^j ⊗ F -> Λ^{j-1} ⊗ F`` on all ring variables, subset-major order."""
    ring = module.ring
    v = ring.nvars
    source = list(itertools.combinations(range(v), j))
    target = list(itertools.combinations(range(v), j - 1))
    target_index = {subset: k for k, subset in enumerate(target)}
    k = module.rank
    plus = [Polynomial.variable(ring, t) for t in range(v)]
    minus = [-p for p in plus]
    entries = {}
    for s_idx, subset in enumerate(source):
        for pos, t in enumerate(subset):
            r_idx = target_index[subset[:pos] + subset[pos + 1 :]]
            poly = plus[t] if pos % 2 == 0 else minus[t]
            for g in range(k):
                entries[(r_idx * k + g, s_idx * k + g)] = poly
    domain = GradedFreeModule(ring, tuple(a + j for _ in source for a in module.twists))
    codomain = GradedFreeModule(ring, tuple(a + j - 1 for _ in target for a in module.twists))
    return GradedMatrix._trusted(domain, codomain, entries)


def koszul_tensor(f: GradedMatrix, j: int) -> GradedMatrix:
    """``id_{Λ^j} ⊗ f`` with twists raised by j."""
    copies = comb(f.ring.nvars, j)
    nrows, ncols = f.shape
    entries = {}
    for s in range(copies):
        for (i, c), poly in f.entries.items():
            entries[(s * nrows + i, s * ncols + c)] = poly
    domain = GradedFreeModule(f.ring, tuple(a + j for _ in range(copies) for a in f.domain.twists))
    codomain = GradedFreeModule(f.ring, tuple(a + j for _ in range(copies) for a in f.codomain.twists))
    return GradedMatrix._trusted(domain, codomain, entries)


def _wedge_dim(module: GradedFreeModule, j: int, degree: int) -> int:
    return comb(module.ring.nvars, j) * sum(count_monomials(module.ring, degree - a - j) for a in module.twists)


class KoszulRanks:
    """Lazily built Koszul matrices of one module with a per-degree rank cache."""

    def __init__(self, module: PresentedModule) -> None:
        if not module.ring.is_polynomial:
            raise UnsupportedRingError(f"Koszul Betti numbers need a polynomial ring, got {module.ring}")
        self.module = module
        self.v = module.ring.nvars
        self._matrices: Dict[tuple, GradedMatrix] = {}
        self._ranks: Dict[tuple, int] = {}
        self._values: Dict[tuple, int] = {}

    def _tensor(self, j: int) -> GradedMatrix:
        key = ("A", j)
        if key not in self._matrices:
            self._matrices[key] = koszul_tensor(self.module.map, j)
        return self._matrices[key]

    def _matrix(self, name: str, j: int) -> GradedMatrix:
        key = (name, j)
        if key in self._matrices:
            return self._matrices[key]
        f = self.module.map
        if name == "A":
            matrix = self._tensor(j)
        elif name == "stack":
            matrix = self._tensor(j) if j == 0 else vstack([self._tensor(j), koszul_differential(f.domain, j)])
        elif name == "left":
            matrix = hstack([koszul_differential(f.codomain, j), self._tensor(j - 1)])
        elif name == "right":
            matrix = hstack([self._tensor(j), koszul_differential(f.codomain, j + 1)])
        else:
            raise ValueError(name)
        self._matrices[key] = matrix
        return matrix

    def _rank(self, name: str, j: int, degree: int) -> int:
        key = (name, j, degree)
        if key not in self._ranks:
            self._ranks[key] = rank_in_degree(self._matrix(name, j), degree)
        return self._ranks[key]

    def low_degree(self, j: int) -> Optional[int]:
        ambient = self.module.ambient
        return None if ambient.rank == 0 else ambient.min_twist + j

    def homology(self, j: int, degree: int) -> int:
        key = (j, degree)
        if key in self._values:
            return self._values[key]
        f = self.module.map
        v = self.v
        if j < 0 or j > v:
            value = 0
        elif self.module.is_cokernel:
            value = _wedge_dim(f.codomain, j, degree)
            if j >= 1:
                value += self._rank("A", j - 1, degree) - self._rank("left", j, degree)
            value -= self._rank("right", j, degree) if j < v else self._rank("A", j, degree)
        else:
            cycles = _wedge_dim(f.domain, j, degree) - self._rank("stack", j, degree)
            # nullity A_{j+1} - nullity [A_{j+1}; ∂_{j+1}]
            boundaries = self._rank("stack", j + 1, degree) - self._rank("A", j + 1, degree) if j < v else 0
            value = cycles - boundaries
        if value < 0:
            raise ArithmeticError(f"negative Koszul homology dimension at j={j}, d={degree}")
        self._values[key] = value
        return value

    def table(self, degree_cap: int) -> BettiTable:
        entries = {}
        for j in range(self.v + 1):
            low = self.low_degree(j)
            if low is None:
                continue
            for d in range(low, degree_cap + 1):
                value = self.homology(j, d)
                if value:
                    entries[(j, d)] = value
        return BettiTable(entries, degree_cap=degree_cap, homological_cap=self.v)


def koszul_betti(module: PresentedModule, j: int, degree_cap: int) -> Dict[int, int]:
    """Graded ranks of H_j(x; module) in degrees up to ``degree_cap``."""
    ranks = KoszulRanks(module)
    if j < 0 or j > ranks.v:
        return {}
    low = ranks.low_degree(j)
    if low is None:
        return {}
    out = {}
    for d in range(low, degree_cap + 1):
        value = ranks.homology(j, d)
        if value:
            out[d] = value
    return out


def koszul_betti_table(module: PresentedModule, degree_cap: int) -> BettiTable:
    return KoszulRanks(module).table(degree_cap)


# --- regularity ----------------------------------------------------------------------------


def certificate_cap(module: PresentedModule) -> int:
    """Smallest degree cap for which the Betti completion test can pass."""
    f = module.map
    twists = f.domain.twists + f.codomain.twists
    return (max(twists) if twists else 0) + module.ring.nvars * max(1, f.max_entry_degree())


def regularity(module: PresentedModule, degree_cap: Optional[int] = None) -> RegularityReport:
    """Castelnuovo–Mumford regularity over a polynomial ring.

    ``degree_cap`` bounds every degree looked at; ``None`` lets the Betti
    computation grow until its completion test passes.
    """
    if not module.ring.is_polynomial:
        raise UnsupportedRingError(f"regularity is computed over polynomial rings only, got {module.ring}")
    if module.ambient.rank == 0:
        return RegularityReport.zero_module(degree_cap=degree_cap)
    if module.is_cokernel:
        report = _artinian_regularity(module, degree_cap)
        if report is not None:
            return report
        return _betti_regularity(module, degree_cap)
    return _kernel_regularity(module, degree_cap)


def _artinian_regularity(module: PresentedModule, degree_cap: Optional[int]) -> Optional[RegularityReport]:
    generators = module.map.codomain
    limit = degree_cap if degree_cap is not None else certificate_cap(module)
    hilbert: Dict[int, int] = {}
    for d in range(generators.min_twist, limit + 1):
        hilbert[d] = hilbert_function(module, d)
        # generated in degrees <= max twist, so one vanishing piece above that kills the rest
        if hilbert[d] == 0 and d >= generators.max_twist:
            nonzero = [k for k, h in hilbert.items() if h]
            LOGGER.debug("Artinian cokernel certified at degree %s", d)
            if not nonzero:
                return RegularityReport.zero_module(RegularityMethod.ARTINIAN_TOP_DEGREE, degree_cap)
            return RegularityReport(
                regularity=max(nonzero),
                indeg=min(nonzero),
                certified=True,
                method=RegularityMethod.ARTINIAN_TOP_DEGREE,
                degree_cap=degree_cap,
                hilbert=hilbert,
            )
    return None


def _report_from_table(table: BettiTable, certified: bool, cap: int) -> RegularityReport:
    table.complete = certified
    indeg = min(table.column(0), default=math.inf)
    return RegularityReport(
        regularity=table.regularity,
        indeg=indeg,
        certified=certified,
        method=RegularityMethod.BETTI,
        degree_cap=cap,
        betti=table,
    )


def _betti_regularity(module: PresentedModule, degree_cap: Optional[int]) -> RegularityReport:
    ranks = KoszulRanks(module)
    f = module.map
    v = module.ring.nvars
    spread = v * max(1, f.max_entry_degree())
    floor = certificate_cap(module)
    cap = floor if degree_cap is None else min(floor, degree_cap)
    while True:
        table = ranks.table(cap)
        required = max(floor, table.top_degree + spread) if table.entries else floor
        if cap >= required:
            return _report_from_table(table, True, cap)
        if degree_cap is not None and cap >= degree_cap:
            LOGGER.warning("regularity of %s not certified within degree cap %s", module.describe(), degree_cap)
            return _report_from_table(table, False, cap)
        cap = required if degree_cap is None else min(required, degree_cap)
        LOGGER.debug("raising Koszul degree cap to %s", cap)


def _kernel_regularity(module: PresentedModule, degree_cap: Optional[int]) -> RegularityReport:
    f = module.map
    companion = regularity(PresentedModule.cokernel(f), degree_cap)
    if not companion.certified:
        return _betti_regularity(module, degree_cap)
    # 0 -> Ker f -> F -> G -> Coker f -> 0 bounds reg Ker f
    parts = [f.domain.max_twist]
    if f.codomain.rank:
        parts.append(f.codomain.max_twist + 1)
    if not companion.is_zero:
        parts.append(companion.regularity + 2)
    needed = max(parts) + module.ring.nvars
    cap = needed if degree_cap is None else min(needed, degree_cap)
    table = KoszulRanks(module).table(cap)
    if cap < needed:
        LOGGER.warning("kernel regularity bound %s exceeds degree cap %s", needed, degree_cap)
    return _report_from_table(table, cap >= needed, cap)


# --- syzygies and resolutions ------------------------------------------------------------------


def _columns_to_matrix(target: GradedFreeModule, columns: List[Dict[int, Polynomial]], degrees: List[int]) -> GradedMatrix:
    entries = {}
    for j, column in enumerate(columns):
        for i, poly in column.items():
            if not poly.is_zero:
                entries[(i, j)] = poly
    return GradedMatrix(GradedFreeModule(target.ring, tuple(degrees)), target, entries)


def _vector_to_column(module: GradedFreeModule, degree: int, vector) -> Dict[int, Polynomial]:
    ring = module.ring
    basis = module.basis_in_degree(degree)
    column: Dict[int, Polynomial] = {}
    for idx, coeff in enumerate(vector):
        if not coeff:
            continue
        gen, mono = basis[idx]
        term = Polynomial.monomial(ring, mono, coeff)
        column[gen] = column[gen] + term if gen in column else term
    return column


def _new_pivots(span_matrix: GradedMatrix, candidates, degree: int) -> List[int]:
    """Indices of candidate columns independent modulo the span of ``span_matrix`` in ``degree``."""
    span = evaluate_in_degree(span_matrix, degree)
    combined = stack_columns([span, candidates])
    return [p - span.cols for p in combined.pivot_columns() if p >= span.cols]


def kernel_generators(f: GradedMatrix, degree_cap: int) -> GradedMatrix:
    """Minimal homogeneous generators of ``ker f`` in degrees <= ``degree_cap``.

    Returned as a map G -> domain(f) whose image is the truncated kernel.
    """
    domain = f.domain
    columns: List[Dict[int, Polynomial]] = []
    degrees: List[int] = []
    if domain.rank == 0:
        return _columns_to_matrix(domain, columns, degrees)
    for d in range(domain.min_twist, degree_cap + 1):
        kernel = evaluate_in_degree(f, d).kernel_basis()
        if kernel.cols == 0:
            continue
        current = _columns_to_matrix(domain, columns, degrees)
        for p in _new_pivots(current, kernel, d):
            columns.append(_vector_to_column(domain, d, kernel.data[:, p]))
            degrees.append(d)
    LOGGER.debug("kernel generators up to degree %s: %s", degree_cap, degrees)
    return _columns_to_matrix(domain, columns, degrees)


def minimal_generators(f: GradedMatrix) -> GradedMatrix:
    """A minimal subset of the columns of ``f`` generating its image."""
    chosen: List[int] = []
    for d in sorted(set(f.domain.twists)):
        block = [j for j, a in enumerate(f.domain.twists) if a == d]
        current = f.submatrix(range(f.nrows), chosen)
        candidates = evaluate_in_degree(f.submatrix(range(f.nrows), block), d)
        chosen.extend(block[p] for p in _new_pivots(current, candidates, d))
    return f.submatrix(range(f.nrows), chosen)


def minimal_resolution(module: PresentedModule, homological_cap: int, degree_cap: int) -> Resolution:
    """Minimal graded free resolution truncated at the given caps."""
    if homological_cap < 1:
        raise ParameterError(f"homological cap must be positive, got {homological_cap}")
    f = module.map
    v = module.ring.nvars
    if module.is_cokernel:
        if f.has_unit_entries():
            raise ParameterError("cokernel presentation has unit entries; it is not minimal")
        first = minimal_generators(f)
    else:
        first = kernel_generators(kernel_generators(f, degree_cap), degree_cap)
        if first.codomain.rank == 0:
            return Resolution([first.codomain], [], True, degree_cap, homological_cap)
    terms = [first.codomain]
    maps: List[GradedMatrix] = []
    current = first
    complete = False
    while True:
        if current.ncols == 0:
            complete = _step_certified(maps[-1] if maps else None, degree_cap, v)
            break
        terms.append(current.domain)
        maps.append(current)
        if len(maps) >= homological_cap:
            break
        current = kernel_generators(current, degree_cap)
    LOGGER.debug("resolution of %s: %s steps, complete=%s", module.describe(), len(maps), complete)
    return Resolution(terms, maps, complete, degree_cap, homological_cap)


def _step_certified(previous: Optional[GradedMatrix], degree_cap: int, v: int) -> bool:
    if previous is None:
        return True
    spread = v * max(1, previous.max_entry_degree())
    return degree_cap >= previous.domain.max_twist + spread


def euler_characteristic(resolution: Resolution, degree: int) -> int:
    """Alternating sum of the Hilbert functions of the resolution terms."""
    return sum((-1) ** j * term.dim_in_degree(degree) for j, term in enumerate(resolution.terms))


# --- complexes ------------------------------------------------------------------------------------


def zero_map_into(module: GradedFreeModule) -> GradedMatrix:
    """``0 -> module``; append to a complex to test injectivity of its last map."""
    return GradedMatrix.zero(GradedFreeModule(module.ring, ()), module)


def check_complex_exactness(maps: Sequence[GradedMatrix], degree_cap: int) -> ExactnessReport:
    """Check d_i ∘ d_{i+1} = 0 and exactness at every interior position.

    ``maps = [d_1, ..., d_k]`` with ``d_i : F_i -> F_{i-1}``; positions are
    the modules F_1, ..., F_{k-1}.
    """
    maps = list(maps)
    report = ExactnessReport(is_complex=True)
    for i in range(len(maps) - 1):
        if maps[i].domain != maps[i + 1].codomain:
            raise CompositionError(f"maps {i + 1} and {i + 2} are not composable")
        if not maps[i].compose(maps[i + 1]).is_zero():
            report.is_complex = False
            report.nonzero_compositions.append(i + 1)
    if not report.is_complex:
        LOGGER.info("not a complex: nonzero compositions at %s", report.nonzero_compositions)
        return report
    twists = [a for f in maps for a in f.domain.twists + f.codomain.twists]
    if not twists:
        return report
    low = min(twists)
    for i in range(len(maps) - 1):
        position = maps[i].domain
        for d in range(low, degree_cap + 1):
            kernel = position.dim_in_degree(d) - rank_in_degree(maps[i], d)
            image = rank_in_degree(maps[i + 1], d)
            entry = {"position": i + 1, "degree": d, "kernel": kernel, "image": image}
            report.checked.append(entry)
            if kernel != image:
                report.failures.append(entry)
    if report.failures:
        LOGGER.info("complex is not exact at %s places", len(report.failures))
    return report
