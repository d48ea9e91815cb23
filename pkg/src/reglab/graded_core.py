"""Graded rings, twisted free modules and homogeneous matrices.

Conventions used everywhere in the package:

* monomials are exponent vectors; bases of graded pieces are listed in
  lexicographically descending order, so ``y^2 > y*z > z^2``;
* a free module stores the degrees ``a_k`` of its generators, i.e.
  ``twists = (a_1, ..., a_r)`` stands for ``R(-a_1) + ... + R(-a_r)``;
* a matrix has one row per codomain generator and one column per domain
  generator, and entry ``(i, j)`` is homogeneous of degree
  ``domain.twists[j] - codomain.twists[i]``.

Quotient rings are restricted to pure powers ``x_i^{e_i}``; the normal form
of a monomial is itself if every exponent is below its bound and zero
otherwise.
"""
from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import CompositionError, HomogeneityError, ParameterError
from .exactfield import FieldSpec, PrimeFieldMatrix, Scalar, array_rank

if TYPE_CHECKING:
    from .models import PresentedModule

LOGGER = logging.getLogger(__name__)

Monomial = tuple[int, ...]

# stands in for "no bound" when exponent caps go through numpy
_NO_BOUND = np.iinfo(np.int64).max // 4
_POLY_TEXT = re.compile(r"^[\sA-Za-z0-9_+\-*^/()]*$")


@dataclass(frozen=True)
class RingSpec:
    """``field[variables] / (x_i^{e_i})``; a ``None`` relation leaves x_i free."""

    field: FieldSpec
    variables: tuple[str, ...]
    power_relations: tuple[Optional[int], ...] = ()

    def __post_init__(self) -> None:
        variables = tuple(self.variables)
        relations = tuple(self.power_relations) or (None,) * len(variables)
        if len(relations) != len(variables):
            raise ParameterError("one power relation (or None) per variable is required")
        if len(set(variables)) != len(variables):
            raise ParameterError(f"variable names must be distinct: {variables}")
        for name in variables:
            if not name.isidentifier():
                raise ParameterError(f"invalid variable name {name!r}")
        for exponent in relations:
            if exponent is not None and int(exponent) < 2:
                raise ParameterError(f"power relations need exponent >= 2, got {exponent}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "power_relations", tuple(None if e is None else int(e) for e in relations))

    @classmethod
    def polynomial(cls, field: FieldSpec, variables: Iterable[str]) -> "RingSpec":
        return cls(field, tuple(variables))

    @classmethod
    def quotient(cls, field: FieldSpec, variables: Iterable[str], relations: Mapping[str, int]) -> "RingSpec":
        variables = tuple(variables)
        unknown = set(relations) - set(variables)
        if unknown:
            raise ParameterError(f"relations mention unknown variables {sorted(unknown)}")
        return cls(field, variables, tuple(relations.get(name) for name in variables))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def is_polynomial(self) -> bool:
        return all(e is None for e in self.power_relations)

    @cached_property
    def exponent_caps(self) -> np.ndarray:
        return np.array([_NO_BOUND if e is None else e for e in self.power_relations], dtype=np.int64)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ParameterError(f"{name!r} is not a variable of {self}") from None

    def is_normal(self, exponents: Sequence[int]) -> bool:
        for e, bound in zip(exponents, self.power_relations):
            if bound is not None and e >= bound:
                return False
        return True

    def polynomial_ring(self) -> "RingSpec":
        return RingSpec(self.field, self.variables)

    def __str__(self) -> str:
        base = f"{self.field}[{','.join(self.variables)}]"
        relations = [f"{v}^{e}" for v, e in zip(self.variables, self.power_relations) if e is not None]
        return f"{base}/({','.join(relations)})" if relations else base


@lru_cache(maxsize=None)
def _exponent_vectors(bounds: tuple[Optional[int], ...], degree: int) -> tuple[Monomial, ...]:
    if degree < 0:
        return ()
    if not bounds:
        return ((),) if degree == 0 else ()
    top = degree if bounds[0] is None else min(degree, bounds[0] - 1)
    out = []
    for first in range(top, -1, -1):
        for rest in _exponent_vectors(bounds[1:], degree - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=256)
def _exponent_array(bounds: tuple[Optional[int], ...], degree: int) -> np.ndarray:
    vectors = _exponent_vectors(bounds, degree)
    arr = np.array(vectors, dtype=np.int64).reshape(len(vectors), len(bounds))
    arr.setflags(write=False)
    return arr


def monomial_basis(ring: RingSpec, degree: int) -> tuple[Monomial, ...]:
    """Normal-form monomials of total degree ``degree``, lex descending."""
    return _exponent_vectors(ring.power_relations, degree)


def count_monomials(ring: RingSpec, degree: int) -> int:
    return len(monomial_basis(ring, degree))


# --- polynomials -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Element of a ``RingSpec``: map from normal-form monomials to nonzero scalars."""

    ring: RingSpec
    terms: dict

    def __post_init__(self) -> None:
        field = self.ring.field
        nvars = self.ring.nvars
        clean: dict[Monomial, Scalar] = {}
        for mono, coeff in dict(self.terms).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars or any(e < 0 for e in mono):
                raise ParameterError(f"bad exponent vector {mono} for {self.ring}")
            if not self.ring.is_normal(mono):
                continue
            value = field.element(coeff)
            if value:
                clean[mono] = value
        object.__setattr__(self, "terms", clean)

    @classmethod
    def _wrap(cls, ring: RingSpec, terms: dict) -> "Polynomial":
        # trusted constructor: terms already normal, reduced and nonzero
        poly = object.__new__(cls)
        object.__setattr__(poly, "ring", ring)
        object.__setattr__(poly, "terms", terms)
        return poly

    @classmethod
    def from_terms(cls, ring: RingSpec, pairs: Iterable[tuple[Sequence[int], Scalar]]) -> "Polynomial":
        field = ring.field
        merged: dict[Monomial, Scalar] = {}
        for mono, coeff in pairs:
            mono = tuple(int(e) for e in mono)
            merged[mono] = field.add(merged.get(mono, field.element(0)), field.element(coeff))
        return cls(ring, merged)

    @classmethod
    def zero(cls, ring: RingSpec) -> "Polynomial":
        return cls._wrap(ring, {})

    @classmethod
    def constant(cls, ring: RingSpec, value: Scalar = 1) -> "Polynomial":
        return cls(ring, {(0,) * ring.nvars: value})

    @classmethod
    def one(cls, ring: RingSpec) -> "Polynomial":
        return cls.constant(ring, 1)

    @classmethod
    def monomial(cls, ring: RingSpec, exponents: Sequence[int], coeff: Scalar = 1) -> "Polynomial":
        return cls(ring, {tuple(exponents): coeff})

    @classmethod
    def variable(cls, ring: RingSpec, name: Union[str, int], power: int = 1, coeff: Scalar = 1) -> "Polynomial":
        idx = ring.index(name) if isinstance(name, str) else int(name)
        exps = [0] * ring.nvars
        exps[idx] = power
        return cls.monomial(ring, exps, coeff)

    @classmethod
    def parse(cls, ring: RingSpec, text: str) -> "Polynomial":
        """Parse strings such as ``"y*z + v^2"`` over ``ring``."""
        if not isinstance(text, str) or not _POLY_TEXT.match(text):
            raise ParameterError(f"not a polynomial expression: {text!r}")
        symbols = {name: sympy.Symbol(name) for name in ring.variables}
        try:
            expr = parse_expr(
                text,
                local_dict=symbols,
                global_dict={"Integer": sympy.Integer, "Rational": sympy.Rational, "Symbol": sympy.Symbol},
                transformations=standard_transformations + (convert_xor,),
            )
        except Exception as exc:
            raise ParameterError(f"cannot parse {text!r}: {exc}") from exc
        return cls.from_sympy(ring, expr)

    @classmethod
    def from_sympy(cls, ring: RingSpec, expr) -> "Polynomial":
        symbols = [sympy.Symbol(name) for name in ring.variables]
        expr = sympy.sympify(expr)
        stray = expr.free_symbols - set(symbols)
        if stray:
            raise ParameterError(f"unknown symbols {sorted(map(str, stray))} for {ring}")
        try:
            poly = sympy.Poly(expr, *symbols)
        except sympy.PolynomialError as exc:
            raise ParameterError(f"{expr} is not a polynomial: {exc}") from exc
        pairs = []
        for monom, coeff in poly.terms():
            if not coeff.is_Rational:
                raise ParameterError(f"coefficient {coeff} is not rational")
            pairs.append((monom, Fraction(int(coeff.p), int(coeff.q))))
        return cls.from_terms(ring, pairs)

    def to_sympy(self):
        symbols = [sympy.Symbol(name) for name in self.ring.variables]
        total = sympy.Integer(0)
        for mono, coeff in self.terms.items():
            c = sympy.Rational(coeff.numerator, coeff.denominator) if isinstance(coeff, Fraction) else sympy.Integer(coeff)
            total += c * sympy.Mul(*[s**e for s, e in zip(symbols, mono)])
        return total

    # -- inspection

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {sum(mono) for mono in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> Optional[int]:
        """Degree of a homogeneous polynomial; None for zero."""
        degrees = self.degrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise HomogeneityError(f"{self} is not homogeneous")
        return next(iter(degrees))

    def single_term(self) -> Optional[tuple[Monomial, Scalar]]:
        if len(self.terms) != 1:
            return None
        return next(iter(self.terms.items()))

    def coefficient(self, exponents: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(exponents), self.ring.field.element(0))

    # -- arithmetic

    def _coerce(self, other) -> Optional["Polynomial"]:
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise CompositionError(f"cannot combine elements of {self.ring} and {other.ring}")
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return Polynomial.constant(self.ring, other)
        return None

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        field = self.ring.field
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            value = field.add(terms[mono], coeff) if mono in terms else coeff
            if value:
                terms[mono] = value
            else:
                terms.pop(mono, None)
        return Polynomial._wrap(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        field = self.ring.field
        return Polynomial._wrap(self.ring, {m: field.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, value: Scalar) -> "Polynomial":
        field = self.ring.field
        value = field.element(value)
        if not value:
            return Polynomial.zero(self.ring)
        return Polynomial._wrap(self.ring, {m: field.mul(c, value) for m, c in self.terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction, np.integer)):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        ring = self.ring
        field = ring.field
        out: dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                if not ring.is_normal(mono):
                    continue
                value = field.mul(c1, c2)
                out[mono] = field.add(out[mono], value) if mono in out else value
        return Polynomial._wrap(ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ParameterError("negative powers are not polynomials")
        result = Polynomial.one(self.ring)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def rename(self, target: RingSpec, mapping: Mapping[str, Optional[str]]) -> "Polynomial":
        """Send each variable to a variable of ``target`` or to zero (``None``)."""
        positions = []
        for name in self.ring.variables:
            image = mapping.get(name, name)
            positions.append(None if image is None else target.index(image))
        pairs = []
        for mono, coeff in self.terms.items():
            if any(e and positions[i] is None for i, e in enumerate(mono)):
                continue
            exps = [0] * target.nvars
            for i, e in enumerate(mono):
                if e:
                    exps[positions[i]] += e
            pairs.append((exps, coeff))
        return Polynomial.from_terms(target, pairs)

    # -- display

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ring, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = self.ring.variables
        pieces = []
        for mono, coeff in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
            body = "*".join(name if e == 1 else f"{name}^{e}" for name, e in zip(names, mono) if e)
            negative = isinstance(coeff, Fraction) and coeff < 0
            magnitude = -coeff if negative else coeff
            if not body:
                text = str(magnitude)
            elif magnitude == 1:
                text = body
            else:
                text = f"{magnitude}*{body}"
            pieces.append(("-" if negative else "+", text))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self})"


# --- free modules ---------------------------------------------------------------------


@dataclass(frozen=True)
class GradedFreeModule:
    """``R(-a_1) + ... + R(-a_r)`` stored as ``twists = (a_1, ..., a_r)``."""

    ring: RingSpec
    twists: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "twists", tuple(int(a) for a in self.twists))

    @property
    def rank(self) -> int:
        return len(self.twists)

    def __len__(self) -> int:
        return len(self.twists)

    @property
    def max_twist(self) -> Optional[int]:
        return max(self.twists) if self.twists else None

    @property
    def min_twist(self) -> Optional[int]:
        return min(self.twists) if self.twists else None

    def dim_in_degree(self, degree: int) -> int:
        return sum(count_monomials(self.ring, degree - a) for a in self.twists)

    def basis_in_degree(self, degree: int) -> list[tuple[int, Monomial]]:
        """Pairs (generator index, monomial), generator-major."""
        return [(k, mono) for k, a in enumerate(self.twists) for mono in monomial_basis(self.ring, degree - a)]

    def shifted(self, amount: int) -> "GradedFreeModule":
        return GradedFreeModule(self.ring, tuple(a + amount for a in self.twists))

    def dual(self) -> "GradedFreeModule":
        return GradedFreeModule(self.ring, tuple(-a for a in self.twists))

    def __add__(self, other: "GradedFreeModule") -> "GradedFreeModule":
        if self.ring != other.ring:
            raise CompositionError("direct sum of modules over different rings")
        return GradedFreeModule(self.ring, self.twists + other.twists)

    def __str__(self) -> str:
        if not self.twists:
            return "0"
        groups: list[list[int]] = []
        for a in self.twists:
            if groups and groups[-1][0] == a:
                groups[-1][1] += 1
            else:
                groups.append([a, 1])
        parts = []
        for a, count in groups:
            label = "R" if a == 0 else f"R({-a})"
            parts.append(label if count == 1 else f"{label}^{count}")
        return " + ".join(parts)


def direct_sum(modules: Sequence[GradedFreeModule]) -> GradedFreeModule:
    if not modules:
        raise CompositionError("empty direct sum has no ring")
    total = modules[0]
    for module in modules[1:]:
        total = total + module
    return total


# --- fine grading -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FineGrading:
    """Generator multidegrees making every nonzero entry a single term.

    The degree-d piece of such a map splits into blocks indexed by the
    multidegrees c with |c| = d; each block is ``scalars`` restricted to
    the generators g whose multidegree fits below c (``c - deg g`` is a
    normal-form exponent vector).
    """

    domain_degrees: np.ndarray
    codomain_degrees: np.ndarray
    scalars: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "_rank_cache", {})

    def block_ranks(self, ring: RingSpec, degree: int) -> tuple[int, int]:
        """(rank, number of distinct blocks) of the degree-``degree`` piece."""
        candidates = _candidate_multidegrees(ring, self, degree)
        if candidates.shape[0] == 0:
            return 0, 0
        rows_ok = _fits(ring, candidates, self.codomain_degrees)
        cols_ok = _fits(ring, candidates, self.domain_degrees)
        useful = rows_ok.any(axis=1) & cols_ok.any(axis=1)
        if not useful.any():
            return 0, 0
        keys = np.concatenate([rows_ok[useful], cols_ok[useful]], axis=1)
        patterns, counts = np.unique(keys, axis=0, return_counts=True)
        nrows = self.codomain_degrees.shape[0]
        cache: dict = self._rank_cache  # type: ignore[attr-defined]
        total = 0
        for pattern, count in zip(patterns, counts):
            key = np.packbits(pattern).tobytes() + pattern.shape[0].to_bytes(4, "little")
            block_rank = cache.get(key)
            if block_rank is None:
                block = self.scalars[np.ix_(pattern[:nrows], pattern[nrows:])]
                block_rank = array_rank(ring.field, block)
                cache[key] = block_rank
            total += int(count) * block_rank
        return total, len(patterns)


def _candidate_multidegrees(ring: RingSpec, grading: FineGrading, degree: int) -> np.ndarray:
    degrees = np.concatenate([grading.domain_degrees, grading.codomain_degrees])
    if degrees.shape[0] == 0:
        return np.zeros((0, ring.nvars), dtype=np.int64)
    low = degrees.min(axis=0)
    rest = degree - int(low.sum())
    if rest < 0:
        return np.zeros((0, ring.nvars), dtype=np.int64)
    candidates = low + _exponent_array((None,) * ring.nvars, rest)
    high = degrees.max(axis=0) + ring.exponent_caps - 1
    return candidates[(candidates <= high).all(axis=1)]


def _fits(ring: RingSpec, candidates: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    if degrees.shape[0] == 0:
        return np.zeros((candidates.shape[0], 0), dtype=bool)
    diff = candidates[:, None, :] - degrees[None, :, :]
    return ((diff >= 0) & (diff < ring.exponent_caps)).all(axis=2)


def _infer_fine_grading(matrix: "GradedMatrix") -> Optional[FineGrading]:
    ring = matrix.ring
    nvars = ring.nvars
    if nvars == 0:
        return None
    nrows, ncols = matrix.shape
    scalars = ring.field.zeros((nrows, ncols))
    row_adj: list[list[tuple[int, Monomial]]] = [[] for _ in range(nrows)]
    col_adj: list[list[tuple[int, Monomial]]] = [[] for _ in range(ncols)]
    for (i, j), poly in matrix.entries.items():
        term = poly.single_term()
        if term is None:
            return None
        mono, coeff = term
        scalars[i, j] = coeff
        row_adj[i].append((j, mono))
        col_adj[j].append((i, mono))

    row_deg: list[Optional[tuple[int, ...]]] = [None] * nrows
    col_deg: list[Optional[tuple[int, ...]]] = [None] * ncols

    def root(twist: int) -> tuple[int, ...]:
        return (twist,) + (0,) * (nvars - 1)

    nodes = [("col", j) for j in range(ncols)] + [("row", i) for i in range(nrows)]
    for side, start in nodes:
        if (col_deg if side == "col" else row_deg)[start] is not None:
            continue
        if side == "col":
            col_deg[start] = root(matrix.domain.twists[start])
        else:
            row_deg[start] = root(matrix.codomain.twists[start])
        queue = deque([(side, start)])
        while queue:
            side_now, idx = queue.popleft()
            if side_now == "row":
                base = row_deg[idx]
                for j, mono in row_adj[idx]:
                    expected = tuple(b + e for b, e in zip(base, mono))
                    if col_deg[j] is None:
                        col_deg[j] = expected
                        queue.append(("col", j))
                    elif col_deg[j] != expected:
                        return None
            else:
                base = col_deg[idx]
                for i, mono in col_adj[idx]:
                    expected = tuple(b - e for b, e in zip(base, mono))
                    if row_deg[i] is None:
                        row_deg[i] = expected
                        queue.append(("row", i))
                    elif row_deg[i] != expected:
                        return None
    return FineGrading(
        domain_degrees=np.array(col_deg, dtype=np.int64).reshape(ncols, nvars),
        codomain_degrees=np.array(row_deg, dtype=np.int64).reshape(nrows, nvars),
        scalars=scalars,
    )


# --- matrices --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradedMatrix:
    """Homogeneous map ``domain -> codomain``; ``entries`` holds the nonzero cells."""

    domain: GradedFreeModule
    codomain: GradedFreeModule
    entries: dict

    def __post_init__(self) -> None:
        if self.domain.ring != self.codomain.ring:
            raise CompositionError("domain and codomain live over different rings")
        nrows, ncols = self.codomain.rank, self.domain.rank
        clean: dict[tuple[int, int], Polynomial] = {}
        for (i, j), poly in dict(self.entries).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise CompositionError(f"entry ({i}, {j}) outside a {nrows}x{ncols} matrix")
            if not isinstance(poly, Polynomial) or poly.ring != self.ring:
                raise CompositionError(f"entry ({i}, {j}) is not an element of {self.ring}")
            if poly.is_zero:
                continue
            expected = self.domain.twists[j] - self.codomain.twists[i]
            if not poly.is_homogeneous() or poly.degree != expected:
                raise HomogeneityError(
                    f"entry ({i}, {j}) = {poly} should be homogeneous of degree {expected}"
                )
            clean[(i, j)] = poly
        object.__setattr__(self, "entries", clean)

    @classmethod
    def _trusted(cls, domain: GradedFreeModule, codomain: GradedFreeModule, entries: dict) -> "GradedMatrix":
        matrix = object.__new__(cls)
        object.__setattr__(matrix, "domain", domain)
        object.__setattr__(matrix, "codomain", codomain)
        object.__setattr__(matrix, "entries", entries)
        return matrix

    @classmethod
    def from_rows(
        cls,
        ring: RingSpec,
        rows: Sequence[Sequence[Union[str, int, Polynomial]]],
        domain_twists: Sequence[int],
        codomain_twists: Sequence[int],
    ) -> "GradedMatrix":
        if len(rows) != len(codomain_twists):
            raise CompositionError(f"{len(rows)} rows for {len(codomain_twists)} codomain generators")
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != len(domain_twists):
                raise CompositionError(f"row {i} has {len(row)} entries, expected {len(domain_twists)}")
            for j, value in enumerate(row):
                if isinstance(value, Polynomial):
                    poly = value
                elif isinstance(value, str):
                    poly = Polynomial.parse(ring, value)
                else:
                    poly = Polynomial.constant(ring, value)
                if not poly.is_zero:
                    entries[(i, j)] = poly
        return cls(GradedFreeModule(ring, domain_twists), GradedFreeModule(ring, codomain_twists), entries)

    @classmethod
    def zero(cls, domain: GradedFreeModule, codomain: GradedFreeModule) -> "GradedMatrix":
        return cls(domain, codomain, {})

    @classmethod
    def identity(cls, module: GradedFreeModule) -> "GradedMatrix":
        one = Polynomial.one(module.ring)
        return cls._trusted(module, module, {(k, k): one for k in range(module.rank)})

    @classmethod
    def scalar_multiplication(cls, module: GradedFreeModule, poly: Polynomial) -> "GradedMatrix":
        """Multiplication by a homogeneous ``poly`` as a map module(-deg) -> module."""
        shift = poly.degree or 0
        return cls(module.shifted(shift), module, {(k, k): poly for k in range(module.rank)})

    @classmethod
    def block(cls, grid: Sequence[Sequence[Optional["GradedMatrix"]]]) -> "GradedMatrix":
        """Assemble a block matrix; ``None`` marks a zero block."""
        if not grid or not grid[0]:
            raise CompositionError("empty block grid")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise CompositionError("block grid is not rectangular")
        row_modules: list[Optional[GradedFreeModule]] = [None] * len(grid)
        col_modules: list[Optional[GradedFreeModule]] = [None] * width
        for bi, row in enumerate(grid):
            for bj, blk in enumerate(row):
                if blk is None:
                    continue
                if row_modules[bi] is None:
                    row_modules[bi] = blk.codomain
                elif row_modules[bi] != blk.codomain:
                    raise CompositionError(f"block row {bi} mixes codomains")
                if col_modules[bj] is None:
                    col_modules[bj] = blk.domain
                elif col_modules[bj] != blk.domain:
                    raise CompositionError(f"block column {bj} mixes domains")
        if any(m is None for m in row_modules) or any(m is None for m in col_modules):
            raise CompositionError("every block row and column needs at least one block")
        row_offsets = np.cumsum([0] + [m.rank for m in row_modules]).tolist()
        col_offsets = np.cumsum([0] + [m.rank for m in col_modules]).tolist()
        entries = {}
        for bi, row in enumerate(grid):
            for bj, blk in enumerate(row):
                if blk is None:
                    continue
                for (i, j), poly in blk.entries.items():
                    entries[(i + row_offsets[bi], j + col_offsets[bj])] = poly
        return cls._trusted(direct_sum(col_modules), direct_sum(row_modules), entries)

    # -- inspection

    @property
    def ring(self) -> RingSpec:
        return self.domain.ring

    @property
    def nrows(self) -> int:
        return self.codomain.rank

    @property
    def ncols(self) -> int:
        return self.domain.rank

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries.get((i, j)) or Polynomial.zero(self.ring)

    def rows(self) -> list[list[Polynomial]]:
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def is_zero(self) -> bool:
        return not self.entries

    def max_entry_degree(self) -> int:
        return max((poly.degree for poly in self.entries.values()), default=0)

    def has_unit_entries(self) -> bool:
        return any(poly.degree == 0 for poly in self.entries.values())

    @cached_property
    def column_entries(self) -> list[list[tuple[int, Polynomial]]]:
        columns: list[list[tuple[int, Polynomial]]] = [[] for _ in range(self.ncols)]
        for (i, j), poly in sorted(self.entries.items()):
            columns[j].append((i, poly))
        return columns

    @cached_property
    def fine_grading(self) -> Optional[FineGrading]:
        grading = _infer_fine_grading(self)
        LOGGER.debug("fine grading for %sx%s matrix: %s", self.nrows, self.ncols, "found" if grading else "none")
        return grading

    # -- algebra

    def compose(self, other: "GradedMatrix") -> "GradedMatrix":
        """``self ∘ other``."""
        if self.domain != other.codomain:
            raise CompositionError(
                f"cannot compose: domain {self.domain} differs from codomain {other.codomain}"
            )
        out: dict[tuple[int, int], Polynomial] = {}
        columns = self.column_entries
        for (k, j), right in other.entries.items():
            for i, left in columns[k]:
                product = left * right
                if product.is_zero:
                    continue
                key = (i, j)
                out[key] = out[key] + product if key in out else product
        return GradedMatrix._trusted(other.domain, self.codomain, {k: p for k, p in out.items() if not p.is_zero})

    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        return self.compose(other)

    def __add__(self, other: "GradedMatrix") -> "GradedMatrix":
        if self.domain != other.domain or self.codomain != other.codomain:
            raise CompositionError("cannot add maps between different free modules")
        out = dict(self.entries)
        for key, poly in other.entries.items():
            total = out[key] + poly if key in out else poly
            if total.is_zero:
                out.pop(key, None)
            else:
                out[key] = total
        return GradedMatrix._trusted(self.domain, self.codomain, out)

    def __neg__(self) -> "GradedMatrix":
        return GradedMatrix._trusted(self.domain, self.codomain, {k: -p for k, p in self.entries.items()})

    def __sub__(self, other: "GradedMatrix") -> "GradedMatrix":
        return self + (-other)

    def scale(self, value: Scalar) -> "GradedMatrix":
        out = {k: p.scale(value) for k, p in self.entries.items()}
        return GradedMatrix._trusted(self.domain, self.codomain, {k: p for k, p in out.items() if not p.is_zero})

    def dual(self) -> "GradedMatrix":
        return GradedMatrix._trusted(
            self.codomain.dual(), self.domain.dual(), {(j, i): p for (i, j), p in self.entries.items()}
        )

    def shifted(self, amount: int) -> "GradedMatrix":
        """Same entries between ``domain(-amount)`` and ``codomain(-amount)``."""
        return GradedMatrix._trusted(self.domain.shifted(amount), self.codomain.shifted(amount), dict(self.entries))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "GradedMatrix":
        row_pos = {r: k for k, r in enumerate(rows)}
        col_pos = {c: k for k, c in enumerate(cols)}
        entries = {
            (row_pos[i], col_pos[j]): p for (i, j), p in self.entries.items() if i in row_pos and j in col_pos
        }
        domain = GradedFreeModule(self.ring, tuple(self.domain.twists[c] for c in cols))
        codomain = GradedFreeModule(self.ring, tuple(self.codomain.twists[r] for r in rows))
        return GradedMatrix._trusted(domain, codomain, entries)

    def rename_ring(self, target: RingSpec, mapping: Mapping[str, Optional[str]]) -> "GradedMatrix":
        """Push entries into ``target`` (variables renamed or killed); twists kept."""
        entries = {}
        for key, poly in self.entries.items():
            image = poly.rename(target, mapping)
            if not image.is_zero:
                entries[key] = image
        return GradedMatrix(
            GradedFreeModule(target, self.domain.twists), GradedFreeModule(target, self.codomain.twists), entries
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.entries == other.entries

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"GradedMatrix({self.codomain} <- {self.domain}, {len(self.entries)} nonzero entries)"

    def pretty(self) -> str:
        cells = [[str(p) for p in row] for row in self.rows()]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join("[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)


def compose(f: GradedMatrix, g: GradedMatrix) -> GradedMatrix:
    return f.compose(g)


def dual_map(f: GradedMatrix) -> GradedMatrix:
    return f.dual()


def hstack(blocks: Sequence[GradedMatrix]) -> GradedMatrix:
    return GradedMatrix.block([list(blocks)])


def vstack(blocks: Sequence[GradedMatrix]) -> GradedMatrix:
    return GradedMatrix.block([[b] for b in blocks])


# --- degree-wise evaluation -------------------------------------------------------------


def evaluate_in_degree(f: GradedMatrix, degree: int) -> PrimeFieldMatrix:
    """Matrix of ``f_degree`` between the monomial bases of the degree pieces."""
    ring = f.ring
    field = ring.field
    domain_basis = f.domain.basis_in_degree(degree)
    codomain_basis = f.codomain.basis_in_degree(degree)
    row_of = {key: r for r, key in enumerate(codomain_basis)}
    arr = field.zeros((len(codomain_basis), len(domain_basis)))
    columns = f.column_entries
    for col, (j, mono) in enumerate(domain_basis):
        for i, poly in columns[j]:
            for term, coeff in poly.terms.items():
                product = tuple(a + b for a, b in zip(term, mono))
                if not ring.is_normal(product):
                    continue
                row = row_of[(i, product)]
                arr[row, col] = field.add(arr[row, col], coeff)
    return PrimeFieldMatrix(field, arr)


def rank_in_degree(f: GradedMatrix, degree: int) -> int:
    """Rank of ``f_degree``; block-diagonal when ``f`` is finely graded."""
    if f.nrows == 0 or f.ncols == 0 or f.is_zero():
        return 0
    grading = f.fine_grading
    if grading is None:
        return evaluate_in_degree(f, degree).rank()
    value, blocks = grading.block_ranks(f.ring, degree)
    LOGGER.debug("rank in degree %s: %s over %s distinct blocks", degree, value, blocks)
    return value


def hilbert_function(module: "PresentedModule", degree: int) -> int:
    """dim_K of the degree-``degree`` piece of a cokernel or kernel."""
    f = module.map
    r = rank_in_degree(f, degree)
    if module.is_cokernel:
        return f.codomain.dim_in_degree(degree) - r
    return f.domain.dim_in_degree(degree) - r
