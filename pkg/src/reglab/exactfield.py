"""Exact scalars and dense matrices over GF(p) and the rationals.

GF(2) matrices are eliminated on bit-packed rows (64 columns per word),
other prime fields on int64 arrays.  The rationals go through sympy's
``DomainMatrix`` over ``QQ``, which is also the ``reference_rank`` oracle
for every field.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from sympy import GF, QQ, isprime
from sympy.polys.matrices import DomainMatrix

from .errors import CompositionError, InconsistentSystemError, ParameterError

LOGGER = logging.getLogger(__name__)

Scalar = Union[int, Fraction]

MAX_CHARACTERISTIC = 2**31
# int64 matmul accumulates k products below p**2; below this bound k may reach 2**23.
_SAFE_MATMUL_PRIME = 2**20


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: 0 means the rationals, otherwise GF(p)."""

    characteristic: int = 0

    def __post_init__(self) -> None:
        p = self.characteristic
        if not isinstance(p, int) or p < 0:
            raise ParameterError(f"characteristic must be a non-negative integer, got {p!r}")
        if p and (p > MAX_CHARACTERISTIC or not isprime(p)):
            raise ParameterError(f"characteristic must be 0 or a prime <= 2^31, got {p}")

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def dtype(self):
        return object if self.is_rational else np.int64

    def element(self, value) -> Scalar:
        """Coerce an int, Fraction or numpy integer into a reduced field element."""
        p = self.characteristic
        if p == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            den = value.denominator % p
            if den == 0:
                raise ParameterError(f"{value} has no image in GF({p})")
            return value.numerator * pow(den, -1, p) % p
        return int(value) % p

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        return (a + b) % self.characteristic if self.characteristic else a + b

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return (a - b) % self.characteristic if self.characteristic else a - b

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        return (a * b) % self.characteristic if self.characteristic else a * b

    def neg(self, a: Scalar) -> Scalar:
        return (-a) % self.characteristic if self.characteristic else -a

    def inv(self, a: Scalar) -> Scalar:
        if not a:
            raise ZeroDivisionError("zero has no inverse")
        if self.characteristic:
            return pow(int(a), -1, self.characteristic)
        return 1 / Fraction(a)

    def zeros(self, shape) -> np.ndarray:
        if self.is_rational:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape, dtype=np.int64)

    def asarray(self, values) -> np.ndarray:
        """Reduced 2-D array of field elements."""
        raw = np.asarray(values, dtype=object if not isinstance(values, np.ndarray) else None)
        if raw.ndim != 2:
            raise ParameterError(f"expected a 2-D array of scalars, got shape {raw.shape}")
        if self.is_rational:
            if raw.size == 0:
                return self.zeros(raw.shape)
            return np.frompyfunc(Fraction, 1, 1)(raw).astype(object)
        if raw.dtype.kind in "iub":
            return np.mod(raw.astype(np.int64), self.characteristic)
        if raw.size == 0:
            return self.zeros(raw.shape)
        reduced = np.frompyfunc(self.element, 1, 1)(raw)
        return np.asarray(reduced, dtype=np.int64)

    def __str__(self) -> str:
        return "QQ" if self.is_rational else f"GF({self.characteristic})"


# --- GF(2) bit-packed kernels -------------------------------------------------


def _pack_gf2(bits: np.ndarray) -> np.ndarray:
    rows, cols = bits.shape
    words = max(1, (cols + 63) // 64)
    packed = np.packbits(bits.astype(np.uint8, copy=False), axis=1, bitorder="little")
    padded = np.zeros((rows, words * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view("<u8").astype(np.uint64)


def _unpack_gf2(words: np.ndarray, cols: int) -> np.ndarray:
    as_bytes = words.astype("<u8").view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little").astype(np.int64)


def _gf2_eliminate(bits: np.ndarray, *, reduce_above: bool) -> tuple[np.ndarray, list[int]]:
    rows, cols = bits.shape
    work = _pack_gf2(bits)
    pivots: list[int] = []
    r = 0
    one = np.uint64(1)
    for col in range(cols):
        if r == rows:
            break
        word = col >> 6
        mask = one << np.uint64(col & 63)
        hits = np.flatnonzero(work[r:, word] & mask)
        if hits.size == 0:
            continue
        pivot = r + int(hits[0])
        if pivot != r:
            work[[r, pivot]] = work[[pivot, r]]
        # the pivot row is zero left of col, so only words from `word` on change
        if reduce_above:
            targets = np.flatnonzero(work[:, word] & mask)
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(work[r + 1 :, word] & mask)
        if targets.size:
            work[targets, word:] ^= work[r, word:]
        pivots.append(col)
        r += 1
    return work, pivots


def _gf2_rank(bits: np.ndarray) -> int:
    rows, cols = bits.shape
    if rows == 0 or cols == 0:
        return 0
    if cols > rows:
        bits = bits.T
    _, pivots = _gf2_eliminate(np.ascontiguousarray(bits), reduce_above=False)
    return len(pivots)


# --- GF(p) kernels and sympy domain matrices ------------------------------------------------


def _modp_eliminate(arr: np.ndarray, p: int, *, reduce_above: bool) -> tuple[np.ndarray, list[int]]:
    work = np.array(arr, dtype=np.int64, copy=True)
    rows, cols = work.shape
    pivots: list[int] = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(work[r:, col])
        if hits.size == 0:
            continue
        pivot = r + int(hits[0])
        if pivot != r:
            work[[r, pivot]] = work[[pivot, r]]
        inv = pow(int(work[r, col]), -1, p)
        work[r, col:] = (work[r, col:] * inv) % p
        if reduce_above:
            targets = np.flatnonzero(work[:, col])
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(work[r + 1 :, col])
        if targets.size:
            factors = work[targets, col].copy()
            work[targets, col:] = (work[targets, col:] - np.outer(factors, work[r, col:]) % p) % p
        pivots.append(col)
        r += 1
    return work, pivots


def sympy_domain(field: FieldSpec):
    return QQ if field.is_rational else GF(field.characteristic)


def to_domain_matrix(field: FieldSpec, rows: Sequence[Sequence[Scalar]]) -> DomainMatrix:
    """sympy ``DomainMatrix`` over ``QQ`` or ``GF(p)`` holding the reduced entries."""
    domain = sympy_domain(field)
    def convert(x):
        if field.is_rational:
            return domain(x.numerator, x.denominator)
        return domain(int(x))

    elements = [[convert(field.element(x)) for x in row] for row in rows]
    ncols = len(elements[0]) if elements else 0
    return DomainMatrix(elements, (len(elements), ncols), domain)


def _rational_eliminate(arr: np.ndarray) -> tuple[np.ndarray, list[int]]:
    reduced, pivots = to_domain_matrix(FieldSpec(0), arr.tolist()).rref()
    values = [[Fraction(int(x.p), int(x.q)) for x in row] for row in reduced.to_Matrix().tolist()]
    out = np.empty(arr.shape, dtype=object)
    out[:, :] = values
    return out, list(pivots)


def _eliminate(field: FieldSpec, arr: np.ndarray, *, reduce_above: bool) -> tuple[np.ndarray, list[int]]:
    rows, cols = arr.shape
    if rows == 0 or cols == 0:
        return field.zeros((rows, cols)), []
    if field.characteristic == 2:
        words, pivots = _gf2_eliminate(arr, reduce_above=reduce_above)
        return _unpack_gf2(words, cols), pivots
    if field.characteristic:
        return _modp_eliminate(arr, field.characteristic, reduce_above=reduce_above)
    return _rational_eliminate(arr)


def array_rank(field: FieldSpec, arr: np.ndarray) -> int:
    """Rank of a reduced 2-D array over ``field``."""
    rows, cols = arr.shape
    if rows == 0 or cols == 0:
        return 0
    if field.characteristic == 2:
        return _gf2_rank(arr)
    if field.is_rational:
        return to_domain_matrix(field, arr.tolist()).rank()
    if cols > rows:
        arr = arr.T
    _, pivots = _eliminate(field, arr, reduce_above=False)
    return len(pivots)


def reference_rank(field: FieldSpec, rows: Sequence[Sequence[Scalar]]) -> int:
    """Rank from sympy's ``DomainMatrix``, independent of the numpy kernels."""
    rows = [list(row) for row in rows]
    if not rows or not rows[0]:
        return 0
    return to_domain_matrix(field, rows).rank()


# --- matrices --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrimeFieldMatrix:
    """Dense exact matrix over a ``FieldSpec``; immutable once built."""

    field: FieldSpec
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = self.field.asarray(self.data)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence], cols: Optional[int] = None) -> "PrimeFieldMatrix":
        rows = [list(row) for row in rows]
        if not rows:
            return cls.zeros(field, 0, cols or 0)
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ParameterError("ragged rows")
        return cls(field, np.array(rows, dtype=object).reshape(len(rows), width))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "PrimeFieldMatrix":
        return cls(field, field.zeros((rows, cols)))

    @classmethod
    def identity(cls, field: FieldSpec, size: int) -> "PrimeFieldMatrix":
        arr = field.zeros((size, size))
        for i in range(size):
            arr[i, i] = field.element(1)
        return cls(field, arr)

    @classmethod
    def random(cls, field: FieldSpec, rows: int, cols: int, rng: random.Random, *, density: float = 0.5) -> "PrimeFieldMatrix":
        span = field.characteristic or 7
        values = [
            [(rng.randrange(1, span) if field.characteristic else rng.randint(-3, 3)) if rng.random() < density else 0 for _ in range(cols)]
            for _ in range(rows)
        ]
        return cls.from_rows(field, values, cols)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def entries(self) -> tuple[Scalar, ...]:
        """Row-major scalars."""
        return tuple(self.data.ravel().tolist())

    def __getitem__(self, index):
        return self.data[index]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeFieldMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.all(self.data == other.data))

    def __repr__(self) -> str:
        return f"PrimeFieldMatrix({self.field}, {self.rows}x{self.cols})"

    def is_zero(self) -> bool:
        return not np.any(self.data)

    def transpose(self) -> "PrimeFieldMatrix":
        return PrimeFieldMatrix(self.field, self.data.T.copy())

    @property
    def T(self) -> "PrimeFieldMatrix":
        return self.transpose()

    def __matmul__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        if self.field != other.field:
            raise CompositionError("matrices live over different fields")
        if self.cols != other.rows:
            raise CompositionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        p = self.field.characteristic
        if p == 0:
            if self.cols == 0:
                return PrimeFieldMatrix.zeros(self.field, self.rows, other.cols)
            return PrimeFieldMatrix(self.field, self.data @ other.data)
        if p < _SAFE_MATMUL_PRIME:
            return PrimeFieldMatrix(self.field, (self.data @ other.data) % p)
        product = self.data.astype(object) @ other.data.astype(object) if self.cols else np.zeros((self.rows, other.cols), dtype=object)
        return PrimeFieldMatrix(self.field, product % p)

    def __add__(self, other: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        if self.field != other.field or self.shape != other.shape:
            raise CompositionError("cannot add matrices of different shape or field")
        total = self.data + other.data
        return PrimeFieldMatrix(self.field, total % self.field.characteristic if self.field.characteristic else total)

    def rank(self) -> int:
        return array_rank(self.field, self.data)

    def rref(self) -> tuple["PrimeFieldMatrix", list[int]]:
        """Reduced row echelon form and its pivot columns."""
        reduced, pivots = _eliminate(self.field, self.data, reduce_above=True)
        return PrimeFieldMatrix(self.field, reduced), pivots

    def pivot_columns(self) -> list[int]:
        _, pivots = _eliminate(self.field, self.data, reduce_above=False)
        return pivots

    def kernel_basis(self) -> "PrimeFieldMatrix":
        reduced, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        basis = self.field.zeros((self.cols, len(free)))
        for k, f in enumerate(free):
            basis[f, k] = self.field.element(1)
            for r, pc in enumerate(pivots):
                value = reduced.data[r, f]
                if value:
                    basis[pc, k] = self.field.neg(value)
        return PrimeFieldMatrix(self.field, basis)

    def solve(self, rhs: "PrimeFieldMatrix") -> "PrimeFieldMatrix":
        """One solution X of self @ X = rhs."""
        if rhs.rows != self.rows:
            raise CompositionError("right-hand side has the wrong number of rows")
        augmented = hstack([self, rhs])
        reduced, pivots = augmented.rref()
        if any(pc >= self.cols for pc in pivots):
            raise InconsistentSystemError("linear system has no solution")
        solution = self.field.zeros((self.cols, rhs.cols))
        for r, pc in enumerate(pivots):
            solution[pc, :] = reduced.data[r, self.cols :]
        return PrimeFieldMatrix(self.field, solution)


def rank(m: PrimeFieldMatrix) -> int:
    return m.rank()


def kernel_basis(m: PrimeFieldMatrix) -> PrimeFieldMatrix:
    return m.kernel_basis()


def solve(m: PrimeFieldMatrix, rhs: PrimeFieldMatrix) -> PrimeFieldMatrix:
    return m.solve(rhs)


def hstack(blocks: Iterable[PrimeFieldMatrix]) -> PrimeFieldMatrix:
    blocks = list(blocks)
    if not blocks:
        raise CompositionError("nothing to stack")
    field = blocks[0].field
    if len({b.rows for b in blocks}) != 1:
        raise CompositionError("hstack needs equal row counts")
    return PrimeFieldMatrix(field, np.concatenate([b.data for b in blocks], axis=1))


def vstack(blocks: Iterable[PrimeFieldMatrix]) -> PrimeFieldMatrix:
    blocks = list(blocks)
    if not blocks:
        raise CompositionError("nothing to stack")
    field = blocks[0].field
    if len({b.cols for b in blocks}) != 1:
        raise CompositionError("vstack needs equal column counts")
    return PrimeFieldMatrix(field, np.concatenate([b.data for b in blocks], axis=0))
