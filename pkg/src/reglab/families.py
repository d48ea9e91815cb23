"""The two example families: matrices, resolutions, Tor/Ext summands, closed forms.

Family one lives over ``A = K[y,z,v,w]/(y^2,z^2)`` with ``N = A/(y,z) = K[V,W]``
and a parameter ``m >= 1``.  Family two lives over
``A = K[x,y,z,u,v,w]/(x^2,y^2,z^2)`` in characteristic 2 with
``N = A/(x,y,z) = K[U,V,W]``.  In both, Tor_n(M, N) and Ext^n(M, N) split
into a kernel and a cokernel of the map ``phi(n)`` (resp. its dual
``psi(n)``) over the reduced polynomial ring.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property, reduce
from itertools import product
from math import comb, inf
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import sympy

from .errors import ParameterError, UnsupportedRingError
from .exactfield import FieldSpec
from .graded_core import (
    GradedFreeModule,
    GradedMatrix,
    Monomial,
    Polynomial,
    RingSpec,
    dual_map,
    hstack,
    monomial_basis,
    rank_in_degree,
)
from .homology import certificate_cap, zero_map_into
from .models import PresentedModule

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Setup1Params:
    """``M`` resolved by the D_n with C-blocks in ``v^m, w^m``; any characteristic."""

    m: int = 1
    field: FieldSpec = FieldSpec(0)
    name = "setup1"

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 1:
            raise ParameterError(f"m must be an integer >= 1, got {self.m!r}")

    @cached_property
    def ring_A(self) -> RingSpec:
        return RingSpec.quotient(self.field, ("y", "z", "v", "w"), {"y": 2, "z": 2})

    @cached_property
    def ring_R(self) -> RingSpec:
        return RingSpec.polynomial(self.field, ("V", "W"))

    @property
    def weights(self) -> Tuple[int, ...]:
        return (2, 2)

    @property
    def reduction(self) -> Dict[str, Optional[str]]:
        return {"y": None, "z": None, "v": "V", "w": "W"}

    def label(self) -> str:
        return f"m={self.m}-char={self.field.characteristic}"


@dataclass(frozen=True)
class Setup2Params:
    """The characteristic-2 family with E_n, F_n blocks."""

    field: FieldSpec = FieldSpec(2)
    name = "setup2"

    def __post_init__(self) -> None:
        if self.field.characteristic != 2:
            raise UnsupportedRingError(f"the second family needs characteristic 2, got {self.field}")

    @cached_property
    def ring_A(self) -> RingSpec:
        return RingSpec.quotient(self.field, ("x", "y", "z", "u", "v", "w"), {"x": 2, "y": 2, "z": 2})

    @cached_property
    def ring_R(self) -> RingSpec:
        return RingSpec.polynomial(self.field, ("U", "V", "W"))

    @property
    def weights(self) -> Tuple[int, ...]:
        return (2, 2, 2)

    @property
    def reduction(self) -> Dict[str, Optional[str]]:
        return {"x": None, "y": None, "z": None, "u": "U", "v": "V", "w": "W"}

    def label(self) -> str:
        return "char=2"


Setup = Union[Setup1Params, Setup2Params]


def make_setup(name: str, *, m: int = 1, characteristic: Optional[int] = None) -> Setup:
    if name == "setup1":
        return Setup1Params(m, FieldSpec(0 if characteristic is None else characteristic))
    if name == "setup2":
        if characteristic not in (None, 2):
            LOGGER.info("setup2 is defined over GF(2); ignoring characteristic %s", characteristic)
        return Setup2Params()
    raise ParameterError(f"unknown setup {name!r}; expected setup1 or setup2")


def _check_n(n: int, low: int = 1) -> None:
    if not isinstance(n, int) or n < low:
        raise ParameterError(f"n must be an integer >= {low}, got {n!r}")


def _bidiagonal(
    ring: RingSpec,
    n: int,
    first: str,
    second: str,
    *,
    power: int = 1,
    diagonal_sign=lambda r: 1,
    super_sign=lambda r: 1,
) -> Dict[Tuple[int, int], Polynomial]:
    """n x (n+1) entries: ``first^power`` on the diagonal, ``second^power`` above it."""
    entries = {}
    for r in range(n):
        entries[(r, r)] = Polynomial.variable(ring, first, power, diagonal_sign(r))
        entries[(r, r + 1)] = Polynomial.variable(ring, second, power, super_sign(r))
    return entries


# --- family one ------------------------------------------------------------------------


def build_B(n: int, setup: Optional[Setup1Params] = None) -> GradedMatrix:
    """B_n : A(-n)^{n+1} -> A(-n+1)^n, y on the diagonal and ±z above it."""
    _check_n(n)
    setup = setup or Setup1Params()
    ring = setup.ring_A
    entries = _bidiagonal(ring, n, "y", "z", super_sign=lambda r: (-1) ** (r + n + 1))
    return GradedMatrix(GradedFreeModule(ring, (n,) * (n + 1)), GradedFreeModule(ring, (n - 1,) * n), entries)


def build_C(n: int, m: Optional[int] = None, setup: Optional[Setup1Params] = None, *, reduced: bool = False) -> GradedMatrix:
    """C_n : (-m-n+1)^{n+1} -> (-n+1)^n, ±v^m on the diagonal and ±w^m above it.

    ``reduced`` builds it over K[V,W] instead of A.
    """
    _check_n(n)
    if setup is None:
        setup = Setup1Params(m if m is not None else 1)
    elif m is not None and m != setup.m:
        raise ParameterError(f"m={m} disagrees with setup m={setup.m}")
    m = setup.m
    ring = setup.ring_R if reduced else setup.ring_A
    first, second = ("V", "W") if reduced else ("v", "w")
    entries = _bidiagonal(
        ring,
        n,
        first,
        second,
        power=m,
        diagonal_sign=lambda r: (-1) ** (r + n),
        super_sign=lambda r: (-1) ** n,
    )
    return GradedMatrix(
        GradedFreeModule(ring, (m + n - 1,) * (n + 1)), GradedFreeModule(ring, (n - 1,) * n), entries
    )


def build_D(n: int, setup: Optional[Setup1Params] = None) -> GradedMatrix:
    """D_n = [[B_n, 0], [C_n, B_n]] with the top row twisted by m - 1."""
    setup = setup or Setup1Params()
    b = build_B(n, setup)
    return GradedMatrix.block([[b.shifted(setup.m - 1), None], [build_C(n, setup=setup), b]])


def bc_anticommutator(n: int, setup: Optional[Setup1Params] = None) -> GradedMatrix:
    """B_n C_{n+1} + C_n B_{n+1}, with B_{n+1} twisted so both terms compose."""
    setup = setup or Setup1Params()
    left = build_B(n, setup).compose(build_C(n + 1, setup=setup))
    right = build_C(n, setup=setup).compose(build_B(n + 1, setup).shifted(setup.m - 1))
    return left + right


# --- family two ----------------------------------------------------------------------------


def _staircase(ring: RingSpec, n: int, names: Sequence[str], twist: int) -> GradedMatrix:
    """Blocks k = 1..n by k = 1..n+1: ``a*I_k`` at (k, k) and the sign-free (b, c) bidiagonal at (k, k+1)."""
    a, b, c = names
    rows = comb(n + 1, 2)
    cols = comb(n + 2, 2)
    entries = {}
    row_offset = 0
    col_offset = 0
    for k in range(1, n + 1):
        for r in range(k):
            entries[(row_offset + r, col_offset + r)] = Polynomial.variable(ring, a)
        for (i, j), poly in _bidiagonal(ring, k, b, c).items():
            entries[(row_offset + i, col_offset + k + j)] = poly
        row_offset += k
        col_offset += k
    return GradedMatrix(GradedFreeModule(ring, (twist,) * cols), GradedFreeModule(ring, (twist - 1,) * rows), entries)


def build_E(n: int, setup: Optional[Setup2Params] = None) -> GradedMatrix:
    _check_n(n)
    setup = setup or Setup2Params()
    return _staircase(setup.ring_A, n, ("x", "y", "z"), n)


def build_F(n: int, setup: Optional[Setup2Params] = None, *, reduced: bool = False) -> GradedMatrix:
    _check_n(n)
    setup = setup or Setup2Params()
    if reduced:
        return _staircase(setup.ring_R, n, ("U", "V", "W"), n)
    return _staircase(setup.ring_A, n, ("u", "v", "w"), n)


def build_D2(n: int, setup: Optional[Setup2Params] = None) -> GradedMatrix:
    """D_n = [[E_n, 0], [F_n, E_n]]."""
    setup = setup or Setup2Params()
    e = build_E(n, setup)
    return GradedMatrix.block([[e, None], [build_F(n, setup), e]])


def ef_anticommutator(n: int, setup: Optional[Setup2Params] = None) -> GradedMatrix:
    setup = setup or Setup2Params()
    return build_E(n, setup).compose(build_F(n + 1, setup)) + build_F(n, setup).compose(build_E(n + 1, setup))


# --- shared constructions -----------------------------------------------------------------------


def differential(setup: Setup, n: int) -> GradedMatrix:
    """n-th differential of the resolution of M."""
    return build_D(n, setup) if isinstance(setup, Setup1Params) else build_D2(n, setup)


def resolution_of_M(setup: Setup, n_max: int) -> List[GradedMatrix]:
    _check_n(n_max)
    return [differential(setup, n) for n in range(1, n_max + 1)]


def resolution_of_N(setup: Setup, n_max: int) -> List[GradedMatrix]:
    _check_n(n_max)
    if isinstance(setup, Setup1Params):
        return [build_B(n, setup) for n in range(1, n_max + 1)]
    return [build_E(n, setup) for n in range(1, n_max + 1)]


def phi(setup: Setup, n: int) -> GradedMatrix:
    """The C- (resp. F-) block of D_n over the reduced ring."""
    if isinstance(setup, Setup1Params):
        return build_C(n, setup=setup, reduced=True)
    return build_F(n, setup, reduced=True)


def psi(setup: Setup, n: int) -> GradedMatrix:
    return dual_map(phi(setup, n))


def tor_module(setup: Setup, n: int) -> Tuple[PresentedModule, PresentedModule]:
    """Tor_n(M, N) = Ker(phi(n)) + Coker(phi(n+1))."""
    _check_n(n)
    return PresentedModule.kernel(phi(setup, n)), PresentedModule.cokernel(phi(setup, n + 1))


def ext_module(setup: Setup, n: int) -> Tuple[PresentedModule, PresentedModule]:
    """Ext^n(M, N) = Coker(psi(n)) + Ker(psi(n+1))."""
    _check_n(n)
    return PresentedModule.cokernel(psi(setup, n)), PresentedModule.kernel(psi(setup, n + 1))


def tensor_with_N(setup: Setup, n: int) -> GradedMatrix:
    """D_n ⊗ N: the killed variables vanish, the others become the reduced ring's."""
    return differential(setup, n).rename_ring(setup.ring_R, setup.reduction)


def tor_hilbert_from_complex(setup: Setup, n: int, degree: int) -> int:
    """dim Tor_n(M, N)_degree as homology of the resolution of M tensored with N."""
    here = tensor_with_N(setup, n)
    incoming = tensor_with_N(setup, n + 1)
    return here.domain.dim_in_degree(degree) - rank_in_degree(here, degree) - rank_in_degree(incoming, degree)


# --- minors and the two classical complexes of family one -----------------------------------------


def maximal_minors(matrix: GradedMatrix) -> List[Polynomial]:
    """Determinants of an n x (n+1) matrix with column i deleted, i = 0..n."""
    if matrix.ncols != matrix.nrows + 1:
        raise ParameterError(f"expected an n x (n+1) matrix, got {matrix.nrows}x{matrix.ncols}")
    grid = sympy.Matrix([[entry.to_sympy() for entry in row] for row in matrix.rows()])
    minors = []
    for i in range(matrix.ncols):
        reduced = grid.copy()
        reduced.col_del(i)
        det = sympy.expand(reduced.det(method="berkowitz")) if reduced.rows else sympy.Integer(1)
        minors.append(Polynomial.from_sympy(matrix.ring, det))
    return minors


def minors_column(setup: Union[Setup1Params, int], n: int) -> GradedMatrix:
    """R(-mn-m-n+1) -> R(-m-n+1)^{n+1}, the alternating maximal minors of phi(n)."""
    setup = Setup1Params(setup) if isinstance(setup, int) else setup
    f = phi(setup, n)
    ring = f.ring
    minors = maximal_minors(f)
    entries = {(i, 0): minor if i % 2 == 0 else -minor for i, minor in enumerate(minors)}
    top = setup.m * n + setup.m + n - 1
    return GradedMatrix(GradedFreeModule(ring, (top,)), f.domain, entries)


def be_complex(setup: Union[Setup1Params, int], n: int) -> List[GradedMatrix]:
    """0 -> R(-mn-m-n+1) -> R(-m-n+1)^{n+1} -> R(-n+1)^n resolving Coker(phi(n))."""
    setup = Setup1Params(setup) if isinstance(setup, int) else setup
    column = minors_column(setup, n)
    return [phi(setup, n), column, zero_map_into(column.domain)]


def hilbert_burch_complex(setup: Union[Setup1Params, int], n: int) -> List[GradedMatrix]:
    """0 -> R(n-1)^n -> R(m+n-1)^{n+1} -> R(mn+m+n-1), the dual of ``be_complex``."""
    setup = Setup1Params(setup) if isinstance(setup, int) else setup
    row = dual_map(minors_column(setup, n))
    dual = psi(setup, n)
    return [row, dual, zero_map_into(dual.domain)]


# --- the delta operator of family two ------------------------------------------------------------


def xyz_ring(field: FieldSpec) -> RingSpec:
    return RingSpec.polynomial(field, ("U", "V", "W", "X", "Y", "Z"))


def _xyz_degree(poly: Polynomial) -> Optional[int]:
    degrees = {sum(mono[3:]) for mono in poly.terms}
    if len(degrees) > 1:
        raise ParameterError(f"{poly} is not homogeneous in X, Y, Z")
    return next(iter(degrees), None)


def delta_apply(poly: Polynomial) -> Polynomial:
    """(U δ_X + V δ_Y + W δ_Z)(poly), where δ_X X^a = X^(a-1)."""
    if poly.ring.variables != ("U", "V", "W", "X", "Y", "Z"):
        raise ParameterError(f"delta acts on K[U,V,W,X,Y,Z], not {poly.ring}")
    _xyz_degree(poly)
    pairs = []
    for mono, coeff in poly.terms.items():
        for t in range(3):
            if mono[3 + t]:
                image = list(mono)
                image[t] += 1
                image[3 + t] -= 1
                pairs.append((image, coeff))
    return Polynomial.from_terms(poly.ring, pairs)


def _xyz_monomial(ring: RingSpec, exps: Sequence[int]) -> Polynomial:
    return Polynomial.monomial(ring, (0, 0, 0) + tuple(exps))


def _split_xyz(poly: Polynomial, target: RingSpec) -> Dict[Monomial, Polynomial]:
    """Coefficients in K[U,V,W] of each XYZ monomial."""
    parts: Dict[Monomial, list] = {}
    for mono, coeff in poly.terms.items():
        parts.setdefault(tuple(mono[3:]), []).append((mono[:3], coeff))
    return {key: Polynomial.from_terms(target, pairs) for key, pairs in parts.items()}


def _operator_matrix(
    setup: Setup2Params,
    sources: Sequence[Polynomial],
    target_basis: Sequence[Monomial],
    domain_twist: int,
    codomain_twist: int,
    operator,
) -> GradedMatrix:
    ring = setup.ring_R
    row_of = {mono: i for i, mono in enumerate(target_basis)}
    entries = {}
    for j, source in enumerate(sources):
        for mono, coeff in _split_xyz(operator(source), ring).items():
            if not coeff.is_zero:
                entries[(row_of[mono], j)] = coeff
    return GradedMatrix(
        GradedFreeModule(ring, (domain_twist,) * len(sources)),
        GradedFreeModule(ring, (codomain_twist,) * len(target_basis)),
        entries,
    )


def _xyz_basis(setup: Setup2Params, degree: int) -> Tuple[Monomial, ...]:
    return monomial_basis(RingSpec.polynomial(setup.field, ("X", "Y", "Z")), degree)


def delta_matrix(n: int, setup: Optional[Setup2Params] = None) -> GradedMatrix:
    """Matrix of δ : R[X,Y,Z]_n -> R[X,Y,Z]_{n-1} in lex-descending monomial bases."""
    _check_n(n)
    setup = setup or Setup2Params()
    big = xyz_ring(setup.field)
    sources = [_xyz_monomial(big, exps) for exps in _xyz_basis(setup, n)]
    return _operator_matrix(setup, sources, _xyz_basis(setup, n - 1), n, n - 1, delta_apply)


def mu_multiply(n: int, setup: Optional[Setup2Params] = None) -> GradedMatrix:
    """Multiplication by UX+VY+WZ : R[X,Y,Z]_{n-1} -> R[X,Y,Z]_n, twisted like psi(n)."""
    _check_n(n)
    setup = setup or Setup2Params()
    big = xyz_ring(setup.field)
    form = Polynomial.parse(big, "U*X + V*Y + W*Z")
    sources = [_xyz_monomial(big, exps) for exps in _xyz_basis(setup, n - 1)]
    return _operator_matrix(setup, sources, _xyz_basis(setup, n), -(n - 1), -n, lambda p: form * p)


def delta_power_matrix(n: int, setup: Optional[Setup2Params] = None, power: Optional[int] = None) -> GradedMatrix:
    """δ^power on the basis X^nY^nZ^n / m_i (m_i lex descending of degree n)."""
    _check_n(n)
    setup = setup or Setup2Params()
    power = n if power is None else power
    big = xyz_ring(setup.field)
    sources = [_xyz_monomial(big, tuple(n - e for e in exps)) for exps in _xyz_basis(setup, n)]

    def operator(p: Polynomial) -> Polynomial:
        for _ in range(power):
            p = delta_apply(p)
        return p

    return _operator_matrix(setup, sources, _xyz_basis(setup, 2 * n - power), 2 * n, 2 * n - power, operator)


# --- coefficient ideals --------------------------------------------------------------------------------


def binary_support(n: int) -> Tuple[int, ...]:
    """Positions of the 1-bits of n."""
    return tuple(i for i in range(n.bit_length()) if n >> i & 1)


def top_bit(n: int) -> int:
    """l with 2^l <= n <= 2^(l+1) - 1."""
    _check_n(n)
    return n.bit_length() - 1


def expand_power(n: int) -> FrozenSet[Monomial]:
    """UVW-monomials with odd coefficient in (UX+VY+WZ)^n, by direct expansion."""
    _check_n(n)
    U, V, W, X, Y, Z = sympy.symbols("U V W X Y Z")
    poly = sympy.Poly(U * X + V * Y + W * Z, U, V, W, X, Y, Z, modulus=2) ** n
    return frozenset(tuple(monom[:3]) for monom, coeff in poly.terms() if int(coeff) % 2)


def frobenius_generators(n: int) -> FrozenSet[Monomial]:
    """Generators of the product over the 1-bits i of n of (U^(2^i), V^(2^i), W^(2^i))."""
    _check_n(n)
    factors = []
    for i in binary_support(n):
        q = 1 << i
        factors.append(((q, 0, 0), (0, q, 0), (0, 0, q)))
    return frozenset(
        tuple(sum(parts) for parts in zip(*choice)) for choice in product(*factors)
    )


@dataclass(frozen=True)
class CoefficientIdeal:
    """Monomial ideal of K[U,V,W] spanned by the coefficients of (UX+VY+WZ)^n."""

    n: int
    generators: Tuple[Monomial, ...] = ()

    @property
    def support(self) -> Tuple[int, ...]:
        return binary_support(self.n)

    @property
    def l(self) -> int:
        return top_bit(self.n)

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    def presentation(self, setup: Optional[Setup2Params] = None) -> GradedMatrix:
        """The row R(-n)^k -> R of generators."""
        setup = setup or Setup2Params()
        ring = setup.ring_R
        entries = {(0, j): Polynomial.monomial(ring, mono) for j, mono in enumerate(self.generators)}
        return GradedMatrix(GradedFreeModule(ring, (self.n,) * len(self.generators)), GradedFreeModule(ring, (0,)), entries)

    def quotient_module(self, setup: Optional[Setup2Params] = None) -> PresentedModule:
        """R / I_n."""
        return PresentedModule.cokernel(self.presentation(setup))


def coefficient_ideal(n: int, field: FieldSpec = FieldSpec(2)) -> CoefficientIdeal:
    if field.characteristic != 2:
        raise UnsupportedRingError(f"coefficient ideals are defined in characteristic 2, got {field}")
    return CoefficientIdeal(n, tuple(sorted(frobenius_generators(n), reverse=True)))


def build_G(n: int, setup: Optional[Setup2Params] = None) -> GradedMatrix:
    """G_n : R(-2n)^N -> R(-n)^N, (i, j) entry U^k1 V^k2 W^k3 with k = n - a_i - a_j when odd."""
    _check_n(n)
    setup = setup or Setup2Params()
    ring = setup.ring_R
    basis = _xyz_basis(setup, n)
    odd = expand_power(n)
    entries = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            k = tuple(n - x - y for x, y in zip(a, b))
            if min(k) >= 0 and k in odd:
                entries[(i, j)] = Polynomial.monomial(ring, k)
    size = len(basis)
    return GradedMatrix(GradedFreeModule(ring, (2 * n,) * size), GradedFreeModule(ring, (n,) * size), entries)


def g_antidiagonal(n: int, setup: Optional[Setup2Params] = None) -> bool:
    """Rows X^(n-i)Y^i against columns X^nY^nZ^n / X^(n-j)Y^j of G_n form W^n times the antidiagonal."""
    setup = setup or Setup2Params()
    g = build_G(n, setup)
    index = {mono: k for k, mono in enumerate(_xyz_basis(setup, n))}
    picked = [index[(n - i, i, 0)] for i in range(n + 1)]
    block = g.submatrix(picked, picked)
    w_power = Polynomial.variable(g.ring, "W", n)
    expected = {(i, n - i): w_power for i in range(n + 1)}
    return block.entries == expected


def res_coker_F_complex(n: int, setup: Optional[Setup2Params] = None) -> List[GradedMatrix]:
    """0 -> R(-2n-1) -F^t-> R(-2n) -G-> R(-n) -F-> R(-n+1); a complex iff n = 2^l - 1."""
    setup = setup or Setup2Params()
    f = phi(setup, n)
    transpose = dual_map(f).shifted(3 * n)
    return [f, build_G(n, setup), transpose, zero_map_into(transpose.domain)]


def composite_phi(n: int, setup: Optional[Setup2Params] = None) -> GradedMatrix:
    """phi(1) ∘ phi(2) ∘ ... ∘ phi(n) : R(-n)^N -> R."""
    _check_n(n)
    setup = setup or Setup2Params()
    return reduce(lambda acc, k: acc.compose(phi(setup, k)), range(2, n + 1), phi(setup, 1))


def phi_annihilators(setup: Setup2Params, n: int, degree_cap: int) -> Dict[str, bool]:
    """Whether U^k, V^k, W^k with k = C(n+1, 2) act as zero on Coker(phi(n)) up to ``degree_cap``."""
    f = phi(setup, n)
    ring = f.ring
    k = comb(n + 1, 2)
    result = {}
    for name in ring.variables:
        multiply = GradedMatrix.scalar_multiplication(f.codomain, Polynomial.variable(ring, name, k))
        combined = hstack([f, multiply])
        low = f.codomain.min_twist + k
        result[name] = all(
            rank_in_degree(combined, d) == rank_in_degree(f, d) for d in range(low, degree_cap + 1)
        )
    return result


# --- closed forms -------------------------------------------------------------------------------------------


def f_value(n: int) -> int:
    """2^(l+1) - 2 when n = 2^l - 1, else 2^(l+1) - 1 for 2^l <= n <= 2^(l+1) - 2."""
    _check_n(n)
    if (n + 1) & n == 0:
        return 2 * n
    return 2 ** (top_bit(n) + 1) - 1


def _setup1_forms(m: int, n: int) -> Dict[str, Union[int, float]]:
    return {
        "reg_tor": (m + 1) * n + 2 * m - 2,
        "indeg_tor": n,
        "reg_ext": -n,
        "indeg_ext": -n - m + 1,
        "reg_coker_phi": (m + 1) * n + m - 3,
        "indeg_coker_phi": n - 1,
        "reg_ker_phi": (m + 1) * n + m - 1,
        "indeg_ker_phi": m * n + m + n - 1,
        "reg_coker_psi": -n,
        "indeg_coker_psi": -m - n + 1,
        "reg_ker_psi": -inf,
    }


def _setup2_forms(n: int) -> Dict[str, Union[int, float]]:
    l = top_bit(n)
    coker = 2 * (2**l - 1) + n - 1
    forms: Dict[str, Union[int, float]] = {
        "f": f_value(n),
        "reg_tor": n + f_value(n),
        "indeg_tor": n,
        "reg_ext": -n,
        "indeg_ext": -n,
        "reg_coker_phi": coker,
        "indeg_coker_phi": n - 1,
        "reg_ker_phi": coker + 2,
        "reg_coker_psi": -n,
        "indeg_coker_psi": -n,
        "reg_ker_psi": -inf,
        "reg_quotient_I": 3 * (2**l - 1),
        "reg_composite": 3 * (2**l - 1),
        "generator_count_I": 3 ** len(binary_support(n)),
    }
    if (n + 1) & n == 0:
        forms["reg_coker_phi_special"] = 2 * (n - 1)
    return forms


def closed_forms(setup: Setup, quantity: str, n: int) -> Union[int, float]:
    """Predicted value of ``quantity`` at ``n``; ``-inf`` marks the zero module."""
    _check_n(n)
    forms = _setup1_forms(setup.m, n) if isinstance(setup, Setup1Params) else _setup2_forms(n)
    if quantity not in forms:
        raise ParameterError(f"{quantity!r} has no closed form for {setup.name} at n={n}")
    return forms[quantity]


def closed_form_table(setup: Setup, n_max: int) -> List[Dict[str, Union[int, float]]]:
    _check_n(n_max)
    rows = []
    for n in range(1, n_max + 1):
        forms = _setup1_forms(setup.m, n) if isinstance(setup, Setup1Params) else _setup2_forms(n)
        rows.append({"n": n, **forms})
    return rows


def family_degree_cap(
    module: PresentedModule,
    predicted: Union[int, float],
    slack: int = 3,
    override: Optional[int] = None,
) -> int:
    """Degree cap for a family module: ``override``, else prediction plus slack, never below the certificate floor.

    A zero or unbounded prediction gives the floor plus slack.
    """
    if override is not None:
        return override
    floor = certificate_cap(module)
    if predicted == -inf or predicted == inf:
        return floor + slack
    return max(int(predicted) + slack, floor)
