import math

import pytest

from reglab.errors import ParameterError, UnsupportedRingError
from reglab.exactfield import FieldSpec
from reglab.families import (
    Setup1Params,
    Setup2Params,
    bc_anticommutator,
    be_complex,
    binary_support,
    build_B,
    build_C,
    build_D,
    build_F,
    build_G,
    closed_form_table,
    closed_forms,
    coefficient_ideal,
    composite_phi,
    delta_apply,
    delta_matrix,
    delta_power_matrix,
    differential,
    ef_anticommutator,
    expand_power,
    ext_module,
    f_value,
    family_degree_cap,
    frobenius_generators,
    g_antidiagonal,
    hilbert_burch_complex,
    make_setup,
    maximal_minors,
    minors_column,
    mu_multiply,
    phi,
    phi_annihilators,
    psi,
    res_coker_F_complex,
    tor_hilbert_from_complex,
    tor_module,
    top_bit,
    xyz_ring,
)
from reglab.graded_core import Polynomial, hilbert_function
from reglab.homology import certificate_cap, check_complex_exactness, kernel_generators, minimal_resolution, regularity
from reglab.models import PresentedModule


def _strings(matrix):
    return [[str(p) for p in row] for row in matrix.rows()]


def test_first_matrices_of_family_one():
    assert _strings(build_B(1)) == [["y", "z"]]
    assert _strings(build_C(1, m=2)) == [["-v^2", "-w^2"]]
    assert _strings(build_B(2)) == [["y", "-z", "0"], ["0", "y", "z"]]
    c = build_C(2, m=1)
    assert c.domain.twists == (2, 2, 2)
    assert c.codomain.twists == (1, 1)
    d = build_D(3, Setup1Params(2))
    assert d.shape == (6, 8)
    assert d.codomain.twists == (3, 3, 3, 2, 2, 2)


def test_setup_validation():
    with pytest.raises(ParameterError):
        Setup1Params(0)
    with pytest.raises(UnsupportedRingError):
        Setup2Params(FieldSpec(3))
    with pytest.raises(ParameterError):
        make_setup("setup3")
    with pytest.raises(ParameterError):
        build_B(0)
    with pytest.raises(ParameterError):
        build_C(2, m=2, setup=Setup1Params(3))
    assert make_setup("setup1", m=2, characteristic=5).field == FieldSpec(5)
    assert make_setup("setup2").label() == "char=2"
    assert make_setup("setup2", characteristic=0).field == FieldSpec(2)


@pytest.mark.parametrize("setup", [Setup1Params(1), Setup1Params(2), Setup1Params(3, FieldSpec(3))], ids=str)
def test_bc_anticommutator_vanishes(setup):
    for n in range(1, 13):
        assert bc_anticommutator(n, setup).is_zero()


def test_ef_anticommutator_vanishes(setup2):
    for n in range(1, 11):
        assert ef_anticommutator(n, setup2).is_zero()


@pytest.mark.parametrize("setup", [Setup1Params(1), Setup1Params(2), Setup2Params()], ids=str)
def test_differentials_square_to_zero(setup):
    for n in range(1, 7):
        assert differential(setup, n).compose(differential(setup, n + 1)).is_zero()


def test_shape_of_F(setup2):
    f = build_F(4, setup2)
    assert f.shape == (10, 15)
    assert set(f.domain.twists) == {4}
    assert set(f.codomain.twists) == {3}
    assert _strings(phi(setup2, 1)) == [["U", "V", "W"]]


def test_tor_and_ext_summands(setup1):
    kernel, cokernel = tor_module(setup1, 2)
    assert kernel.map == phi(setup1, 2)
    assert cokernel.map == phi(setup1, 3)
    coker, ker = ext_module(setup1, 2)
    assert coker.map == psi(setup1, 2)
    assert ker.map == psi(setup1, 3)
    assert psi(setup1, 2).domain.twists == (-1, -1)


@pytest.mark.parametrize("setup", [Setup1Params(1), Setup1Params(2), Setup2Params()], ids=str)
def test_tensored_resolution_computes_tor(setup):
    for n in range(1, 4):
        kernel, cokernel = tor_module(setup, n)
        for d in range(0, 9):
            direct = tor_hilbert_from_complex(setup, n, d)
            assert direct == hilbert_function(kernel, d) + hilbert_function(cokernel, d)


def test_maximal_minors_of_C1():
    f = phi(Setup1Params(1), 1)
    assert [str(p) for p in maximal_minors(f)] == ["-W", "-V"]
    column = minors_column(1, 1)
    assert _strings(column) == [["-W"], ["V"]]
    assert f.compose(column).is_zero()


def test_kernel_of_phi_is_a_single_twisted_copy():
    # m = 1, n = 2 gives R(-(mn + m + n - 1)) = R(-4)
    assert minors_column(1, 2).domain.twists == (4,)
    generators = kernel_generators(phi(Setup1Params(1), 2), degree_cap=8)
    assert generators.domain.twists == (4,)


@pytest.mark.parametrize("m", [1, 2])
def test_eagon_northcott_and_hilbert_burch_complexes_are_exact(m):
    for n in range(1, 5):
        be = be_complex(m, n)
        top = max(a for f in be for a in f.domain.twists + f.codomain.twists)
        assert check_complex_exactness(be, top + 3).exact
        hb = hilbert_burch_complex(m, n)
        top = max(a for f in hb for a in f.domain.twists + f.codomain.twists)
        assert check_complex_exactness(hb, top + 3).exact


def test_resolution_of_coker_phi_matches_the_minors_complex():
    m, n = 2, 3
    resolution = minimal_resolution(PresentedModule.cokernel(phi(Setup1Params(m), n)), 4, 24)
    assert [term.twists for term in resolution.terms] == [(n - 1,) * n, (m + n - 1,) * (n + 1), (m * n + m + n - 1,)]
    assert resolution.complete


def test_regularity_of_coker_psi():
    report = regularity(PresentedModule.cokernel(psi(Setup1Params(2), 3)))
    assert report.regularity == -3
    assert report.indeg == -4
    assert report.certified


def test_ker_psi_is_zero(setup2):
    for n in range(1, 5):
        assert kernel_generators(psi(setup2, n), degree_cap=6).ncols == 0


def test_delta_operator(setup2):
    ring = xyz_ring(setup2.field)
    assert delta_apply(Polynomial.parse(ring, "X^2*Y")) == Polynomial.parse(ring, "U*X*Y + V*X^2")
    assert delta_apply(Polynomial.one(ring)).is_zero
    with pytest.raises(ParameterError):
        delta_apply(Polynomial.parse(ring, "X + Y^2"))


def test_delta_matches_F_and_mu_matches_its_dual(setup2):
    for n in range(1, 7):
        assert delta_matrix(n, setup2) == phi(setup2, n)
        assert mu_multiply(n, setup2) == psi(setup2, n)
        assert delta_power_matrix(n, setup2) == build_G(n, setup2)


def test_delta_power_past_n_vanishes_only_below_powers_of_two(setup2):
    for n in (1, 3, 7):
        assert delta_power_matrix(n, setup2, n + 1).is_zero()
    for n in (2, 4, 5):
        assert not delta_power_matrix(n, setup2, n + 1).is_zero()


def test_G_is_symmetric_with_a_W_antidiagonal(setup2):
    for n in range(1, 7):
        g = build_G(n, setup2)
        assert g.entries == g.dual().entries
        assert g_antidiagonal(n, setup2)


def test_res_coker_F_complex(setup2):
    for n in (1, 3):
        maps = res_coker_F_complex(n, setup2)
        top = max(a for f in maps for a in f.domain.twists + f.codomain.twists)
        assert check_complex_exactness(maps, top + 3).exact
    for n in (2, 4):
        assert not check_complex_exactness(res_coker_F_complex(n, setup2), 0).is_complex


def test_binary_helpers():
    assert binary_support(11) == (0, 1, 3)
    assert top_bit(1) == 0
    assert top_bit(8) == 3
    assert top_bit(15) == 3


def test_coefficient_ideals():
    assert expand_power(1) == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    assert coefficient_ideal(2).generators == ((2, 0, 0), (0, 2, 0), (0, 0, 2))
    assert coefficient_ideal(3).generator_count == 9
    assert coefficient_ideal(7).generator_count == 27
    assert coefficient_ideal(8).generator_count == 3
    for n in range(1, 13):
        assert frobenius_generators(n) == expand_power(n)
    with pytest.raises(UnsupportedRingError):
        coefficient_ideal(3, FieldSpec(3))


def test_regularity_of_coefficient_quotients(setup2):
    expected = {1: 0, 2: 3, 3: 3, 4: 9}
    for n, reg in expected.items():
        report = regularity(coefficient_ideal(n).quotient_module(setup2))
        assert report.regularity == reg
        assert report.certified


def test_composite_of_phi_has_coefficient_ideal_image(setup2):
    for n in range(1, 6):
        composite = composite_phi(n, setup2)
        assert composite.nrows == 1
        image = {next(iter(p.terms)) for p in composite.entries.values()}
        assert image == frobenius_generators(n)


def test_coordinate_powers_annihilate_coker_phi(setup2):
    for n in range(1, 5):
        f = phi(setup2, n)
        low = f.codomain.min_twist + n * (n + 1) // 2
        assert all(phi_annihilators(setup2, n, low + 2).values())


def test_f_values():
    assert [f_value(n) for n in range(1, 9)] == [2, 3, 6, 7, 7, 7, 14, 15]
    for n in range(1, 64):
        assert n + 1 <= f_value(n) <= 2 * n


def test_closed_forms():
    assert closed_forms(Setup1Params(3), "reg_tor", 5) == 24
    assert closed_forms(Setup1Params(1), "reg_tor", 3) == 6
    assert closed_forms(Setup1Params(2), "indeg_ext", 1) == -2
    assert closed_forms(Setup1Params(2), "reg_ext", 1) == -1
    assert closed_forms(Setup2Params(), "reg_coker_phi", 5) == 10
    assert closed_forms(Setup2Params(), "reg_tor", 7) == 21
    assert closed_forms(Setup2Params(), "reg_tor", 14) == 29
    assert closed_forms(Setup2Params(), "reg_coker_phi_special", 7) == 12
    assert closed_forms(Setup2Params(), "reg_ker_psi", 3) == -math.inf
    with pytest.raises(ParameterError):
        closed_forms(Setup2Params(), "reg_coker_phi_special", 6)
    with pytest.raises(ParameterError):
        closed_forms(Setup1Params(), "f", 2)
    table = closed_form_table(Setup1Params(2), 4)
    assert [row["n"] for row in table] == [1, 2, 3, 4]
    assert table[0]["reg_tor"] == 5


def test_family_degree_cap(setup2):
    module = PresentedModule.cokernel(phi(setup2, 3))
    floor = certificate_cap(module)
    assert family_degree_cap(module, 7, override=4) == 4
    assert family_degree_cap(module, -math.inf) == floor + 3
    assert family_degree_cap(module, 100, slack=2) == 102
    assert family_degree_cap(module, 0) == floor
