import math

import pytest

from reglab.errors import UnsupportedRingError
from reglab.families import build_B, phi
from reglab.graded_core import GradedMatrix, hilbert_function
from reglab.homology import (
    certificate_cap,
    check_complex_exactness,
    euler_characteristic,
    kernel_generators,
    koszul_betti,
    koszul_betti_table,
    minimal_resolution,
    regularity,
    zero_map_into,
)
from reglab.models import PresentedModule, RegularityMethod, combine_reports


def _row(ring, entries, domain, codomain=(0,)):
    return GradedMatrix.from_rows(ring, [entries], domain, codomain)


def test_regularity_of_the_residue_field(uvw):
    report = regularity(PresentedModule.cokernel(_row(uvw, ["U", "V", "W"], [1, 1, 1])))
    assert report.regularity == 0
    assert report.indeg == 0
    assert report.certified
    assert report.method is RegularityMethod.ARTINIAN_TOP_DEGREE


def test_regularity_of_a_frobenius_quotient(uvw):
    report = regularity(PresentedModule.cokernel(_row(uvw, ["U^2", "V^2", "W^2"], [2, 2, 2])))
    assert report.regularity == 3
    assert report.hilbert[3] == 1


def test_regularity_of_a_non_artinian_cokernel(vw):
    report = regularity(PresentedModule.cokernel(_row(vw, ["V"], [1])))
    assert report.method is RegularityMethod.BETTI
    assert report.certified
    assert report.regularity == 0
    assert report.betti.entries == {(0, 0): 1, (1, 1): 1}


def test_regularity_of_kernel_and_free_modules(vw):
    kernel = regularity(PresentedModule.kernel(_row(vw, ["V", "W"], [1, 1])))
    assert kernel.regularity == 2
    assert kernel.indeg == 2
    assert kernel.certified
    free = regularity(PresentedModule.free(vw, (3,)))
    assert free.regularity == 3 and free.indeg == 3
    zero = regularity(PresentedModule.free(vw, ()))
    assert zero.regularity == -math.inf and zero.is_zero


def test_combined_reports_take_extremes(vw):
    a = regularity(PresentedModule.free(vw, (3,)))
    b = regularity(PresentedModule.free(vw, ()))
    combined = combine_reports(a, b)
    assert combined.regularity == 3
    assert combined.indeg == 3
    assert combined.certified


def test_quotient_rings_are_rejected(setup1):
    with pytest.raises(UnsupportedRingError):
        regularity(PresentedModule.cokernel(build_B(1, setup1)))
    module = PresentedModule.cokernel(build_B(2, setup1))
    with pytest.raises(UnsupportedRingError):
        koszul_betti(module, 1, 6)
    with pytest.raises(UnsupportedRingError):
        koszul_betti_table(PresentedModule.kernel(build_B(2, setup1)), 6)


def test_kernel_generators_of_the_variable_row(uvw):
    generators = kernel_generators(_row(uvw, ["U", "V", "W"], [1, 1, 1]), degree_cap=4)
    assert generators.domain.twists == (2, 2, 2)
    assert generators.codomain.twists == (1, 1, 1)
    assert _row(uvw, ["U", "V", "W"], [1, 1, 1]).compose(generators).is_zero()


def test_certificate_cap(vw):
    assert certificate_cap(PresentedModule.cokernel(_row(vw, ["V", "W"], [1, 1]))) == 3


def test_minimal_resolution_of_the_koszul_row(vw):
    module = PresentedModule.cokernel(_row(vw, ["V", "W"], [1, 1]))
    resolution = minimal_resolution(module, homological_cap=5, degree_cap=6)
    assert [term.twists for term in resolution.terms] == [(0,), (1, 1), (2,)]
    assert resolution.complete
    assert resolution.betti_table().entries == {(0, 0): 1, (1, 1): 2, (2, 2): 1}
    for d in range(6):
        assert euler_characteristic(resolution, d) == hilbert_function(module, d)


def test_koszul_betti_table_matches_resolution(setup1):
    module = PresentedModule.cokernel(phi(setup1, 2))
    expected = {(0, 1): 2, (1, 2): 3, (2, 4): 1}
    assert koszul_betti_table(module, 8).entries == expected
    assert koszul_betti(module, 1, 8) == {2: 3}
    assert koszul_betti(module, 2, 8) == {4: 1}
    assert koszul_betti(module, 3, 8) == {}
    assert minimal_resolution(module, 4, 8).betti_table().entries == expected
    assert regularity(module).regularity == 2


def test_complex_exactness(vw):
    f = _row(vw, ["V", "W"], [1, 1])
    g = GradedMatrix.from_rows(vw, [["W"], ["-V"]], [2], [1, 1])
    report = check_complex_exactness([f, g, zero_map_into(g.domain)], degree_cap=6)
    assert report.is_complex and report.exact
    assert report.checked

    h = GradedMatrix.from_rows(vw, [["W"], ["W"]], [2], [1, 1])
    broken = check_complex_exactness([f, h], degree_cap=4)
    assert not broken.is_complex
    assert broken.nonzero_compositions == [1]


def test_non_exact_complex_reports_failures(vw):
    f = _row(vw, ["V", "W"], [1, 1])
    # the square of the Koszul syzygy misses the degree-2 kernel
    g = GradedMatrix.from_rows(vw, [["V*W"], ["-V^2"]], [3], [1, 1])
    report = check_complex_exactness([f, g], degree_cap=4)
    assert report.is_complex
    assert not report.exact
    assert {"position": 1, "degree": 2, "kernel": 1, "image": 0} in report.failures
