"""Koszul homology and minimal resolutions must give the same graded Betti numbers."""
import random

import pytest

from reglab.exactfield import FieldSpec
from reglab.families import Setup1Params, Setup2Params, phi, psi
from reglab.graded_core import GradedFreeModule, GradedMatrix, Polynomial, RingSpec, monomial_basis
from reglab.homology import certificate_cap, koszul_betti_table, minimal_resolution
from reglab.models import PresentedModule

RANDOM_CAP = 7
SEEDS = range(9)
KINDS = ("cokernel", "kernel")


def _random_form(ring, degree, rng):
    poly = Polynomial.zero(ring)
    for mono in monomial_basis(ring, degree):
        if rng.random() < 0.5:
            poly = poly + Polynomial.monomial(ring, mono, rng.randrange(1, 7))
    return poly


def _random_presentation(characteristic, seed):
    """Up to 3 x 4 over K[U,V,W], entry degrees 1 and 2, never a unit."""
    rng = random.Random(1000 * characteristic + seed)
    ring = RingSpec.polynomial(FieldSpec(characteristic), ("U", "V", "W"))
    codomain = [rng.choice((0, 1)) for _ in range(rng.randint(1, 3))]
    domain = [rng.randint(max(codomain) + 1, 2) for _ in range(rng.randint(1, 4))]
    entries = {}
    for i, a in enumerate(codomain):
        for j, b in enumerate(domain):
            entries[(i, j)] = _random_form(ring, b - a, rng)
    return GradedMatrix(GradedFreeModule(ring, domain), GradedFreeModule(ring, codomain), entries)


def _module(kind, f):
    return PresentedModule.cokernel(f) if kind == "cokernel" else PresentedModule.kernel(f)


def _assert_tables_agree(module, degree_cap):
    h = module.ring.nvars + 1
    koszul = koszul_betti_table(module, degree_cap).entries
    resolved = minimal_resolution(module, h, degree_cap).betti_table().entries
    assert koszul == resolved, module.describe()


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("characteristic", [0, 2, 5])
def test_random_presentations(characteristic, seed, kind):
    _assert_tables_agree(_module(kind, _random_presentation(characteristic, seed)), RANDOM_CAP)


FAMILY_SETUPS = [Setup1Params(1), Setup1Params(2), Setup1Params(1, FieldSpec(3)), Setup2Params()]


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("build", [phi, psi], ids=["phi", "psi"])
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("setup", FAMILY_SETUPS, ids=lambda s: f"{s.name}-{s.label()}")
def test_family_modules(setup, n, build, kind):
    module = _module(kind, build(setup, n))
    _assert_tables_agree(module, certificate_cap(module) + 2)
