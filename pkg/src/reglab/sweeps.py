"""Per-n sweeps behind the CLI commands: each row compares computed values with closed forms."""
from __future__ import annotations

import logging
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from math import comb
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from .asymptotics import RegSequence, fit_slices, ratio_stats, weight_checks
from .exactfield import FieldSpec
from .families import (
    Setup,
    Setup1Params,
    Setup2Params,
    bc_anticommutator,
    be_complex,
    build_G,
    closed_forms,
    coefficient_ideal,
    composite_phi,
    delta_matrix,
    delta_power_matrix,
    ef_anticommutator,
    expand_power,
    ext_module,
    family_degree_cap,
    frobenius_generators,
    g_antidiagonal,
    hilbert_burch_complex,
    mu_multiply,
    phi,
    phi_annihilators,
    psi,
    res_coker_F_complex,
    resolution_of_M,
    resolution_of_N,
    tor_hilbert_from_complex,
    tor_module,
)
from .homology import check_complex_exactness, hilbert_function, regularity
from .models import (
    CheckResult,
    ComparisonRow,
    PresentedModule,
    RegularityMethod,
    RegularityReport,
    combine_reports,
)

LOGGER = logging.getLogger(__name__)

G_SYMMETRY_MAX = 12
COMPOSITE_MAX = 10


class ProgressReporter:
    def start(self, total: int, label: str) -> None:
        ...

    def item_done(self) -> None:
        ...

    def close(self) -> None:
        ...


@dataclass(frozen=True)
class CapPolicy:
    """How degree caps are chosen for family modules."""

    slack: int = 3
    override: Optional[int] = None

    def cap(self, module: PresentedModule, predicted) -> int:
        return family_degree_cap(module, predicted, self.slack, self.override)


def run_indexed(
    func: Callable[[int], Any],
    items: Sequence[int],
    *,
    jobs: int = 1,
    progress: Optional[ProgressReporter] = None,
    label: str = "n",
) -> List[Any]:
    """``[func(i) for i in items]``, fanned out over ``jobs`` processes; results stay in item order."""
    progress = progress or ProgressReporter()
    progress.start(len(items), label)
    results = []
    try:
        if jobs <= 1 or len(items) <= 1:
            for item in items:
                results.append(func(item))
                progress.item_done()
        else:
            context = mp.get_context("spawn")
            with ProcessPoolExecutor(max_workers=jobs, mp_context=context) as pool:
                for result in pool.map(func, items):
                    results.append(result)
                    progress.item_done()
    finally:
        progress.close()
    return results


def _report(module: PresentedModule, predicted, policy: CapPolicy) -> RegularityReport:
    return regularity(module, policy.cap(module, predicted))


# --- example tables ------------------------------------------------------------------------------


def tor_ext_reports(setup: Setup, n: int, policy: CapPolicy) -> Dict[str, RegularityReport]:
    kernel, cokernel = tor_module(setup, n)
    tor = combine_reports(
        _report(kernel, closed_forms(setup, "reg_ker_phi", n), policy),
        _report(cokernel, closed_forms(setup, "reg_coker_phi", n + 1), policy),
    )
    ext_cokernel, ext_kernel = ext_module(setup, n)
    ext = combine_reports(
        _report(ext_cokernel, closed_forms(setup, "reg_coker_psi", n), policy),
        _report(ext_kernel, closed_forms(setup, "reg_ker_psi", n + 1), policy),
    )
    return {"tor": tor, "ext": ext}


def example1_row(n: int, *, m: int, characteristic: int = 0, policy: CapPolicy = CapPolicy()) -> Dict[str, Any]:
    setup = Setup1Params(m, FieldSpec(characteristic))
    reports = tor_ext_reports(setup, n, policy)
    tor, ext = reports["tor"], reports["ext"]
    row = ComparisonRow(
        n,
        values={"indeg_tor": tor.indeg, "reg_tor": tor.regularity, "indeg_ext": ext.indeg, "reg_ext": ext.regularity},
        predicted={key: closed_forms(setup, key, n) for key in ("indeg_tor", "reg_tor", "indeg_ext", "reg_ext")},
        certified=tor.certified and ext.certified,
    )
    LOGGER.info("example1 m=%s n=%s: reg Tor %s, reg Ext %s", m, n, tor.regularity, ext.regularity)
    return row.to_json()


def example2_row(n: int, *, policy: CapPolicy = CapPolicy()) -> Dict[str, Any]:
    setup = Setup2Params()
    reports = tor_ext_reports(setup, n, policy)
    tor, ext = reports["tor"], reports["ext"]
    row = ComparisonRow(
        n,
        values={
            "indeg_tor": tor.indeg,
            "reg_tor": tor.regularity,
            "f": tor.regularity - n,
            "indeg_ext": ext.indeg,
            "reg_ext": ext.regularity,
        },
        predicted={
            "indeg_tor": closed_forms(setup, "indeg_tor", n),
            "reg_tor": closed_forms(setup, "reg_tor", n),
            "f": closed_forms(setup, "f", n),
            "indeg_ext": closed_forms(setup, "indeg_ext", n),
            "reg_ext": closed_forms(setup, "reg_ext", n),
        },
        certified=tor.certified and ext.certified,
    )
    LOGGER.info("example2 n=%s: reg Tor %s, reg Ext %s", n, tor.regularity, ext.regularity)
    return row.to_json()


def coefficient_row(n: int, *, policy: CapPolicy = CapPolicy()) -> Dict[str, Any]:
    setup = Setup2Params()
    ideal = coefficient_ideal(n)
    module = ideal.quotient_module(setup)
    predicted_reg = closed_forms(setup, "reg_quotient_I", n)
    report = _report(module, predicted_reg, policy)
    row = ComparisonRow(
        n,
        values={
            "generators": ideal.generator_count,
            "reg_quotient": report.regularity,
            "paths_agree": set(ideal.generators) == expand_power(n),
        },
        predicted={
            "generators": closed_forms(setup, "generator_count_I", n),
            "reg_quotient": predicted_reg,
            "paths_agree": True,
        },
        certified=report.certified,
    )
    LOGGER.info("coefficient ideal n=%s: %s generators, reg %s", n, ideal.generator_count, report.regularity)
    return row.to_json()


# --- facts about Coker(phi(n)) in the second family -----------------------------------------------------


def facts_row(n: int, *, policy: CapPolicy = CapPolicy()) -> Dict[str, Any]:
    setup = Setup2Params()
    f = phi(setup, n)
    cokernel = PresentedModule.cokernel(f)
    predicted_coker = closed_forms(setup, "reg_coker_phi", n)
    coker_report = _report(cokernel, predicted_coker, policy)
    predicted_ker = closed_forms(setup, "reg_ker_phi", n)
    ker_report = _report(PresentedModule.kernel(f), predicted_ker, policy)

    values: Dict[str, Any] = {
        "reg_coker": coker_report.regularity,
        "artinian": coker_report.method is RegularityMethod.ARTINIAN_TOP_DEGREE,
        "reg_ker": ker_report.regularity,
        "ker_minus_coker": ker_report.regularity - coker_report.regularity,
    }
    predicted: Dict[str, Any] = {
        "reg_coker": predicted_coker,
        "artinian": True,
        "reg_ker": predicted_ker,
        "ker_minus_coker": 2,
    }
    if (n + 1) & n == 0:
        values["reg_coker_special"] = coker_report.regularity
        predicted["reg_coker_special"] = closed_forms(setup, "reg_coker_phi_special", n)
    low = f.codomain.min_twist + comb(n + 1, 2)
    annihilators = phi_annihilators(setup, n, low + 1)
    values["annihilated"] = all(annihilators.values())
    predicted["annihilated"] = True
    if n <= G_SYMMETRY_MAX:
        g = build_G(n, setup)
        values["g_symmetric"] = g.entries == g.dual().entries
        values["g_antidiagonal"] = g_antidiagonal(n, setup)
        predicted["g_symmetric"] = predicted["g_antidiagonal"] = True
    if n <= COMPOSITE_MAX:
        composite = composite_phi(n, setup)
        image = {next(iter(p.terms)) for p in composite.entries.values() if len(p.terms) == 1}
        values["composite_image_is_I"] = image == frobenius_generators(n) and len(image) == len(composite.entries)
        predicted["composite_image_is_I"] = True
    LOGGER.info("facts n=%s: reg Coker %s, reg Ker %s", n, coker_report.regularity, ker_report.regularity)
    return ComparisonRow(n, values, predicted, coker_report.certified and ker_report.certified).to_json()


def add_monotone_flags(rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """reg Coker(phi(n)) <= reg Coker(phi(n+1)) - 1 between consecutive rows."""
    by_n = {row["n"]: row for row in rows}
    for row in rows:
        following = by_n.get(row["n"] + 1)
        if following is None:
            continue
        ok = row["reg_coker"] <= following["reg_coker"] - 1
        row["monotone"] = ok
        row["match"] = row["match"] and ok
    return rows


# --- verification of matrix identities and complexes ------------------------------------------------


def _exactness_check(name: str, params: Dict[str, Any], maps, degree_cap: int) -> CheckResult:
    report = check_complex_exactness(maps, degree_cap)
    detail = "" if report.exact else f"compositions {report.nonzero_compositions}, failures {report.failures[:3]}"
    return CheckResult(name, {**params, "degree_cap": degree_cap}, report.exact, detail)


def _top_twist(maps) -> int:
    return max(a for f in maps for a in f.domain.twists + f.codomain.twists)


def identity_checks(m_values: Iterable[int], n_bc: int = 50, n_ef: int = 30) -> List[CheckResult]:
    results = []
    for m in m_values:
        setup = Setup1Params(m)
        bad = [n for n in range(1, n_bc + 1) if not bc_anticommutator(n, setup).is_zero()]
        results.append(CheckResult("BC+CB=0", {"m": m, "n_max": n_bc}, not bad, f"fails at {bad}" if bad else ""))
    bad = [n for n in range(1, n_ef + 1) if not ef_anticommutator(n, Setup2Params()).is_zero()]
    results.append(CheckResult("EF+FE=0", {"n_max": n_ef}, not bad, f"fails at {bad}" if bad else ""))
    return results


def resolution_checks(setups: Sequence[Setup], n_square: int = 20, n_exact: int = 6, degree_cap: int = 12) -> List[CheckResult]:
    results = []
    for setup in setups:
        params = {"setup": setup.name, **({"m": setup.m} if isinstance(setup, Setup1Params) else {})}
        maps = resolution_of_M(setup, n_square + 1)
        bad = [n for n in range(1, n_square + 1) if not maps[n - 1].compose(maps[n]).is_zero()]
        results.append(CheckResult("DD=0", {**params, "n_max": n_square}, not bad, f"fails at {bad}" if bad else ""))
        results.append(_exactness_check("resolution of M", {**params, "n_max": n_exact}, maps[: n_exact + 1], degree_cap))
        results.append(
            _exactness_check("resolution of N", {**params, "n_max": n_exact}, resolution_of_N(setup, n_exact + 1), degree_cap)
        )
    return results


def minors_checks(m_values: Iterable[int], n_max: int = 8) -> List[CheckResult]:
    results = []
    for m in m_values:
        setup = Setup1Params(m)
        for n in range(1, n_max + 1):
            be = be_complex(setup, n)
            results.append(_exactness_check("BE complex", {"m": m, "n": n}, be, _top_twist(be) + 3))
            hb = hilbert_burch_complex(setup, n)
            results.append(_exactness_check("Hilbert-Burch complex", {"m": m, "n": n}, hb, _top_twist(hb) + 3))
    return results


def delta_checks(n_max: int = 10) -> List[CheckResult]:
    setup = Setup2Params()
    results = []
    for n in range(1, n_max + 1):
        results.append(CheckResult("delta matches F", {"n": n}, delta_matrix(n, setup) == phi(setup, n)))
        results.append(CheckResult("mu matches F^t", {"n": n}, mu_multiply(n, setup) == psi(setup, n)))
        results.append(CheckResult("delta^n is G", {"n": n}, delta_power_matrix(n, setup) == build_G(n, setup)))
        if (n + 1) & n == 0:
            results.append(
                CheckResult("delta^(n+1) vanishes", {"n": n}, delta_power_matrix(n, setup, n + 1).is_zero())
            )
    return results


def res_coker_checks(exact_at: Sequence[int] = (1, 3, 7), not_complex_at: Sequence[int] = (2, 4)) -> List[CheckResult]:
    setup = Setup2Params()
    results = []
    for n in exact_at:
        maps = res_coker_F_complex(n, setup)
        results.append(_exactness_check("resolution of Coker F", {"n": n}, maps, _top_twist(maps) + 3))
    for n in not_complex_at:
        report = check_complex_exactness(res_coker_F_complex(n, setup), 0)
        results.append(
            CheckResult("G breaks the complex off 2^l - 1", {"n": n}, not report.is_complex, f"{report.nonzero_compositions}")
        )
    return results


def tensor_checks(setup: Setup, n_max: int = 4, degree_cap: int = 10) -> List[CheckResult]:
    """dim Tor_n(M, N)_d from the tensored resolution against the two summands."""
    results = []
    for n in range(1, n_max + 1):
        kernel, cokernel = tor_module(setup, n)
        bad = []
        for d in range(0, degree_cap + 1):
            direct = tor_hilbert_from_complex(setup, n, d)
            summands = hilbert_function(kernel, d) + hilbert_function(cokernel, d)
            if direct != summands:
                bad.append(d)
        results.append(CheckResult("Tor via F(M) tensor N", {"setup": setup.name, "n": n}, not bad, f"degrees {bad}" if bad else ""))
    return results


# --- asymptotics ----------------------------------------------------------------------------------------------


def asymptotics_summary(setup: Setup, rows: Sequence[Dict[str, Any]], quantity: str) -> Dict[str, Any]:
    """Parity fits of the computed ``reg_<quantity>`` column plus slope checks."""
    seq = RegSequence.from_rows(rows, f"reg_{quantity}")
    fits = fit_slices(seq)
    summary: Dict[str, Any] = {
        "setup": setup.name,
        "quantity": quantity,
        "fits": [fit.to_json() for fit in fits],
        "weight_check": weight_checks(fits, setup.weights),
    }
    if isinstance(setup, Setup2Params) and quantity == "tor":
        summary["ratio"] = ratio_stats(seq).to_json()
    return summary


def example1_rows(config, progress=None) -> List[Dict[str, Any]]:
    func = partial(
        example1_row,
        m=config.m,
        characteristic=config.characteristic or 0,
        policy=CapPolicy(config.degree_slack, config.degree_cap),
    )
    return run_indexed(func, list(range(1, config.n_max + 1)), jobs=config.jobs, progress=progress, label="example1")


def example2_rows(config, progress=None) -> List[Dict[str, Any]]:
    func = partial(example2_row, policy=CapPolicy(config.degree_slack, config.degree_cap))
    return run_indexed(func, list(range(1, config.n_max + 1)), jobs=config.jobs, progress=progress, label="example2")


def coefficient_rows(config, progress=None) -> List[Dict[str, Any]]:
    func = partial(coefficient_row, policy=CapPolicy(config.degree_slack, config.degree_cap))
    return run_indexed(func, list(range(1, config.n_max + 1)), jobs=config.jobs, progress=progress, label="coeff")


def facts_rows(config, progress=None) -> List[Dict[str, Any]]:
    func = partial(facts_row, policy=CapPolicy(config.degree_slack, config.degree_cap))
    rows = run_indexed(func, list(range(1, config.n_max + 1)), jobs=config.jobs, progress=progress, label="facts")
    return add_monotone_flags(rows)


def tor_ratio(rows: Sequence[Dict[str, Any]]) -> Dict[str, Any]:
    """reg(Tor_n)/n over the computed window."""
    return ratio_stats(RegSequence.from_rows(rows, "reg_tor")).to_json()
