"""Command-line interface: reproduction tables, verification suites and regularity of presentation files."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from tqdm import tqdm

from . import sweeps
from .config import FORMATS, RunConfig, build_run_config
from .errors import InsufficientDataError, ReglabError
from .families import closed_form_table, make_setup, phi
from .graded_core import dual_map
from .fs_layout import closed_forms_path, export_directory, params_slug, presentation_path, run_log_path
from .homology import certificate_cap, minimal_resolution, regularity
from .logging_config import configure_logging
from .presentation import load_presentation, save_presentation
from .reports import RunLogWriter, render, render_csv, render_json
from .sweeps import ProgressReporter

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
ASYMPTOTICS_MIN_N = 8
DEFAULT_EXACTNESS_DEPTH = 6


class TqdmProgress(ProgressReporter):
    def __init__(self, enabled: bool = True) -> None:
        self._enabled = enabled
        self._bar: Optional[tqdm] = None

    def start(self, total: int, label: str) -> None:
        self._bar = tqdm(total=total, desc=label, unit="n", file=sys.stderr, disable=not self._enabled)

    def item_done(self) -> None:
        if self._bar is not None:
            self._bar.update(1)

    def close(self) -> None:
        if self._bar is not None:
            self._bar.close()
            self._bar = None


def _emit(text: str) -> None:
    sys.stdout.write(text.rstrip("\n") + "\n")


def _rows_status(rows: Sequence[Dict[str, Any]]) -> int:
    failed = [row["n"] for row in rows if not (row.get("match") and row.get("certified"))]
    if failed:
        LOGGER.warning("mismatched or uncertified rows at n = %s", failed)
        return EXIT_MISMATCH
    return EXIT_OK


def _table_command(collect: Callable[..., List[Dict[str, Any]]], config: RunConfig, progress: ProgressReporter) -> int:
    rows = collect(config, progress)
    _emit(render(rows, config.format))
    return _rows_status(rows)


def cmd_example1(args, config, progress) -> int:
    return _table_command(sweeps.example1_rows, config, progress)


def cmd_example2(args, config, progress) -> int:
    rows = sweeps.example2_rows(config, progress)
    _emit(render(rows, config.format, {"ratio": sweeps.tor_ratio(rows)}))
    return _rows_status(rows)


def cmd_coeff_ideals(args, config, progress) -> int:
    return _table_command(sweeps.coefficient_rows, config, progress)


def cmd_facts(args, config, progress) -> int:
    return _table_command(sweeps.facts_rows, config, progress)


def cmd_reg(args, config, progress) -> int:
    module = load_presentation(args.file)
    report = regularity(module, config.degree_cap)
    resolution = None
    if config.homological_cap is not None:
        cap = config.degree_cap or max(report.degree_cap or 0, certificate_cap(module))
        resolution = minimal_resolution(module, config.homological_cap, cap).betti_table()
    if config.format == "json":
        payload = report.to_json()
        if resolution is not None:
            payload["resolution"] = {"complete": resolution.complete, "betti": resolution.to_json()}
        _emit(render_json(payload))
    else:
        lines = [
            f"module: {module.describe()}",
            f"regularity: {report.regularity}",
            f"indeg: {report.indeg}",
            f"certified: {report.certified}",
            f"method: {report.method.value}",
        ]
        if report.betti is not None:
            lines.append(report.betti.format())
        if resolution is not None:
            lines.append(f"minimal resolution (complete: {resolution.complete}):")
            lines.append(resolution.format())
        _emit("\n".join(lines))
    return EXIT_OK if report.certified else EXIT_MISMATCH


def cmd_asymptotics(args, config, progress) -> int:
    if config.n_max < ASYMPTOTICS_MIN_N:
        raise InsufficientDataError(f"asymptotics needs n_max >= {ASYMPTOTICS_MIN_N}, got {config.n_max}")
    setup = make_setup(args.setup, m=config.m, characteristic=config.characteristic)
    rows = sweeps.example1_rows(config, progress) if args.setup == "setup1" else sweeps.example2_rows(config, progress)
    summary = sweeps.asymptotics_summary(setup, rows, args.quantity)
    fits = [dict(fit, weight_check=check) for fit, check in zip(summary["fits"], summary["weight_check"])]
    extra = {k: v for k, v in summary.items() if k in ("setup", "quantity", "ratio")}
    _emit(render(fits, config.format, extra))
    return _rows_status(rows)


def cmd_verify(args, config, progress) -> int:
    m_values = [config.m] if args.m_only else [1, 2, 3]
    suites: List[Callable[[], list]] = [
        lambda: sweeps.identity_checks(m_values, n_bc=args.n_bc, n_ef=args.n_ef),
        lambda: sweeps.resolution_checks(
            [make_setup("setup1", m=m) for m in m_values] + [make_setup("setup2")],
            n_exact=config.homological_cap or DEFAULT_EXACTNESS_DEPTH,
        ),
        lambda: sweeps.minors_checks(m_values),
        lambda: sweeps.delta_checks(),
        lambda: sweeps.res_coker_checks(),
        lambda: sweeps.tensor_checks(make_setup("setup1", m=config.m)) + sweeps.tensor_checks(make_setup("setup2")),
    ]
    progress.start(len(suites), "verify")
    results = []
    try:
        for suite in suites:
            results.extend(suite())
            progress.item_done()
    finally:
        progress.close()
    rows = [r.to_json() for r in results]
    _emit(render(rows, config.format))
    failed = [r for r in results if not r.passed]
    for r in failed:
        LOGGER.warning("check %s failed for %s: %s", r.check, r.params, r.detail)
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_export(args, config, progress) -> int:
    setup = make_setup(args.setup, m=config.m, characteristic=config.characteristic)
    m = config.m if args.setup == "setup1" else None
    directory = export_directory(config.output_root, setup.name, params_slug(m, setup.field.characteristic))
    run_log = RunLogWriter(run_log_path(directory))
    progress.start(config.n_max, "export")
    try:
        for n in range(1, config.n_max + 1):
            f = phi(setup, n)
            written = [
                save_presentation(presentation_path(directory, "coker_phi", n), f),
                save_presentation(presentation_path(directory, "coker_psi", n), dual_map(f)),
            ]
            run_log.write({"setup": setup.name, "n": n, "files": [str(p) for p in written]})
            progress.item_done()
    finally:
        progress.close()
    table = closed_forms_path(directory)
    table.write_text(render_csv(closed_form_table(setup, config.n_max)), encoding="utf-8")
    LOGGER.info("exported %s presentations and %s to %s", 2 * config.n_max, table.name, directory)
    _emit(str(directory))
    return EXIT_OK


def _global_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=Path, help="Optional YAML/JSON configuration file.")
    parent.add_argument("--log-level", help="Override log level (DEBUG|INFO|WARNING|ERROR).")
    parent.add_argument("--log-dir", type=Path, help="Also write reglab.log into this directory.")
    parent.add_argument("--format", choices=FORMATS, help="Output format for results on stdout.")
    parent.add_argument("--jobs", type=int, help="Worker processes for per-n sweeps.")
    parent.add_argument("--degree-cap", type=int, help="Override the degree cap of every regularity computation.")
    parent.add_argument(
        "--homological-cap", type=int, help="Resolution length for reg and the verify exactness checks."
    )
    parent.add_argument("--quiet", action="store_true", help="No progress bars.")
    return parent


def _build_parser() -> argparse.ArgumentParser:
    parent = _global_options()
    parser = argparse.ArgumentParser(
        prog="reglab",
        description="Regularity of graded Tor/Ext modules over complete intersections: tables and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example1", parents=[parent], help="Tor/Ext regularity table for the first family.")
    p.add_argument("--m", type=int, help="Exponent m >= 1 of the v^m, w^m blocks.")
    p.add_argument("--n-max", type=int, help="Largest homological index.")
    p.add_argument("--char", dest="characteristic", type=int, help="Field characteristic (0 for rationals).")
    p.set_defaults(handler=cmd_example1)

    p = sub.add_parser("example2", parents=[parent], help="Tor/Ext regularity table for the characteristic-2 family.")
    p.add_argument("--n-max", type=int)
    p.set_defaults(handler=cmd_example2)

    p = sub.add_parser("coeff-ideals", parents=[parent], help="Generators and regularity of coefficient ideals.")
    p.add_argument("--n-max", type=int)
    p.set_defaults(handler=cmd_coeff_ideals)

    p = sub.add_parser("reg", parents=[parent], help="Regularity of a module given by a presentation file.")
    p.add_argument("file", type=Path)
    p.set_defaults(handler=cmd_reg)

    p = sub.add_parser("asymptotics", parents=[parent], help="Parity-split linear fits of regularity sequences.")
    p.add_argument("--setup", choices=("setup1", "setup2"), default="setup1")
    p.add_argument("--quantity", choices=("tor", "ext"), default="ext")
    p.add_argument("--m", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--char", dest="characteristic", type=int)
    p.set_defaults(handler=cmd_asymptotics)

    p = sub.add_parser("facts", parents=[parent], help="Checks on Coker and Ker of the second family's maps.")
    p.add_argument("--n-max", type=int)
    p.set_defaults(handler=cmd_facts)

    p = sub.add_parser("verify", parents=[parent], help="Matrix identities and exactness of the explicit complexes.")
    p.add_argument("--m", type=int)
    p.add_argument("--m-only", action="store_true", help="Check only the configured m instead of m = 1, 2, 3.")
    p.add_argument("--n-bc", type=int, default=50)
    p.add_argument("--n-ef", type=int, default=30)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("export", parents=[parent], help="Write presentations and the closed-form table.")
    p.add_argument("--setup", choices=("setup1", "setup2"), default="setup1")
    p.add_argument("--m", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--char", dest="characteristic", type=int)
    p.add_argument("--output-root", type=Path)
    p.set_defaults(handler=cmd_export)
    return parser


def _cli_values(args: argparse.Namespace) -> Dict[str, Any]:
    keys = (
        "log_level", "log_dir", "format", "jobs", "degree_cap", "homological_cap",
        "m", "n_max", "characteristic", "output_root",
    )
    return {key: getattr(args, key, None) for key in keys}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    configure_logging("INFO")
    try:
        config = build_run_config(config_path=args.config, cli_values=_cli_values(args))
    except (ValueError, FileNotFoundError) as exc:
        LOGGER.error("Failed to build configuration: %s", exc)
        return EXIT_USAGE

    configure_logging(config.log_level, config.log_dir)
    progress = TqdmProgress(enabled=not args.quiet and sys.stderr.isatty())
    try:
        return args.handler(args, config, progress)
    except (ReglabError, FileNotFoundError) as exc:
        LOGGER.error("%s failed: %s", args.command, exc)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
