"""
Command-line front end.

    capq analyze     --config cfg.json [--data x.csv]   univariate indices
    capq mv-analyze  --config cfg.json [--data x.csv]   multivariate indices
    capq fit         --data x.csv [--family F ...]      goodness-of-fit table
    capq oracle      --config cfg.json [--n N]          Monte Carlo yield check
    capq list-indices                                   registered indices

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric or
domain failure.
"""
import argparse
import logging
import math
import sys
from typing import List, Optional

from pydantic import ValidationError

from . import __version__
from .analysis.fitting import fit_candidates, ks_critical_value
from .analysis.inference import choose_model, mc_yield
from .analysis.runner import run_analysis
from .exceptions import ConfigError, DataError, DomainError, FileOperationError, NumericError
from .indices.registry import registry
from .indices.report import IndexReport
from .indices.yield_based import yield_summary
from .schema import Family
from .utils.config import defaults_applied, load_config, settings
from .utils.io import load_measurements, save_text
from .utils.report_renderer import render_report

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["json", "text"], default=None, help="report format (default from settings)")
    p.add_argument("--out", help="write the report to this path instead of stdout")
    p.add_argument("--verbose", action="store_true", help="debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capq", description="Process capability index analysis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("analyze", "compute univariate indices"),
                            ("mv-analyze", "compute multivariate indices")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON analysis configuration")
        p.add_argument("--data", help="CSV measurements with one header row")
        p.add_argument("--seed", type=int, help="override every seed in the configuration")
        _add_output_flags(p)

    p = sub.add_parser("fit", help="fit candidate families and print goodness of fit")
    p.add_argument("--data", required=True, help="CSV measurements, one column")
    p.add_argument("--family", action="append", choices=[f.value for f in Family if f != Family.EMPIRICAL],
                   help="candidate family (repeatable; default from settings)")
    p.add_argument("--significance", type=float, default=None)
    _add_output_flags(p)

    p = sub.add_parser("oracle", help="compare Monte Carlo and analytic yield for a fixed model")
    p.add_argument("--config", required=True, help="JSON configuration with L, U and a fixed model")
    p.add_argument("--n", type=int, default=None, help="Monte Carlo draws (default from config)")
    p.add_argument("--seed", type=int, help="override the Monte Carlo seed")
    _add_output_flags(p)

    p = sub.add_parser("list-indices", help="list registered indices")
    _add_output_flags(p)
    return parser


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.logging.level)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _load_data(path: Optional[str]):
    if path is None:
        return None
    try:
        return load_measurements(path).values
    except FileOperationError as e:
        raise DataError(str(e)) from e


def _emit(report: IndexReport, args) -> None:
    text = render_report(report, args.format or settings.report.format)
    if args.out:
        save_text(args.out, text)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args, multivariate: bool) -> IndexReport:
    config = load_config(args.config, seed=args.seed)
    data = _load_data(args.data)
    if data is not None and not multivariate:
        if data.shape[1] != 1:
            raise DataError(f"{args.data}: expected one column for analyze, found {data.shape[1]}")
        data = data[:, 0]
    return run_analysis(config, data, multivariate=multivariate, data_source=args.data or "inline")


def _cmd_fit(args) -> IndexReport:
    values = _load_data(args.data)
    if values.shape[1] != 1:
        raise DataError(f"{args.data}: fit expects one column, found {values.shape[1]}")
    x = values[:, 0]
    families = args.family or [f.value for f in settings.fitting.families]
    significance = settings.fitting.significance if args.significance is None else args.significance
    if not 0 < significance < 1:
        raise ConfigError(f"significance must lie in (0, 1), got {significance}")
    records = fit_candidates(x, families, significance)
    report = IndexReport(version=__version__, command="fit",
                         inputs={"data": {"source": args.data, "n": int(x.size)}, "families": families,
                                 "significance": significance})
    report.details["fits"] = [r.model_dump() for r in records]
    report.details["ks_critical_value"] = ks_critical_value(x.size, significance)
    return report


def _cmd_oracle(args) -> IndexReport:
    config = load_config(args.config, seed=args.seed)
    if config.spec is None or config.model.mode != "fixed":
        raise ConfigError("oracle needs specification limits and a fixed model (family with params)")
    if config.monte_carlo.seed is None:
        raise ConfigError("oracle needs monte_carlo.seed (or --seed)")
    model = choose_model(config.model, None).model
    n = args.n or config.monte_carlo.n
    analytic = yield_summary(model, config.spec).p
    mc = mc_yield(model, config.spec, n, config.monte_carlo.seed)
    diff = mc.estimate - analytic
    z = diff / mc.standard_error if mc.standard_error > 0 else (0.0 if diff == 0 else math.copysign(math.inf, diff))
    report = IndexReport(version=__version__, command="oracle", seeds={"monte_carlo": config.monte_carlo.seed},
                         inputs={"config": config.model_dump(mode="json", exclude_none=True)},
                         defaults_applied=defaults_applied(config), model=model.describe())
    report.details["oracle"] = {
        "analytic_yield": analytic, "mc_estimate": mc.estimate, "standard_error": mc.standard_error,
        "draws": n, "z_score": z if math.isfinite(z) else None, "within_3_se": math.isfinite(z) and abs(z) <= 3,
    }
    return report


def _cmd_list(args) -> IndexReport:
    report = IndexReport(version=__version__, command="list-indices")
    report.details["indices"] = [
        {"name": d.name, "label": d.label, "formula": d.formula, "basis": d.basis, "params": d.defaults,
         "correction": d.correction}
        for d in registry.definitions()
    ]
    return report


def _run(args) -> IndexReport:
    if args.command == "analyze":
        return _cmd_analyze(args, multivariate=False)
    if args.command == "mv-analyze":
        return _cmd_analyze(args, multivariate=True)
    if args.command == "fit":
        return _cmd_fit(args)
    if args.command == "oracle":
        return _cmd_oracle(args)
    return _cmd_list(args)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        _emit(_run(args), args)
    except (ConfigError, ValidationError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileOperationError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (DomainError, NumericError) as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
