import argparse
import dataclasses
import json
import logging
import pathlib
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import pandas as pd

from .diagnostics import (classify_moment_point, me_trend, meplot_series, spacings_series,
                          tail_linearity, verdict, zipf_series)
from .distributions import (MODEL_FAMILIES, DistributionModel, Lognormal, ParetoI,
                            model_from_dict, sample)
from .empirical import (Sample, bootstrap_moments, empirical_zenga, make_sample, moment_stats,
                        tail_truncate)
from .errors import ConfigError, DataError, DomainError, RenderError
from .powerstudy import error_rate_curve, me_discrimination_power, reports_table
from .renderer import (meplot_figure, moment_ratio_figure, render_figure, spacings_figure,
                       zenga_figure, zipf_figure)
from .settings import DEFAULT_SEED, FORMULA_MODES, DiagnosticSettings, GlobalSettings

logger = logging.getLogger("tailvista.cli")

DATA_COMMANDS = ('zipf', 'meplot', 'mrplot', 'zenga', 'classify')
MODEL_PARAMETERS = ('x0', 'alpha', 'b', 'xi', 'beta', 'nu', 'mu', 'sigma', 'rate', 'k', 'theta')


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises ConfigError instead of exiting"""

    def error(self, message):
        raise ConfigError(message)


@dataclass
class RunConfig:
    command: str
    input: Optional[pathlib.Path] = None
    column: str = "0"
    output_dir: pathlib.Path = pathlib.Path(".")
    seed: int = DEFAULT_SEED
    bin_base: Optional[float] = None
    cut: int = 5
    tail_fraction: float = 0.2
    min_r2: float = 0.98
    threshold: Optional[float] = None
    formula_mode: str = "corrected"
    bootstrap: int = 0
    rescale: bool = True
    spacings: bool = False
    model: Optional[str] = None
    parameters: Dict[str, float] = field(default_factory=dict)
    n: List[int] = field(default_factory=lambda: [1000])
    trials: int = 1000
    workers: Optional[int] = None
    study: str = "classification"
    table: bool = False
    output: Optional[pathlib.Path] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        names = {f.name for f in dataclasses.fields(cls)}
        values = {name: value for name, value in vars(args).items()
                  if name in names and value is not None}
        values['parameters'] = {name: getattr(args, name) for name in MODEL_PARAMETERS
                                if getattr(args, name, None) is not None}
        return cls(**values)

    def diagnostic_settings(self) -> DiagnosticSettings:
        settings = GlobalSettings.get_default_settings()
        settings.tail_fraction = self.tail_fraction
        settings.min_r2 = self.min_r2
        settings.me_cut = self.cut
        settings.formula_mode = self.formula_mode
        if self.bin_base is not None:
            settings.bin_base = self.bin_base
        return settings


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='tailvista',
                            description='TailVista - graphical heavy-tail diagnostics')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Increase log verbosity (-v info, -vv debug)')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    data_parent = ArgumentParser(add_help=False)
    data_parent.add_argument('input', type=pathlib.Path, help='CSV file with the observations')
    data_parent.add_argument('--column', default="0",
                             help='Column index or header name (default: first column)')
    data_parent.add_argument('--output-dir', type=pathlib.Path, default=pathlib.Path('.'),
                             help='Directory for the figure and series files')
    data_parent.add_argument('--seed', type=int, default=DEFAULT_SEED)
    data_parent.add_argument('--threshold', type=float,
                             help='Keep only observations strictly above this value')

    zipf = commands.add_parser('zipf', parents=[data_parent], help='Zipf (log-log survival) plot')
    zipf.add_argument('--bin-base', type=float, help='Add logarithmically binned points')
    zipf.add_argument('--tail-fraction', type=float, default=0.2)
    zipf.add_argument('--spacings', action='store_true',
                      help='Also write the geometric spacings plot')

    meplot = commands.add_parser('meplot', parents=[data_parent], help='Mean excess plot')
    meplot.add_argument('--cut', type=int, default=5,
                        help='Number of largest thresholds to drop')

    mrplot = commands.add_parser('mrplot', parents=[data_parent], help='Moment-ratio plot')
    mrplot.add_argument('--formula-mode', choices=FORMULA_MODES, default="corrected")
    mrplot.add_argument('--bootstrap', type=int, default=0, metavar='B',
                        help='Add a cloud of B bootstrap moment points')

    zenga = commands.add_parser('zenga', parents=[data_parent], help='Zenga plot')
    zenga.add_argument('--rescale', action=argparse.BooleanOptionalAction, default=True,
                       help='Copy the inner points onto the first and last one')

    classify = commands.add_parser('classify', parents=[data_parent],
                                   help='Combine all diagnostics into a JSON verdict')
    classify.add_argument('--tail-fraction', type=float, default=0.2)
    classify.add_argument('--min-r2', type=float, default=0.98)
    classify.add_argument('--cut', type=int, default=5)
    classify.add_argument('--formula-mode', choices=FORMULA_MODES, default="corrected")

    model_parent = ArgumentParser(add_help=False)
    model_parent.add_argument('--model', choices=sorted(MODEL_FAMILIES))
    for name in MODEL_PARAMETERS:
        model_parent.add_argument(f'--{name}', type=float)
    model_parent.add_argument('--seed', type=int, default=DEFAULT_SEED)

    power = commands.add_parser('power', parents=[model_parent], help='Monte Carlo power study')
    power.add_argument('--study', choices=('classification', 'me'), default='classification')
    power.add_argument('--n', type=int, nargs='+', default=[1000])
    power.add_argument('--trials', type=int, default=1000)
    power.add_argument('--workers', type=int)
    power.add_argument('--formula-mode', choices=FORMULA_MODES, default="corrected")
    power.add_argument('--table', action='store_true', help='Print a text table instead of JSON')

    synth = commands.add_parser('synth', parents=[model_parent], help='Write a synthetic sample')
    synth.add_argument('--n', type=int, nargs=1, required=True)
    synth.add_argument('--output', type=pathlib.Path, help='Output CSV (default: stdout)')
    return parser


def build_model(config: RunConfig, default: Optional[DistributionModel] = None) -> DistributionModel:
    if config.model is None:
        if default is None:
            raise ConfigError("--model is required")
        return default
    cls = MODEL_FAMILIES[config.model]
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(config.parameters) - names
    if unknown:
        raise ConfigError(f"Parameters {sorted(unknown)} do not apply to {config.model}")
    required = {f.name for f in dataclasses.fields(cls)
                if f.default is dataclasses.MISSING}
    missing = required - set(config.parameters)
    if missing:
        raise ConfigError(f"Model {config.model} needs {', '.join('--' + m for m in sorted(missing))}")
    return model_from_dict({'family': config.model, **config.parameters})


def _looks_numeric(value) -> bool:
    try:
        float(value)
        return True
    except (TypeError, ValueError):
        return False


def read_column(path: pathlib.Path, column: str = "0") -> List[float]:
    """
    Read one column of a comma-separated file. A first row with any
    non-numeric cell is taken as the header.
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=True,
                            keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise DataError("no usable observations")
    except pd.errors.ParserError as exc:
        raise DataError(f"cannot parse {path}: {exc}") from exc

    header = None
    first_row = frame.iloc[0].tolist() if len(frame) else []
    if first_row and not all(_looks_numeric(value) for value in first_row if value != ""):
        header = [str(value).strip() for value in first_row]
        frame = frame.iloc[1:]

    if column.isdigit():
        index = int(column)
    elif header is not None and column in header:
        index = header.index(column)
    else:
        raise ConfigError(f"Column {column!r} not found in {path}")
    if index >= frame.shape[1]:
        raise ConfigError(f"Column index {index} out of range, {path} has {frame.shape[1]} columns")

    raw = frame.iloc[:, index].str.strip()
    raw = raw[raw != ""]
    values = pd.to_numeric(raw, errors='coerce')
    bad = raw[values.isna() & ~raw.str.lower().isin(['nan', 'inf', '-inf'])]
    if len(bad):
        raise DataError(f"non-numeric value {bad.iloc[0]!r} in column {column!r} of {path}")
    return values.tolist()


def load_sample(config: RunConfig) -> Sample:
    s = make_sample(read_column(config.input, config.column))
    report = s.report()
    if report:
        logger.warning(f"{config.input}: {report}")
    if config.threshold is not None:
        s = tail_truncate(s, config.threshold)
    return s


def _output_path(config: RunConfig, suffix: str) -> pathlib.Path:
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return config.output_dir / f"{config.input.stem}_{suffix}"


def _write_figure(config: RunConfig, name: str, svg: str, series=None) -> None:
    svg_path = _output_path(config, f"{name}.svg")
    svg_path.write_text(svg)
    logger.info(f"Figure saved to: {svg_path}")
    if series is not None:
        csv_path = _output_path(config, f"{name}.csv")
        series.to_frame().to_csv(csv_path, index=False, float_format='%.17g')
        logger.info(f"Series saved to: {csv_path}")


def run_zipf(config: RunConfig, settings: DiagnosticSettings) -> None:
    s = load_sample(config)
    fit = None
    try:
        fit = tail_linearity(zipf_series(s), settings.tail_fraction, settings.min_r2,
                             settings.min_tail_points)
    except DataError as exc:
        logger.warning(f"No tail fit drawn: {exc}")
    figure = zipf_figure(s, config.bin_base, fit)
    _write_figure(config, 'zipf', render_figure(figure), zipf_series(s))
    if config.spacings:
        spacings = spacings_series(s)
        _write_figure(config, 'spacings', render_figure(spacings_figure(s)), spacings.series)


def run_meplot(config: RunConfig, settings: DiagnosticSettings) -> None:
    s = load_sample(config)
    series = meplot_series(s, config.cut)
    trend = None
    try:
        trend = me_trend(series, settings.me_min_slope)
    except DataError as exc:
        logger.warning(f"No trend line drawn: {exc}")
    _write_figure(config, 'meplot', render_figure(meplot_figure(s, config.cut, trend)), series)


def run_mrplot(config: RunConfig, settings: DiagnosticSettings) -> None:
    s = load_sample(config)
    point = moment_stats(s)
    zone = classify_moment_point(point, config.formula_mode, settings)
    cloud = bootstrap_moments(s, config.bootstrap, config.seed) if config.bootstrap else None
    figure = moment_ratio_figure(point, config.formula_mode, cloud)
    _write_figure(config, 'mrplot', render_figure(figure))

    document = {'moment_point': point.to_dict(), 'zone': zone.to_dict(),
                'formula_mode': config.formula_mode, 'seed': config.seed}
    if cloud is not None:
        document['bootstrap'] = [p.to_dict() for p in cloud.points]
        document['bootstrap_skipped'] = cloud.skipped
    json_path = _output_path(config, 'mrplot.json')
    json_path.write_text(json.dumps(document, sort_keys=True, indent=2) + "\n")


def run_zenga(config: RunConfig, settings: DiagnosticSettings) -> None:
    s = load_sample(config)
    series = empirical_zenga(s).to_plot_series()
    figure = zenga_figure(s, rescale_endpoints=config.rescale)
    _write_figure(config, 'zenga', render_figure(figure), series)


def run_classify(config: RunConfig, settings: DiagnosticSettings) -> None:
    s = load_sample(config)
    print(verdict(s, settings, config.seed).to_json())


def run_power(config: RunConfig, settings: DiagnosticSettings) -> None:
    if config.study == 'me':
        model = build_model(config, Lognormal(0.0, 1.0))
        results = [{'model': model.describe(), 'n': n, 'trials': config.trials, 'seed': config.seed,
                    'distinguished_fraction': me_discrimination_power(
                        n, config.trials, config.seed, model, workers=config.workers)}
                   for n in config.n]
        if config.table:
            print(pd.DataFrame(results).to_string(index=False))
        else:
            print(json.dumps(results if len(results) > 1 else results[0], sort_keys=True, indent=2))
        return

    model = build_model(config, ParetoI(1.0, 5.0))
    reports = error_rate_curve(model, config.n, config.trials, config.seed, config.formula_mode,
                               config.workers)
    if config.table:
        print(reports_table(reports))
    elif len(reports) == 1:
        print(reports[0].to_json())
    else:
        print(json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2))


def run_synth(config: RunConfig, settings: DiagnosticSettings) -> None:
    model = build_model(config)
    s = sample(model, config.n[0], config.seed)
    frame = pd.DataFrame({'value': s.values})
    if config.output is None:
        frame.to_csv(sys.stdout, index=False, float_format='%.17g')
        return
    config.output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(config.output, index=False, float_format='%.17g')
    logger.info(f"Wrote {s.n} values from {model.describe()} to {config.output}")


COMMANDS = {
    'zipf': run_zipf,
    'meplot': run_meplot,
    'mrplot': run_mrplot,
    'zenga': run_zenga,
    'classify': run_classify,
    'power': run_power,
    'synth': run_synth,
}


def run(config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit status"""
    handler = COMMANDS.get(config.command)
    try:
        if handler is None:
            raise ConfigError(f"Unknown subcommand {config.command!r}")
        if config.command in DATA_COMMANDS and config.input is None:
            raise ConfigError(f"{config.command} needs an input file")
        handler(config, config.diagnostic_settings())
    except (ConfigError, DomainError) as exc:
        print(f"tailvista: configuration error: {exc}", file=sys.stderr)
        return 3
    except (DataError, RenderError) as exc:
        print(f"tailvista: data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tailvista: cannot read input: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"tailvista: configuration error: {exc}", file=sys.stderr)
        return 3

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return run(RunConfig.from_args(args))


if __name__ == '__main__':
    sys.exit(main())
