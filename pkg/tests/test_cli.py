import json

import numpy as np
import pandas as pd
import pytest

from tailvista.cli import RunConfig, build_parser, main, read_column
from tailvista.diagnostics import verdict
from tailvista.empirical import empirical_zenga, make_sample
from tailvista.errors import ConfigError, DataError
from tailvista.settings import GlobalSettings


def test_parser_builds_run_config(tmp_path):
    """Parsed arguments become a RunConfig and diagnostic settings"""
    args = build_parser().parse_args(['meplot', str(tmp_path / 'x.csv'), '--cut', '3',
                                      '--seed', '9'])
    config = RunConfig.from_args(args)
    assert config.command == 'meplot'
    assert config.cut == 3 and config.seed == 9
    assert config.diagnostic_settings().me_cut == 3


def test_synth_is_deterministic(tmp_path):
    """Two synth runs with the same seed write identical files"""
    paths = [tmp_path / 'first.csv', tmp_path / 'second.csv']
    for path in paths:
        status = main(['synth', '--model', 'pareto1', '--x0', '10', '--alpha', '2.5',
                       '--n', '500', '--seed', '7', '--output', str(path)])
        assert status == 0

    assert paths[0].read_bytes() == paths[1].read_bytes()
    frame = pd.read_csv(paths[0])
    assert list(frame.columns) == ['value']
    assert len(frame) == 500
    assert frame['value'].min() >= 10.0


def test_synth_missing_parameter(tmp_path, capsys):
    """A model without its required parameter is a configuration error"""
    status = main(['synth', '--model', 'pareto1', '--x0', '10', '--n', '5',
                   '--output', str(tmp_path / 'out.csv')])
    assert status == 3
    assert "--alpha" in capsys.readouterr().err


def test_classify_lognormal(lognormal_csv, capsys):
    """Classify prints the JSON verdict of a lognormal sample"""
    assert main(['classify', str(lognormal_csv), '--seed', '5']) == 0
    result = json.loads(capsys.readouterr().out)
    assert result['schema'] == 1
    assert result['zone']['label'] in ("Lognormal", "Gray")
    assert result['label'] != "ParetianConsistent"


def test_classify_matches_library(lognormal_csv, capsys):
    """The classify output equals the library verdict"""
    main(['classify', str(lognormal_csv), '--seed', '5'])
    expected = verdict(make_sample(read_column(lognormal_csv)),
                       GlobalSettings.get_default_settings(), 5).to_json()
    assert capsys.readouterr().out == expected + "\n"


def test_empty_file(csv_file, capsys):
    """An empty file is a data error"""
    path = csv_file([])
    assert main(['zipf', str(path)]) == 2
    assert "no usable observations" in capsys.readouterr().err


def test_header_only_file(csv_file, capsys):
    """A header without values is a data error"""
    path = csv_file([], header="value")
    assert main(['zipf', str(path)]) == 2
    assert "no usable observations" in capsys.readouterr().err


def test_non_numeric_value(csv_file, capsys):
    """A non-numeric cell is reported by value"""
    path = csv_file(["1.0", "abc", "2.0"], header="value")
    assert main(['meplot', str(path)]) == 2
    assert "abc" in capsys.readouterr().err


def test_missing_file(tmp_path):
    """A missing input file is a data error"""
    assert main(['zipf', str(tmp_path / 'absent.csv')]) == 2


@pytest.mark.parametrize("argv", [['zipf', 'data.csv', '--bogus'], ['histogram', 'data.csv'],
                                  ['zipf']])
def test_config_errors(argv, capsys):
    """Bad arguments and unknown subcommands exit with status 3"""
    assert main(argv) == 3
    assert "configuration error" in capsys.readouterr().err


def test_column_by_name(tmp_path):
    """Columns are selected by header name or by index"""
    path = tmp_path / 'two.csv'
    path.write_text("a,b\n1,10\n2,20\n3,30\n")
    assert read_column(path, "b") == [10.0, 20.0, 30.0]
    assert read_column(path, "0") == [1.0, 2.0, 3.0]


def test_unknown_column(tmp_path):
    """Unknown columns are configuration errors"""
    path = tmp_path / 'two.csv'
    path.write_text("a,b\n1,10\n")
    with pytest.raises(ConfigError):
        read_column(path, "c")
    with pytest.raises(ConfigError):
        read_column(path, "5")


def test_headerless_column(csv_file):
    """A headerless file is read from its first row"""
    assert read_column(csv_file([1.5, 2.5])) == [1.5, 2.5]


def test_non_numeric_raises(csv_file):
    """read_column raises DataError for non-numeric cells"""
    with pytest.raises(DataError):
        read_column(csv_file(["1.0", "x"], header="v"))


def test_zipf_outputs(lognormal_csv, output_dir, lognormal_sample):
    """Zipf writes the figure, the series and the spacings plot"""
    status = main(['zipf', str(lognormal_csv), '--output-dir', str(output_dir),
                   '--bin-base', '2', '--spacings'])
    assert status == 0
    assert (output_dir / 'lognormal_zipf.svg').exists()
    assert (output_dir / 'lognormal_spacings.svg').exists()
    series = pd.read_csv(output_dir / 'lognormal_zipf.csv')
    assert list(series.columns) == ['x', 'y']
    assert len(series) == lognormal_sample.n


def test_threshold_truncates(lognormal_csv, output_dir, lognormal_sample):
    """A threshold keeps only the observations above it"""
    assert main(['zipf', str(lognormal_csv), '--output-dir', str(output_dir),
                 '--threshold', '2']) == 0
    series = pd.read_csv(output_dir / 'lognormal_zipf.csv')
    assert len(series) == int((lognormal_sample.values > 2.0).sum())


def test_meplot_and_zenga_outputs(lognormal_csv, output_dir):
    """Meplot and zenga write a figure and a series each"""
    for command in ('meplot', 'zenga'):
        assert main([command, str(lognormal_csv), '--output-dir', str(output_dir)]) == 0
        assert (output_dir / f'lognormal_{command}.svg').exists()
        assert (output_dir / f'lognormal_{command}.csv').exists()


def test_mrplot_outputs(lognormal_csv, output_dir):
    """Mrplot writes the figure and a JSON document with the bootstrap cloud"""
    assert main(['mrplot', str(lognormal_csv), '--output-dir', str(output_dir),
                 '--bootstrap', '5', '--seed', '3']) == 0
    document = json.loads((output_dir / 'lognormal_mrplot.json').read_text())
    assert len(document['bootstrap']) == 5
    assert document['seed'] == 3
    assert document['zone']['label'] in ("Lognormal", "Gray")
    assert (output_dir / 'lognormal_mrplot.svg').read_text().count('class="curve"') == 5


def test_power_table(capsys):
    """Power prints a text table"""
    assert main(['power', '--n', '200', '--trials', '100', '--seed', '1', '--table']) == 0
    out = capsys.readouterr().out
    assert "error_rate" in out and "pareto1(x0=1, alpha=5)" in out


def test_power_json(capsys):
    """Power prints a JSON report for a lognormal truth"""
    assert main(['power', '--model', 'lognormal', '--mu', '0', '--sigma', '1',
                 '--n', '300', '--trials', '100']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report['model_alt'] == "pareto1"
    assert 0.0 <= report['error_rate'] <= 1.0


def test_power_me_study(capsys):
    """The mean excess study reports the distinguished fraction"""
    assert main(['power', '--study', 'me', '--n', '300', '--trials', '100']) == 0
    result = json.loads(capsys.readouterr().out)
    assert 0.0 <= result['distinguished_fraction'] <= 1.0


def test_power_unsupported_family(capsys):
    """Families without a competing family are configuration errors"""
    assert main(['power', '--model', 'exponential', '--rate', '1', '--trials', '100']) == 3


def test_zenga_series_not_rescaled(lognormal_csv, output_dir, lognormal_sample):
    """The Zenga CSV holds the raw curve; rescaling only changes the figure"""
    assert main(['zenga', str(lognormal_csv), '--output-dir', str(output_dir)]) == 0
    series = pd.read_csv(output_dir / 'lognormal_zenga.csv')
    np.testing.assert_array_equal(series['y'].to_numpy(), empirical_zenga(lognormal_sample).z)


def test_power_several_sizes(capsys):
    """Several --n values give one report per size"""
    assert main(['power', '--n', '200', '400', '--trials', '100', '--seed', '1']) == 0
    reports = json.loads(capsys.readouterr().out)
    assert [report['n'] for report in reports] == [200, 400]


def test_power_model_from_parameters(capsys):
    """Test that a Pareto II model built from CLI parameters runs"""
    assert main(['power', '--model', 'pareto2', '--b', '1', '--alpha', '4', '--n', '300',
                 '--trials', '100']) == 0
    assert json.loads(capsys.readouterr().out)['model_alt'] == "lognormal"
