import json

import pandas as pd
import pytest

from cli import RunConfig, build_parser, main, run, run_self_checks
from lib.report_writer import read_json_report

SEQUENCE = [{'eigenvalues': [0.0]}, {'eigenvalues': [0.5]}]
PROBLEM = {
    'matrices': SEQUENCE,
    'targets': [{'kind': 'constant', 'value': 0.0}, {'kind': 'constant', 'value': 0.25}],
}


@pytest.fixture
def write_input(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(payload if isinstance(payload, str) else json.dumps(payload), encoding='utf-8')
        return str(path)

    return write


def test_separation_command_writes_report_and_landscape(tmp_path, write_input):
    out = tmp_path / 'separation.json'
    assert main(['separation', '--input', write_input('seq.json', SEQUENCE), '--out', str(out)]) == 0
    report = read_json_report(out)
    assert report['command'] == 'separation'
    assert report['flagged'] is False
    assert report['result']['uniform_strong_separation']['value'] == pytest.approx(2.0 - 3.0 ** 0.5, abs=1e-3)
    assert report['result']['strong_separation'] == pytest.approx(0.5)
    landscape = pd.read_csv(tmp_path / 'separation.csv')
    assert list(landscape.columns) == ['re', 'im', 'value']


def test_reports_are_byte_identical_across_runs(tmp_path, write_input):
    source = write_input('seq.json', SEQUENCE)
    first, second = tmp_path / 'first.json', tmp_path / 'second.json'
    assert main(['separation', '--input', source, '--out', str(first)]) == 0
    assert main(['separation', '--input', source, '--out', str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / 'first.csv').read_bytes() == (tmp_path / 'second.csv').read_bytes()


def test_construct_command(tmp_path):
    out = tmp_path / 'construct.json'
    assert main(['construct', '--delta', '0.5', '--nu', '1.5', '--n', '3', '--out', str(out)]) == 0
    table = pd.read_csv(tmp_path / 'construct.csv')
    assert table['n'].tolist() == [1, 2, 3]
    assert (table['scanned'] >= table['stated_bound'] - 1e-3).all()


def test_counterexample_command(tmp_path):
    out = tmp_path / 'counter.json'
    assert main(['counterexample', '--nu', '0.5', '--n', '6', '--out', str(out)]) == 0
    report = read_json_report(out)
    assert all(report['result']['checks'].values())
    table = pd.read_csv(tmp_path / 'counter.csv')
    assert list(table.columns) == [
        'n', 't', 't^m', 's', 's^m', 'leaveoneout_at_xi', 'strong_separation', 'uniform_separation', 'ratio',
    ]


def test_modelspace_command(tmp_path, write_input):
    out = tmp_path / 'modelspace.json'
    assert main(['modelspace', '--input', write_input('seq.json', SEQUENCE), '--out', str(out)]) == 0
    result = read_json_report(out)['result']
    assert result['witness']['holds'] is True
    assert result['subspace_strong_separation'] == pytest.approx(0.5, abs=1e-9)
    assert result['frame_bounds']['lower'] > 0


def test_interpolate_command(tmp_path, write_input):
    out = tmp_path / 'interpolate.json'
    assert main(['interpolate', '--input', write_input('problem.json', PROBLEM), '--out', str(out)]) == 0
    result = read_json_report(out)['result']
    assert result['minimal_norm'] == pytest.approx(0.5)
    assert max(result['matrix_errors']) < 1e-7
    trace = pd.read_csv(tmp_path / 'interpolate.csv')
    assert list(trace.columns) == ['theta', 're', 'im', 'modulus']


def test_interpolate_single_node_gives_a_constant(tmp_path, write_input):
    out = tmp_path / 'single.json'
    problem = {'matrices': [{'eigenvalues': [0.3]}], 'targets': [{'kind': 'constant', 'value': 0.5}]}
    assert main(['interpolate', '--input', write_input('single.json', problem), '--out', str(out)]) == 0
    assert read_json_report(out)['result']['minimal_norm'] == pytest.approx(0.5)
    trace = pd.read_csv(tmp_path / 'single.csv')
    assert trace['modulus'].to_numpy() == pytest.approx(0.5, abs=1e-9)


def test_beurling_command_with_reconstruction(tmp_path, write_input):
    out = tmp_path / 'beurling.json'
    code = main(['beurling', '--input', write_input('problem.json', PROBLEM), '--trials', '2', '--grid-depth', '3',
                 '--out', str(out)])
    assert code == 0
    result = read_json_report(out)['result']
    assert result['grid_sup'] <= result['bound']
    assert max(result['reconstruction_errors']) < 1e-7


def test_framebounds_gamma_sweep(tmp_path):
    out = tmp_path / 'frames.json'
    assert main(['framebounds', '--gammas', '0.5,0.1', '--out', str(out)]) == 0
    table = pd.read_csv(tmp_path / 'frames.csv')
    assert table['parameter'].tolist() == [0.5, 0.1]
    assert table['lower'].iloc[1] < table['lower'].iloc[0]


def test_framebounds_point_sets(tmp_path, write_input):
    out = tmp_path / 'frames.json'
    source = write_input('sets.json', {'point_sets': [[0.0, 0.5], [0.1, {'re': 0.0, 'im': -0.3}, 0.6]]})
    assert main(['framebounds', '--input', source, '--out', str(out)]) == 0
    assert len(read_json_report(out)['result']['sweep']) == 2


def test_input_errors_exit_with_one(tmp_path, write_input, capsys):
    out = str(tmp_path / 'bad.json')
    assert main(['separation', '--input', write_input('bad.json', '[{"eigenvalues": [0.1],}'), '--out', out]) == 1
    assert 'line 1' in capsys.readouterr().err
    assert main(['separation', '--input', str(tmp_path / 'missing.json'), '--out', out]) == 1
    assert main(['separation', '--out', out]) == 1
    assert main(['separation', '--input', write_input('edge.json', [{'eigenvalues': [1.0]}]), '--out', out]) == 1
    assert main(['separation', '--input', write_input('seq.json', SEQUENCE), '--tol', '0.5', '--out', out]) == 1


def test_run_rejects_unknown_commands():
    assert run(RunConfig(command='nonsense')) == 1
    with pytest.raises(SystemExit):
        build_parser().parse_args(['nonsense'])


def test_self_checks_pass():
    rows = run_self_checks()
    assert {row['name'] for row in rows} >= {'Config', 'Annihilation', 'Distance Formula', 'Minimal Norm'}
    assert all(row['status'] == 'OK' for row in rows), rows
