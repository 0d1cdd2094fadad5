"""
Parancssori felület tesztek
"""
import json

import pytest
from click.testing import CliRunner

from main import cli
from utils.io_utils import read_table_csv


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def scalar_file(tmp_path):
    path = tmp_path / 'scalar.json'
    path.write_text(json.dumps({'n': 1, 'a': [0.2], 'B': [[0.8]]}))
    return str(path)


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


class TestClassifyAndSolve:
    def test_family_then_classify(self, runner, tmp_path):
        instance = str(tmp_path / 'p2.json')
        result = runner.invoke(cli, ['family', '--p', '2', '--emit', instance])
        assert result.exit_code == 0

        result = runner.invoke(cli, ['classify', instance, '--digits', '5'])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data['regime'] == 'Supercritical'
        assert data['rho_R'] == pytest.approx(1.0028, abs=5e-5)

    def test_family_rates_format_is_loadable(self, runner, tmp_path):
        instance = str(tmp_path / 'rates.json')
        assert runner.invoke(cli, ['family', '--p', '5', '--emit', instance, '--rates']).exit_code == 0
        assert 'D0' in json.loads((tmp_path / 'rates.json').read_text())
        result = runner.invoke(cli, ['classify', instance])
        assert result.exit_code == 0
        assert json.loads(result.stdout)['regime'] == 'Supercritical'

    def test_solve_scalar(self, runner, scalar_file):
        result = runner.invoke(cli, ['solve', scalar_file])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data['x'][0] == pytest.approx(0.25, abs=1e-12)
        assert data['converged'] is True

    def test_solve_near_critical_with_loose_tolerance(self, runner, tmp_path):
        instance = str(tmp_path / 'p09.json')
        assert runner.invoke(cli, ['family', '--p', '0.9', '--emit', instance]).exit_code == 0
        result = runner.invoke(cli, ['solve', instance, '--tol', '1e-6'])
        assert result.exit_code == 0
        assert json.loads(result.stdout)['converged'] is True

    def test_solve_writes_trace(self, runner, scalar_file, tmp_path):
        trace = tmp_path / 'trace.json'
        result = runner.invoke(cli, ['solve', scalar_file, '--method', 'depth', '--trace', str(trace)])
        assert result.exit_code == 0
        data = json.loads(trace.read_text())
        assert data['method'] == 'Depth'
        assert data['iterates'][1][0] == pytest.approx(0.2)

    def test_malformed_json(self, runner, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"n": 1, "a": [0.2]')
        result = runner.invoke(cli, ['solve', str(path)])
        assert result.exit_code == 2

    def test_missing_field(self, runner, tmp_path):
        path = write(tmp_path, 'partial.json', {'n': 1, 'a': [0.2]})
        result = runner.invoke(cli, ['classify', path])
        assert result.exit_code == 2
        assert 'B' in result.output

    def test_invalid_instance_is_input_error(self, runner, tmp_path):
        path = write(tmp_path, 'bad.json', {'n': 1, 'a': [0.3], 'B': [[0.8]]})
        assert runner.invoke(cli, ['classify', path]).exit_code == 2


class TestBounds:
    def test_error_bound_certified(self, runner, scalar_file, tmp_path):
        xhat = write(tmp_path, 'xhat.json', {'xhat': [0.24]})
        result = runner.invoke(cli, ['bounds', 'error', scalar_file, '--xhat', xhat])
        assert result.exit_code == 0
        assert json.loads(result.stdout)['omega_star'] == pytest.approx(0.01, abs=1e-7)

    def test_error_bound_not_certified(self, runner, scalar_file, tmp_path):
        xhat = write(tmp_path, 'xhat.json', [1.2])
        result = runner.invoke(cli, ['bounds', 'error', scalar_file, '--xhat', xhat])
        assert result.exit_code == 1
        assert json.loads(result.stdout)['con1_ok'] is False

    def test_error_bound_missing_field(self, runner, scalar_file, tmp_path):
        xhat = write(tmp_path, 'xhat.json', {'x': [0.24]})
        assert runner.invoke(cli, ['bounds', 'error', scalar_file, '--xhat', xhat]).exit_code == 2

    def test_structured_perturbation(self, runner, scalar_file):
        result = runner.invoke(cli, ['bounds', 'perturb', scalar_file, '--structured', '1.25e-4'])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data['xi_star'] == pytest.approx(1.5630e-4, abs=1e-7)
        assert data['bound_holds'] is True

    def test_random_perturbation_uses_seed(self, runner, scalar_file):
        args = ['bounds', 'perturb', scalar_file, '--random', '1e-6', '--seed', '9']
        first = json.loads(runner.invoke(cli, args).stdout)
        second = json.loads(runner.invoke(cli, args).stdout)
        assert first == second
        assert first['seed'] == 9
        assert first['generator'] == 'PCG64'

    def test_delta_b_file(self, runner, scalar_file, tmp_path):
        delta = write(tmp_path, 'db.json', {'dB': [[1e-4]]})
        result = runner.invoke(cli, ['bounds', 'perturb', scalar_file, '--delta-b', delta])
        assert result.exit_code == 0
        assert json.loads(result.stdout)['inputs']['delta'] == pytest.approx(1e-4)

    def test_too_large_perturbation(self, runner, scalar_file):
        result = runner.invoke(cli, ['bounds', 'perturb', scalar_file, '--structured', '0.5'])
        assert result.exit_code == 2

    def test_exactly_one_perturbation(self, runner, scalar_file):
        result = runner.invoke(cli, ['bounds', 'perturb', scalar_file])
        assert result.exit_code == 2


class TestSimulateAndReproduce:
    def test_simulate(self, runner, scalar_file):
        result = runner.invoke(cli, ['simulate', scalar_file, '--trials', '2000', '--max-pop', '1000',
                                     '--seed', '3'])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert abs(data['estimates'][0] - 0.25) <= 0.05
        assert data['seed'] == 3

    def test_seed_from_environment(self, runner, scalar_file):
        result = runner.invoke(cli, ['simulate', scalar_file, '--trials', '200', '--max-pop', '100'],
                               env={'MBT_QVE_SEED': '77'})
        assert json.loads(result.stdout)['seed'] == 77

    def test_reproduce_table_three(self, runner, tmp_path):
        out = tmp_path / 'table3.csv'
        result = runner.invoke(cli, ['reproduce', '--table', '3', '--out', str(out),
                                     '--iterate-rule', 'first-certified'])
        assert result.exit_code == 0
        df = read_table_csv(str(out))
        assert len(df) == 5
        assert list(df['p']) == [2.0, 4.0, 6.0, 8.0, 10.0]

    def test_reproduce_rejects_unknown_table(self, runner):
        assert runner.invoke(cli, ['reproduce', '--table', '4']).exit_code == 2
