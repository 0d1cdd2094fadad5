import sys
import os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import json
import functools
from typing import Any, Optional

import click
import numpy as np
from dotenv import load_dotenv

# Konfiguráció betöltése
load_dotenv()

from analysis.error_bound import error_bound
from analysis.perturbation import (
    PerturbationAnalyzer,
    check_perturbed,
    random_perturbation,
    structured_perturbation,
)
from config.settings import Settings
from core.exceptions import (
    InvalidDimensionError,
    InvalidInputError,
    InvalidRatesError,
    PerturbationTooLargeError,
    QveError,
)
from core.linalg_kernel import apply_bilinear, ones
from core.qve_model import from_rates, paper_family, validate_mbt, classify as classify_qve
from core.solvers import QveSolver
from experiments.table_reproducer import ITERATE_RULES, TableReproducer
from simulation.branching_simulator import SCHEDULES, BranchingSimulator
from utils.io_utils import load_matrix, load_qve, load_vector, write_json
from utils.logger import setup_logger

logger = setup_logger('cli')

# Kilépési kódok
EXIT_OK = 0
EXIT_CERTIFICATE_FAILURE = 1
EXIT_INPUT_ERROR = 2

INPUT_ERRORS = (InvalidInputError, InvalidDimensionError, InvalidRatesError, PerturbationTooLargeError)


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _round(value: Any, digits: Optional[int]) -> Any:
    if digits is None:
        return value
    if isinstance(value, float):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: _round(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v, digits) for v in value]
    return value


def emit(data: Any, digits: Optional[int]):
    """JSON kimenet teljes pontossággal, vagy digits értékes jegyre kerekítve"""
    plain = json.loads(json.dumps(data, default=_json_default))
    click.echo(json.dumps(_round(plain, digits), indent=2))


def handle_errors(func):
    """A toolkit hibáit kilépési kódra fordítja"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except INPUT_ERRORS as e:
            field = getattr(e, 'field', None)
            suffix = f" (field: {field})" if field else ''
            click.echo(f"Input error: {e}{suffix}", err=True)
            sys.exit(EXIT_INPUT_ERROR)
        except QveError as e:
            logger.error(f"{func.__name__} failed: {e}")
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_CERTIFICATE_FAILURE)

    return wrapper


def _default_seed(seed: Optional[int]) -> int:
    return int(Settings.get_setting('default_seed')) if seed is None else seed


digits_option = click.option('--digits', type=int, default=None, help='Értékes jegyek a kiíráshoz')
seed_option = click.option('--seed', type=int, envvar='MBT_QVE_SEED', default=None, help='Véletlen mag')


@click.group()
def cli():
    """MBT kihalási valószínűségek: QVE megoldók, perturbációs és hibakorlátok"""


@cli.command()
@click.argument('instance', type=click.Path())
@digits_option
@handle_errors
def classify(instance, digits):
    """Szub-, kritikus vagy szuperkritikus osztályozás"""
    q = load_qve(instance)
    diagnostics = validate_mbt(q)
    if diagnostics:
        raise InvalidInputError("; ".join(diagnostics), field='a/B')
    result = classify_qve(q)
    emit(result.to_dict(), digits)


@cli.command()
@click.argument('instance', type=click.Path())
@click.option('--method', type=click.Choice(['newton', 'depth']), default='newton')
@click.option('--tol', type=float, default=None, help='Maradék tűrés')
@click.option('--max-it', 'max_it', type=int, default=None, help='Maximális lépésszám')
@click.option('--trace', 'trace_path', type=click.Path(), default=None, help='Trace JSON kimenet')
@digits_option
@handle_errors
def solve(instance, method, tol, max_it, trace_path, digits):
    """A minimális nemnegatív megoldás kiszámítása"""
    q = load_qve(instance)
    report = QveSolver().solve(q, method, tol, max_it)
    if trace_path:
        write_json(trace_path, report.to_dict(include_trace=True))
    emit(report.to_dict(include_trace=False), digits)


@cli.group()
def bounds():
    """Perturbációs és a posteriori hibakorlátok"""


@bounds.command()
@click.argument('instance', type=click.Path())
@click.option('--structured', type=float, default=None, help='Strukturált perturbáció eta értéke')
@click.option('--random', 'random_eta', type=float, default=None, help='Véletlen perturbáció eta értéke')
@click.option('--delta-b', 'delta_b', type=click.Path(), default=None, help='dB mátrix JSON fájlból')
@seed_option
@digits_option
@handle_errors
def perturb(instance, structured, random_eta, delta_b, seed, digits):
    """Perturbációs korlát és a tényleges eltolódás"""
    chosen = [option for option in (structured, random_eta, delta_b) if option is not None]
    if len(chosen) != 1:
        raise InvalidInputError("give exactly one of --structured, --random, --delta-b", field='perturbation')

    q = load_qve(instance)
    analyzer = PerturbationAnalyzer()
    xstar = analyzer.solver.newton_iteration(q).x

    eta, used_seed = None, None
    if structured is not None:
        eta = structured
        dB, da = structured_perturbation(q, eta)
    elif random_eta is not None:
        eta, used_seed = random_eta, _default_seed(seed)
        dB, da = random_perturbation(q, eta, used_seed)
    else:
        dB = load_matrix(delta_b, q.B.shape)
        da = -apply_bilinear(dB, ones(q.n), ones(q.n))
        check_perturbed(q, da, dB)

    report = analyzer.analyze(q, xstar, dB, da, eta=eta, seed=used_seed)
    emit(report.to_dict(), digits)
    if not (report.cond1_ok and report.cond2_ok and report.bound_holds is not False):
        sys.exit(EXIT_CERTIFICATE_FAILURE)


@bounds.command(name='error')
@click.argument('instance', type=click.Path())
@click.option('--xhat', 'xhat_path', type=click.Path(), required=True, help='Közelítő megoldás JSON')
@digits_option
@handle_errors
def error_cmd(instance, xhat_path, digits):
    """A posteriori hibakorlát egy közelítő megoldásra"""
    q = load_qve(instance)
    xhat = load_vector(xhat_path, q.n, key='xhat')
    report = error_bound(q, xhat)
    emit(report.to_dict(), digits)
    if not report.certified:
        sys.exit(EXIT_CERTIFICATE_FAILURE)


@cli.command()
@click.argument('instance', type=click.Path())
@click.option('--trials', type=int, default=10000, help='Epizódok fázisonként')
@click.option('--max-pop', 'max_pop', type=int, default=10000, help='Cenzorálási populáció korlát')
@click.option('--schedule', type=click.Choice(SCHEDULES), default='generation')
@click.option('--jobs', type=int, default=None, help='Párhuzamos workerek száma')
@seed_option
@digits_option
@handle_errors
def simulate(instance, trials, max_pop, schedule, jobs, seed, digits):
    """Monte Carlo kihalási becslés"""
    q = load_qve(instance)
    config = {} if jobs is None else {'simulation_n_jobs': jobs}
    report = BranchingSimulator(config).estimate_extinction(q, trials, max_pop, _default_seed(seed), schedule)
    emit(report.to_dict(), digits)


@cli.command()
@click.option('--p', 'p', type=float, required=True, help='A család paramétere (p > 0)')
@click.option('--death-scale', type=click.Choice(['unit', 'milli']), default=None)
@click.option('--emit', 'emit_path', type=click.Path(), required=True, help='Kimeneti JSON')
@click.option('--rates', is_flag=True, help='Ráta formátum a QVE helyett')
@handle_errors
def family(p, death_scale, emit_path, rates):
    """A kilenc fázisú teszt család példányának kiírása"""
    m = paper_family(p, death_scale)
    data = m.to_dict() if rates else from_rates(m).to_dict()
    write_json(emit_path, data)
    click.echo(f"Wrote {emit_path}")


@cli.command()
@click.option('--table', 'which', type=click.IntRange(1, 3), required=True)
@click.option('--out', type=click.Path(), default=None, help='CSV kimenet (alapértelmezés: stdout)')
@click.option('--samples', type=int, default=1, help='Véletlen perturbációk cellánként (2. táblázat)')
@click.option('--iterate-rule', type=click.Choice(ITERATE_RULES), default='latest-inexact')
@click.option('--jobs', type=int, default=None, help='Párhuzamos workerek száma')
@seed_option
@handle_errors
def reproduce(which, out, samples, iterate_rule, jobs, seed):
    """A perturbációs és hibakorlát táblázatok újraszámolása CSV-be"""
    config = {} if jobs is None else {'simulation_n_jobs': jobs}
    sink = out if out else sys.stdout
    rows = TableReproducer(config).reproduce_table(which, sink, _default_seed(seed), samples, iterate_rule)
    if not all(row.certified for row in rows):
        sys.exit(EXIT_CERTIFICATE_FAILURE)


if __name__ == '__main__':
    cli()
