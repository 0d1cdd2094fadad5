"""
Branching Simulator - Monte Carlo becslés a kihalási valószínűségekre.

A szimuláció a beágyazott ugrólánc utóddeloszlásán fut (a, B valószínűségek):
minden egyed vagy utód nélkül meghal, vagy egy (j, k) párral helyettesítődik,
ahol j a gyermek, k a szülő új fázisa.
"""
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from config.settings import Settings
from core.exceptions import InvalidDistributionError, InvalidInputError
from core.qve_model import Qve
from utils.logger import setup_logger

logger = setup_logger('branching_simulator')

SCHEDULES = ('generation', 'fifo', 'lifo')


@dataclass(frozen=True)
class OffspringDistribution:
    """
    Egy fázis utóddeloszlása.

    Attributes:
        phase: A szülő fázisa
        outcomes: Kimenetelek; None a halál, (j, k) a születés
        probabilities: A kimenetelek valószínűségei (összeg 1)
        children: Kimenetelenként az új egyedek fázisonkénti száma
        mass_deviation: |eredeti tömeg - 1| az újranormálás előtt
    """
    phase: int
    outcomes: Tuple[Optional[Tuple[int, int]], ...]
    probabilities: np.ndarray
    children: np.ndarray
    mass_deviation: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        data = {}
        for outcome, probability in zip(self.outcomes, self.probabilities):
            key = 'Death' if outcome is None else f"Birth({outcome[0]},{outcome[1]})"
            data[key] = float(probability)
        return data


@dataclass
class SimulationReport:
    """
    Monte Carlo eredmény.

    Attributes:
        estimates: Kihalási gyakoriság kezdő fázisonként
        stderr: Binomiális standard hibák
        trials: Epizódok száma fázisonként
        censored: Cenzorált (túlélőnek számított) epizódok összesen
        seed: A mag
        truncated: A cenzoráltak közül a lépés- vagy generációkorlátba ütközők
    """
    estimates: np.ndarray
    stderr: np.ndarray
    trials: int
    censored: int
    seed: int
    censored_by_phase: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    truncated: int = 0
    schedule: str = 'generation'
    max_pop: int = 0

    def to_dict(self) -> Dict:
        return {
            'estimates': self.estimates.tolist(),
            'stderr': self.stderr.tolist(),
            'trials': self.trials,
            'censored': self.censored,
            'censored_by_phase': self.censored_by_phase.tolist(),
            'truncated': self.truncated,
            'seed': self.seed,
            'schedule': self.schedule,
            'max_pop': self.max_pop,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def offspring_distribution(q: Qve, phase: int) -> OffspringDistribution:
    """
    A phase fázisú egyed kimeneteleinek kategorikus eloszlása.

    Args:
        q: Érvényes QVE
        phase: Nulla alapú fázis index

    Returns:
        OffspringDistribution: Halál a[i], Birth(j,k) B[i][n*j+k] valószínűséggel
    """
    n = q.n
    if not 0 <= phase < n:
        raise InvalidInputError(f"phase must be in [0, {n}), got {phase}", field='phase')

    settings = Settings.get_system_settings()
    columns = np.flatnonzero(q.B[phase] > 0)
    probabilities = np.concatenate([[q.a[phase]], q.B[phase, columns]])

    mass = float(probabilities.sum())
    deviation = abs(mass - 1.0)
    if deviation > settings['distribution_reject_tolerance']:
        raise InvalidDistributionError(f"phase {phase}: outcome mass {mass:.12g} deviates from 1 by {deviation:.3e}")
    if deviation > settings['distribution_renormalize_tolerance']:
        logger.warning(f"Phase {phase}: renormalized outcome mass (deviation {deviation:.3e})")
    probabilities = probabilities / mass

    outcomes = [None] + [(int(c // n), int(c % n)) for c in columns]
    children = np.zeros((len(outcomes), n), dtype=np.int64)
    for row, outcome in enumerate(outcomes[1:], start=1):
        children[row, outcome[0]] += 1
        children[row, outcome[1]] += 1

    return OffspringDistribution(
        phase=phase,
        outcomes=tuple(outcomes),
        probabilities=probabilities,
        children=children,
        mass_deviation=deviation,
    )


def _generation_block(dists: List[OffspringDistribution], start: int, size: int, max_pop: int,
                      max_generations: int, rng: np.random.Generator) -> Tuple[int, int, int]:
    """
    Generációnként szinkron szimuláció: egy generáció minden egyede egyszerre lép.

    Returns:
        tuple: (kihalt, cenzorált, ebből korlátba ütközött epizódok)
    """
    n = len(dists)
    counts = np.zeros((size, n), dtype=np.int64)
    counts[:, start] = 1
    extinct = 0
    censored = 0

    for _ in range(max_generations):
        if counts.shape[0] == 0:
            break
        following = np.zeros_like(counts)
        for phase, dist in enumerate(dists):
            column = counts[:, phase]
            if not column.any():
                continue
            draws = rng.multinomial(column, dist.probabilities)
            following += draws @ dist.children

        totals = following.sum(axis=1)
        died = totals == 0
        overflow = totals > max_pop
        extinct += int(died.sum())
        censored += int(overflow.sum())
        counts = following[~(died | overflow)]

    truncated = counts.shape[0]
    return extinct, censored + truncated, truncated


class _PhaseStream:
    """Egy fázis kimeneteleinek rögzített sorozata, darabokban húzva"""

    def __init__(self, rng: np.random.Generator, probabilities: np.ndarray, chunk: int = 64):
        self.rng = rng
        self.probabilities = probabilities
        self.chunk = chunk
        self.buffer = np.empty(0, dtype=np.int64)
        self.position = 0

    def next(self) -> int:
        if self.position == self.buffer.size:
            self.buffer = self.rng.choice(self.probabilities.size, size=self.chunk, p=self.probabilities)
            self.position = 0
        value = int(self.buffer[self.position])
        self.position += 1
        return value


def _deque_block(dists: List[OffspringDistribution], start: int, size: int, max_pop: int, max_steps: int,
                 seed: int, block: int, lifo: bool) -> Tuple[int, int, int]:
    """
    Egyedenkénti szimuláció explicit élő multihalmazzal (FIFO vagy LIFO sorrend).

    Minden epizód fázisonként saját kimenetel sorozatot kap, így a kihalás
    eseménye nem függ a feldolgozási sorrendtől.

    Returns:
        tuple: (kihalt, cenzorált, ebből korlátba ütközött epizódok)
    """
    extinct = 0
    censored = 0
    truncated = 0

    for episode in range(size):
        streams: Dict[int, _PhaseStream] = {}
        live = deque([start])
        outcome_reached = False

        for _ in range(max_steps):
            phase = live.pop() if lifo else live.popleft()
            if phase not in streams:
                rng = np.random.default_rng([seed, start, block, episode, phase])
                streams[phase] = _PhaseStream(rng, dists[phase].probabilities)
            outcome = dists[phase].outcomes[streams[phase].next()]
            if outcome is not None:
                live.append(outcome[0])
                live.append(outcome[1])

            if not live:
                extinct += 1
                outcome_reached = True
                break
            if len(live) > max_pop:
                censored += 1
                outcome_reached = True
                break

        if not outcome_reached:
            censored += 1
            truncated += 1

    return extinct, censored, truncated


class BranchingSimulator:
    """
    Kihalási valószínűségek Monte Carlo becslése blokkokra bontott, párhuzamos futtatással.

    A blokkok véletlen folyama a (seed, kezdő fázis, blokk index) hármasból
    származik, így az eredmény független a worker számtól.
    """

    def __init__(self, config: Optional[Dict] = None):
        """
        Inicializálja a szimulátort.

        Args:
            config: Opcionális felülírások (simulation_block_size, simulation_max_generations,
                simulation_n_jobs)
        """
        self.config = config or {}
        self.block_size = int(Settings.resolve(self.config, 'simulation_block_size'))
        self.max_generations = int(Settings.resolve(self.config, 'simulation_max_generations'))
        self.n_jobs = int(Settings.resolve(self.config, 'simulation_n_jobs'))

        logger.info("BranchingSimulator initialized")

    def _run_block(self, dists: List[OffspringDistribution], start: int, block: int, size: int,
                   max_pop: int, seed: int, schedule: str) -> Tuple[int, int, int, int]:
        if schedule == 'generation':
            rng = np.random.default_rng([seed, start, block])
            extinct, censored, truncated = _generation_block(dists, start, size, max_pop, self.max_generations, rng)
        else:
            max_steps = self.max_generations * max_pop
            extinct, censored, truncated = _deque_block(dists, start, size, max_pop, max_steps, seed, block,
                                             lifo=(schedule == 'lifo'))
        return start, extinct, censored, truncated

    def estimate_extinction(self, q: Qve, trials: int, max_pop: int, seed: int,
                            schedule: str = 'generation') -> SimulationReport:
        """
        Kihalási gyakoriság becslése minden kezdő fázisra.

        Args:
            q: Érvényes QVE
            trials: Epizódok száma kezdő fázisonként
            max_pop: Élő egyedszám korlát; túllépéskor az epizód túlélőnek számít
            seed: A mag
            schedule: 'generation', 'fifo' vagy 'lifo'

        Returns:
            SimulationReport: Becslések, standard hibák, cenzorálás
        """
        if trials < 1:
            raise InvalidInputError(f"trials must be at least 1, got {trials}", field='trials')
        if max_pop < 1:
            raise InvalidInputError(f"max_pop must be at least 1, got {max_pop}", field='max_pop')
        if schedule not in SCHEDULES:
            raise InvalidInputError(f"unknown schedule '{schedule}'", field='schedule')

        dists = [offspring_distribution(q, phase) for phase in range(q.n)]

        tasks = []
        for start in range(q.n):
            for block, offset in enumerate(range(0, trials, self.block_size)):
                size = min(self.block_size, trials - offset)
                tasks.append((start, block, size))

        logger.info(f"Simulating {trials} trials per phase for {q.n} phases "
                    f"({len(tasks)} blocks, schedule={schedule}, n_jobs={self.n_jobs})")

        results = Parallel(n_jobs=self.n_jobs)(
            delayed(self._run_block)(dists, start, block, size, max_pop, seed, schedule)
            for start, block, size in tasks
        )

        extinct = np.zeros(q.n, dtype=np.int64)
        censored = np.zeros(q.n, dtype=np.int64)
        truncated = 0
        for start, block_extinct, block_censored, block_truncated in results:
            extinct[start] += block_extinct
            censored[start] += block_censored
            truncated += block_truncated

        estimates = extinct / trials
        stderr = np.sqrt(estimates * (1.0 - estimates) / trials)

        total_censored = int(censored.sum())
        if total_censored:
            logger.info(f"Censored {total_censored} of {trials * q.n} episodes (max_pop={max_pop})")

        return SimulationReport(
            estimates=estimates,
            stderr=stderr,
            trials=trials,
            censored=total_censored,
            seed=seed,
            censored_by_phase=censored,
            truncated=truncated,
            schedule=schedule,
            max_pop=max_pop,
        )


def estimate_extinction(q: Qve, trials: int, max_pop: int, seed: int,
                        schedule: str = 'generation') -> SimulationReport:
    return BranchingSimulator().estimate_extinction(q, trials, max_pop, seed, schedule)
