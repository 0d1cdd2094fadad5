"""
QVE Model - QVE-k felépítése, ellenőrzése és osztályozása, MBT ráta adatokból is.
"""
import json
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np

from config import family_config
from config.settings import Settings
from core.exceptions import InvalidDimensionError, InvalidInputError, InvalidRatesError
from core.linalg_kernel import (
    as_matrix,
    as_vector,
    inf_norm,
    is_irreducible,
    mixed_operator,
    ones,
    solve_linear,
    spectral_radius,
)
from utils.logger import setup_logger

logger = setup_logger('qve_model')


class Regime(str, Enum):
    SUBCRITICAL = 'Subcritical'
    CRITICAL = 'Critical'
    SUPERCRITICAL = 'Supercritical'


@dataclass(frozen=True)
class Qve:
    """
    Az x = a + B(x⊗x) egyenlet együtthatói.

    Attributes:
        a: Utód nélküli halálozás valószínűségei (n)
        B: Születési események valószínűségei (n x n^2), oszlop c = n*j + k
    """
    a: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        a = as_vector(np.array(self.a, dtype=float), 'a')
        B = as_matrix(np.array(self.B, dtype=float), 'B')
        n = a.size
        if B.shape != (n, n * n):
            raise InvalidDimensionError(f"B must have shape ({n}, {n * n}), got {B.shape}")
        a.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'B', B)

    @property
    def n(self) -> int:
        return int(self.a.size)

    def perturbed(self, da: np.ndarray, dB: np.ndarray) -> 'Qve':
        """Az (a + da, B + dB) QVE"""
        return Qve(self.a + np.asarray(da, dtype=float), self.B + np.asarray(dB, dtype=float))

    def to_dict(self) -> Dict:
        return {'n': self.n, 'a': self.a.tolist(), 'B': self.B.tolist()}

    @classmethod
    def from_dict(cls, data: Dict) -> 'Qve':
        """
        QVE beolvasása a JSON példány formátumból.

        Args:
            data: {"n": int, "a": [...], "B": [[...]]}

        Returns:
            Qve: A példány
        """
        for key in ('n', 'a', 'B'):
            if key not in data:
                raise InvalidInputError(f"missing field '{key}'", field=key)
        try:
            n = int(data['n'])
            a = np.asarray(data['a'], dtype=float)
            B = np.asarray(data['B'], dtype=float)
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"malformed instance: {e}") from e
        if a.shape != (n,):
            raise InvalidInputError(f"field 'a' must have length n={n}", field='a')
        if B.shape != (n, n * n):
            raise InvalidInputError(f"field 'B' must be {n} x {n * n}", field='B')
        return cls(a, B)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> 'Qve':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"malformed JSON: {e}") from e
        return cls.from_dict(data)


@dataclass(frozen=True)
class MbtRates:
    """
    MBT ráta adatok.

    Attributes:
        D0: Rejtett átmenetek generátor része (n x n)
        D1_diag: Születési ráták (D1 átlója)
        death: Halálozási ráták
        P0: Szülő fázisa születés után (sztochasztikus sorok)
        P1: Gyermek fázisa (sztochasztikus sorok)
    """
    D0: np.ndarray
    D1_diag: np.ndarray
    death: np.ndarray
    P0: np.ndarray
    P1: np.ndarray

    def __post_init__(self):
        D0 = as_matrix(np.array(self.D0, dtype=float), 'D0')
        n = D0.shape[0]
        fields = {
            'D0': D0,
            'D1_diag': as_vector(np.array(self.D1_diag, dtype=float), 'D1_diag'),
            'death': as_vector(np.array(self.death, dtype=float), 'death'),
            'P0': as_matrix(np.array(self.P0, dtype=float), 'P0'),
            'P1': as_matrix(np.array(self.P1, dtype=float), 'P1'),
        }
        for name, value in fields.items():
            expected = (n,) if value.ndim == 1 else (n, n)
            if value.shape != expected:
                raise InvalidDimensionError(f"{name} must have shape {expected}, got {value.shape}")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return int(self.D0.shape[0])

    def check(self, tol: Optional[float] = None) -> List[str]:
        """
        Ráta invariánsok ellenőrzése.

        Args:
            tol: Tűrés a sorösszegekhez

        Returns:
            list: Hibaüzenetek (üres, ha minden rendben)
        """
        if tol is None:
            tol = Settings.get_setting('rates_tolerance')
        problems = []
        row_sum = self.D0.sum(axis=1) + self.D1_diag + self.death
        if inf_norm(row_sum) > tol:
            problems.append(f"D0e + D1e + death != 0 (max deviation {inf_norm(row_sum):.3e})")
        off_diagonal = self.D0 - np.diag(np.diag(self.D0))
        if np.any(off_diagonal < 0) or np.any(np.diag(self.D0) > 0):
            problems.append("D0 must have nonnegative off-diagonal and nonpositive diagonal")
        if np.any(self.D1_diag < 0) or np.any(self.death < 0):
            problems.append("birth and death rates must be nonnegative")
        for name in ('P0', 'P1'):
            P = getattr(self, name)
            if np.any(P < 0):
                problems.append(f"{name} has negative entries")
            deviation = inf_norm(P.sum(axis=1) - 1.0)
            if deviation > tol:
                problems.append(f"{name} rows do not sum to 1 (max deviation {deviation:.3e})")
        return problems

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'D0': self.D0.tolist(),
            'D1_diag': self.D1_diag.tolist(),
            'death': self.death.tolist(),
            'P0': self.P0.tolist(),
            'P1': self.P1.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'MbtRates':
        """
        Ráta adatok beolvasása a JSON ráta formátumból.

        Args:
            data: {"n", "D0", "D1_diag", "death", "P0", "P1"}

        Returns:
            MbtRates: A ráták
        """
        for key in ('n', 'D0', 'D1_diag', 'death', 'P0', 'P1'):
            if key not in data:
                raise InvalidInputError(f"missing field '{key}'", field=key)
        try:
            rates = cls(data['D0'], data['D1_diag'], data['death'], data['P0'], data['P1'])
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"malformed rates: {e}") from e
        if rates.n != int(data['n']):
            raise InvalidInputError(f"field 'n'={data['n']} does not match D0", field='n')
        return rates


@dataclass(frozen=True)
class Classification:
    rho_R: float
    regime: Regime
    positive_regular: bool

    @property
    def is_spr(self) -> bool:
        """Szuperkritikus és pozitív reguláris (P3)"""
        return self.regime == Regime.SUPERCRITICAL and self.positive_regular

    def to_dict(self) -> Dict:
        return {'rho_R': self.rho_R, 'regime': self.regime.value, 'positive_regular': self.positive_regular}


def validate_mbt(q: Qve, tol: Optional[float] = None) -> List[str]:
    """
    P1 (elemek [0,1]-ben, pontosan) és P2 (a + B(e⊗e) = e, tol-on belül) ellenőrzése.

    Args:
        q: A QVE
        tol: P2 tűrés

    Returns:
        list: Diagnosztikák, sértett tulajdonságonként egy, indexszel és nagysággal
    """
    if tol is None:
        tol = Settings.get_setting('validation_tolerance')
    diagnostics = []

    for name, values in (('a', q.a), ('B', q.B)):
        below = values < 0
        above = values > 1
        if np.any(below) or np.any(above):
            worst = np.unravel_index(np.argmax(np.maximum(-values, values - 1)), values.shape)
            magnitude = float(max(-values[worst], values[worst] - 1))
            diagnostics.append(f"P1 violated: {name}{list(worst)} outside [0,1] by {magnitude:.3e}")

    deviation = q.a + q.B.sum(axis=1) - 1.0
    worst = int(np.argmax(np.abs(deviation)))
    if abs(deviation[worst]) > tol:
        diagnostics.append(f"P2 violated: row {worst} deviates by {abs(deviation[worst]):.3e}")

    return diagnostics


def offspring_matrix(q: Qve) -> np.ndarray:
    """
    Az R = B(I⊗e + e⊗I) várható utódszám mátrix.

    Args:
        q: A QVE

    Returns:
        np.ndarray: n x n nemnegatív mátrix
    """
    e = ones(q.n)
    return mixed_operator(q.B, e, e)


def classify(q: Qve, crit_tol: Optional[float] = None) -> Classification:
    """
    Szub-, kritikus vagy szuperkritikus osztályozás rho(R) alapján, és pozitív regularitás.

    Args:
        q: A QVE
        crit_tol: |rho(R) - 1| <= crit_tol esetén kritikus

    Returns:
        Classification: Az osztályozás
    """
    if crit_tol is None:
        crit_tol = Settings.get_setting('critical_tolerance')
    R = offspring_matrix(q)
    rho = spectral_radius(R)
    if abs(rho - 1.0) <= crit_tol:
        regime = Regime.CRITICAL
    elif rho > 1.0:
        regime = Regime.SUPERCRITICAL
    else:
        regime = Regime.SUBCRITICAL
    result = Classification(rho_R=rho, regime=regime, positive_regular=is_irreducible(R))
    logger.debug(f"classify: rho(R)={rho:.12g} regime={regime.value} positive_regular={result.positive_regular}")
    return result


def _clamp_unit_interval(values: np.ndarray, name: str, clamp_tol: float, negative_tol: float) -> np.ndarray:
    if np.any(values < -negative_tol):
        raise InvalidRatesError(f"{name} has negative entries down to {float(values.min()):.3e}")
    clamped = np.clip(values, 0.0, 1.0)
    moved = np.abs(clamped - values)
    if np.any(moved > 0):
        if float(moved.max()) > clamp_tol:
            logger.warning(f"{name}: clamped entries by up to {float(moved.max()):.3e}")
        else:
            logger.debug(f"{name}: clamped rounding residue {float(moved.max()):.3e}")
    return clamped


def birth_rate_tensor(m: MbtRates) -> np.ndarray:
    """
    Rrate[i][n*j + k] = D1[i][i] * P1[i][j] * P0[i][k].

    Args:
        m: Ráta adatok

    Returns:
        np.ndarray: n x n^2 mátrix
    """
    n = m.n
    tensor = m.D1_diag[:, None, None] * m.P1[:, :, None] * m.P0[:, None, :]
    return tensor.reshape(n, n * n)


def from_rates(m: MbtRates) -> Qve:
    """
    QVE felépítése: a = -D0^-1 death, B = -D0^-1 Rrate.

    Args:
        m: Ráta adatok (invariánsok teljesülnek, D0 nemszinguláris)

    Returns:
        Qve: A QVE, amely P2-t a lineáris megoldás pontosságán belül teljesíti
    """
    settings = Settings.get_system_settings()
    problems = m.check(settings['rates_tolerance'])
    if problems:
        raise InvalidRatesError("; ".join(problems))

    rhs = np.column_stack([-m.death, -birth_rate_tensor(m)])
    solution = solve_linear(m.D0, rhs)

    clamp_tol = settings['clamp_tolerance']
    negative_tol = settings['negative_entry_tolerance']
    a = _clamp_unit_interval(solution[:, 0], 'a', clamp_tol, negative_tol)
    B = _clamp_unit_interval(solution[:, 1:], 'B', clamp_tol, negative_tol)
    return Qve(a, B)


def paper_family(p: float, death_scale: Optional[str] = None) -> MbtRates:
    """
    A kilenc fázisú, p paraméterű teszt család ráta adatai.

    Args:
        p: Születési ráta paraméter az első négy fázisban (p > 0)
        death_scale: 'unit' vagy 'milli' (alapértelmezés: a kanonikus skála)

    Returns:
        MbtRates: A ráták, D0 átlója a nulla sorösszeg feltételből
    """
    if p <= 0:
        raise InvalidInputError(f"p must be positive, got {p}", field='p')
    if death_scale is None:
        death_scale = family_config.CANONICAL_DEATH_SCALE
    if death_scale not in family_config.DEATH_SCALES:
        raise InvalidInputError(f"unknown death scale '{death_scale}'", field='death_scale')

    n = family_config.N_PHASES
    D1_diag = family_config.D1_SCALE * np.array(
        [p if value is None else value for value in family_config.D1_PATTERN], dtype=float
    )
    death = np.zeros(n)
    death[family_config.DEATH_PHASE] = family_config.DEATH_SCALES[death_scale]

    D0 = family_config.D0_SCALE * np.array(family_config.D0_OFF_DIAGONAL, dtype=float)
    np.fill_diagonal(D0, -(D0.sum(axis=1) + D1_diag + death))

    return MbtRates(D0, D1_diag, death, np.array(family_config.P0), np.array(family_config.P1))


def permute(q: Qve, perm: Sequence[int]) -> Qve:
    """
    Fázisok átcímkézése: a, B sorai és B oszlopainak mindkét Kronecker tényezője.

    Args:
        q: A QVE
        perm: Új sorrend, az új i. fázis a régi perm[i]

    Returns:
        Qve: Az átcímkézett QVE
    """
    perm = np.asarray(perm, dtype=int)
    n = q.n
    if sorted(perm.tolist()) != list(range(n)):
        raise InvalidInputError("perm must be a permutation of range(n)", field='perm')
    B3 = q.B.reshape(n, n, n)[np.ix_(perm, perm, perm)]
    return Qve(q.a[perm], B3.reshape(n, n * n))
