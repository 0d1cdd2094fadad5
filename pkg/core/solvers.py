"""
Solvers - A QVE minimális nemnegatív megoldása mélységi és Newton iterációval.

Minden megoldó a teljes iterált sorozatot (trace) megőrzi, a hibakorlát
kísérletek ezekből olvasnak.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from config.settings import Settings
from core.exceptions import InvalidInputError, NoConvergenceError, SingularMatrixError
from core.linalg_kernel import (
    apply_bilinear,
    as_vector,
    inf_norm,
    inf_norm_inverse,
    inverse,
    mixed_operator,
    solve_linear,
    spectral_radius,
)
from core.qve_model import Qve
from utils.logger import setup_logger

logger = setup_logger('solvers')


class Method(str, Enum):
    DEPTH = 'Depth'
    NEWTON = 'Newton'


@dataclass
class SolveReport:
    """
    Egy megoldás eredménye és trace-e.

    Attributes:
        x: Utolsó iterált
        iterates: Összes iterált, x0-val kezdve
        residual_norms: ||r|| minden iteráltnál
        converged: Teljesült-e a leállási feltétel
        method: Depth vagy Newton
        tol: A kért tűrés
        ell: ||L^-1|| az utolsó iteráltnál (csak Newton)
    """
    x: np.ndarray
    iterates: List[np.ndarray] = field(default_factory=list)
    residual_norms: List[float] = field(default_factory=list)
    converged: bool = False
    method: Method = Method.NEWTON
    tol: float = 0.0
    ell: Optional[float] = None

    @property
    def iterations(self) -> int:
        return max(len(self.iterates) - 1, 0)

    def to_dict(self, include_trace: bool = True) -> Dict:
        data = {
            'method': self.method.value,
            'converged': self.converged,
            'tol': self.tol,
            'iterations': self.iterations,
            'x': self.x.tolist(),
            'residual_norm': self.residual_norms[-1] if self.residual_norms else None,
            'ell': self.ell,
        }
        if include_trace:
            data['iterates'] = [x.tolist() for x in self.iterates]
            data['residual_norms'] = list(self.residual_norms)
        return data


def residual(q: Qve, xhat: np.ndarray) -> np.ndarray:
    """
    Az r = x^ - a - B(x^⊗x^) maradékvektor.

    Args:
        q: A QVE
        xhat: Közelítő megoldás

    Returns:
        np.ndarray: r
    """
    x = as_vector(xhat, 'xhat')
    return x - q.a - apply_bilinear(q.B, x, x)


def stability_certificate(q: Qve, x: np.ndarray) -> Tuple[float, float]:
    """
    A megoldásbeli stabilitás ellenőrzése.

    Args:
        q: A QVE
        x: A (közelítő) minimális megoldás

    Returns:
        tuple: (rho(B(x⊗I + I⊗x)), L^-1 legkisebb eleme)
    """
    M = mixed_operator(q.B, x, x)
    rho = spectral_radius(M)
    min_entry = float(np.min(inverse(np.eye(q.n) - M)))
    return rho, min_entry


class QveSolver:
    """
    Fixpont megoldók a QVE-hez.

    A tűrés és a lépéslimit a konfigurációból, ennek hiányában a rendszer
    beállításokból jön.
    """

    def __init__(self, config: Optional[Dict] = None):
        """
        Inicializálja a megoldót.

        Args:
            config: Opcionális felülírások (solver_tolerance, newton_max_iterations,
                depth_max_iterations, near_singular_ratio, near_singular_polish_steps)
        """
        self.config = config or {}
        self.tol = Settings.resolve(self.config, 'solver_tolerance')
        self.newton_max_iterations = int(Settings.resolve(self.config, 'newton_max_iterations'))
        self.depth_max_iterations = int(Settings.resolve(self.config, 'depth_max_iterations'))
        self.near_singular_ratio = Settings.resolve(self.config, 'near_singular_ratio')
        self.near_singular_polish_steps = int(Settings.resolve(self.config, 'near_singular_polish_steps'))

        logger.info("QveSolver initialized")

    def depth_iteration(self, q: Qve, tol: Optional[float] = None,
                        maxit: Optional[int] = None) -> SolveReport:
        """
        Mélységi (funkcionális) iteráció: x0 = 0, x_{k+1} = a + B(x_k⊗x_k).

        Args:
            q: A QVE
            tol: Tűrés a maradék végtelen normájára
            maxit: Maximális lépésszám

        Returns:
            SolveReport: A konvergált trace
        """
        tol = self.tol if tol is None else tol
        maxit = self.depth_max_iterations if maxit is None else int(maxit)
        if tol <= 0:
            raise InvalidInputError(f"tol must be positive, got {tol}", field='tol')

        x = np.zeros(q.n)
        report = SolveReport(x=x, method=Method.DEPTH, tol=tol)

        for k in range(maxit + 1):
            # A maradék éppen x_k - x_{k+1}, így a következő iterált ingyen adódik
            following = q.a + apply_bilinear(q.B, x, x)
            gamma = inf_norm(x - following)
            report.iterates.append(x)
            report.residual_norms.append(gamma)
            report.x = x

            if gamma <= tol:
                report.converged = True
                logger.info(f"Depth iteration converged in {k} steps (residual {gamma:.3e})")
                return report

            x = following

        logger.warning(f"Depth iteration stopped after {maxit} steps (residual {report.residual_norms[-1]:.3e})")
        raise NoConvergenceError(f"depth iteration did not converge in {maxit} iterations", report=report)

    def newton_iteration(self, q: Qve, tol: Optional[float] = None, maxit: Optional[int] = None,
                         x0: Optional[np.ndarray] = None) -> SolveReport:
        """
        Newton iteráció: L_k δ = -r(x_k), x_{k+1} = x_k + δ.

        Args:
            q: A QVE
            tol: Tűrés a maradék végtelen normájára
            maxit: Maximális Newton lépésszám
            x0: Kezdővektor, 0 <= x0 <= a (alapértelmezés 0)

        Returns:
            SolveReport: A konvergált trace, ell = ||L^-1|| a határértékben
        """
        tol = self.tol if tol is None else tol
        maxit = self.newton_max_iterations if maxit is None else int(maxit)
        if tol <= 0:
            raise InvalidInputError(f"tol must be positive, got {tol}", field='tol')

        if x0 is None:
            x = np.zeros(q.n)
        else:
            x = as_vector(x0, 'x0')
            if x.shape != (q.n,):
                raise InvalidInputError(f"x0 must have length {q.n}", field='x0')
            if np.any(x < 0) or np.any(x > q.a):
                raise InvalidInputError("x0 must satisfy 0 <= x0 <= a", field='x0')

        report = SolveReport(x=x, method=Method.NEWTON, tol=tol)
        identity = np.eye(q.n)

        for k in range(maxit + 1):
            r = residual(q, x)
            gamma = inf_norm(r)
            report.iterates.append(x)
            report.residual_norms.append(gamma)
            report.x = x
            logger.debug(f"Newton step {k}: residual {gamma:.3e}")

            L = identity - mixed_operator(q.B, x, x)
            if gamma <= tol:
                report.converged = True
                self._check_limit(q, L, report)
                logger.info(f"Newton iteration converged in {k} steps (residual {gamma:.3e}, ell {report.ell:.4g})")
                return report

            if k == maxit:
                break

            try:
                delta = solve_linear(L, -r)
            except SingularMatrixError as e:
                logger.warning(f"Singular Jacobian at Newton step {k}: {e}")
                raise SingularMatrixError(f"singular L at Newton step {k}: {e}", report=report) from e
            x = x + delta

        logger.warning(f"Newton iteration stopped after {maxit} steps (residual {report.residual_norms[-1]:.3e})")
        raise NoConvergenceError(f"Newton iteration did not converge in {maxit} iterations", report=report)

    def _check_limit(self, q: Qve, L: np.ndarray, report: SolveReport):
        """
        A határérték közel szinguláris L-jének felismerése (kettős gyök, kritikus eset).

        A 4*l^2*||B||*gamma hányados egyszerű gyöknél a Newton lépésekkel
        négyzetesen csökken, kettős gyöknél (lineáris konvergencia) nagyjából
        állandó marad. Ha a konvergált iteráltnál a küszöb fölött van, a
        megoldót a trace-en kívül tovább léptetjük, és csak akkor jelzünk
        kritikus bemenetet, ha a hányados a kerekítési szintig sem esik le.

        Args:
            q: A QVE
            L: Stabilitási mátrix az utolsó iteráltnál
            report: A konvergált riport, ide kerül ell
        """
        try:
            report.ell = inf_norm_inverse(L)
        except SingularMatrixError as e:
            raise SingularMatrixError(f"singular L at the Newton limit: {e}", report=report) from e

        norm_b = inf_norm(q.B)
        ratio = 4.0 * report.ell ** 2 * norm_b * report.residual_norms[-1]
        if ratio <= self.near_singular_ratio:
            return

        x = report.x
        gamma = max(report.residual_norms[-1], self._rounding_floor(q, x))
        identity = np.eye(q.n)
        for step in range(self.near_singular_polish_steps):
            try:
                x = x + solve_linear(identity - mixed_operator(q.B, x, x), -residual(q, x))
                ell = inf_norm_inverse(identity - mixed_operator(q.B, x, x))
            except SingularMatrixError as e:
                raise SingularMatrixError(f"singular L while refining the Newton limit: {e}",
                                          report=report) from e

            next_gamma = max(inf_norm(residual(q, x)), self._rounding_floor(q, x))
            ratio = 4.0 * ell ** 2 * norm_b * next_gamma
            if ratio <= self.near_singular_ratio:
                logger.debug(f"Newton limit accepted after {step + 1} refinement steps (ratio {ratio:.3e})")
                return
            if next_gamma >= gamma:
                break
            gamma = next_gamma

        logger.warning(f"Near-singular L at the Newton limit (4 l^2 ||B|| gamma = {ratio:.3e})")
        raise SingularMatrixError(
            f"near-singular L at the limit: 4*l^2*||B||*gamma = {ratio:.3e} exceeds "
            f"{self.near_singular_ratio:g}; the input looks critical",
            report=report,
        )

    @staticmethod
    def _rounding_floor(q: Qve, x: np.ndarray) -> float:
        """A maradék kerekítési szintje x-nél, néhány ulp tartalékkal"""
        x_norm = inf_norm(x)
        return float(8.0 * np.finfo(float).eps * (x_norm + inf_norm(q.a) + inf_norm(q.B) * x_norm ** 2))

    def solve(self, q: Qve, method: str = 'newton', tol: Optional[float] = None,
              maxit: Optional[int] = None, x0: Optional[np.ndarray] = None) -> SolveReport:
        """
        Megoldó kiválasztása név alapján.

        Args:
            q: A QVE
            method: 'newton' vagy 'depth'
            tol: Tűrés
            maxit: Lépéslimit
            x0: Newton kezdővektor

        Returns:
            SolveReport: Az eredmény
        """
        name = method.lower()
        if name == 'newton':
            return self.newton_iteration(q, tol, maxit, x0)
        if name == 'depth':
            if x0 is not None:
                raise InvalidInputError("depth iteration always starts from 0", field='x0')
            return self.depth_iteration(q, tol, maxit)
        raise InvalidInputError(f"unknown method '{method}'", field='method')


def depth_iteration(q: Qve, tol: Optional[float] = None, maxit: Optional[int] = None) -> SolveReport:
    return QveSolver().depth_iteration(q, tol, maxit)


def newton_iteration(q: Qve, tol: Optional[float] = None, maxit: Optional[int] = None,
                     x0: Optional[np.ndarray] = None) -> SolveReport:
    return QveSolver().newton_iteration(q, tol, maxit, x0)
