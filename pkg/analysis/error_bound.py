"""
Error Bound - Maradék alapú a posteriori hibakorlát közelítő megoldásokhoz.
"""
import json
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import numpy as np

from config.settings import Settings
from core.linalg_kernel import as_vector, inf_norm, inf_norm_inverse, mixed_operator, ones, spectral_radius
from core.qve_model import Qve
from core.solvers import SolveReport, residual
from utils.logger import setup_logger

logger = setup_logger('error_bound')


@dataclass
class ErrorBoundReport:
    """
    Hibakorlát riport egy közelítő megoldáshoz.

    Attributes:
        gamma: ||r||
        ell_hat: ||L^^-1||
        b_norm: ||B||
        con1_ok: 0 <= x^ < e és rho(B(x^⊗I + I⊗x^)) < 1
        con21_ok: 1 - 4 ell^2 b gamma >= 0
        con22_ok: sqrt(1 - 4 ell^2 b gamma) > max{1 - 2 ell b (1 - ||e - x^||), 1 - 2 ell b (1 - ||x^||)}
        omega_star: A tanúsított korlát, csak ha mindhárom feltétel teljesül
        estimate: ell^ * gamma
        true_error: ||x^ - x*||, ha x* ismert
    """
    gamma: float
    ell_hat: float
    b_norm: float
    con1_ok: bool
    con21_ok: bool
    con22_ok: bool
    omega_star: Optional[float]
    estimate: float
    true_error: Optional[float] = None
    iteration: Optional[int] = None

    @property
    def certified(self) -> bool:
        return self.omega_star is not None

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['certified'] = self.certified
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def omega_star(gamma: float, ell_hat: float, b: float) -> Optional[float]:
    """
    A hibakorlát racionalizált alakja; None, ha a diszkrimináns negatív.

    Args:
        gamma: ||r||
        ell_hat: ||L^^-1||
        b: ||B||

    Returns:
        float: 2 ell^ gamma / (1 + sqrt(1 - 4 ell^^2 b gamma)), vagy None
    """
    disc = _discriminant(gamma, ell_hat, b)
    if disc is None:
        return None
    return 2.0 * ell_hat * gamma / (1.0 + math.sqrt(disc))


def _discriminant(gamma: float, ell_hat: float, b: float) -> Optional[float]:
    disc = 1.0 - 4.0 * ell_hat ** 2 * b * gamma
    clamp = Settings.get_setting('discriminant_clamp')
    if -clamp <= disc < 0:
        return 0.0
    return disc if disc >= 0 else None


def error_bound(q: Qve, xhat: np.ndarray) -> ErrorBoundReport:
    """
    omega* = 2 ell^ gamma / (1 + sqrt(1 - 4 ell^^2 b gamma)), ha a feltételek teljesülnek.

    Args:
        q: A QVE
        xhat: Közelítő megoldás

    Returns:
        ErrorBoundReport: A riport; feltétel hiba esetén omega_star None
    """
    x = as_vector(xhat, 'xhat')
    gamma = inf_norm(residual(q, x))
    M = mixed_operator(q.B, x, x)
    ell_hat = inf_norm_inverse(np.eye(q.n) - M)
    b = inf_norm(q.B)

    in_box = bool(np.all(x >= 0) and np.all(x < 1))
    con1 = in_box and spectral_radius(M) < 1.0

    disc = _discriminant(gamma, ell_hat, b)
    con21 = disc is not None

    con22 = False
    if con21:
        threshold = max(
            1.0 - 2.0 * ell_hat * b * (1.0 - inf_norm(ones(q.n) - x)),
            1.0 - 2.0 * ell_hat * b * (1.0 - inf_norm(x)),
        )
        con22 = math.sqrt(disc) > threshold

    omega = omega_star(gamma, ell_hat, b) if (con1 and con21 and con22) else None

    return ErrorBoundReport(
        gamma=gamma,
        ell_hat=ell_hat,
        b_norm=b,
        con1_ok=con1,
        con21_ok=con21,
        con22_ok=bool(con22),
        omega_star=omega,
        estimate=ell_hat * gamma,
    )


def error_estimate(q: Qve, xhat: np.ndarray) -> float:
    """
    Az elsőrendű hibabecslés: ||L^^-1|| ||r||.

    Args:
        q: A QVE
        xhat: Közelítő megoldás

    Returns:
        float: ell^ * gamma
    """
    x = as_vector(xhat, 'xhat')
    L_hat = np.eye(q.n) - mixed_operator(q.B, x, x)
    return inf_norm_inverse(L_hat) * inf_norm(residual(q, x))


def certify_trace(q: Qve, report: SolveReport, xstar: Optional[np.ndarray] = None) -> List[ErrorBoundReport]:
    """
    Hibakorlát minden trace-beli iteráltra.

    Args:
        q: A QVE
        report: Megoldó riport a trace-szel
        xstar: Referencia megoldás a tényleges hibához (opcionális)

    Returns:
        list: Iteráltanként egy ErrorBoundReport
    """
    reference = None if xstar is None else as_vector(xstar, 'xstar')
    results = []
    for k, x in enumerate(report.iterates):
        bound = error_bound(q, x)
        bound.iteration = k
        if reference is not None:
            bound.true_error = inf_norm(x - reference)
            if bound.certified and bound.true_error > bound.omega_star:
                logger.warning(f"Iterate {k}: error {bound.true_error:.3e} exceeds omega* {bound.omega_star:.3e}")
        results.append(bound)
    logger.debug(f"Certified {sum(b.certified for b in results)} of {len(results)} iterates")
    return results
