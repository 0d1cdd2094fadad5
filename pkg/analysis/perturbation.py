"""
Perturbation - Perturbációs korlát, admisszibilitási feltételek és kondíciószám becslés.

Jelölések (mind végtelen normában):
    delta   = ||dB||
    ell     = ||L^-1||, L = I - B(x*⊗I + I⊗x*)
    b_tilde = ||B + dB||
    gap     = ||x*⊗x* - e⊗e|| = 1 - (min x*)^2
"""
import json
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from config.settings import Settings
from core.exceptions import (
    BoundInadmissibleError,
    InvalidInputError,
    PerturbationTooLargeError,
)
from core.linalg_kernel import (
    apply_bilinear,
    as_matrix,
    as_vector,
    inf_norm,
    inf_norm_inverse,
    kron_vec,
    mixed_operator,
    ones,
    spectral_radius,
)
from core.qve_model import Qve
from core.solvers import QveSolver
from utils.logger import setup_logger

logger = setup_logger('perturbation')

# A véletlen perturbációk bit generátora (numpy default_rng)
GENERATOR_NAME = 'PCG64'


@dataclass(frozen=True)
class PerturbationInputs:
    delta: float
    ell: float
    b_tilde: float
    gap_norm: float
    xstar_norm: float
    comp_norm: float


@dataclass
class PerturbationReport:
    """
    Egy perturbáció teljes elemzése.

    Attributes:
        inputs: A korlát bemenő mennyiségei
        cond1_ok: A korlát létezési feltétele
        cond2_ok: A belső megoldás (minimalitás) feltétele
        xi_star: A korlát, csak cond1_ok esetén
        first_order_abs: ell * gap * delta
        first_order_rel: Relatív elsőrendű korlát (None, ha ||x*|| = 0)
        kappa_tilde: Kondíciószám becslés
        actual_shift: ||x~* - x*||, ha a perturbált QVE-t megoldottuk
    """
    inputs: PerturbationInputs
    cond1_ok: bool
    cond2_ok: bool
    xi_star: Optional[float]
    first_order_abs: float
    first_order_rel: Optional[float]
    kappa_tilde: float
    b_norm: float = 0.0
    eta: Optional[float] = None
    actual_shift: Optional[float] = None
    seed: Optional[int] = None
    generator: Optional[str] = None

    @property
    def bound_holds(self) -> Optional[bool]:
        if self.xi_star is None or self.actual_shift is None:
            return None
        return self.actual_shift <= self.xi_star

    def to_dict(self) -> Dict:
        data = asdict(self)
        data['bound_holds'] = self.bound_holds
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def stability_matrix(q: Qve, x: np.ndarray) -> np.ndarray:
    """
    L = I - B(x⊗I + I⊗x).

    Args:
        q: A QVE
        x: Vektor (tipikusan x*)

    Returns:
        np.ndarray: n x n mátrix
    """
    xv = as_vector(x, 'x')
    return np.eye(q.n) - mixed_operator(q.B, xv, xv)


def gap_norm(xstar: np.ndarray) -> float:
    """
    ||x*⊗x* - e⊗e|| zárt alakban: 1 - (min x*)^2, ha 0 <= x* < e.

    Args:
        xstar: A minimális megoldás

    Returns:
        float: A távolság
    """
    x = as_vector(xstar, 'xstar')
    return float(1.0 - np.min(x) ** 2)


def perturbation_inputs(q: Qve, xstar: np.ndarray, dB: np.ndarray) -> PerturbationInputs:
    """
    A korlát bemenő mennyiségeinek kiszámítása.

    Args:
        q: A QVE
        xstar: A konvergált minimális megoldás
        dB: B perturbációja (n x n^2)

    Returns:
        PerturbationInputs: delta, ell, b_tilde, gap, ||x*||, ||e - x*||
    """
    x = as_vector(xstar, 'xstar')
    dB = as_matrix(dB, 'dB')
    if dB.shape != q.B.shape:
        raise InvalidInputError(f"dB must have shape {q.B.shape}, got {dB.shape}", field='dB')

    B_tilde = q.B + dB
    if np.any(B_tilde < 0) or np.any(B_tilde > 1):
        raise PerturbationTooLargeError("B + dB leaves [0, 1]")

    gap = gap_norm(x)
    explicit = inf_norm(kron_vec(x, x) - kron_vec(ones(q.n), ones(q.n)))
    if abs(gap - explicit) > 1e-14:
        # x* nincs a [0, e) dobozban; az explicit érték a mérvadó
        logger.warning(f"gap_norm closed form {gap:.16g} differs from explicit {explicit:.16g}")
        gap = explicit

    return PerturbationInputs(
        delta=inf_norm(dB),
        ell=inf_norm_inverse(stability_matrix(q, x)),
        b_tilde=inf_norm(B_tilde),
        gap_norm=gap,
        xstar_norm=inf_norm(x),
        comp_norm=inf_norm(ones(q.n) - x),
    )


def _discriminant(inp: PerturbationInputs, clamp: Optional[float] = None) -> Optional[float]:
    if clamp is None:
        clamp = Settings.get_setting('discriminant_clamp')
    linear = 1.0 - 2.0 * inp.ell * inp.delta * inp.xstar_norm
    value = linear ** 2 - 4.0 * inp.ell ** 2 * inp.b_tilde * inp.gap_norm * inp.delta
    if value < 0:
        if value >= -clamp:
            return 0.0
        return None
    return value


def check_admissible(inp: PerturbationInputs) -> Tuple[bool, bool]:
    """
    A két admisszibilitási feltétel.

    cond1: ||x*|| delta + sqrt(b_tilde gap delta) <= 1 / (2 ell)
    cond2: 2 ell delta ||x*|| + sqrt(D) > max{1 - 2 ell b_tilde (1 - ||x*||), 1 - 2 ell b_tilde (1 - ||e - x*||)}

    Args:
        inp: A bemenő mennyiségek

    Returns:
        tuple: (cond1_ok, cond2_ok); cond2 csak cond1 teljesülésekor lehet igaz
    """
    lhs1 = inp.xstar_norm * inp.delta + math.sqrt(inp.b_tilde * inp.gap_norm * inp.delta)
    cond1 = lhs1 <= 1.0 / (2.0 * inp.ell)
    if not cond1:
        return False, False

    disc = _discriminant(inp)
    if disc is None:
        return True, False

    lhs2 = 2.0 * inp.ell * inp.delta * inp.xstar_norm + math.sqrt(disc)
    rhs2 = max(
        1.0 - 2.0 * inp.ell * inp.b_tilde * (1.0 - inp.xstar_norm),
        1.0 - 2.0 * inp.ell * inp.b_tilde * (1.0 - inp.comp_norm),
    )
    return True, bool(lhs2 > rhs2)


def perturbation_bound(inp: PerturbationInputs) -> float:
    """
    xi* racionalizált alakban: 2 ell gap delta / (1 - 2 ell delta ||x*|| + sqrt(D)).

    Args:
        inp: Admisszibilis bemenő mennyiségek

    Returns:
        float: A korlát (delta = 0 esetén pontosan 0)
    """
    cond1, _ = check_admissible(inp)
    disc = _discriminant(inp) if cond1 else None
    if disc is None:
        raise BoundInadmissibleError(
            f"perturbation too large for the bound (delta={inp.delta:.3e}, ell={inp.ell:.3e})"
        )
    numerator = 2.0 * inp.ell * inp.gap_norm * inp.delta
    denominator = 1.0 - 2.0 * inp.ell * inp.delta * inp.xstar_norm + math.sqrt(disc)
    return numerator / denominator


def subtractive_bound(inp: PerturbationInputs) -> float:
    """
    xi* a kivonásos alakban, a kisebbik gyök képletével. Kis delta esetén kiejtés terheli.

    Args:
        inp: Admisszibilis bemenő mennyiségek, ell * b_tilde > 0

    Returns:
        float: A korlát
    """
    disc = _discriminant(inp)
    if disc is None or not check_admissible(inp)[0]:
        raise BoundInadmissibleError("perturbation too large for the bound")
    linear = 1.0 - 2.0 * inp.ell * inp.delta * inp.xstar_norm
    return (linear - math.sqrt(disc)) / (2.0 * inp.ell * inp.b_tilde)


def first_order_bounds(inp: PerturbationInputs, B_norm: float) -> Tuple[float, Optional[float]]:
    """
    Elsőrendű abszolút és relatív korlát.

    Args:
        inp: A bemenő mennyiségek
        B_norm: ||B||

    Returns:
        tuple: (ell gap delta, relatív korlát vagy None, ha ||x*|| = 0)
    """
    absolute = inp.ell * inp.gap_norm * inp.delta
    if inp.xstar_norm == 0:
        logger.warning("Relative first-order bound undefined for x* = 0")
        return absolute, None
    if B_norm > 0:
        relative = inp.ell * B_norm * inp.gap_norm / inp.xstar_norm * (inp.delta / B_norm)
    else:
        relative = absolute / inp.xstar_norm
    return absolute, relative


def condition_estimate(q: Qve, xstar: np.ndarray) -> float:
    """
    kappa~ = ell * gap * ||B|| / ||x*||.

    Args:
        q: A QVE
        xstar: Nem nulla minimális megoldás

    Returns:
        float: A relatív kondíciószám felső becslése
    """
    x = as_vector(xstar, 'xstar')
    xstar_norm = inf_norm(x)
    if xstar_norm == 0:
        raise InvalidInputError("condition estimate undefined for x* = 0", field='xstar')
    ell = inf_norm_inverse(stability_matrix(q, x))
    return ell * gap_norm(x) * inf_norm(q.B) / xstar_norm


def remark_diagnostics(q: Qve, xstar: np.ndarray) -> Tuple[float, float, float]:
    """
    Perron-Frobenius azonosság ellenőrzése a megoldásnál.

    rho(B((e+x*)⊗I + I⊗(e+x*))) = 2, és rho(R) + rho(I - L) >= 2.

    Args:
        q: A QVE
        xstar: Belső minimális megoldás

    Returns:
        tuple: (rho_two, rho_R, rho_IL)
    """
    x = as_vector(xstar, 'xstar')
    e = ones(q.n)
    rho_two = spectral_radius(mixed_operator(q.B, e + x, e + x))
    rho_R = spectral_radius(mixed_operator(q.B, e, e))
    rho_IL = spectral_radius(mixed_operator(q.B, x, x))
    return rho_two, rho_R, rho_IL


def check_perturbed(q: Qve, da: np.ndarray, dB: np.ndarray):
    a_tilde = q.a + da
    B_tilde = q.B + dB
    if np.any(a_tilde < 0) or np.any(a_tilde > 1):
        raise PerturbationTooLargeError(f"a + da leaves [0, 1] (min {float(a_tilde.min()):.3e})")
    if np.any(B_tilde < 0) or np.any(B_tilde > 1):
        raise PerturbationTooLargeError("B + dB leaves [0, 1]")


def structured_perturbation(q: Qve, eta: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Strukturált perturbáció: dB = eta B, da = -dB(e⊗e).

    Args:
        q: A QVE
        eta: Relatív nagyság (>= 0)

    Returns:
        tuple: (dB, da)
    """
    if eta < 0:
        raise InvalidInputError(f"eta must be nonnegative, got {eta}", field='eta')
    dB = eta * q.B
    e = ones(q.n)
    da = -apply_bilinear(dB, e, e)
    check_perturbed(q, da, dB)
    return dB, da


def random_perturbation(q: Qve, eta: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Véletlen perturbáció: egyenletes (0,1) elemek, ||dB|| = eta ||B|| skálára hozva.

    Args:
        q: A QVE
        eta: Relatív nagyság (>= 0)
        seed: A generátor magja

    Returns:
        tuple: (dB, da); rögzített seed mellett determinisztikus
    """
    if eta < 0:
        raise InvalidInputError(f"eta must be nonnegative, got {eta}", field='eta')
    rng = np.random.default_rng(seed)
    sample = rng.random(q.B.shape)
    if eta == 0:
        dB = np.zeros_like(q.B)
    else:
        dB = sample * (eta * inf_norm(q.B) / inf_norm(sample))
    e = ones(q.n)
    da = -apply_bilinear(dB, e, e)
    check_perturbed(q, da, dB)
    return dB, da


class PerturbationAnalyzer:
    """
    Perturbációk teljes elemzése: bemenetek, feltételek, korlátok és a tényleges eltolódás.
    """

    def __init__(self, config: Optional[Dict] = None, solver: Optional[QveSolver] = None):
        """
        Inicializálja az elemzőt.

        Args:
            config: Opcionális felülírások (solver_tolerance)
            solver: A perturbált QVE megoldásához használt megoldó
        """
        self.config = config or {}
        self.solver = solver or QveSolver(self.config)

        logger.info("PerturbationAnalyzer initialized")

    def measure_shift(self, q: Qve, xstar: np.ndarray, dB: np.ndarray,
                      da: np.ndarray) -> Tuple[np.ndarray, float]:
        """
        A perturbált QVE megoldása Newton iterációval és az eltolódás mérése.

        Args:
            q: Az eredeti QVE
            xstar: Az eredeti minimális megoldás
            dB: B perturbációja
            da: a perturbációja

        Returns:
            tuple: (x~*, ||x~* - x*||)
        """
        perturbed = q.perturbed(da, dB)
        report = self.solver.newton_iteration(perturbed)
        return report.x, inf_norm(report.x - as_vector(xstar, 'xstar'))

    def analyze(self, q: Qve, xstar: np.ndarray, dB: np.ndarray, da: Optional[np.ndarray] = None,
                eta: Optional[float] = None, seed: Optional[int] = None) -> PerturbationReport:
        """
        Teljes perturbációs riport összeállítása.

        Args:
            q: Az eredeti QVE
            xstar: Az eredeti minimális megoldás
            dB: B perturbációja
            da: a perturbációja; ha megadott, a perturbált QVE-t is megoldjuk
            eta: A perturbáció relatív nagysága (csak a riporthoz)
            seed: A véletlen generátor magja (csak a riporthoz)

        Returns:
            PerturbationReport: A riport
        """
        inputs = perturbation_inputs(q, xstar, dB)
        cond1, cond2 = check_admissible(inputs)
        b_norm = inf_norm(q.B)
        first_abs, first_rel = first_order_bounds(inputs, b_norm)

        xi_star = perturbation_bound(inputs) if cond1 else None
        if not cond1:
            logger.warning(f"Perturbation inadmissible (delta={inputs.delta:.3e}, ell={inputs.ell:.3e})")
        elif not cond2:
            logger.warning("Interior-solution condition failed; xi* reported without minimality certificate")

        report = PerturbationReport(
            inputs=inputs,
            cond1_ok=cond1,
            cond2_ok=cond2,
            xi_star=xi_star,
            first_order_abs=first_abs,
            first_order_rel=first_rel,
            kappa_tilde=condition_estimate(q, xstar),
            b_norm=b_norm,
            eta=eta,
            seed=seed,
            generator=GENERATOR_NAME if seed is not None else None,
        )

        if da is not None:
            _, report.actual_shift = self.measure_shift(q, xstar, dB, da)
            if report.bound_holds is False:
                logger.warning(f"Measured shift {report.actual_shift:.3e} exceeds xi* {xi_star:.3e}")

        return report
