"""
Exceptions - A QVE eszközkészlet hibatípusai
"""
from typing import Any, Optional, Tuple


class QveError(Exception):
    """Az összes toolkit hiba őse"""


class InvalidDimensionError(QveError, ValueError):
    """Méret eltérés vektorok / mátrixok között"""


class InvalidInputError(QveError, ValueError):
    """Hibás bemeneti fájl, mező vagy kezdővektor"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class SingularMatrixError(QveError, ArithmeticError):
    """
    Szinguláris (vagy numerikusan szinguláris) mátrix.

    A Newton iteráció a részleges riportot is csatolja.
    """

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class NoConvergenceError(QveError, ArithmeticError):
    """Az iteráció nem konvergált a megengedett lépésszámon belül"""

    def __init__(self, message: str, report: Optional[Any] = None,
                 bracket: Optional[Tuple[float, float]] = None):
        super().__init__(message)
        self.report = report
        self.bracket = bracket


class InvalidRatesError(QveError, ValueError):
    """Az MBT ráta adatok sértik az invariánsokat"""


class BoundInadmissibleError(QveError, ValueError):
    """A perturbációs korlát feltétele nem teljesül"""


class PerturbationTooLargeError(QveError, ValueError):
    """A perturbált együtthatók kilépnek a [0,1] intervallumból"""


class InvalidDistributionError(QveError, ValueError):
    """Az utódeloszlás tömege túlságosan eltér 1-től"""
