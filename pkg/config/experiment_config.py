"""
Experiment Config - A reprodukciós táblázatok rácsai és publikált referencia értékei
"""
from typing import Dict, List


class ExperimentConfig:
    """
    Kísérleti rácsok és referencia értékek kezelése
    """

    # Table 1 / Table 2 rács
    PERTURBATION_P_VALUES: List[float] = [20.0, 10.0, 5.0, 2.0, 0.9]
    PERTURBATION_ETAS: List[float] = [1e-8, 1e-9]

    # Table 3 rács
    ERROR_BOUND_P_VALUES: List[float] = [2.0, 4.0, 6.0, 8.0, 10.0]

    # Table 3 iterált kiválasztás: legutolsó iterált, ahol gamma > küszöb
    INEXACT_RESIDUAL_THRESHOLD = 1e-10

    # Publikált statikus oszlopok (p -> érték); a "1,29e+2" vessző elírás
    REFERENCE_STATICS: Dict[float, Dict[str, float]] = {
        20.0: {'rho_R': 1.0095, 'ell': 1.29e2, 'gap_norm': 0.99, 'kappa_tilde': 1.29e2},
        10.0: {'rho_R': 1.0084, 'ell': 1.64e2, 'gap_norm': 0.96, 'kappa_tilde': 1.59e2},
        5.0: {'rho_R': 1.0065, 'ell': 2.44e2, 'gap_norm': 0.85, 'kappa_tilde': 2.09e2},
        2.0: {'rho_R': 1.0028, 'ell': 7.36e2, 'gap_norm': 0.54, 'kappa_tilde': 3.95e2},
        0.9: {'rho_R': 1.0001, 'ell': 1.78e4, 'gap_norm': 3.86e-2, 'kappa_tilde': 6.85e2},
    }

    # Strukturált perturbáció: (p, eta) -> (xi*/||x*||, ||x~* - x*||/||x*||)
    REFERENCE_STRUCTURED: Dict[tuple, tuple] = {
        (20.0, 1e-8): (1.30e-6, 1.02e-6), (20.0, 1e-9): (1.29e-7, 1.02e-7),
        (10.0, 1e-8): (1.59e-6, 1.01e-6), (10.0, 1e-9): (1.59e-7, 1.01e-7),
        (5.0, 1e-8): (2.09e-6, 9.85e-7), (5.0, 1e-9): (2.09e-7, 9.85e-8),
        (2.0, 1e-8): (3.96e-6, 1.16e-6), (2.0, 1e-9): (3.95e-7, 1.16e-7),
        (0.9, 1e-8): (7.99e-6, 1.43e-6), (0.9, 1e-9): (6.94e-7, 1.43e-7),
    }

    # Véletlen perturbáció: (p, eta) -> (xi*/||x*||, ||x~* - x*||/||x*||)
    REFERENCE_RANDOM: Dict[tuple, tuple] = {
        (20.0, 1e-8): (1.30e-6, 1.06e-6), (20.0, 1e-9): (1.29e-7, 1.10e-7),
        (10.0, 1e-8): (1.59e-6, 1.32e-6), (10.0, 1e-9): (1.59e-7, 1.27e-7),
        (5.0, 1e-8): (2.09e-6, 1.60e-6), (5.0, 1e-9): (2.09e-7, 1.74e-7),
        (2.0, 1e-8): (3.96e-6, 2.89e-6), (2.0, 1e-9): (3.95e-7, 2.71e-7),
        (0.9, 1e-8): (7.99e-6, 4.40e-6), (0.9, 1e-9): (6.94e-7, 4.67e-7),
    }

    # Hibakorlát táblázat: p -> (||r||, ||L^-1||, omega*, ||x^ - x*||)
    REFERENCE_ERROR_BOUND: Dict[float, tuple] = {
        2.0: (4.9e-9, 736.0, 3.60e-6, 1.83e-6),
        4.0: (3.5e-9, 289.0, 1.01e-6, 6.51e-7),
        6.0: (3.3e-7, 215.0, 7.22e-5, 4.93e-5),
        8.0: (5.0e-8, 182.0, 9.17e-6, 6.75e-6),
        10.0: (8.3e-6, 163.0, 2.03e-3, 1.02e-3),
    }

    # CSV oszlopok a táblázatok fejlécei szerint
    CSV_COLUMNS: List[str] = [
        'p', 'rho_R', 'ell', 'gap_norm', 'kappa_tilde', 'eta', 'gamma',
        'bound_ratio', 'actual_ratio', 'seed', 'certified',
    ]

    @classmethod
    def grid(cls, which: int) -> List[tuple]:
        """
        A táblázat (p, eta) rácsa.

        Args:
            which: Táblázat sorszáma (1, 2 vagy 3)

        Returns:
            list: (p, eta) párok; a 3. táblázatban eta = 0
        """
        if which in (1, 2):
            return [(p, eta) for p in cls.PERTURBATION_P_VALUES for eta in cls.PERTURBATION_ETAS]
        if which == 3:
            return [(p, 0.0) for p in cls.ERROR_BOUND_P_VALUES]
        raise ValueError(f"Unknown table: {which}")
