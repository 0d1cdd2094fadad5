"""
Table Reproducer - A perturbációs és hibakorlát táblázatok újraszámolása a teszt családon.
"""
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed

from analysis.error_bound import certify_trace
from analysis.perturbation import (
    PerturbationAnalyzer,
    condition_estimate,
    gap_norm,
    random_perturbation,
    stability_matrix,
    structured_perturbation,
)
from config.experiment_config import ExperimentConfig
from config.settings import Settings
from core.exceptions import QveError
from core.linalg_kernel import inf_norm, inf_norm_inverse
from core.qve_model import Qve, classify, from_rates, paper_family
from core.solvers import QveSolver, SolveReport
from utils.io_utils import write_table_csv
from utils.logger import setup_logger

logger = setup_logger('table_reproducer')

ITERATE_RULES = ('latest-inexact', 'first-certified')


@dataclass
class TableRow:
    """
    Egy táblázat sor.

    A 3. táblázatban ell az kiválasztott iterált ||L^^-1|| értéke, bound_ratio
    az omega*, actual_ratio az abszolút hiba.
    """
    p: float
    rho_R: float
    ell: float
    gap_norm: float
    kappa_tilde: float
    eta: float
    gamma: float = math.nan
    bound_ratio: float = math.nan
    actual_ratio: float = math.nan
    seed: Optional[int] = None
    certified: bool = False
    iteration: Optional[int] = None

    def to_dict(self) -> Dict:
        data = asdict(self)
        data.pop('iteration')
        return data


@dataclass
class FamilyCase:
    """Egy p értékhez tartozó megoldott teszt példány"""
    p: float
    q: Qve
    solution: SolveReport
    rho_R: float
    ell: float
    gap_norm: float
    kappa_tilde: float

    @property
    def xstar(self) -> np.ndarray:
        return self.solution.x


class TableReproducer:
    """
    A három táblázat újraszámolása: strukturált és véletlen perturbációk, valamint
    Newton iteráltak hibakorlátja.
    """

    def __init__(self, config: Optional[Dict] = None):
        """
        Inicializálja a reprodukálót.

        Args:
            config: Opcionális felülírások (simulation_n_jobs a sorok párhuzamosításához,
                solver_tolerance, death_scale)
        """
        self.config = config or {}
        self.n_jobs = int(Settings.resolve(self.config, 'simulation_n_jobs'))
        self.death_scale = self.config.get('death_scale')
        self.residual_threshold = self.config.get('residual_threshold',
                                                  ExperimentConfig.INEXACT_RESIDUAL_THRESHOLD)
        self.solver = QveSolver(self.config)
        self.analyzer = PerturbationAnalyzer(self.config, solver=self.solver)

        logger.info("TableReproducer initialized")

    def family_case(self, p: float) -> FamilyCase:
        """
        A p paraméterű példány felépítése, megoldása és statikus mennyiségei.

        Args:
            p: A család paramétere

        Returns:
            FamilyCase: A megoldott példány
        """
        q = from_rates(paper_family(p, self.death_scale))
        solution = self.solver.newton_iteration(q)
        return FamilyCase(
            p=p,
            q=q,
            solution=solution,
            rho_R=classify(q).rho_R,
            ell=inf_norm_inverse(stability_matrix(q, solution.x)),
            gap_norm=gap_norm(solution.x),
            kappa_tilde=condition_estimate(q, solution.x),
        )

    def perturbation_row(self, case: FamilyCase, eta: float, seed: Optional[int] = None) -> TableRow:
        """
        Egy perturbációs sor: strukturált (seed = None) vagy véletlen perturbáció.

        Args:
            case: A megoldott példány
            eta: A perturbáció relatív nagysága
            seed: A véletlen perturbáció magja

        Returns:
            TableRow: A sor; hiba esetén certified = False
        """
        row = TableRow(p=case.p, rho_R=case.rho_R, ell=case.ell, gap_norm=case.gap_norm,
                       kappa_tilde=case.kappa_tilde, eta=eta, seed=seed)
        try:
            if seed is None:
                dB, da = structured_perturbation(case.q, eta)
            else:
                dB, da = random_perturbation(case.q, eta, seed)
            report = self.analyzer.analyze(case.q, case.xstar, dB, da, eta=eta, seed=seed)
        except QveError as e:
            logger.error(f"Row p={case.p} eta={eta} seed={seed} failed: {e}")
            return row

        xstar_norm = inf_norm(case.xstar)
        if report.xi_star is not None:
            row.bound_ratio = report.xi_star / xstar_norm
        row.actual_ratio = report.actual_shift / xstar_norm
        row.certified = bool(report.cond1_ok and report.cond2_ok and report.bound_holds)
        if not row.certified:
            logger.warning(f"Row p={case.p} eta={eta} seed={seed} not certified")
        return row

    def error_bound_row(self, case: FamilyCase, iterate_rule: str = 'latest-inexact') -> TableRow:
        """
        Hibakorlát sor egy kiválasztott Newton iteráltra.

        Args:
            case: A megoldott példány
            iterate_rule: 'latest-inexact' (utolsó iterált, ahol gamma > küszöb) vagy
                'first-certified' (első iterált, ahol minden feltétel teljesül)

        Returns:
            TableRow: A sor
        """
        if iterate_rule not in ITERATE_RULES:
            raise ValueError(f"Unknown iterate rule: {iterate_rule}")

        row = TableRow(p=case.p, rho_R=case.rho_R, ell=case.ell, gap_norm=case.gap_norm,
                       kappa_tilde=case.kappa_tilde, eta=0.0)
        bounds = certify_trace(case.q, case.solution, case.xstar)

        if iterate_rule == 'latest-inexact':
            candidates = [b for b in bounds if b.gamma > self.residual_threshold]
            chosen = candidates[-1] if candidates else None
        else:
            chosen = next((b for b in bounds if b.certified), None)

        if chosen is None:
            logger.error(f"No iterate matches rule '{iterate_rule}' for p={case.p}")
            return row

        row.iteration = chosen.iteration
        row.gamma = chosen.gamma
        row.ell = chosen.ell_hat
        row.actual_ratio = chosen.true_error
        if chosen.certified:
            row.bound_ratio = chosen.omega_star
            row.certified = chosen.true_error <= chosen.omega_star
        else:
            logger.warning(f"Iterate {chosen.iteration} for p={case.p} is not certified")
        return row

    def _safe_case(self, p: float) -> Optional[FamilyCase]:
        try:
            return self.family_case(p)
        except QveError as e:
            logger.error(f"Family instance p={p} failed: {e}")
            return None

    def reproduce_table(self, which: int, out=None, seed: Optional[int] = None, samples: int = 1,
                        iterate_rule: str = 'latest-inexact') -> List[TableRow]:
        """
        Egy táblázat újraszámolása.

        Args:
            which: 1 (strukturált), 2 (véletlen) vagy 3 (hibakorlát)
            out: CSV cél (fájl út vagy írható objektum), opcionális
            seed: A véletlen perturbációk kezdő magja (2. táblázat)
            samples: Véletlen perturbációk száma cellánként (seed, seed+1, ...)
            iterate_rule: Iterált kiválasztás a 3. táblázatban

        Returns:
            list: A sorok (p, eta, seed) szerint rendezve
        """
        grid = ExperimentConfig.grid(which)
        if seed is None:
            seed = int(Settings.get_setting('default_seed'))

        p_values = sorted({p for p, _ in grid})
        cases = Parallel(n_jobs=self.n_jobs)(delayed(self._safe_case)(p) for p in p_values)
        by_p = {case.p: case for case in cases if case is not None}

        if which == 3:
            rows = [self.error_bound_row(by_p[p], iterate_rule) for p in p_values if p in by_p]
        else:
            jobs = []
            for p, eta in grid:
                if p not in by_p:
                    continue
                if which == 1:
                    jobs.append((by_p[p], eta, None))
                else:
                    jobs.extend((by_p[p], eta, seed + k) for k in range(samples))
            rows = Parallel(n_jobs=self.n_jobs)(
                delayed(self.perturbation_row)(case, eta, row_seed) for case, eta, row_seed in jobs
            )

        rows.sort(key=lambda r: (r.p, r.eta, -1 if r.seed is None else r.seed))
        logger.info(f"Table {which}: {len(rows)} rows, {sum(r.certified for r in rows)} certified")

        if out is not None:
            write_table_csv([r.to_dict() for r in rows], ExperimentConfig.CSV_COLUMNS, out)
        return rows


def reproduce_table(which: int, out=None, seed: Optional[int] = None, samples: int = 1,
                    iterate_rule: str = 'latest-inexact') -> List[TableRow]:
    return TableReproducer().reproduce_table(which, out, seed, samples, iterate_rule)
