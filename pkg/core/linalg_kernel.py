"""
Linalg Kernel - Kis dimenziós sűrű lineáris algebra a QVE számításokhoz.

Kronecker index konvenció (mindenhol ez érvényes): a nulla alapú c = n*j + k
oszlop az x[j]*y[k] szorzathoz tartozik (egy alapú alakban n(j-1)+k).
"""
import warnings
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from config.settings import Settings
from core.exceptions import (
    InvalidDimensionError,
    InvalidInputError,
    NoConvergenceError,
    SingularMatrixError,
)

ArrayLike = Union[np.ndarray, list, tuple]


def as_vector(x: ArrayLike, name: str = 'vector') -> np.ndarray:
    """
    Bemenet ellenőrzése és átalakítása 1-D float tömbbé.

    Args:
        x: Vektor
        name: A mező neve a hibaüzenethez

    Returns:
        np.ndarray: Véges elemű, nem üres vektor
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidDimensionError(f"{name} must be a nonempty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite entries", field=name)
    return v


def as_matrix(m: ArrayLike, name: str = 'matrix') -> np.ndarray:
    """
    Bemenet ellenőrzése és átalakítása 2-D float tömbbé.

    Args:
        m: Mátrix
        name: A mező neve a hibaüzenethez

    Returns:
        np.ndarray: Véges elemű, nem üres mátrix
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise InvalidDimensionError(f"{name} must be a nonempty matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries", field=name)
    return a


def _as_square(m: ArrayLike, name: str = 'matrix') -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise InvalidDimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def _check_bilinear(B: np.ndarray, *vectors: np.ndarray) -> int:
    n = B.shape[0]
    if B.shape[1] != n * n:
        raise InvalidDimensionError(f"B must be n x n^2, got shape {B.shape}")
    for v in vectors:
        if v.shape != (n,):
            raise InvalidDimensionError(f"vector of length {v.shape[0]} does not match n={n}")
    return n


def ones(n: int) -> np.ndarray:
    """
    A csupa egyes vektor (e).

    Args:
        n: Hossz

    Returns:
        np.ndarray: n darab 1.0
    """
    if int(n) < 1:
        raise InvalidDimensionError(f"dimension must be positive, got {n}")
    return np.ones(int(n))


def inf_norm(m: ArrayLike) -> float:
    """
    Végtelen norma: mátrixra a maximális abszolút sorösszeg, vektorra a maximális abszolút elem.

    Args:
        m: Vektor vagy mátrix

    Returns:
        float: A norma
    """
    a = np.asarray(m, dtype=float)
    if a.size == 0:
        raise InvalidDimensionError("inf_norm of an empty argument")
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    if a.ndim == 2:
        return float(np.max(np.sum(np.abs(a), axis=1)))
    raise InvalidDimensionError(f"inf_norm expects a vector or matrix, got ndim={a.ndim}")


def kron_vec(x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """
    Két azonos hosszú vektor Kronecker szorzata: az n*j + k elem x[j]*y[k].

    Args:
        x: Első tényező
        y: Második tényező

    Returns:
        np.ndarray: n^2 hosszú vektor
    """
    xv = as_vector(x, 'x')
    yv = as_vector(y, 'y')
    if xv.shape != yv.shape:
        raise InvalidDimensionError(f"kron_vec length mismatch: {xv.size} vs {yv.size}")
    return np.kron(xv, yv)


def apply_bilinear(B: ArrayLike, x: ArrayLike, y: ArrayLike) -> np.ndarray:
    """
    B(x⊗y) kiszámítása a Kronecker vektor felépítése nélkül.

    Args:
        B: n x n^2 együttható mátrix
        x: Bal tényező
        y: Jobb tényező

    Returns:
        np.ndarray: n hosszú vektor
    """
    Bm = np.asarray(B, dtype=float)
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if Bm.ndim != 2:
        raise InvalidDimensionError(f"B must be a matrix, got ndim={Bm.ndim}")
    n = _check_bilinear(Bm, xv, yv)
    return np.einsum('ijk,j,k->i', Bm.reshape(n, n, n), xv, yv)


def mixed_operator(B: ArrayLike, u: ArrayLike, v: ArrayLike) -> np.ndarray:
    """
    A B(u⊗I + I⊗v) mátrix: minden z-re az eredmény·z = B(u⊗z) + B(z⊗v).

    Args:
        B: n x n^2 együttható mátrix
        u: A bal oldali rögzített tényező
        v: A jobb oldali rögzített tényező

    Returns:
        np.ndarray: n x n mátrix
    """
    Bm = np.asarray(B, dtype=float)
    uv = np.asarray(u, dtype=float)
    vv = np.asarray(v, dtype=float)
    if Bm.ndim != 2:
        raise InvalidDimensionError(f"B must be a matrix, got ndim={Bm.ndim}")
    n = _check_bilinear(Bm, uv, vv)
    B3 = Bm.reshape(n, n, n)
    return np.einsum('ijm,j->im', B3, uv) + np.einsum('imk,k->im', B3, vv)


def solve_linear(A: ArrayLike, b: ArrayLike, pivot_tolerance: Optional[float] = None) -> np.ndarray:
    """
    A z = b megoldása LU felbontással, részleges főelemkiválasztással.

    Args:
        A: Négyzetes mátrix
        b: Jobb oldal (vektor vagy oszlopokat tartalmazó mátrix)
        pivot_tolerance: Relatív pivot küszöb (alapértelmezés a beállításokból)

    Returns:
        np.ndarray: A megoldás
    """
    Am = _as_square(A, 'A')
    rhs = np.asarray(b, dtype=float)
    if rhs.shape[0] != Am.shape[0]:
        raise InvalidDimensionError(f"right-hand side has {rhs.shape[0]} rows, A has {Am.shape[0]}")
    if pivot_tolerance is None:
        pivot_tolerance = Settings.get_setting('pivot_tolerance')

    scale = inf_norm(Am)
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")

    with warnings.catch_warnings():
        # Pontosan nulla pivot esetén a scipy figyelmeztet; alább saját hibát adunk
        warnings.simplefilter('ignore', scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(Am, check_finite=False)

    smallest_pivot = float(np.min(np.abs(np.diag(lu))))
    if smallest_pivot <= pivot_tolerance * scale:
        raise SingularMatrixError(
            f"pivot {smallest_pivot:.3e} below {pivot_tolerance:g} * ||A|| = {pivot_tolerance * scale:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def inverse(A: ArrayLike) -> np.ndarray:
    """
    Az inverz explicit kiszámítása az egységmátrix oszlopainak megoldásával.

    Args:
        A: Nemszinguláris négyzetes mátrix

    Returns:
        np.ndarray: A^-1
    """
    Am = _as_square(A, 'A')
    return solve_linear(Am, np.eye(Am.shape[0]))


def inf_norm_inverse(A: ArrayLike) -> float:
    """
    ||A^-1|| végtelen normában.

    Args:
        A: Nemszinguláris négyzetes mátrix

    Returns:
        float: A norma
    """
    return inf_norm(inverse(A))


def _collatz_wielandt(w: np.ndarray, v: np.ndarray) -> Tuple[float, float]:
    positive = v > 0
    ratios = w[positive] / v[positive]
    return float(np.min(ratios)), float(np.max(ratios))


def spectral_radius(M: ArrayLike, tol: Optional[float] = None, max_iterations: Optional[int] = None,
                    stall_window: Optional[int] = None, shift_factor: Optional[float] = None) -> float:
    """
    Nemnegatív mátrix Perron gyöke hatványiterációval.

    Kezdővektor e, normalizálás végtelen normával; leállás, ha a komponensenkénti
    hányadosok minimuma és maximuma relatív tol-on belül egyezik. Ha a sáv
    stall_window lépésig nem szűkül (periodikus mátrix), M + eps*I-vel
    folytatjuk, eps = shift_factor * ||M||, és a végén eps-et levonjuk.

    Az alapértelmezett shift_factor 1.0, nem 1e-8: ekkora eltolás mellett a
    periodikus mátrixok hányados-sávja 10^6 lépésen belül sem szűkül, az
    eps = ||M|| eltolás viszont a Perron gyök körüli rést ||M|| nagyságrendűvé
    teszi.

    Args:
        M: Nemnegatív négyzetes mátrix
        tol: Relatív tűrés
        max_iterations: Maximális lépésszám
        stall_window: Javulás nélküli lépések száma az eltolás előtt
        shift_factor: Az eltolás mértéke ||M|| arányában

    Returns:
        float: rho(M)
    """
    Mm = _as_square(M, 'M')
    if np.any(Mm < 0):
        raise InvalidInputError("spectral_radius expects a nonnegative matrix", field='M')

    settings = Settings.get_system_settings()
    tol = settings['power_tolerance'] if tol is None else tol
    max_iterations = settings['power_max_iterations'] if max_iterations is None else max_iterations
    stall_window = settings['power_stall_window'] if stall_window is None else stall_window
    shift_factor = settings['power_shift_factor'] if shift_factor is None else shift_factor

    norm = inf_norm(Mm)
    if norm == 0.0:
        return 0.0

    v = ones(Mm.shape[0])
    shift = 0.0
    best_width = np.inf
    since_progress = 0
    lower, upper = 0.0, norm

    for _ in range(int(max_iterations)):
        w = Mm @ v + shift * v
        w_norm = inf_norm(w)
        if w_norm == 0.0:
            # Nilpotens mátrix
            return 0.0

        lower, upper = _collatz_wielandt(w, v)
        width = upper - lower
        if width <= tol * max(upper, np.finfo(float).tiny):
            return max(0.5 * (lower + upper) - shift, 0.0)

        if width < best_width:
            best_width = width
            since_progress = 0
        else:
            since_progress += 1
            if since_progress >= stall_window and shift == 0.0:
                shift = shift_factor * norm
                best_width = np.inf
                since_progress = 0

        v = w / w_norm

    raise NoConvergenceError(
        f"power iteration did not converge in {max_iterations} iterations",
        bracket=(max(lower - shift, 0.0), upper - shift),
    )


def is_irreducible(M: ArrayLike) -> bool:
    """
    Irreducibilitás: az i->j (M[i][j] > 0) gráf erősen összefüggő-e.

    Egy előre és egy fordított szélességi bejárás a 0 csúcsból. Az 1x1 mátrix
    megállapodás szerint irreducibilis.

    Args:
        M: Nemnegatív négyzetes mátrix

    Returns:
        bool: True, ha irreducibilis
    """
    Mm = _as_square(M, 'M')
    n = Mm.shape[0]
    if n == 1:
        return True
    graph = csr_matrix((Mm > 0).astype(float))
    forward = breadth_first_order(graph, 0, directed=True, return_predecessors=False)
    if forward.size != n:
        return False
    reverse = breadth_first_order(graph.T.tocsr(), 0, directed=True, return_predecessors=False)
    return bool(reverse.size == n)
