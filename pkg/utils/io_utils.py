"""
IO Utils - JSON példányok és CSV táblázatok olvasása / írása
"""
import json
import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from config.settings import Settings
from core.exceptions import InvalidInputError
from core.qve_model import MbtRates, Qve, from_rates
from utils.logger import setup_logger

logger = setup_logger('io_utils')


def read_json(path: str) -> Any:
    """
    JSON fájl beolvasása.

    Args:
        path: Fájl útja

    Returns:
        A beolvasott érték
    """
    if not os.path.exists(path):
        raise InvalidInputError(f"file not found: {path}", field=path)
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"malformed JSON in {path}: {e}", field=path) from e


def write_json(path: str, data: Any):
    """
    JSON fájl írása (a könyvtárat szükség esetén létrehozza).

    Args:
        path: Fájl útja
        data: Szerializálható érték
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(data, f, indent=2)
    logger.debug(f"Wrote {path}")


def load_qve(path: str) -> Qve:
    """
    QVE betöltése példány formátumból, vagy ráta formátumból (D0 mező esetén) felépítve.

    Args:
        path: JSON fájl útja

    Returns:
        Qve: A példány
    """
    data = read_json(path)
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path}: expected a JSON object", field=path)
    if 'D0' in data:
        return from_rates(MbtRates.from_dict(data))
    return Qve.from_dict(data)


def load_vector(path: str, n: Optional[int] = None, key: str = 'x') -> np.ndarray:
    """
    Vektor betöltése: sima lista vagy {key: [...]} objektum.

    Args:
        path: JSON fájl útja
        n: Elvárt hossz (opcionális)
        key: Az objektum mezője

    Returns:
        np.ndarray: A vektor
    """
    data = read_json(path)
    if isinstance(data, dict):
        if key not in data:
            raise InvalidInputError(f"missing field '{key}' in {path}", field=key)
        data = data[key]
    try:
        vector = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"field '{key}' is not numeric: {e}", field=key) from e
    if vector.ndim != 1 or (n is not None and vector.size != n):
        raise InvalidInputError(f"field '{key}' must be a vector of length {n}", field=key)
    return vector


def load_matrix(path: str, shape: tuple, key: str = 'dB') -> np.ndarray:
    """
    Mátrix betöltése: beágyazott lista vagy {key: [[...]]} objektum.

    Args:
        path: JSON fájl útja
        shape: Elvárt alak
        key: Az objektum mezője

    Returns:
        np.ndarray: A mátrix
    """
    data = read_json(path)
    if isinstance(data, dict):
        if key not in data:
            raise InvalidInputError(f"missing field '{key}' in {path}", field=key)
        data = data[key]
    try:
        matrix = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"field '{key}' is not numeric: {e}", field=key) from e
    if matrix.shape != tuple(shape):
        raise InvalidInputError(f"field '{key}' must have shape {tuple(shape)}, got {matrix.shape}", field=key)
    return matrix


def write_table_csv(rows: List[Dict], columns: List[str], out) -> pd.DataFrame:
    """
    Táblázat sorok írása CSV-be tudományos alakban, 6 értékes jeggyel.

    Args:
        rows: Sorok szótárként
        columns: Oszlop sorrend
        out: Fájl út vagy írható objektum

    Returns:
        pd.DataFrame: A kiírt táblázat
    """
    df = pd.DataFrame(rows, columns=columns)
    # Az egész értékű oszlopok ne kapjanak lebegőpontos formát
    if 'seed' in df.columns:
        df['seed'] = df['seed'].astype('Int64')
    df.to_csv(out, index=False, float_format=Settings.get_setting('csv_float_format'))
    return df


def read_table_csv(path: str) -> pd.DataFrame:
    """
    Kiírt táblázat visszaolvasása.

    Args:
        path: CSV fájl útja

    Returns:
        pd.DataFrame: A táblázat
    """
    return pd.read_csv(path, dtype={'seed': 'Int64'})
