"""
Settings - Alap konfigurációk (tűréshatárok, iterációs limitek, naplózás)
"""
import os
import json
import logging
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

# Környezeti változók betöltése (.env fájlból is)
load_dotenv()

_logger = logging.getLogger(__name__)


class Settings:
    """
    Rendszer beállítások kezelése

    Minden numerikus tűréshatár egy helyen van, a modulok innen olvassák
    az alapértelmezett értékeket.
    """

    # Alapértelmezett beállítások
    DEFAULT_SETTINGS = {
        # Általános beállítások
        'app_name': 'MBT Extinction Toolkit',
        'app_version': '1.0.0',
        'log_level': 'INFO',
        'log_to_file': False,
        'log_file': 'logs/mbt_qve.log',

        # Lineáris algebra
        'pivot_tolerance': 1e-14,           # LU pivot küszöb ||A||-hoz skálázva
        'power_tolerance': 1e-12,           # max/min hányados egyezése
        'power_max_iterations': 1000000,
        'power_stall_window': 1000,         # ennyi javulás nélküli lépés után eltolás
        'power_shift_factor': 1.0,          # eltolás: eps = factor * ||M||

        # QVE modell
        'validation_tolerance': 1e-12,      # P2: ||a + B(e⊗e) - e||
        'critical_tolerance': 1e-12,        # |rho(R) - 1| <= tol => kritikus
        'clamp_tolerance': 1e-15,           # [0,1]-en kívüli kerekítési hibák levágása
        'rates_tolerance': 1e-12,           # D0e + D1e + d = 0, sztochasztikus sorok
        'negative_entry_tolerance': 1e-12,  # from_rates negatív elemek

        # Megoldók
        'solver_tolerance': 1e-14,
        'newton_max_iterations': 100,
        'depth_max_iterations': 200000,
        'near_singular_ratio': 0.5,         # 4*l^2*||B||*gamma a Newton határértékben
        'near_singular_polish_steps': 50,   # extra Newton lépések a határérték ellenőrzéséhez

        # Korlátok
        'discriminant_clamp': 1e-15,

        # Szimuláció
        'distribution_renormalize_tolerance': 1e-12,
        'distribution_reject_tolerance': 1e-9,
        'simulation_block_size': 10000,
        'simulation_max_generations': 100000,
        'simulation_n_jobs': 1,

        # Kísérletek
        'default_seed': 20240101,
        'csv_float_format': '%.5e',         # 6 értékes jegy
    }

    # Környezeti változó -> beállítás kulcs
    ENV_OVERRIDES = {
        'MBT_QVE_SEED': ('default_seed', int),
        'MBT_QVE_LOG_LEVEL': ('log_level', str),
        'MBT_QVE_LOG_FILE': ('log_file', str),
    }

    _cached_settings: Optional[Dict[str, Any]] = None
    _cached_key: Optional[Tuple[str, ...]] = None

    @classmethod
    def settings_file(cls) -> str:
        """
        Beállítások fájl elérési útja

        Returns:
            str: A JSON beállítás fájl útja
        """
        return os.getenv('MBT_QVE_SETTINGS', os.path.join('config', 'system_settings.json'))

    @classmethod
    def _cache_key(cls) -> Tuple[str, ...]:
        return (cls.settings_file(),) + tuple(os.getenv(name, '') for name in cls.ENV_OVERRIDES)

    @classmethod
    def get_system_settings(cls) -> Dict[str, Any]:
        """
        Rendszer beállítások lekérdezése

        Az alapértelmezett értékeket a JSON fájl (ha létezik), majd a
        környezeti változók írják felül. Az eredmény gyorsítótárban marad,
        amíg a beállítás fájl útja és a környezeti változók nem változnak;
        a fájl tartalmának változása után reload() kell.

        Returns:
            dict: Rendszer beállítások (másolat)
        """
        return dict(cls._current())

    @classmethod
    def _current(cls) -> Dict[str, Any]:
        key = cls._cache_key()
        if cls._cached_settings is None or cls._cached_key != key:
            cls._cached_settings = cls._load_settings(key[0])
            cls._cached_key = key
        return cls._cached_settings

    @classmethod
    def _load_settings(cls, settings_file: str) -> Dict[str, Any]:
        merged_settings = cls.DEFAULT_SETTINGS.copy()

        if os.path.exists(settings_file):
            try:
                with open(settings_file, 'r') as f:
                    merged_settings.update(json.load(f))
            except Exception as e:
                _logger.error(f"Error loading settings file {settings_file}: {e}")

        for env_name, (key, cast) in cls.ENV_OVERRIDES.items():
            value = os.getenv(env_name)
            if value is None or value == '':
                continue
            try:
                merged_settings[key] = cast(value)
            except ValueError:
                _logger.warning(f"Ignoring invalid {env_name}={value!r}")

        return merged_settings

    @classmethod
    def reload(cls) -> Dict[str, Any]:
        """
        A gyorsítótár ürítése és a beállítások újraolvasása

        Returns:
            dict: Rendszer beállítások
        """
        cls._cached_settings = None
        cls._cached_key = None
        return cls.get_system_settings()

    @classmethod
    def get_setting(cls, key: str, default: Optional[Any] = None) -> Any:
        """
        Egy beállítás lekérdezése

        Args:
            key (str): Beállítás kulcsa
            default: Alapértelmezett érték, ha a beállítás nem található

        Returns:
            Beállítás értéke vagy az alapértelmezett érték
        """
        return cls._current().get(key, default)

    @classmethod
    def resolve(cls, config: Optional[Dict[str, Any]], key: str) -> Any:
        """
        Egy kulcs feloldása: előbb a komponens saját konfigurációja, aztán a rendszer beállítások.

        Args:
            config: Komponens konfiguráció (lehet None)
            key: Beállítás kulcsa

        Returns:
            A feloldott érték
        """
        if config and key in config:
            return config[key]
        return cls.get_setting(key)
