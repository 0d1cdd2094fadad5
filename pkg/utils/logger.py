"""
Logger - Naplózás beállítása a modulok számára
"""
import os
import logging
from logging.handlers import RotatingFileHandler

from config.settings import Settings

_FORMAT = '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'


def setup_logger(name: str) -> logging.Logger:
    """
    Elnevezett logger létrehozása konzol és (opcionálisan) forgó fájl kezelővel.

    Args:
        name: A logger neve (általában a modul neve)

    Returns:
        logging.Logger: A beállított logger
    """
    logger = logging.getLogger(f"mbt_qve.{name}")

    # Már beállított loggert nem konfigurálunk újra
    if logger.handlers:
        return logger

    settings = Settings.get_system_settings()
    level = getattr(logging, str(settings.get('log_level', 'INFO')).upper(), logging.INFO)
    logger.setLevel(level)

    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    stream_handler.setLevel(logging.WARNING)
    logger.addHandler(stream_handler)

    if settings.get('log_to_file'):
        log_file = settings.get('log_file', 'logs/mbt_qve.log')
        try:
            os.makedirs(os.path.dirname(log_file) or '.', exist_ok=True)
            file_handler = RotatingFileHandler(log_file, maxBytes=10240, backupCount=10)
            file_handler.setFormatter(logging.Formatter(_FORMAT))
            file_handler.setLevel(level)
            logger.addHandler(file_handler)
        except OSError as e:
            logger.warning(f"File logging disabled: {e}")

    return logger
