"""
Funzioni di utilità e helper per HubLine.
"""

import sys
from importlib import import_module

from config.settings import REQUIRED_PACKAGES


def check_dependencies():
    """
    Controlla lo stato delle dipendenze del sistema.
    Ritorna un dizionario con lo stato di ogni dipendenza.
    """
    status = {
        'all_ok': True,
        'python_version': f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}",
        'missing': [],
        'versions': {},
    }
    for lib_name in REQUIRED_PACKAGES:
        try:
            module = import_module(lib_name)
            status['versions'][lib_name] = getattr(module, '__version__', '?')
        except ImportError:
            status['all_ok'] = False
            status['missing'].append(lib_name)
    return status


def format_time(seconds: float) -> str:
    """Formatta secondi in HH:MM:SS.mmm."""
    if not isinstance(seconds, (int, float)) or seconds < 0:
        return "00:00:00.000"

    ms = int(round(seconds * 1000))
    hours = ms // 3_600_000
    minutes = (ms % 3_600_000) // 60_000
    secs = (ms % 60_000) // 1000
    millis = ms % 1000
    return f"{hours:02d}:{minutes:02d}:{secs:02d}.{millis:03d}"


def format_float(value: float) -> str:
    """Rappresentazione testuale stabile per CSV e report."""
    return f"{value:.12g}"
