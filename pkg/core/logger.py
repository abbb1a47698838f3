"""
Sistema di logging per HubLine.
Console sempre attiva; file di log agganciato dalla CLI.
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Optional

from config.settings import LOG_FILE, LOG_LEVEL_FILE, LOG_LEVEL_CONSOLE


class HubLineLogger:
    """Gestisce il logging della libreria e della CLI."""

    def __init__(self):
        self.logger = logging.getLogger('HubLine')
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        # Rimuovi handler esistenti
        if self.logger.hasHandlers():
            self.logger.handlers.clear()

        self._formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        self._file_handler: Optional[logging.FileHandler] = None

        console_handler = logging.StreamHandler()
        console_handler.setLevel(LOG_LEVEL_CONSOLE)
        console_handler.setFormatter(self._formatter)
        self.logger.addHandler(console_handler)

    def setup_file_logging(self, path: Optional[Path] = None):
        """Aggancia l'handler su file, ripulendo il log precedente."""
        path = Path(path) if path else LOG_FILE
        if self._file_handler is not None:
            self.logger.removeHandler(self._file_handler)
            self._file_handler.close()

        path.parent.mkdir(parents=True, exist_ok=True)
        # Modalità 'w' per pulire il file ad ogni avvio
        file_handler = logging.FileHandler(path, mode='w', encoding='utf-8')
        file_handler.setLevel(LOG_LEVEL_FILE)
        file_handler.setFormatter(self._formatter)
        self._write_startup_header(file_handler)
        self.logger.addHandler(file_handler)
        self._file_handler = file_handler
        self.logger.info(f"Log su file attivo: {path}")

    @staticmethod
    def _write_startup_header(handler: logging.FileHandler):
        """Scrive l'intestazione di avvio nel log."""
        header = f"\n{'=' * 70}\n"
        header += "  HUBLINE - AVVIO ESECUZIONE\n"
        header += f"  Timestamp: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n"
        header += f"{'=' * 70}\n"
        if handler.stream:
            handler.stream.write(header)

    def set_console_level(self, level):
        for handler in self.logger.handlers:
            if not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)

    def log_dependency_check(self, missing_packages):
        """Registra il risultato del controllo dipendenze."""
        if not missing_packages:
            self.logger.info("✓ Tutte le dipendenze sono installate")
        else:
            self.logger.warning(f"✗ Dipendenze mancanti: {', '.join(missing_packages)}")

    def log_run_action(self, action, details=""):
        """Registra un passo di un comando CLI."""
        self._log_tagged("RUN", action, details)

    def log_paths_action(self, action, details=""):
        """Registra un passo della generazione dei cammini."""
        self._log_tagged("PATHS", action, details)

    def log_solver_action(self, action, details=""):
        """Registra l'avanzamento dei solutori."""
        self._log_tagged("SOLVER", action, details)

    def log_milp_action(self, action, details=""):
        """Registra costruzione/export del modello e il ciclo di tagli."""
        self._log_tagged("MILP", action, details)

    def debug(self, msg):
        self.logger.debug(msg)

    def warning(self, msg):
        self.logger.warning(msg)

    def log_error(self, error_msg, exception=None):
        """Registra un errore."""
        self.logger.error(error_msg)
        if exception:
            self.logger.debug("Dettaglio eccezione", exc_info=exception)

    def _log_tagged(self, tag, action, details):
        msg = f"[{tag}] {action}"
        if details:
            msg += f" - {details}"
        self.logger.info(msg)


# Istanza globale
logger = HubLineLogger()
