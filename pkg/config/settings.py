"""
Configurazione globale di HubLine.
"""
import logging
import os
from pathlib import Path

# Percorsi del progetto
PROJECT_ROOT = Path(__file__).parent.parent
LOG_FILE = PROJECT_ROOT / "hubline_log.txt"

# Impostazioni di Logging
LOG_LEVEL_FILE = logging.DEBUG
LOG_LEVEL_CONSOLE = logging.INFO

# Tolleranze numeriche
EPS = 1e-9                 # confronti tra tempi e profitti
INTEGRALITY_TOL = 1e-6     # verifica di soluzioni MILP esterne
SEC_SUPPORT_THRESHOLD = 0.5

# Limiti di enumerazione
DEFAULT_K_CAP = 100_000          # cammini per commodity nel calcolo del bound
DEFAULT_LINE_CAP = 10 ** 7       # linee per solve_enumerate
DEFAULT_BNB_NODE_CAP = 10 ** 7   # nodi espansi da solve_bnb

# Parametri di default dell'istanza
DEFAULT_P = 3
DEFAULT_ALPHA = 0.5
DEFAULT_R = 1.7
DEFAULT_VARTHETA = 0.1
DEFAULT_SEED = 1

# Formato CAB
CAB_SIZE = 25

# Generatore SplitMix64 (bit-exact)
SPLITMIX_GOLDEN = 0x9E3779B97F4A7C15
SPLITMIX_MUL_1 = 0xBF58476D1CE4E5B9
SPLITMIX_MUL_2 = 0x94D049BB133111EB
MASK_64 = (1 << 64) - 1

# Sotto-seed derivati dal --seed unico
REVENUE_SEED_OFFSET = 1
SPARSIFY_SEED_OFFSET = 2

# Sparsificazione degli archi hub
SPARSIFY_TRIM_FRACTION = 0.1

# Pool di processi per la generazione dei cammini (CPU logiche / 2)
DEFAULT_WORKERS = max(1, (os.cpu_count() or 2) // 2)

# Export MILP
# limite superiore esplicito delle variabili di flusso (infinito MPS)
MPS_INFINITY = 1e20

# Codici di uscita della CLI
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_CAPPED = 3
EXIT_IO = 4

# File prodotti nella directory --out
RUN_REPORT_FILE = "run_report.json"
CANDIDATES_FILE = "candidates.csv"
BOUNDS_FILE = "bounds.csv"
SOLUTION_FILE = "solution.csv"
SEC_CUTS_FILE = "sec_cuts.json"
GEOJSON_FILE = "hub_line.geojson"

# Dipendenze richieste
REQUIRED_PACKAGES = [
    "numpy",
    "networkx",
    "pulp",
]
