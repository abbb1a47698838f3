#!/usr/bin/env python3
"""
HubLine - localizzazione esatta di una linea di hub con domanda elastica
Entry point della riga di comando
"""

import sys
from pathlib import Path

# Aggiungi il percorso del progetto al PYTHONPATH
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from ui.cli import main

if __name__ == "__main__":
    sys.exit(main())
