"""
rpnkit - Análise de Redes de Petri Recursivas
Arquivo de entrada da linha de comando
"""

import sys
from pathlib import Path

# Configurar o caminho antes de importar o pacote src
repo_root = Path(__file__).parent
sys.path.insert(0, str(repo_root))

from src.cli.app import main

if __name__ == '__main__':
    sys.exit(main())
