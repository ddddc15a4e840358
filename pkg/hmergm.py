import sys
from pathlib import Path

# Ajout du répertoire racine au PYTHONPATH
sys.path.append(str(Path(__file__).parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
