#!/usr/bin/env python3
"""
Regularized RankCentrality command-line launcher.

    python regrank.py simulate --n 200 --m 400 --scores linear --seed 1 \
        --out-comparisons data/input/comparisons.csv --out-truth data/input/truth.csv
    python regrank.py rank --comparisons data/input/comparisons.csv \
        --regularizer lambda --eta 0.1667 --out data/output/scores.csv
    python regrank.py sweep --config data/input/configs/linear_eta_sweep.json
"""

import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent
sys.path.append(str(PROJECT_ROOT))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
