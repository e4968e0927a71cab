#!/usr/bin/env python3
"""
Entry point for the scene grammar command line.
Usage examples:
    python scripts/scene_grammar.py gen --n 84 --seed 7 --out data/corpus
    python scripts/scene_grammar.py train --corpus data/corpus --out models/office.json
    python scripts/scene_grammar.py eval --corpus data/corpus --out reports/labels.tsv
"""
import sys
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
