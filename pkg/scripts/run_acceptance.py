"""Run the acceptance suite and show its PASS/FAIL line per criterion.

    python3 scripts/run_acceptance.py
"""
import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    root = Path(__file__).resolve().parents[1]
    sys.exit(pytest.main(["-q", "-p", "no:cacheprovider", str(root / "tests" / "test_acceptance.py")]))
