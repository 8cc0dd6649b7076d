"""Run the acceptance suite and print one PASS/FAIL line per criterion.

    python3 scripts/run_acceptance.py
"""

import subprocess
import sys
from pathlib import Path

root = Path(__file__).resolve().parents[1]
proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                       str(root / "tests" / "test_acceptance.py")], capture_output=True, text=True)
lines = [l for l in proc.stdout.splitlines() if l.startswith("[criterion")]
print("\n".join(lines))
print(f"{sum('PASS' in l for l in lines)}/{len(lines)} criteria passed")
sys.exit(proc.returncode)
