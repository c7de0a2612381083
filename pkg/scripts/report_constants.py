"""Print the assumption constants and the rate exponent for one or more configs."""

import sys
from pathlib import Path

from stablepide.experiments.config import load_config
from stablepide.experiments.runners import report_constants

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    paths = [Path(a) for a in sys.argv[1:]] or sorted((ROOT / "configs").glob("*.cfg"))
    for path in paths:
        rep = report_constants(load_config(path))
        print(f"# {path.name}: Gamma = {rep.predicted_gamma:.6g} ({rep.provenance.get('q', '')})")
        sys.stdout.write(rep.to_csv())
