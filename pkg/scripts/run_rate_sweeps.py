"""Run every rate and CLT config under configs/ and write one CSV and one JSON per run."""

import argparse
from pathlib import Path

from stablepide.experiments.config import load_config
from stablepide.experiments.runners import run_clt_experiment, run_rate_experiment

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", type=Path, default=Path("sweeps"))
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    jobs = [(c, run_rate_experiment) for c in sorted((ROOT / "configs").glob("*rate*.cfg"))]
    jobs += [(c, run_clt_experiment) for c in sorted((ROOT / "configs").glob("clt*.cfg"))]
    status = 0
    for path, runner in jobs:
        rep = runner(load_config(path, timing=True), threads=args.threads)
        (args.out / f"{path.stem}.csv").write_text(rep.to_csv())
        (args.out / f"{path.stem}.json").write_text(rep.to_json())
        verdict = "ok" if rep.passed else "FAILED " + ",".join(k for k, v in rep.passes.items() if not v)
        print(f"{path.stem:20s} slope={rep.fitted_slope:+.4f} Gamma={rep.predicted_gamma:.4f} {verdict}")
        status |= not rep.passed
    return status


if __name__ == "__main__":
    raise SystemExit(main())
