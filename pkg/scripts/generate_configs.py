"""
Config Generator
Writes configs/*.json for the default experiment grid (alpha = 1.4, j = 10)
"""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from tomochaos.config import parse_config  # noqa: E402
from tomochaos.state import SWEEP_LAMBDAS  # noqa: E402


def default_grid() -> dict:
    """File name -> config document"""
    lambdas = list(SWEEP_LAMBDAS)
    grid = {}
    for lam in lambdas:
        grid[f"phase_portrait_{lam}.json"] = {"experiment": "PhasePortrait", "lambda": lam}
    grid["fidelity_sweep.json"] = {"experiment": "FidelitySweep", "lambda_list": lambdas, "n_kicks": 100}
    grid["fidelity_sweep_haar.json"] = {
        "experiment": "FidelitySweep", "lambda_list": lambdas, "n_kicks": 100, "dynamics": "HaarPerStep",
    }
    grid["entropy_sweep.json"] = {
        "experiment": "EntropySweep", "lambda_list": lambdas, "n_kicks": 500, "n_states": 10, "evaluate_every": 10,
    }
    grid["fisher_sweep.json"] = {"experiment": "FisherSweep", "lambda_list": lambdas, "n_kicks": 100}
    for ensemble in ("ParityBlockCOE", "CUE"):
        grid[f"ensemble_compare_{ensemble}.json"] = {
            "experiment": "EnsembleCompare", "ensemble": ensemble, "lambda": 7.0,
            "n_kicks": 500, "n_states": 10, "evaluate_every": 10,
        }
    grid["analytic_table.json"] = {"experiment": "AnalyticTable"}
    return grid


def generate_configs(out_dir: Path) -> None:
    """Validate and write every config of the default grid"""
    out_dir.mkdir(parents=True, exist_ok=True)
    print(f"Writing configs to {out_dir}...")
    for name, document in default_grid().items():
        text = json.dumps(document, indent=2)
        parse_config(text)
        (out_dir / name).write_text(text + "\n", encoding="utf-8")
        print(f"  {name}")
    print(f"\n[SUCCESS] {len(default_grid())} configs written")
    print("\nNext step: python main.py FidelitySweep --config configs/fidelity_sweep.json")


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "configs"
    generate_configs(target)
