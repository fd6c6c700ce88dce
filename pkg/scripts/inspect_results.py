"""
Results Inspection Tool
=======================
Standalone utility for exploring the output directory of a run.

Usage:
    python scripts/inspect_results.py results/

Features:
- Display the run summary with every check verdict
- Show the columns, row count and per-curve final values of each CSV
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

import pandas as pd

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))


class ResultsInspector:
    """Reads summary.json and the CSV tables of one output directory"""

    def __init__(self, out_dir: str = "results"):
        self.out_dir = out_dir
        self.summary: Optional[Dict[str, Any]] = None

    def __enter__(self):
        path = os.path.join(self.out_dir, "summary.json")
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as f:
                self.summary = json.load(f)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.summary = None

    def get_tables(self) -> List[str]:
        """CSV files listed in the summary, or found in the directory"""
        if self.summary and self.summary.get("files"):
            return list(self.summary["files"])
        return sorted(name for name in os.listdir(self.out_dir) if name.endswith(".csv"))

    def load_table(self, name: str) -> pd.DataFrame:
        return pd.read_csv(os.path.join(self.out_dir, name))

    def final_values(self, frame: pd.DataFrame) -> pd.DataFrame:
        """Last row of every curve for per-kick tables"""
        if "curve" in frame.columns and "n" in frame.columns:
            return frame.sort_values("n").groupby("curve", sort=False).tail(1).reset_index(drop=True)
        return frame.head(5)

    def print_header(self, text: str, char: str = "="):
        """Print a formatted header"""
        print(f"\n{char * 80}")
        print(f"{text}")
        print(f"{char * 80}")

    def print_summary(self):
        """Print checks of the run summary"""
        self.print_header("RUN SUMMARY")
        if self.summary is None:
            print("\nNo summary.json found.")
            return
        print(f"\nExperiment: {self.summary['experiment']}")
        print(f"Seed: {self.summary['seed']}")
        print(f"All checks passed: {self.summary['all_passed']}")
        print("\nCHECKS:")
        print("-" * 80)
        for name in sorted(self.summary["empirical"]):
            verdict = self.summary["pass"].get(name)
            label = "INFO" if verdict is None else ("PASS" if verdict else "FAIL")
            analytic = self.summary["analytic"].get(name)
            analytic_str = "-" if analytic is None else f"{analytic:.4f}"
            empirical = self.summary["empirical"][name]
            empirical_str = "nan" if empirical is None else f"{empirical:.6g}"
            print(f"  [{label:4}] {name:45} {empirical_str:>12}  analytic {analytic_str}")

    def print_table_overview(self, name: str):
        """Print columns, size and final values of one table"""
        self.print_header(f"TABLE: {name}", "-")
        frame = self.load_table(name)
        print(f"\nCOLUMNS: {', '.join(frame.columns)}")
        print(f"TOTAL ROWS: {len(frame)}")
        print("\nFINAL VALUES:")
        print(self.final_values(frame).to_string(index=False))

    def run_full_inspection(self, summary_only: bool = False):
        print("=" * 80)
        print("RESULTS INSPECTION TOOL")
        print(f"Directory: {self.out_dir}")
        print("=" * 80)
        self.print_summary()
        if summary_only:
            return
        for name in self.get_tables():
            self.print_table_overview(name)


def main():
    """Main entry point"""
    parser = argparse.ArgumentParser(
        description='Inspect a tomochaos output directory',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/inspect_results.py results/                  # Full inspection
  python scripts/inspect_results.py results/ --summary-only   # Checks only
        """
    )
    parser.add_argument('out_dir', nargs='?', default='results', help='Output directory (default: results)')
    parser.add_argument('--summary-only', action='store_true', help='Show only the run summary')
    args = parser.parse_args()

    if not os.path.isdir(args.out_dir):
        print(f"ERROR: Output directory not found: {args.out_dir}")
        print("\nRun an experiment first:")
        print("  python main.py AnalyticTable")
        sys.exit(1)

    with ResultsInspector(args.out_dir) as inspector:
        inspector.run_full_inspection(summary_only=args.summary_only)


if __name__ == "__main__":
    main()
