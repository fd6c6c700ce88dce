"""
Environment Setup Script
Prompts for runtime settings, then generates the .env file read by main.py
"""
import os
import sys
from pathlib import Path


def ask(prompt: str, default: str) -> str:
    value = input(f"{prompt} (default: {default}): ").strip()
    return value if value else default


def setup_environment():
    """Interactive setup for environment variables"""
    print("=" * 60)
    print("tomochaos - Environment Setup")
    print("=" * 60)
    print()

    print("Step 1: Parallelism")
    print("-" * 40)
    cpu_default = str(max(1, (os.cpu_count() or 2) - 1))
    workers = ask("Enter TOMOCHAOS_WORKERS (parallel worker processes)", cpu_default)
    try:
        if int(workers) < 1:
            raise ValueError
    except ValueError:
        print(f"WARNING: Invalid worker count, using default: {cpu_default}")
        workers = cpu_default

    print()
    print("Step 2: Output")
    print("-" * 40)
    output_dir = ask("Enter OUTPUT_DIR for CSV/JSON results", "results")

    print()
    log_level = ask("Enter LOG_LEVEL (DEBUG, INFO, WARNING)", "INFO").upper()
    if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        print("WARNING: Unknown log level, using default: INFO")
        log_level = "INFO"

    print()

    env_path = Path(__file__).parent.parent / ".env"

    env_content = f"""# tomochaos - Environment Configuration
# Generated by setup_env.py

# Parallel workers used for curves and ensemble samples
TOMOCHAOS_WORKERS={workers}

# Directory for CSV tables and summary.json
OUTPUT_DIR={output_dir}

# Debug Mode (set to true for technical error details)
DEBUG_MODE=false

# Logging
LOG_LEVEL={log_level}
"""

    try:
        with open(env_path, 'w', encoding='utf-8') as f:
            f.write(env_content)

        print("Environment file created successfully!")
        print(f"  Location: {env_path.absolute()}")
        print()
        print("Next steps:")
        print("  1. Run: python scripts/generate_configs.py")
        print("  2. Run: python main.py FidelitySweep --config configs/fidelity_sweep.json")
        print()

    except OSError as e:
        print(f"ERROR: Failed to create .env file: {e}")
        sys.exit(1)


if __name__ == "__main__":
    setup_environment()
