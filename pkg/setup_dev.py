#!/usr/bin/env python3
"""Development environment setup script.

Installs the package with its dev extras, installs the pre-commit hooks and finishes with a quick
acceptance run on the worked instance so a broken install shows up before the first commit.
"""

import argparse
import subprocess
import sys
from pathlib import Path
from typing import List

# Smoke run: the quick selftest on the default instance, report discarded
SMOKE_COMMAND = [sys.executable, "-m", "src.cli", "selftest", "--quick"]


def run_command(cmd: List[str], description: str) -> bool:
    """Run a command and return success status."""
    print(f"🔧 {description}...")
    try:
        subprocess.run(cmd, check=True, capture_output=True, text=True)
        print(f"✅ {description} completed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"❌ {description} failed:")
        print(f"   Command: {' '.join(cmd)}")
        print(f"   Error: {e.stderr.strip().splitlines()[-1] if e.stderr.strip() else e.returncode}")
        return False


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Set up the elliptic-logconn development environment")
    parser.add_argument("--skip-hooks", action="store_true", help="Do not install or run the pre-commit hooks")
    parser.add_argument("--skip-smoke", action="store_true", help="Do not run the quick selftest at the end")
    return parser


def main():
    """Set up the development environment."""
    args = create_parser().parse_args()
    print("🚀 Setting up elliptic-logconn development environment\n")

    if not Path("pyproject.toml").exists() or not Path("src", "data", "samples.yaml").exists():
        print("❌ Error: pyproject.toml or src/data/samples.yaml not found. Run this script from the project root.")
        sys.exit(1)

    steps = [([sys.executable, "-m", "pip", "install", "-e", ".[dev]"], "Installing development dependencies")]
    if not args.skip_hooks:
        steps.append(([sys.executable, "-m", "pre_commit", "install"], "Installing pre-commit hooks"))
        steps.append(([sys.executable, "-m", "pre_commit", "run", "--all-files"], "Running code quality checks"))
    if not args.skip_smoke:
        steps.append((SMOKE_COMMAND, "Running the quick selftest on instance A"))

    failed = [description for cmd, description in steps if not run_command(cmd, description)]

    if not failed:
        print("\n🎉 Development environment setup completed successfully!")
        print("\n🔍 Useful commands:")
        print("   python run_tests.py --skip-slow        # Tests without the full-count selftest")
        print("   python -m src.cli selftest --quick     # Quick acceptance run")
        print("   python -m src.cli app-analyze --z1 3 --z2 3")
        print("   mypy src/ && flake8 src/               # Type checking and linting")
    else:
        print(f"\n❌ Development environment setup failed at: {', '.join(failed)}")
        sys.exit(1)


if __name__ == "__main__":
    main()
