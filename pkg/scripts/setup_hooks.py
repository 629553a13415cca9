#!/usr/bin/env python3
"""Install the pre-commit hooks (black, flake8) defined in .pre-commit-config.yaml"""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def install_pre_commit():
    """Install pre-commit and register the repository hooks"""
    if not (ROOT / ".pre-commit-config.yaml").exists():
        print(f"Error: no .pre-commit-config.yaml in {ROOT}")
        sys.exit(1)
    try:
        subprocess.run([sys.executable, '-m', 'pip', 'install', 'pre-commit'], check=True)
        subprocess.run(['pre-commit', 'install'], cwd=ROOT, check=True)

        print("Running hooks on all files...")
        subprocess.run(['pre-commit', 'run', '--all-files'], cwd=ROOT, check=False)

        print("Pre-commit hooks installed")

    except subprocess.CalledProcessError as e:
        print(f"Error installing pre-commit hooks: {e}")
        sys.exit(1)


if __name__ == "__main__":
    install_pre_commit()
