"""Quick operational readiness helper.

Prints the loaded configuration, then runs the numerical self checks
(config, log folder, distance split, annihilation, kernel inner products,
distance formula, minimal norm, interpolation constant). Run it after
changing config.yaml or upgrading numpy/scipy, before long batch runs.
"""
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pprint import pprint

from cli import run_self_checks
from config import APP_CONFIG, CONFIG_PATH


def main() -> None:
    print(f"Loaded configuration ({CONFIG_PATH}):")
    pprint(APP_CONFIG)
    print("\nSelf checks:")
    results = run_self_checks()
    pprint(results)
    failed = [entry['name'] for entry in results if entry['status'] != 'OK']
    if failed:
        raise SystemExit(f"Self checks failed: {', '.join(failed)}")


if __name__ == '__main__':
    main()
