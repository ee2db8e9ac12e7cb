"""
iddlab
Gaussian components of symmetric infinitely divisible laws: root-rescale
limits, the Laplace analog for positive laws, kurtosis scaling, lambda_r
CLT-rate bounds and the stable-vs-Gaussian comparison

Usage: python main.py <subcommand> [options]    (python main.py --help)
"""

import sys
import os

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli.coordinator import run


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
