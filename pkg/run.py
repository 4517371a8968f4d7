#!/usr/bin/env python
"""
Run script for the quadratic Fock space toolkit.

This script provides an easy way to run the command line front end,
the acceptance suite or the test suite.
"""

import argparse
import os
import sys
from dotenv import load_dotenv

def run_tests():
    """Run the test suite."""
    import pytest
    
    print("Running tests...")
    return pytest.main(["-v", "tests/"])

def run_selftest(seed: int):
    """Run the acceptance criteria."""
    from cli.cli_interface import main as cli_main
    
    return cli_main(["selftest", "--seed", str(seed)])

def run_cli(argv):
    """Run the CLI interface."""
    from cli.cli_interface import main as cli_main
    
    return cli_main(argv)

if __name__ == "__main__":
    # Load environment variables
    load_dotenv()
    
    parser = argparse.ArgumentParser(description="Run the quadratic Fock space toolkit")
    
    parser.add_argument(
        "mode", 
        choices=["cli", "test", "selftest"],
        help="Run mode: 'cli' to run a subcommand, 'test' to run tests, 'selftest' to run the acceptance suite"
    )
    parser.add_argument("--seed", type=int, default=0, help="Seed for 'selftest'")
    
    args, rest = parser.parse_known_args()
    
    # Make sure we can import from src
    sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))
    
    # Run in the specified mode
    if args.mode == "test":
        sys.exit(run_tests())
    elif args.mode == "selftest":
        sys.exit(run_selftest(args.seed))
    elif args.mode == "cli":
        sys.exit(run_cli(rest))
