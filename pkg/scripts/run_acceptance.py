#!/usr/bin/env python3
"""Run the acceptance suite and print one verdict line per criterion."""

import sys

import pytest

if __name__ == "__main__":
    code = pytest.main(
        ["-q", "-s", "tests/test_acceptance.py", "--no-header", *sys.argv[1:]]
    )
    sys.exit(int(code))
