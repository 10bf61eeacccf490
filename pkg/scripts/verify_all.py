#!/usr/bin/env python3
"""Run every verification scenario and print one line per check.

Equivalent to `shbif verify all`; exits nonzero if any check fails.
"""

import sys

from shbif.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", "all"] + sys.argv[1:]))
