"""
Command line entry point, see harness.cli.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import sys

# linfsindy modules
from .harness.cli import main

sys.exit(main())
