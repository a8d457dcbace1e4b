"""Run the acceptance criteria outside pytest and print one line per criterion."""

import os
import runpy
import sys

here = os.path.dirname(os.path.abspath(__file__))
module = runpy.run_path(os.path.join(here, "..", "tests", "test_acceptance.py"))
sys.exit(module["main"]())
