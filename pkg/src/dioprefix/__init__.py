"""Exact polynomial encodings for mixed quantifier prefixes over Diophantine equations."""

import sys

__version__ = "0.1.0"

# Certificates and master-polynomial values routinely run to thousands of
# digits; printing and parsing them must stay exact.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)
