"""Shared test setup: make the source tree importable without installation."""
import os
import sys

_SRC = os.path.join(os.path.dirname(__file__), os.pardir, "src")
if _SRC not in sys.path:
    sys.path.insert(0, _SRC)
