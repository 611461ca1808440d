"""Exact diagonalization of dimerized XX/XXZ spin chains and the local-rotation
entanglement-generation protocol."""

from dimerchain._core import *  # noqa: F401,F403
from dimerchain._core import __version__  # noqa: F401
