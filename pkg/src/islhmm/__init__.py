"""Taint-flow vulnerability detection for PHP with a hidden Markov model over an intermediate slice language."""

__version__ = "0.1.0"
