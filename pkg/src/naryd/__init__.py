"""Exact delta-derivations of n-ary algebras."""

__version__ = "0.1.0"
