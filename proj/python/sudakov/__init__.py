"""Exact decompositions of optimal transport problems with polyhedral costs."""

from ._sudakov import InputError, minimal_extremal_face, normalize_problem, run, solve

__all__ = ["InputError", "minimal_extremal_face", "normalize_problem", "run", "solve"]
