"""Coxeter groups, congruence subgroups, and their trees."""

__version__ = "0.1.0"
