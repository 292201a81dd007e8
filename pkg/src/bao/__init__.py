"""Workbench for Boolean algebras with operators."""

__version__ = "0.1.0"
