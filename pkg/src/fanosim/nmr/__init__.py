"""Molecule descriptions, pulse-sequence compilation and pulse-level verification."""
