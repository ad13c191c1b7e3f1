"""Provenance compilation and probabilistic evaluation of path queries."""
