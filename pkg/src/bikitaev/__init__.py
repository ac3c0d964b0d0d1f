"""Kitaev-type lattice models built on the mirror bicrossproduct quantum group."""
__version__ = "0.1.0"
