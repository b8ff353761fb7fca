"""H-planarity toolkit: modulators, planar decompositions and the algorithms built on them."""

__version__ = "0.1.0"
