"""Feasibility prover for optimal spherical point arrangements.

Subpackages: geom (spherical kernels), graphs (planar embedded graphs),
relax (linear constraint systems), lp (simplex engine), prune
(branch-and-prune driver), cases (final analysis), cli (front end).
"""

__version__ = "0.1.0"
