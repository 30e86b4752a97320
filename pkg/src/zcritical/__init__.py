"""Numerical laboratory for Z-critical Kahler metrics and Z-critical connections.

Builds the Z-critical operators attached to a central charge on small model
geometries (flat complex tori, S^1-invariant metrics on CP^1, line and rank-2
bundles over tori) and checks the associated moment-map identities by
quadrature and finite differences.
"""

__version__ = "0.1.0"
