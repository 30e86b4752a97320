"""Discretized Kahler geometry on flat tori and on CP^1."""

from .cp1 import CP1ProfileGeometry, HamiltonianAction, random_correction
from .torus import TorusGeometry, cosine_potential, random_potential

__all__ = [
    "CP1ProfileGeometry",
    "HamiltonianAction",
    "TorusGeometry",
    "cosine_potential",
    "random_correction",
    "random_potential",
]
