"""Exact residue comparison for polyhedral branching formulas of KR modules."""
from .kernels import BACKEND
from .rootsys import RootSystem, Weight, build_root_system
from .weylgrp import WeylElement, weyl_group
from .groupring import GeoFraction, GroupRingElem
from .charformula import character, dimension

__all__ = [
    "BACKEND", "RootSystem", "Weight", "build_root_system", "WeylElement", "weyl_group",
    "GeoFraction", "GroupRingElem", "character", "dimension",
]
__version__ = "0.1.0"
