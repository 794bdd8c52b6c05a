"""Numerical geometry of the nearly Kahler full flag manifold SU(3)/T^2 and its Lagrangian submanifolds."""
from .forms import AltForm, ce_differential, wedge
from .frames import LagPlane, normalize_frame, plane_from_angles, stabilizer
from .nk import J_NK, three_symmetry
from .su3 import AlgVec, GroupElt, bracket, expm

__all__ = [
    "AltForm", "ce_differential", "wedge", "LagPlane", "normalize_frame", "plane_from_angles", "stabilizer",
    "J_NK", "three_symmetry", "AlgVec", "GroupElt", "bracket", "expm",
]
