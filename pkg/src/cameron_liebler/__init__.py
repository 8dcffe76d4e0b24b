"""Exact verification toolkit for Cameron-Liebler line classes of PG(3,q)
that admit PGL(2,q), built from a pencil of quadrics."""

from .gf import GF, FieldElement
from .geometry import PG3
from .pencil import Pencil
from .group_action import GroupAction
from .klein import verify_tight
from .lineclass import LineClass, build_bruen_drudge, build_derived, derive

__version__ = "0.1.0"

__all__ = ["GF", "FieldElement", "PG3", "Pencil", "GroupAction", "verify_tight",
           "LineClass", "build_bruen_drudge", "build_derived", "derive"]
