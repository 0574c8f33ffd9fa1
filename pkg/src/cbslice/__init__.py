"""Local normal forms for cotangent-lifted actions of compact matrix groups.

Isotropy and slice data, symplectic normal spaces and their splittings, the
explicit symplectic tube at points whose momentum is fixed by the group, and
the bundle equations in tube coordinates.
"""

from .actions import LinearAction, standard_representation
from .liealg import LieGroupModel, direct_product, so2, so3, special_orthogonal, torus
from .slices import SliceChart, build_slice_chart, check_case_flags
from .tube import AmbientCotangent, ModelPoint, OutOfScopeError, TubeChart, TubeDomainError

__all__ = [
    "AmbientCotangent",
    "LieGroupModel",
    "LinearAction",
    "ModelPoint",
    "OutOfScopeError",
    "SliceChart",
    "TubeChart",
    "TubeDomainError",
    "build_slice_chart",
    "check_case_flags",
    "direct_product",
    "so2",
    "so3",
    "special_orthogonal",
    "standard_representation",
    "torus",
]
