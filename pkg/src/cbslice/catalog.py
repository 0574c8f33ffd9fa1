"""Named example points used by the demos and the test-suite."""

from __future__ import annotations

import numpy as np

from .actions import standard_representation
from .dynamics import relative_equilibrium
from .liealg import direct_product, so2, so3, torus, trivial_group
from .slices import build_slice_chart


def _point(group, q, p, copies=1, trivial=0):
    action = standard_representation(group, copies, trivial)
    return action, np.asarray(q, dtype=float), np.asarray(p, dtype=float)


def so3_momentum_zero(lam=1.0):
    """q = 0, p = (lam, 0, 0): K = SO(3), H = rotations about the x-axis."""
    return _point(so3(), [0, 0, 0], [lam, 0, 0])


def so3_on_axis(kappa=1.0, lam=0.5):
    """q = (kappa, 0, 0), p = (lam, 0, 0): H = K = rotations about the x-axis."""
    return _point(so3(), [kappa, 0, 0], [lam, 0, 0])


def so3_origin():
    return _point(so3(), [0, 0, 0], [0, 0, 0])


def so3_two_copies():
    """SO(3) on R^3 + R^3 at q = 0 with two independent momenta; H is trivial."""
    return _point(so3(), [0] * 6, [1, 0, 0, 0, 1, 0], copies=2)


def torus_plane_pair():
    return _point(torus(2), [1, 0, 0, 0], [0.3, 0.7, 0.2, -0.4])


def so2_plane():
    return _point(so2(), [1, 0], [0.3, 0.8])


def so2_with_fixed_line():
    """SO(2) on R^2 + R with a free line; A picks up the fixed direction."""
    return _point(so2(), [1, 0, 0.5], [0.2, 0.6, -0.3], trivial=1)


def product_so2_torus():
    return _point(direct_product(so2(), torus(1)), [0, 0, 1, 0], [1, 0, 0.4, 0.2])


def trivial_plane():
    """No symmetry at all: every construction reduces to T*Q itself."""
    return _point(trivial_group(2), [1, 0], [0, 1])


def so3_generic():
    """Nonzero momentum: the isotropy of mu is a proper subgroup."""
    return _point(so3(), [1, 0, 0], [0, 1, 0])


def so3_tilted():
    return _point(so3(), [1, 0, 0], [0.5, 0.3, 0])


def so2_circular_orbit(omega=1.0):
    """Relative equilibrium of the planar Kepler problem at radius 1."""
    action = standard_representation(so2())
    q = np.array([1.0, 0.0])
    return (action,) + relative_equilibrium(action, q, np.array([omega]))


def so3_spinning_on_axis(omega=0.7):
    """Rotation about the position vector: z = (q, 0)."""
    action = standard_representation(so3())
    q = np.array([1.0, 0.0, 0.0])
    return (action,) + relative_equilibrium(action, q, np.array([omega, 0.0, 0.0]))


def so3_swinging(omega=0.8):
    action = standard_representation(so3())
    q = np.array([1.0, 0.0, 0.0])
    return (action,) + relative_equilibrium(action, q, np.array([0.0, 0.0, omega]))


def torus_relative_equilibrium():
    action = standard_representation(torus(2))
    q = np.array([1.0, 0.0, 0.5, 0.5])
    return (action,) + relative_equilibrium(action, q, np.array([0.4, -1.1]))


# points where the isotropy of mu is the whole group
TUBE_POINTS = {
    "so3_momentum_zero": so3_momentum_zero,
    "so3_on_axis": so3_on_axis,
    "so3_origin": so3_origin,
    "so3_two_copies": so3_two_copies,
    "torus_plane_pair": torus_plane_pair,
    "so2_plane": so2_plane,
    "so2_with_fixed_line": so2_with_fixed_line,
    "product_so2_torus": product_so2_torus,
    "trivial_plane": trivial_plane,
}

RELATIVE_EQUILIBRIA = {
    "so2_circular_orbit": so2_circular_orbit,
    "so3_spinning_on_axis": so3_spinning_on_axis,
    "so3_swinging": so3_swinging,
    "torus_relative_equilibrium": torus_relative_equilibrium,
}

POINTS = {**TUBE_POINTS, "so3_generic": so3_generic, "so3_tilted": so3_tilted, **RELATIVE_EQUILIBRIA}


def chart(name):
    action, q, p = POINTS[name]()
    return build_slice_chart(action, q, p)
