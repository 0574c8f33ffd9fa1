"""A walk through the tube for SO(3) acting on R^3.

Three base points are visited: zero position with momentum along x, a point
on the x-axis with collinear momentum, and the origin.  For each one the
script prints the slice data and evaluates the tube at a sample model point,
then checks the momentum and the symplectic pullback numerically.
"""

import numpy as np

from cbslice import catalog
from cbslice.tube import ModelPoint, TubeChart

np.set_printoptions(precision=5, suppress=True)


def tour(name, factory):
    chart = catalog.chart(name) if factory is None else factory()
    tc = TubeChart(chart)
    print(f"== {name}: q = {chart.q}, p = {chart.p}")
    print(f"   dim k = {chart.k.dim}, dim h = {chart.h.dim}, dim A = {chart.A.dim}, dim B = {chart.B.dim}, dim (m cap k) = {chart.mk.dim}")
    print(f"   alpha = {chart.alpha}, U_bound = {tc.U_bound:.6g}")

    g = tc.group.exp(np.array([0.0, 0.3, 0.0]))
    m = ModelPoint(g, 0.1 * np.ones(tc.dim_m), 0.05 * np.ones(tc.dim_B), 0.01 * np.ones(tc.dim_B))
    z = tc.tube_evaluate(m)
    print(f"   tube(g, nu, a, delta) -> q = {z.point}, p = {z.covector}")

    J = chart.action.momentum(z.point, z.covector)
    print(f"   momentum: ambient {J}, model {tc.model_momentum(m)}")
    print(f"   symplectic pullback residual (Richardson): {tc.symplecticity_residual(m, richardson=True):.2e}")
    alt = tc.tube_alternative(m)
    print(f"   alternative construction differs by {np.abs(alt.flat() - z.flat()).max():.2e}")
    print()


if __name__ == "__main__":
    tour("so3_momentum_zero", None)
    tour("so3_on_axis", None)
    tour("so3_origin", None)

    # moving delta toward -lambda makes Gamma singular: the validity radius
    tc = TubeChart(catalog.chart("so3_momentum_zero"))
    for d in (0.0, -0.9, -0.99, -0.999):
        print(f"delta = {d:7.3f}: condition of Gamma = {tc.condition(np.array([d])):.3g}")
