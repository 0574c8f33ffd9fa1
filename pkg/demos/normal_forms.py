"""Symplectic normal spaces, Witt-Artin decompositions and splitting maps
for every named point in the catalog."""

import numpy as np

from cbslice import catalog
from cbslice.normalform import (
    splitting_alpha0,
    splitting_K_subset_Gmu,
    symplectic_normal_space,
    tangent_level_chain,
    witt_artin,
)
from cbslice.slices import check_case_flags

np.set_printoptions(precision=4, suppress=True)

if __name__ == "__main__":
    print(f"{'point':28s} {'ker dJ':>6s} {'orbit':>6s} {'N_s':>4s}  Witt-Artin (T1, T0, N0, N1)  splittings")
    for name in catalog.POINTS:
        chart = catalog.chart(name)
        nsd = symplectic_normal_space(chart)
        wa = witt_artin(chart, nsd).dims()
        chain = tangent_level_chain(chart, nsd)
        flags = check_case_flags(chart)
        notes = []
        if flags["K_subset_Gmu"]:
            s = splitting_K_subset_Gmu(chart, nsd, chain)
            notes.append(f"K<Gmu {s.congruence_residual():.1e}")
        if flags["alpha_zero"]:
            s = splitting_alpha0(chart, nsd, chain)
            notes.append(f"alpha=0 {s.congruence_residual():.1e}")
        dims = (wa["T1"], wa["T0"], wa["N0"], wa["N1"])
        print(f"{name:28s} {nsd.kerdJ.dim:6d} {nsd.orbit_gmu.dim:6d} {nsd.dim:4d}  {str(dims):28s} {', '.join(notes) or '-'}")

    chart = catalog.chart("so3_momentum_zero")
    print("\nreduced form on N_s at q = 0, p = (1, 0, 0):")
    print(symplectic_normal_space(chart).omega_red)
