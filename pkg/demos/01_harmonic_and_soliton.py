"""
Harmonic oscillator and Poschl-Teller soliton
=============================================

Both systems are one dimensional, so everything here can be checked
against a grid diagonalization of the Schrodinger operator.
"""

# %%
# Build the two systems from the catalog and locate the classical
# equilibrium, i.e. the maximum of the prepotential W.
import numpy as np

from prepotential import (
    converge_spectrum,
    default_grid,
    find_equilibrium,
    make_system,
    run_correspondence,
)

harmonic = make_system("harmonic", omega=1.0)
soliton = make_system("poschl_teller", g=1.0)

for s in (harmonic, soliton):
    rep = find_equilibrium(s, initial_guess=2.5)
    print(f"{s.name:14s} qbar={rep.qbar}  frequencies={rep.frequencies}")

# %%
# The quantum spectrum at a fixed hbar. The ground state energy is zero by
# construction of V; the soliton has a finite number of bound states.
hbar = 0.2
for s in (harmonic, soliton):
    table = converge_spectrum(s, hbar, default_grid(s, hbar, 5))
    print(s.name, np.round(table.energies, 10), table.flags)

n = np.arange(5)
print("soliton closed form", 1.0 * n * hbar - n**2 * hbar**2 / 2)

# %%
# The O(hbar) slope of each level is a sum of classical frequencies.
for s in (harmonic, soliton):
    for r in run_correspondence(s, levels=4):
        print(s.name, r.level_index, f"calE={r.calE:.6f}", r.match_vector, r.status)
