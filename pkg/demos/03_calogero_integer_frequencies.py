"""
Calogero system: integer frequencies
====================================

For N particles with harmonic confinement the equilibrium positions are
scaled zeros of the Hermite polynomial H_N, and the normal mode
frequencies are 1, 2, ..., N in units of omega, independent of g.
"""

# %%
import numpy as np
from numpy.polynomial.hermite import hermroots

from prepotential import find_equilibrium, make_system, run_correspondence

for N in (3, 4, 5, 6):
    for g in (0.5, 4.0):
        s = make_system("calogero_a", N=N, omega=1.0, g=g)
        rep = find_equilibrium(s)
        zeros = np.sqrt(g) * hermroots([0] * N + [1])
        print(N, g, np.round(rep.frequencies, 12), f"|qbar - zeros|={np.max(np.abs(rep.qbar - zeros)):.1e}")

# %%
# The quantum levels are hbar*omega*sum(k n_k). Their slopes decompose
# over the classical frequencies, one level per occupation vector.
# Degenerate slopes map to one canonical vector (fewest quanta) and the
# degeneracy column counts every vector that fits.
s = make_system("calogero_a", N=3, omega=1.0, g=1.0)
reports = run_correspondence(s, [0.4, 0.2, 0.1], max_quanta=2)
for r in reports:
    print(r.level_label, f"calE={r.calE:.3f}", "->", r.match_vector, f"(degeneracy {r.degeneracy})")
