"""
A prepotential of your own
==========================

W = -q^2/2 - lam q^4/4 has no closed form spectrum, yet its lowest level
is still exactly zero and the O(hbar) slopes still land on multiples of
the classical frequency. The hbar^2 and higher terms are large here, so the
two-term fit needs a sweep at smaller hbar than the default.
"""

# %%
import warnings

import numpy as np

from prepotential import custom_system, find_equilibrium, run_correspondence
from prepotential.errors import IllFitWarning

lam = 1.0
quartic = custom_system(
    lambda q: -0.5 * np.sum(q**2, axis=-1) - 0.25 * lam * np.sum(q**4, axis=-1),
    dimension=1,
    gradW=lambda q: -q - lam * q**3,
    hessW=lambda q: (-1.0 - 3.0 * lam * q**2)[..., None],
    name="quartic",
    vectorized=True,
)
print("frequencies", find_equilibrium(quartic, 0.8).frequencies)

# %%
# Shrinking the sweep pulls the fitted slopes onto the integers. The
# leftover bias is of order hbar^2, so the match tolerance is loosened.
for sweep in ([0.4, 0.2, 0.1, 0.05], [0.02, 0.01, 0.005, 0.0025]):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllFitWarning)
        reports = run_correspondence(quartic, sweep, levels=4, tol=0.02)
    print("sweep", sweep)
    for r in reports:
        print(f"  n={r.level_index} calE={r.calE:.5f} match={r.match_vector}")
