"""
Classical eigenfunctions
========================

The operator D = -grad W . grad acts on functions of the coordinates.
Products of eigenfunctions are eigenfunctions, every non-constant one
vanishes at the equilibrium, and the gradient of an elementary one is a
normal mode.
"""

# %%
from prepotential import (
    check_gradient_eigenvector,
    check_vanishing,
    find_equilibrium,
    make_system,
    product,
    verify_eigenfunction,
)
from prepotential.classical_spectrum import NON_ELEMENTARY

soliton = make_system("poschl_teller", g=1.0)
rep = find_equilibrium(soliton)
f1, f2 = soliton.reference_classical_eigenfunctions[:2]
print("labels", f1.label, f2.label, "eigenvalues", f1.eigenvalue, f2.eigenvalue)

# %%
# Residuals of D phi - E phi on 64 quasi-random points around qbar.
fg = product(f1, f2)
for f in (f1, f2, fg):
    res = verify_eigenfunction(soliton, f, samples=64, seed=42, report=rep)
    print(f.label, f"E={f.eigenvalue}", f"max residual={res.max_abs_residual:.2e}")

# %%
# Vanishing at qbar, and the gradient test. Only the n = 1 function is
# elementary; higher powers have zero gradient at qbar.
for f in (f1, f2, fg):
    h = check_gradient_eigenvector(soliton, f, rep)
    kind = "non-elementary" if h == NON_ELEMENTARY else f"hessian residual {h:.1e}"
    print(f.label, f"phi(qbar)={check_vanishing(f, rep.qbar):.1e}", kind)
