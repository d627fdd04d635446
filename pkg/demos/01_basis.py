"""Generalized Gell-Mann generators and the qutrit Bloch vector."""
import numpy as np

from qutrit_zeno.su_n_basis import (
    bloch_length_check,
    bloch_to_density,
    density_to_bloch,
    generators,
    structure_constants,
)

np.set_printoptions(precision=4, suppress=True)

# The eight qutrit generators in coordinate order u12, v12, w1, u13, v13, u23, v23, w2
X = generators(3)
print("x8 generator:\n", X[7].real)

# Orthogonality Tr[X_i X_j] = 2 delta_ij
print("Gram matrix diagonal:", np.einsum("iab,jba->ij", X, X).real.diagonal())

# A couple of structure constants
sc = structure_constants(3)
print("f_123 =", sc.f[0, 1, 2], " f_458 =", sc.f[3, 4, 7], " g_118 =", sc.g[0, 0, 7])

# |1><1| from its Bloch vector, and |3><3| back to coordinates
print("rho for (0,0,1,0,0,0,0,1/sqrt3):\n", bloch_to_density([0, 0, 1, 0, 0, 0, 0, 1 / np.sqrt(3)]).real)
print("Bloch vector of |3><3|:", density_to_bloch(np.diag([0, 0, 1.0])))

# The length bound is necessary but not sufficient for positivity
x = np.zeros(8)
x[2] = 1.1
print(bloch_length_check(x, 3))
try:
    bloch_to_density(x)
except ValueError as exc:
    print("rejected:", exc)
