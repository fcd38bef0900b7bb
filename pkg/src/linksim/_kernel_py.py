"""Pure-NumPy dynamics kernel: multipliers, constraint forces, accelerations.

Reference implementation of the hot per-state evaluation.  The compiled
Cython kernel in _kernel.pyx mirrors this function exactly; both are
selected in linksim.dynamics at import time.

Raises numpy.linalg.LinAlgError when the multiplier system is not
positive definite (state left the constraint manifold).
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

NAME = "python"


def dyn_eval(Df, inv_m, Le, g, Q, Qdot, F):
    """Evaluate accelerations and multipliers at one state.

    Df: n x k float incidence matrix, inv_m: reciprocal masses, Le: the
    constant SPD edge Laplacian D^T diag(1/m) D, g: gravity.  Returns
    (Qddot, lam) where Qddot = (F - Gamma)/m - [0, g] and lam solves
    (Le o Qe Qe^T) lam = diagV(D^T M^-1 F Qe^T + Qedot Qedot^T)
    through a Cholesky factorization (never an explicit inverse).
    """
    minv_f = F * inv_m[:, None]
    k = Df.shape[1]
    if k == 0:
        lam = np.zeros(0)
        qdd = minv_f.copy()
        qdd[:, 1] -= g
        return qdd, lam

    qe = Df.T @ Q
    qed = Df.T @ Qdot
    J = Le * (qe @ qe.T)
    b = np.sum((Df.T @ minv_f) * qe, axis=1) + np.sum(qed * qed, axis=1)
    factor = cho_factor(J, lower=True, check_finite=False)
    lam = cho_solve(factor, b, check_finite=False)

    gamma = Df @ (lam[:, None] * qe)
    qdd = (F - gamma) * inv_m[:, None]
    qdd[:, 1] -= g
    return qdd, lam
