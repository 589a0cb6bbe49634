"""Shared regression matrices used across the test modules."""

import numpy as np

# 3x3 mixed-sign Schur matrix that is strongly 2-positive yet admits no
# diagonal Lyapunov function; the transform's {1,3} principal minor is
# -8/461.
DT_NO_DLF = np.array([[-4.0, -2.0, 1.0], [1.0, -3.0, -5.0], [7.0, 1.0, -2.0]]) / 7.0

# Continuous-time counterpart: Hurwitz and strongly 2-positive, but the
# {2,3} principal minor of -A is -150.
CT_NO_DLF = np.array([[-21.0, 11.0, -14.0], [18.0, -19.0, 37.0], [-49.0, 21.0, -33.0]])

# Schur, strictly sign-regular of order 2 with positive signature; carries
# a known diagonal certificate for its order-2 compound and a closed-form
# diagonal Lyapunov matrix recovered from the top-order compound equation.
CERT_3X3 = np.array([[-4.0, -2.0, 0.0], [0.0, -3.0, -5.0], [7.0, 0.0, -2.0]]) / 8.0
CERT_D_REF = np.array([23.0 / 21.0, 13.0 / 8.0, 7.0 / 13.0])
CERT_P_REF = np.array(
    [np.sqrt(3887.0 / 1176.0), np.sqrt(184.0 / 507.0), np.sqrt(147.0 / 184.0)]
)

# Cyclic matrix with spectral radius 2 whose order-2 compound is Schur;
# drives the squared-map wedge-trajectory demo on [-1/2, 1/2]^3.
CYCLIC_WEDGE = np.array([[0.1, 1.9, 0.0], [0.0, 0.05, 1.95], [-0.01, 0.0, 2.01]])
WEDGE_A1 = 0.5 * np.ones(3)
WEDGE_A2 = np.array([-0.5, 0.5, 0.4])
