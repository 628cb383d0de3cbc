"""Named numerical tolerances shared across the package."""

# scalar quaternion algebra
EPS_ALGEBRA = 1e-12
# composed operations (rotations, exponentials of products, eigen residuals)
EPS_COMPOSED = 1e-9
# polar / adjoint round trips
EPS_ROUNDTRIP = 1e-10

# Axis construction rejects vector parts shorter than this.
AXIS_MIN_NORM = 1e-12
# |p| must be within this of 1 for rotate()
UNIT_TOL = 1e-9
# |V(mu1) . V(mu2)| bound for orthogonal axis pairs
ORTHO_TOL = 1e-9
# |V(mu) . V(nu)| must stay below 1 - COLLINEAR_TOL
COLLINEAR_TOL = 1e-9
# below this |v|, qexp switches to the sinc series
QEXP_SERIES_CUTOFF = 1e-8

HERMITIAN_TOL = 1e-10
ADJOINT_TOL = 1e-10
# doubled adjoint singular values are grouped within PAIR_TOL * max(1, smax)
PAIR_TOL = 1e-8
# smallest singular value at or below this marks an operator as singular
SINGULAR_TOL = 1e-10
