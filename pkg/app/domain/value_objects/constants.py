from typing import Final

# Operator algebra
ZERO_SNAP: Final[float] = 1e-14
HERMITICITY_TOL: Final[float] = 1e-12
POVM_TOL: Final[float] = 1e-10
DECOMPOSITION_TOL: Final[float] = 1e-12

# Statistics
PROBABILITY_TOL: Final[float] = 1e-10

# Verification margins
ENTANGLED_MARGIN: Final[float] = 1e-7
FEASIBLE_MARGIN: Final[float] = 1e-9
REVALIDATION_TOL: Final[float] = 1e-7
CONE_TOL: Final[float] = 1e-9
NEAR_NULL_EIGENVALUE: Final[float] = 1e-6

# Scans
ETA_BISECTION_TOL: Final[float] = 1e-3
ETA_BRACKET: Final[float] = 1e-2
MONOTONICITY_SAMPLES: Final[int] = 5

# Photon bounds
BOUND_MONOTONICITY_SLACK: Final[float] = 1e-7
CC_PLATEAU_GAP: Final[float] = 1e-4
DEFAULT_BOUNDS_MAX_GRADE: Final[int] = 8
