"""Central tolerance table.

Every numerical check in the package reads its default threshold from here;
public functions accept a ``tol`` keyword to override per call.
"""

# internal algebra on exactly-constructed objects
ALGEBRA = 1e-12
# Hermiticity / positivity / unitarity gates on inputs
HERMITIAN = 1e-10
PSD = 1e-10
UNITARY = 1e-10
# pure-state normalisation accepted by PureQubit(...)
NORM = 1e-12
# POVM completeness and family identities
POVM = 1e-10
# effective POVM extracted from a walk
WALK = 1e-9
# compile -> effective_povm round trip
COMPILE = 1e-9
# Born probabilities below -CLAMP are an error, above are clamped to 0
CLAMP = 1e-12
# plate decomposition residual (phase-free Frobenius distance)
PLATES = 1e-9
# values quoted to four decimals
QUOTED = 2e-3
# plate angles quoted to two decimals (degrees)
ANGLE_DEG = 0.05
# see-saw stopping rule
SEESAW_DELTA = 1e-10
SEESAW_SWEEPS = 500
# semi-SIC certificate on optimiser output
SELFTEST = 1e-3
