"""Central numerical tolerances.

Every threshold the library uses lives in this one record so that the test
suite and the analyses stay coherent when a tolerance is tuned.  Values are
absolute unless noted otherwise.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-12      # allowed |H - H^dag| on inputs
    jacobi_off: float = 1e-14       # off-diagonal Frobenius mass at convergence
    reconstruction: float = 1e-10   # spectral reconstruction error bound
    state_psd: float = 1e-10        # density-matrix eigenvalue floor
    effect_bounds: float = 1e-10    # effect eigenvalue window slack
    roundtrip: float = 1e-12        # matrix <-> Bloch round trips
    bloch_norm: float = 1e-12       # Bloch-vector norm slack
    ball_excess: float = 1e-9       # sphere-image positivity surrogate
    det_min: float = 1e-10          # invertibility threshold on |det|
    verdict: float = 1e-7           # eigenvalue threshold for divisibility verdicts
    duality: float = 1e-12          # Schrodinger/Heisenberg pairing residual
    grid_uniform: float = 1e-12     # uniform-spacing check on time grids
    grid_align: float = 1e-9        # breakpoint-on-grid requirement
    generator_id: float = 1e-8      # generator conversion identities
    povm_residual: float = 1e-7     # Dykstra feasibility residual
    povm_sum: float = 1e-9          # parent-POVM completeness slack
    plateau_rel: float = 1e-12      # relative improvement defining a plateau
    plateau_window: int = 200       # iterations over which a plateau is judged
    dykstra_max_iter: int = 5000
    bisection: float = 1e-4         # incompatibility monotone precision
    curve_range: float = 1e-9       # slack on curve range invariants


TOLS = Tolerances()
