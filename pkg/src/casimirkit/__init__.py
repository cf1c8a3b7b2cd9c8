"""casimir-kit: classification of 2D ideal-fluid vorticity configurations.

The pipeline certifies piecewise-linear simple Morse fields on closed
oriented triangulated surfaces, builds measured Reeb graphs with
per-arc enstrophy moments, computes circulation functions of velocity
1-form cosets, decides coadjoint-orbit equivalence, reconstructs
densities from Hausdorff moments, and verifies conservation of all of
the above along pseudo-spectral 2D Euler trajectories on the torus.
"""

from .circulation import (AbstractDensity, Antiderivative,
                          AntiderivativeSpace, CirculationGraph,
                          GraphDensity, antiderivative_space,
                          build_circulation_graph, circulation_from_oneform,
                          graph_density, pin_circulations)
from .errors import (AntiderivativeViolation, BadPinPlacement,
                     CasimirKitError, CFLViolation, CountMismatch,
                     DivergenceRisk, IllConditioned, Infeasible,
                     InsufficientSamples, NonManifoldError, NonZeroMean,
                     NoSolution, NotSimple, OrientationError, OutOfRange,
                     ParseError, PerturbFailure, TopologyChange)
from .euler import (TorusFlowState, casimir_trace, cfl_timestep,
                    distribution_function, energy, from_modes, simulate,
                    step, velocity_from_vorticity)
from .measure import (EdgeMeasure, MeasureData, arc_cumulative,
                      build_measure, edge_moments, log_singularity_diagnostic,
                      pushforward_measure)
from .meshio import load_surface, read_off, read_oneform, read_scalars
from .moments import (MomentSequence, hausdorff_check, reconstruct_density,
                      stieltjes_transform)
from .oneform import (DiscreteOneForm, curl, cycle_integral,
                      exact_oneform, exterior_derivative,
                      oneform_with_vorticity)
from .orbit import (GraphMatching, MeasuredGraph, NotIsomorphic,
                    circulation_iso, measured_from_circulation,
                    measured_graph, measured_iso, same_orbit)
from .reeb import (LevelCycle, QuotientMap, ReebArc, ReebGraph, ReebNode,
                   abstract_graph, build_reeb, check_compatibility,
                   level_cycle)
from .surface import (MorseField, SimpleMorseCertificate,
                      TriangulatedSurface, certify_simple, classify_vertices,
                      perturb_to_simple)

__version__ = "0.1.0"
