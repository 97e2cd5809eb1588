"""Computable abelian convexity: gradient maps, Kempf-Ness functions and orbit polytopes
for torus-type actions on complex projective space and on finite-support measures."""

from .errors import ConvergenceError, InputError, NotInteriorError
from .hull import (Face, Membership, Polytope, contains, convex_hull, exposed_face, faces,
                   minkowski_sum)
from .kempfness import KNEvaluation, check_properties, kn_derivatives, kn_value, moment_map
from .measures import (DiscreteMeasure, measure_invert, measure_kn, measure_moment,
                       measure_orbit_polytope, pushforward)
from .orbitgeom import (CriticalData, FlowResult, boundary_stabilizer_check, critical_data,
                        density_experiment, face_orbit, flow_limit, invert_moment, orbit_polytope,
                        wmax_membership)
from .weights import (ProjPoint, Subalgebra, WeightSystem, act, is_fixed, random_point,
                      stabilizer_algebra)

__version__ = "0.1.0"
