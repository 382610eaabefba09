"""genpos: a numerical toolkit for incidence geometry of flats and
doubly ruled quadrics, and for general-position perturbation of
piecewise-linear maps on finite simplicial complexes.

Everything is pure-functional over immutable values and deterministic
given explicit seeds; all rank and residual decisions go through one
SVD-based tolerance policy (:class:`genpos.tolerance.Tolerance`).
"""

from .errors import (AmbientMismatchError, CaseHypothesisError,
                     DegeneracyError, DegeneratePointError,
                     DegenerateSystemError, EmptyFlatError, GenposError,
                     IndeterminateRankError, InfeasibleStratumError,
                     InfiniteFamilyError, NotContainedError, NotDisjointError,
                     NotSkewError, PreconditionError, RetryBudgetError)
from .grassmann import (EMPTY, StratumSpec, affine_grassmannian_dim,
                        affine_single_flag_bound, affine_three_flag_bound,
                        affine_two_flag_bound, feasible_single,
                        feasible_singles, grassmannian_dim, single_flag_dim,
                        single_flag_dim_geq, stratum_dim_oracle,
                        stratum_witness, three_flag_dim, two_flag_dim)
from .plmap import (GPCertificate, PLMapSpec, PREDICATES,
                    barycentric_subdivide, general_position, generic_perturb,
                    independent_directions, no_four_coplanar, perturb_pl_map,
                    recompute_bound, subdivide_until)
from .quadric import (HYPERBOLIC_PARABOLOID, ONE_SHEET_HYPERBOLOID, OTHER,
                      Line3, LineQuadricHit, Quadric3, Segment3, Transversal,
                      TransversalResult, classify_quadric,
                      line_quadric_intersection, lines_skew,
                      quadric_residuals, quadric_through_three_skew_lines,
                      rulings_through_point, same_family, sample_quadric_mesh,
                      transversals_to_four_segments)
from .subspace import (AffineFlat, LinSubspace, affine_hull, bridge_flat,
                       bridge_subspace, flat_distance, homogenize,
                       intersect_affine, intersect_linear, jointly_skew,
                       max_principal_angle, orthogonal_complement,
                       pairwise_skew, principal_angles, span_of, subspace_sum)
from .tolerance import DEFAULT_TOLERANCE, Tolerance

__version__ = "0.1.0"
