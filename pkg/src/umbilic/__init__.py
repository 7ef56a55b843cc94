"""Numerical toolkit for curvature fields of graph surfaces, sphere
inversion transforms, convex support bodies, disk flux quadrature, and
umbilic-point scanning."""

from .curvature import (PlaneField, PrincipalData, UmbilicResiduals,
                        curvature_difference_field, dk_dtheta,
                        graph_mean_divergence, normal_curvature,
                        normal_curvature_theta, principal_deviation_field,
                        shape_operator, umbilic_residuals)
from .errors import (ConvexityError, DomainError, GraphConditionError,
                     NonConvergenceError, RegularityError)
from .families import FamilySpec, list_families, make_field, parse_field_spec
from .field import (DecayProfile, Direction, Jet2, Point2, PolarPoint,
                    ScalarField, decay_profile, directional, eval_jet, fd_jet,
                    rotate_frame, tabulated_field, uniform_field)
from .quad import (DecayTable, QuadScheme, boundary_flux, boundary_majorant,
                   curvature_difference_decay, disk_integral,
                   divergence_consistency, principal_deviation_decay)
from .scan import (ContourSet, FloorReport, Grid, UmbilicScan, contours,
                   grid_field, sign_witness, umbilic_free_floor, umbilic_search)
from .transform import (ExteriorGraph, GraphConditionReport, Patch3,
                        PreservationReport, ellipsoid_patch, exterior_eval,
                        graph_condition, invert_local_graph, invert_patch,
                        invert_point, parallel_patch, patch_principal,
                        perturbed_sphere_patch, plane_patch,
                        principal_preservation_check, pushforward_inversion,
                        sphere_patch)
from .convexbody import (PipelineReport, Pose, SupportBody, UmbilicSite,
                         body_point, check_convexity, find_umbilic,
                         parallel_body, pose_at_umbilic, radii_of_curvature,
                         rotate_body, theorem1_pipeline, umbilic_sites)

__version__ = "0.1.0"
