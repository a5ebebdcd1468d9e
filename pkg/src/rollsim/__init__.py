"""rollsim: nonholonomic dynamics of a rigid body rolling without
slipping on a fixed surface, with a verification suite built around the
conserved and structural quantities of the system."""

from .body import RigidBody, augmented_inertia
from .dynamics_full import (FullState, FullTangent, Scene,
                            constraint_residuals, energy_full,
                            lagrangian_on_constraint, lambda_operator,
                            make_full_state, momentum_J,
                            tangent_membership_residual, vector_field_full)
from .dynamics_reduced import (ReducedState, ReducedTangent,
                               embed_reduced_in_full, energy_reduced,
                               project_full_to_reduced, vector_field_reduced,
                               vector_field_reduced_coords)
from .errors import (ChartBoundary, DegenerateChart, NotPlanarScene,
                     ProjectionDiverged, RollingBodyError, SingularLambda,
                     SingularShapeOperator)
from .geometry import (SurfaceChart, TangentFrame, ellipsoid, first_form,
                       hat, make_chart, normal, paraboloid, plane,
                       rotation_aligning, second_form, shape_operator,
                       sphere, tangent_frame, weingarten_ambient)
from .integrate import (IntegratorConfig, Trajectory, integrate,
                        project_state, rk4_step)

__version__ = "0.1.0"
