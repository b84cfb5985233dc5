"""Rotations as points of the four affine patches of RP^3.

A rotation is stored as a patch index ``i`` in 0..3 and three chart
coordinates ``x``; the homogeneous quaternion is ``x`` with a 1 inserted at
slot ``i``. Angular velocity integrates directly in these coordinates, with
no renormalization, and a patch switch keeps the coordinates bounded.
"""
from patchrot._accel import BACKEND
from patchrot.integrate import (
    AttitudeState,
    StepDiagnostics,
    StepperConfig,
    Trajectory,
    closed_form_const,
    propagate,
    step_patch_euler,
    step_patch_rk4,
    step_quat_euler,
    step_quat_rk4,
)
from patchrot.kinematics import (
    StepError,
    beta,
    h_matrix,
    patch_delta,
    patch_rhs,
    quat_rhs,
    scale_factor,
    w_column,
)
from patchrot.projective import (
    PatchDomainError,
    best_patch,
    from_patch,
    needs_switch,
    switch_patch,
    to_patch,
)
from patchrot.rotation import (
    PatchRotation,
    UnitQuaternion,
    geodesic_distance,
    hamilton,
    orthogonality_defect,
    patch_to_matrix,
    patch_to_quat,
    quat_exp_body,
    quat_to_matrix,
    quat_to_patch,
    skew,
)

__version__ = "0.1.0"
