"""Numerical toolkit for horizontal geometry in the first Heisenberg group.

Group primitives and the contact frame live in `core`; planar curves and
horizontal lifts in `curves`; scalar fields and the small complex of forms
in `forms`; surfaces with oriented boundary in `surfaces`; characteristic
foliation tracing in `foliation`; pullback integration and the Stokes
verifier in `integrate`; deterministic exporters and the command line in
`export` and `cli`.
"""

from .core import (
    GroupDescriptor,
    TangentVector,
    contact,
    contact_eval,
    dilate,
    dim_n,
    frame_at,
    frame_coords,
    frame_norm,
    group_descriptor,
    identity,
    inverse,
    koranyi_dist,
    koranyi_norm,
    multiply,
    point,
    rotate_t_axis,
    split_coords,
    translation_differential,
    vector_from_frame,
)
from .curves import (
    HCurve,
    PlanarCurve,
    circle,
    horizontality_residual,
    lemniscate,
    lift_closed_defect,
    lift_horizontal,
    segment,
    self_intersection_gap,
    vertical_translate,
)
from .forms import (
    HorizontalForm,
    ScalarField,
    ThetaWedgeForm,
    TopForm,
    VerticalForm,
    bump_field,
    bump_form,
    complex_differential,
    const_field,
    eval_form,
    horizontal_differential,
    middle_differential,
    scalar_from_jet,
    t_field,
    top_differential,
    vertical_correction,
    x_field,
    y_field,
)
from .export import format_float, surface_mesh, write_csv, write_json, write_obj
from .foliation import FoliationTrace, detect_period, hausdorff_distance, trace_foliation
from .integrate import (
    IntegralResult,
    StokesReport,
    boundary_integral,
    integrate_curve,
    integrate_surface,
    stokes_residual,
    stokes_residual_curve,
    vertical_term_vanishing,
)
from .quadrature import CURVE_QUAD, SURFACE_QUAD, QuadratureSpec
from .surfaces import (
    ImplicitSurface,
    ParamSurface,
    characteristic_residual,
    cylinder_embeds,
    foliation_direction,
    horizontal_gradient,
    immersion_defect,
    lift_cylinder,
    project_T,
    regularity_margin,
    revolve_curve,
    torus_characteristic_loop,
    torus_surface,
    vertical_halfplane,
)

__version__ = "0.1.0"
