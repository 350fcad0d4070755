"""Curve and surface integration, and the two-sided verification report."""

import numpy as np

from heisgeo import (
    HCurve,
    ParamSurface,
    boundary_integral,
    bump_form,
    horizontal_differential,
    integrate_curve,
    integrate_surface,
    lemniscate,
    lift_cylinder,
    lift_horizontal,
    middle_differential,
    segment,
    stokes_residual,
    stokes_residual_curve,
    torus_surface,
    vertical_halfplane,
    vertical_term_vanishing,
)
from heisgeo.forms import (
    HorizontalForm,
    ScalarField,
    ThetaWedgeForm,
    const_field,
    scalar_from_jet,
    x_field,
)


def test_curve_integral_polynomial_oracle():
    seg = segment([0.1, -0.2, 0.0], [0.8, 0.3, -0.5 * (-0.2 * 0.7 - 0.1 * 0.5)])
    # the t endpoint above makes q - p horizontal at p; dx and dy see only xy
    one_dx = HorizontalForm(const_field(1.0), const_field(0.0))
    res = integrate_curve(one_dx, seg)
    assert abs(res.value - 0.7) < 1e-14
    assert not res.flagged

    x_dx = HorizontalForm(x_field(), const_field(0.0))
    res = integrate_curve(x_dx, seg)
    assert abs(res.value - 0.5 * (0.8**2 - 0.1**2)) < 1e-14


def test_curve_integral_orientation_flip():
    seg = segment([0.0, 0.0, 0.0], [1.0, 0.5, 0.0])

    rev = HCurve(
        a=seg.a,
        b=seg.b,
        position=lambda tau: seg.position(seg.a + seg.b - np.asarray(tau, float)),
        velocity=lambda tau: -seg.velocity(seg.a + seg.b - np.asarray(tau, float)),
    )
    form = HorizontalForm(x_field(), const_field(2.0))
    fwd = integrate_curve(form, seg).value
    bwd = integrate_curve(form, rev).value
    assert abs(fwd + bwd) < 1e-14


def test_degree_zero_identity_on_curves():
    f = scalar_from_jet(
        value=lambda p: p[..., 0] ** 2 - p[..., 1] * p[..., 2],
        gradient=lambda p: np.stack(
            [2.0 * p[..., 0], -p[..., 2], -p[..., 1]], axis=-1
        ),
        hessian=lambda p: np.broadcast_to(
            np.array([[2.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, -1.0, 0.0]]),
            p.shape[:-1] + (3, 3),
        ).copy(),
    )
    # open horizontal segment: curve integral equals the endpoint difference
    seg = segment([0.2, 0.1, 0.0], [0.9, 0.4, -0.5 * (0.1 * 0.7 - 0.2 * 0.3)])
    assert stokes_residual_curve(seg, f) < 1e-12
    # closed horizontal loop: both sides vanish together
    sigma = lift_horizontal(lemniscate(), sign=1)
    assert stokes_residual_curve(sigma, f) < 1e-10


def test_degree_zero_identity_needs_horizontality():
    # flat circle at t = 0 is not horizontal; with f = t the curve integral
    # of the horizontal differential is the enclosed area, not zero
    def pos(tau):
        tau = np.asarray(tau, float)
        return np.stack([np.cos(tau), np.sin(tau), np.zeros_like(tau)], axis=-1)

    def vel(tau):
        tau = np.asarray(tau, float)
        return np.stack([-np.sin(tau), np.cos(tau), np.zeros_like(tau)], axis=-1)

    flat = HCurve(0.0, 2.0 * np.pi, pos, vel)
    f = ScalarField(lambda p: p[..., 2])
    assert abs(stokes_residual_curve(flat, f) - np.pi) < 1e-6


def test_boundary_integral_applies_orientations():
    sigma = lift_horizontal(lemniscate(), sign=1)
    cyl = lift_cylinder(sigma, 1.0 / 3.0)
    form = bump_form([1.0, 0.0, 0.1], 0.4)
    (bottom, s0), (top, s1) = cyl.boundary
    direct = (
        s0 * integrate_curve(form, bottom).value
        + s1 * integrate_curve(form, top).value
    )
    res = boundary_integral(form, cyl)
    assert abs(res.value - direct) < 1e-15
    assert abs(res.value) > 1e-4  # the bump actually meets the rims


def test_surface_integral_closed_form_oracle():
    # sheet (u, v, 0) over the unit square pairs theta^dx to u/2
    def pos(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        out = np.zeros(u.shape + (3,))
        out[..., 0] = u
        out[..., 1] = v
        return out

    sheet = ParamSurface(u_dom=(0.0, 1.0), v_dom=(0.0, 1.0), position=pos)
    form = ThetaWedgeForm(const_field(1.0), const_field(0.0))
    res = integrate_surface(form, sheet)
    assert abs(res.value - 0.25) < 1e-12


def test_surface_methods_agree_on_smooth_integrand():
    torus = torus_surface(np.sqrt(2.0), 1.0)
    form = middle_differential(HorizontalForm(x_field(), const_field(1.0)))
    uni = integrate_surface(form, torus, method="uniform")
    ada = integrate_surface(form, torus, method="adaptive", tol=1e-8)
    assert abs(uni.value - ada.value) <= 1e-7


def test_surface_integral_rejects_unknown_method():
    torus = torus_surface(np.sqrt(2.0), 1.0)
    form = ThetaWedgeForm(const_field(1.0), const_field(0.0))
    try:
        integrate_surface(form, torus, method="simpson")
    except ValueError:
        return
    raise AssertionError("unknown method accepted")


def test_noncompact_surface_needs_supported_form():
    hp = vertical_halfplane()
    form = middle_differential(HorizontalForm(x_field(), const_field(1.0)))
    try:
        integrate_surface(form, hp)
    except ValueError as exc:
        assert "support" in str(exc)
    else:
        raise AssertionError("unsupported form accepted on truncated surface")


def test_stokes_two_sided_on_halfplane_bump():
    hp = vertical_halfplane()
    form = bump_form([0.0, 0.4, 0.05], 0.5)
    report = stokes_residual(hp, form)
    assert report.residual <= 2e-7
    assert not report.lhs.flagged and not report.rhs.flagged
    # the support crosses the rim, so both sides are genuinely nonzero
    assert abs(report.rhs.value) > 1e-4
    assert abs(report.lhs.value) > 1e-4


def test_flagging_thresholds():
    # a bump crossing the segment leaves a tiny but nonzero Richardson gap
    seg = segment([-1.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    form = bump_form([0.0, 0.0, 0.0], 0.5)
    res = integrate_curve(form, seg)
    assert not res.flagged and 0.0 < res.estimate < 1e-8
    assert integrate_curve(form, seg, flag_tol=0.0).flagged
    hp = vertical_halfplane()
    bump = bump_form([0.0, 0.4, 0.05], 0.5)
    report = stokes_residual(hp, bump, flag_tol=1e-30)
    assert report.lhs.flagged and report.rhs.flagged


def test_vertical_term_vanishes_on_horizontal_boundary():
    sigma = lift_horizontal(lemniscate(), sign=1)
    cyl = lift_cylinder(sigma, 1.0 / 3.0)
    form = bump_form([1.0, 0.0, 0.1], 0.4)
    assert vertical_term_vanishing(cyl, form) < 1e-12


def test_vertical_term_detects_vertical_boundary():
    # a boundary segment running straight up the t axis direction pairs
    # with theta at full strength, so the correction term integrates big
    def pos(tau):
        tau = np.asarray(tau, float)
        out = np.zeros(tau.shape + (3,))
        out[..., 0] = 0.2
        out[..., 1] = 0.3
        out[..., 2] = 0.25 + 0.3 * tau
        return out

    def vel(tau):
        tau = np.asarray(tau, float)
        out = np.zeros(tau.shape + (3,))
        out[..., 2] = 0.3
        return out

    vseg = HCurve(0.0, 1.0, pos, vel)

    def sheet_pos(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        out = np.zeros(u.shape + (3,))
        out[..., 0] = u
        out[..., 1] = v
        return out

    sheet = ParamSurface(
        u_dom=(0.0, 1.0),
        v_dom=(0.0, 1.0),
        position=sheet_pos,
        boundary=((vseg, 1),),
    )
    form = bump_form([0.2, 0.3, 0.25], 0.3)
    assert vertical_term_vanishing(sheet, form) > 1e-3
