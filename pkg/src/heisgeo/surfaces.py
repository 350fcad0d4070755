"""Parametrized and implicit surfaces with boundary in the group.

A surface is a rectangle of parameters with a position map into the group,
tangent callables (exact where the constructor knows them, else central
differences), per axis periodicity flags, and a constructor supplied list of
oriented boundary curves.  The theta pairings of the two tangents drive
everything geometric here: a point is characteristic when both vanish, the
projection of the vertical frame vector onto the tangent plane vanishes
exactly there, and the kernel direction of theta restricted to the tangent
plane is the characteristic foliation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import TangentVector, contact, frame_coords, frame_norm, rotate_t_axis
from .curves import HCurve, horizontality_residual, vertical_translate
from .forms import ScalarField
from .quadrature import CURVE_QUAD, PrefixIntegral, QuadratureSpec

__all__ = [
    "ParamSurface",
    "ImplicitSurface",
    "vertical_halfplane",
    "lift_cylinder",
    "torus_surface",
    "revolve_curve",
    "torus_characteristic_loop",
    "characteristic_residual",
    "horizontal_gradient",
    "project_T",
    "foliation_direction",
    "cylinder_embeds",
    "immersion_defect",
    "regularity_margin",
]

FD_PARTIAL_SCALE = 1e-6

# a point counts as characteristic when the theta pairings of both tangents
# are below this times the local tangent scale
CHARACTERISTIC_RTOL = 1e-8


@dataclass(frozen=True)
class ParamSurface:
    """Surface over [u0,u1] x [v0,v1]; callables vectorized, (..., 3) valued.

    `boundary` holds (curve, orientation) pairs; orientation +1 means the
    curve's own parameter direction agrees with the counterclockwise induced
    orientation of the parameter rectangle, -1 that it opposes it.  `compact`
    is False when the domain is a truncation of an unbounded surface, in
    which case only the listed boundary components are genuine and integrals
    over the surface require integrands supported inside the truncation.
    """

    u_dom: tuple[float, float]
    v_dom: tuple[float, float]
    position: Callable[[np.ndarray, np.ndarray], np.ndarray]
    tangent_u: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    tangent_v: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    boundary: tuple[tuple[HCurve, int], ...] = ()
    periodic: tuple[bool, bool] = (False, False)
    compact: bool = True

    def __post_init__(self):
        if not (self.u_dom[1] > self.u_dom[0] and self.v_dom[1] > self.v_dom[0]):
            raise ValueError("parameter rectangle is empty")
        pos = self.position
        if self.tangent_u is None:

            def fd_u(u, v):
                u = np.asarray(u, dtype=float)
                h = FD_PARTIAL_SCALE * (1.0 + np.abs(u))
                return (pos(u + h, v) - pos(u - h, v)) / (2.0 * h)[..., None]

            object.__setattr__(self, "tangent_u", fd_u)
        if self.tangent_v is None:

            def fd_v(u, v):
                v = np.asarray(v, dtype=float)
                h = FD_PARTIAL_SCALE * (1.0 + np.abs(v))
                return (pos(u, v + h) - pos(u, v - h)) / (2.0 * h)[..., None]

            object.__setattr__(self, "tangent_v", fd_v)


@dataclass(frozen=True)
class ImplicitSurface:
    """Zero set of a scalar field inside an axis aligned box region.

    `region` is a pair of opposite corners.  The surface is regular in the
    horizontal sense where the horizontal gradient of f is nonzero on the
    zero set; regularity_margin samples that.
    """

    f: ScalarField
    region: tuple[np.ndarray, np.ndarray]


def vertical_halfplane(
    y_span: tuple[float, float] = (-3.0, 3.0),
    t_span: tuple[float, float] = (0.0, 3.0),
) -> ParamSurface:
    """Vertical half-plane {x = 0, t > 0}, truncated to a parameter box.

    The genuine boundary is the line {(0, y, 0)}, an integral curve of the
    frame field Y; the three truncation edges are not boundary components,
    so the surface is marked non-compact and integrands must vanish near
    those edges.
    """
    y0, y1 = float(y_span[0]), float(y_span[1])
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t0 != 0.0:
        raise ValueError("truncation must start at the boundary line t = 0")

    def pos(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return np.stack([np.zeros_like(u), u, v], axis=-1)

    def tan_u(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        out = np.zeros(u.shape + (3,))
        out[..., 1] = 1.0
        return out

    def tan_v(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        out = np.zeros(u.shape + (3,))
        out[..., 2] = 1.0
        return out

    edge = HCurve(
        y0,
        y1,
        lambda tau: np.stack(
            [np.zeros_like(np.asarray(tau, float)), np.asarray(tau, float),
             np.zeros_like(np.asarray(tau, float))], axis=-1),
        lambda tau: np.broadcast_to(
            np.array([0.0, 1.0, 0.0]), np.shape(np.asarray(tau, float)) + (3,)).copy(),
    )
    return ParamSurface(
        u_dom=(y0, y1),
        v_dom=(t0, t1),
        position=pos,
        tangent_u=tan_u,
        tangent_v=tan_v,
        boundary=((edge, +1),),
        compact=False,
    )


def lift_cylinder(curve: HCurve, height: float, closure_tol: float = 1e-8) -> ParamSurface:
    """Vertical cylinder over a closed horizontal curve, ruling height `height`.

    The bottom rim is the curve itself, the top its vertical translate; the
    induced boundary orientations are opposite, bottom positive.
    """
    if not height > 0:
        raise ValueError(f"height must be positive, got {height}")
    scale = 1.0 + float(np.linalg.norm(curve.position(curve.a)))
    if curve.closure_defect() > closure_tol * scale:
        raise ValueError(
            f"curve is not closed: endpoint gap {curve.closure_defect():.3e}")
    res = horizontality_residual(curve)
    if res > 1e-6:
        raise ValueError(f"curve is not horizontal: theta residual {res:.3e}")

    def pos(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        p = curve.position(u)
        out = p.copy()
        out[..., 2] += v
        return out

    def tan_u(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return curve.velocity(u)

    def tan_v(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        out = np.zeros(u.shape + (3,))
        out[..., 2] = 1.0
        return out

    top = vertical_translate(curve, height)
    return ParamSurface(
        u_dom=(curve.a, curve.b),
        v_dom=(0.0, float(height)),
        position=pos,
        tangent_u=tan_u,
        tangent_v=tan_v,
        boundary=((curve, +1), (top, -1)),
        periodic=(True, False),
    )


def torus_surface(R: float, r: float) -> ParamSurface:
    """Torus of revolution about the t-axis, tube radius r, center radius R."""
    R, r = float(R), float(r)
    if not R > r > 0:
        raise ValueError(f"need R > r > 0, got R={R}, r={r}")

    def pos(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        w = R + r * np.cos(u)
        return np.stack([w * np.cos(v), w * np.sin(v), r * np.sin(u)], axis=-1)

    def tan_u(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return np.stack(
            [-r * np.sin(u) * np.cos(v), -r * np.sin(u) * np.sin(v), r * np.cos(u)],
            axis=-1,
        )

    def tan_v(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        w = R + r * np.cos(u)
        return np.stack([-w * np.sin(v), w * np.cos(v), np.zeros_like(u)], axis=-1)

    return ParamSurface(
        u_dom=(0.0, 2.0 * math.pi),
        v_dom=(0.0, 2.0 * math.pi),
        position=pos,
        tangent_u=tan_u,
        tangent_v=tan_v,
        boundary=(),
        periodic=(True, True),
    )


def revolve_curve(curve: HCurve, phi_max: float, closure_tol: float = 1e-8) -> ParamSurface:
    """Band swept by rotating a closed horizontal curve about the t-axis.

    Rotation about the vertical axis is a group automorphism whose
    differential acts by the same planar rotation on tangent coordinates,
    so both rims stay horizontal exactly.  Rim at angle 0 is positively
    oriented, the rim at phi_max negatively.
    """
    phi_max = float(phi_max)
    if not 0.0 < phi_max <= 2.0 * math.pi + 1e-12:
        raise ValueError(f"need 0 < phi_max <= 2*pi, got {phi_max}")
    scale = 1.0 + float(np.linalg.norm(curve.position(curve.a)))
    if curve.closure_defect() > closure_tol * scale:
        raise ValueError(
            f"curve is not closed: endpoint gap {curve.closure_defect():.3e}")
    res = horizontality_residual(curve)
    if res > 1e-6:
        raise ValueError(f"curve is not horizontal: theta residual {res:.3e}")

    def pos(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return rotate_t_axis(v, curve.position(u))

    def tan_u(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return rotate_t_axis(v, curve.velocity(u))

    def tan_v(u, v):
        p = pos(u, v)
        return np.stack([-p[..., 1], p[..., 0], np.zeros(p.shape[:-1])], axis=-1)

    far = HCurve(
        curve.a,
        curve.b,
        lambda tau: rotate_t_axis(phi_max, curve.position(tau)),
        lambda tau: rotate_t_axis(phi_max, curve.velocity(tau)),
    )
    full_turn = abs(phi_max - 2.0 * math.pi) < 1e-12
    return ParamSurface(
        u_dom=(curve.a, curve.b),
        v_dom=(0.0, phi_max),
        position=pos,
        tangent_u=tan_u,
        tangent_v=tan_v,
        boundary=() if full_turn else ((curve, +1), (far, -1)),
        periodic=(True, full_turn),
    )


def torus_characteristic_loop(
    R: float,
    r: float,
    v0: float = 0.0,
    loops: int = 1,
    quad: QuadratureSpec = CURVE_QUAD,
) -> HCurve:
    """Leaf of the characteristic foliation on the torus, solved in closed form.

    Along a leaf parametrized by u the angle obeys dv/du =
    2 r cos u / (R + r cos u)^2, an explicit quadrature; the resulting curve
    is horizontal exactly, not just to integration tolerance, because the
    theta pairings of the two torus tangents cancel by construction.  The
    curve closes in the ambient group only when the accumulated v over
    `loops` turns in u is a multiple of 2*pi, which happens at special radii.
    """
    R, r = float(R), float(r)
    if not R > r > 0:
        raise ValueError(f"need R > r > 0, got R={R}, r={r}")
    if not loops >= 1:
        raise ValueError("loops must be a positive integer")
    torus = torus_surface(R, r)
    a, b = 0.0, 2.0 * math.pi * loops

    def slope(u):
        u = np.asarray(u, dtype=float)
        return 2.0 * r * np.cos(u) / (R + r * np.cos(u)) ** 2

    vee = PrefixIntegral(slope, a, b, quad)

    def v_of(u):
        return v0 + vee(u)

    def pos(tau):
        tau = np.asarray(tau, dtype=float)
        return torus.position(tau, v_of(tau))

    def vel(tau):
        tau = np.asarray(tau, dtype=float)
        vv = v_of(tau)
        return torus.tangent_u(tau, vv) + slope(tau)[..., None] * torus.tangent_v(tau, vv)

    return HCurve(a, b, pos, vel)


def _theta_pair(S: ParamSurface, u, v):
    p = S.position(u, v)
    return contact(p, S.tangent_u(u, v)), contact(p, S.tangent_v(u, v))


def characteristic_residual(S: ParamSurface, u, v):
    """Theta pairings (theta(S_u), theta(S_v)); (0,0) marks a characteristic point."""
    tu, tv = _theta_pair(S, u, v)
    if np.ndim(tu) == 0:
        return float(tu), float(tv)
    return tu, tv


def horizontal_gradient(f: ScalarField, p):
    """Pair (Xf, Yf) at p; an implicit surface is regular where it is nonzero."""
    p = np.asarray(p, dtype=float)
    gx = f.X()(p)
    gy = f.Y()(p)
    if np.ndim(gx) == 0:
        return float(gx), float(gy)
    return gx, gy


def project_T(S: ParamSurface, u, v) -> TangentVector:
    """Orthogonal projection of the vertical frame vector onto the tangent plane.

    Orthogonality is in the left invariant metric making the frame
    orthonormal; there the component of any vector along T is its theta
    pairing, so the normal equations have right side (theta(S_u), theta(S_v))
    and the projection vanishes exactly at characteristic points.
    """
    p = S.position(u, v)
    su = S.tangent_u(u, v)
    sv = S.tangent_v(u, v)
    cu = frame_coords(p, su)
    cv = frame_coords(p, sv)
    gram = np.stack(
        [
            np.stack([(cu * cu).sum(-1), (cu * cv).sum(-1)], axis=-1),
            np.stack([(cu * cv).sum(-1), (cv * cv).sum(-1)], axis=-1),
        ],
        axis=-2,
    )
    rhs = np.stack([cu[..., 2], cv[..., 2]], axis=-1)
    det = gram[..., 0, 0] * gram[..., 1, 1] - gram[..., 0, 1] ** 2
    scale = gram[..., 0, 0] * gram[..., 1, 1]
    if np.any(det <= 1e-14 * np.maximum(scale, 1e-300)):
        raise ValueError("tangent plane is degenerate")
    coef = np.linalg.solve(gram, rhs[..., None])[..., 0]
    vec = coef[..., :1] * su + coef[..., 1:] * sv
    return TangentVector(p, vec)


def foliation_direction(S: ParamSurface, u, v):
    """Characteristic direction in parameter space, frame-normalized.

    The kernel of theta inside the tangent plane is spanned by
    W = theta(S_v) S_u - theta(S_u) S_v; returned is (theta(S_v), -theta(S_u))
    divided by the frame length of W, so moving at unit speed in the returned
    coordinates moves at unit frame speed in the group.
    """
    tu, tv = _theta_pair(S, u, v)
    norm = np.hypot(tu, tv)
    p = S.position(u, v)
    su = S.tangent_u(u, v)
    sv = S.tangent_v(u, v)
    lscale = np.maximum(frame_norm(p, su), frame_norm(p, sv))
    if np.any(norm < CHARACTERISTIC_RTOL * lscale):
        raise ValueError("characteristic point: foliation direction undefined")
    w = np.asarray(tv)[..., None] * su - np.asarray(tu)[..., None] * sv
    wlen = frame_norm(p, w)
    du = tv / wlen
    dv = -tu / wlen
    if np.ndim(du) == 0:
        return float(du), float(dv)
    return du, dv


def cylinder_embeds(curve: HCurve, height: float, samples: int = 4096) -> bool:
    """Whether the vertical cylinder of the given height over the curve embeds.

    The cylinder self-intersects exactly when two parameters hit the same
    planar point with vertical offsets closer than the ruling height.
    """
    from .curves import self_intersection_gap

    return float(height) < self_intersection_gap(curve, samples=samples)


def immersion_defect(S: ParamSurface, grid: int = 64) -> float:
    """Smallest sine of the tangent angle over a sample grid; 0 means degenerate."""
    u = np.linspace(S.u_dom[0], S.u_dom[1], grid)
    v = np.linspace(S.v_dom[0], S.v_dom[1], grid)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    su = S.tangent_u(uu, vv)
    sv = S.tangent_v(uu, vv)
    nu = np.linalg.norm(su, axis=-1)
    nv = np.linalg.norm(sv, axis=-1)
    dot = (su * sv).sum(-1)
    gram_det = np.maximum(nu**2 * nv**2 - dot**2, 0.0)
    return float(np.min(np.sqrt(gram_det) / np.maximum(nu * nv, 1e-300)))


def regularity_margin(surface: ImplicitSurface, grid: int = 48) -> float:
    """Minimal horizontal gradient norm near the zero set inside the region.

    The zero set is located by sign changes of f across grid edges; the
    margin is the smallest horizontal gradient length over the endpoints of
    crossing edges.  Returns +inf when the zero set misses the region.
    """
    lo = np.asarray(surface.region[0], dtype=float)
    hi = np.asarray(surface.region[1], dtype=float)
    axes = [np.linspace(lo[i], hi[i], grid) for i in range(3)]
    xx, yy, tt = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([xx, yy, tt], axis=-1)
    vals = surface.f(pts)
    near = np.zeros(vals.shape, dtype=bool)
    for axis in range(3):
        lo_sl = [slice(None)] * 3
        hi_sl = [slice(None)] * 3
        lo_sl[axis] = slice(None, -1)
        hi_sl[axis] = slice(1, None)
        crossing = vals[tuple(lo_sl)] * vals[tuple(hi_sl)] <= 0.0
        near[tuple(lo_sl)] |= crossing
        near[tuple(hi_sl)] |= crossing
    if not near.any():
        return math.inf
    sel = pts[near]
    gx, gy = horizontal_gradient(surface.f, sel)
    return float(np.min(np.hypot(gx, gy)))
