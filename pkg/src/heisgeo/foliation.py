"""Tracing the characteristic foliation of a surface and detecting periodicity.

A leaf is an integral curve of the parameter-space field
(theta(S_v), -theta(S_u)) normalized by the ambient frame length of the
corresponding tangent vector, so the independent variable of the ODE is
frame arclength in the group.  The trace keeps the periodic coordinates
unwrapped; winding numbers are read off by counting period multiples at
section returns, never by re-wrapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .core import contact, frame_norm
from .surfaces import ParamSurface

__all__ = [
    "FoliationTrace",
    "trace_foliation",
    "detect_period",
    "hausdorff_distance",
]

RTOL = 1e-9
ATOL = 1e-12
MAX_STEP = 1e-2


@dataclass(frozen=True)
class FoliationTrace:
    """One traced leaf: unwrapped parameter samples plus ambient points.

    `winding` counts completed period wraps per axis over the whole trace
    (zero on non-periodic axes), `truncated` reports an abort near a
    characteristic point, and `step_stats` carries solver metadata.  The
    dense solution is kept so section crossings can be refined afterwards.
    """

    surface: ParamSurface
    uv: np.ndarray
    points: np.ndarray
    arclength: float
    winding: tuple[int, int]
    closure_residual: float
    truncated: bool
    step_stats: dict
    _dense: object

    def at(self, s):
        """Unwrapped (u, v) at frame arclength s from the dense solution."""
        return self._dense(s)


def _axis_period(S: ParamSurface, axis: int) -> float:
    dom = S.u_dom if axis == 0 else S.v_dom
    return dom[1] - dom[0]


def _wrap_gap(delta: float, period: float) -> float:
    """Reduce a coordinate difference modulo the period to [-period/2, period/2]."""
    return delta - period * round(delta / period)


def trace_foliation(
    S: ParamSurface,
    start,
    arclen: float,
    tol: float = 1e-6,
    samples: int = 2048,
) -> FoliationTrace:
    """Integrate one leaf of the characteristic foliation from `start`.

    The direction sign is fixed once per trace so the initial v-component is
    nonnegative (ties broken toward nonnegative u).  Integration runs an
    embedded Runge-Kutta 4(5) pair over frame arclength and stops early,
    flagging truncation, if the theta pairing norm falls below
    max(tol, 1e-8) times the local tangent scale, the numerical vicinity of
    a characteristic point.
    """
    if not arclen > 0:
        raise ValueError("arclen must be positive")
    u0, v0 = float(start[0]), float(start[1])

    def pairings(u, v):
        p = S.position(u, v)
        su = S.tangent_u(u, v)
        sv = S.tangent_v(u, v)
        return p, su, sv, contact(p, su), contact(p, sv)

    p, su, sv, tu, tv = pairings(u0, v0)
    guard_rtol = max(float(tol), 1e-8)
    if math.hypot(tu, tv) <= guard_rtol * max(frame_norm(p, su), frame_norm(p, sv)):
        raise ValueError("start point is characteristic")
    sign = 1.0
    if -tu < 0.0 or (-tu == 0.0 and tv < 0.0):
        sign = -1.0

    def rhs(s, y):
        p, su, sv, tu, tv = pairings(y[0], y[1])
        w = tv * su - tu * sv
        wlen = frame_norm(p, w)
        return (sign * tv / wlen, -sign * tu / wlen)

    def near_characteristic(s, y):
        p, su, sv, tu, tv = pairings(y[0], y[1])
        scale = max(frame_norm(p, su), frame_norm(p, sv))
        return math.hypot(tu, tv) - guard_rtol * scale

    near_characteristic.terminal = True

    sol = solve_ivp(
        rhs,
        (0.0, float(arclen)),
        (u0, v0),
        method="RK45",
        rtol=RTOL,
        atol=ATOL,
        max_step=MAX_STEP,
        dense_output=True,
        events=near_characteristic,
    )
    if sol.status == -1:
        raise RuntimeError(f"foliation integration failed: {sol.message}")
    truncated = sol.status == 1
    s_end = float(sol.t[-1])

    grid = np.linspace(0.0, s_end, samples)
    uv = sol.sol(grid).T
    pts = S.position(uv[:, 0], uv[:, 1])

    winding = []
    for axis in range(2):
        if S.periodic[axis]:
            winding.append(int(np.trunc((uv[-1, axis] - uv[0, axis]) / _axis_period(S, axis))))
        else:
            winding.append(0)

    gaps = uv[-1] - uv[0]
    for axis in range(2):
        if S.periodic[axis]:
            gaps[axis] = _wrap_gap(gaps[axis], _axis_period(S, axis))
    closure = float(np.hypot(gaps[0], gaps[1]))

    steps = np.diff(sol.t)
    stats = {
        "steps": int(sol.t.size - 1),
        "nfev": int(sol.nfev),
        "min_step": float(steps.min()) if steps.size else 0.0,
        "max_step": float(steps.max()) if steps.size else 0.0,
    }
    return FoliationTrace(
        surface=S,
        uv=uv,
        points=pts,
        arclength=s_end,
        winding=(winding[0], winding[1]),
        closure_residual=closure,
        truncated=truncated,
        step_stats=stats,
        _dense=sol.sol,
    )


def detect_period(
    trace: FoliationTrace,
    axis: int = 0,
    value: float | None = None,
    close_tol: float = 1e-6,
):
    """Poincare return analysis on the section {coordinate[axis] = value}.

    Crossings of the section (modulo the axis period) are bracketed on the
    solver grid and refined by root finding to 1e-10 in arclength.  Returns
    are compared with the reference crossing modulo the surface periods; the
    first return within `close_tol` decides periodicity and its per axis
    period counts are the winding pair.  If no return closes, the best
    (smallest residual) return is reported instead.  A trace that never
    returns to the section raises.
    """
    S = trace.surface
    if not S.periodic[axis]:
        raise ValueError("section axis must be periodic to talk about returns")
    period = _axis_period(S, axis)
    if value is None:
        value = float(trace.uv[0, axis])

    dense = trace._dense
    s_grid = np.linspace(0.0, trace.arclength, max(4 * len(trace.uv), 4096))
    coord = dense(s_grid)[axis]

    # integer section levels value + k*period swept by the unwrapped coordinate
    k_lo = math.floor((coord.min() - value) / period)
    k_hi = math.ceil((coord.max() - value) / period)
    crossings: list[float] = []
    for k in range(k_lo, k_hi + 1):
        level = value + k * period
        resid = coord - level
        hit = np.where(resid[:-1] * resid[1:] <= 0.0)[0]
        for i in hit:
            if resid[i] == 0.0 and resid[i + 1] == 0.0:
                continue
            s_root = brentq(
                lambda s: dense(s)[axis] - level,
                s_grid[i],
                s_grid[i + 1],
                xtol=1e-10,
            )
            crossings.append(float(s_root))
    crossings.sort()
    # collapse duplicates from grid points sitting exactly on a level
    dedup: list[float] = []
    for s in crossings:
        if not dedup or s - dedup[-1] > 1e-8:
            dedup.append(s)
    crossings = dedup

    start_on_section = abs(_wrap_gap(float(trace.uv[0, axis]) - value, period)) <= 1e-9
    if start_on_section:
        returns = [s for s in crossings if s > 1e-8]
        s_ref = 0.0
    else:
        if not crossings:
            raise ValueError("trace never reaches the section")
        s_ref = crossings[0]
        returns = [s for s in crossings if s > s_ref + 1e-8]
    if not returns:
        raise ValueError("trace does not return to the section")

    ref = dense(s_ref)
    best = None
    for s in returns:
        here = dense(s)
        gaps = here - ref
        winds = [0, 0]
        for ax in range(2):
            if S.periodic[ax]:
                per = _axis_period(S, ax)
                winds[ax] = int(round(gaps[ax] / per)) if ax == axis else int(round((gaps[ax] - _wrap_gap(gaps[ax], per)) / per))
                gaps[ax] = _wrap_gap(gaps[ax], per)
        residual = float(np.hypot(gaps[0], gaps[1]))
        cand = (residual, (abs(winds[0]), abs(winds[1])))
        if residual <= close_tol:
            return cand
        if best is None or residual < best[0]:
            best = cand
    return best


def hausdorff_distance(points_a, points_b) -> float:
    """Symmetric Hausdorff distance between two sampled point clouds."""
    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    da = cKDTree(b).query(a)[0].max()
    db = cKDTree(a).query(b)[0].max()
    return float(max(da, db))
