"""Heisenberg group primitives.

The n-th Heisenberg group is modelled on R^(2n+1) in exponential coordinates,
stored as numpy arrays with layout ``[x_1..x_n, y_1..y_n, t]``.  All functions
broadcast over leading axes, so a batch of points is simply an array of shape
``(..., 2n+1)``.

Conventions (fixed once, everything else routes through them):

* group law    ``(x,y,t)*(x',y',t') = (x+x', y+y', t+t' + (<x,y'> - <y,x'>)/2)``
* frame        ``X_j = d/dx_j - (y_j/2) d/dt``, ``Y_j = d/dy_j + (x_j/2) d/dt``,
               ``T = d/dt``; the only nonzero bracket is ``[X_j, Y_j] = T``
* contact form ``theta = dt + (y/2)dx - (x/2)dy`` (annihilates every X_j, Y_j,
               pairs to 1 with T); ``d theta = -dx^dy`` in H^1
* dilations    ``delta_lam(x,y,t) = (lam x, lam y, lam^2 t)``, homogeneous
               dimension ``Q = 2n + 2``
* gauge        ``|(x,y,t)| = ((|x|^2+|y|^2)^2 + 16 t^2)^(1/4)``, with the
               left-invariant distance ``d(p,q) = |p^-1 * q|``
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "GroupDescriptor",
    "TangentVector",
    "group_descriptor",
    "point",
    "identity",
    "dim_n",
    "split_coords",
    "multiply",
    "inverse",
    "dilate",
    "rotate_t_axis",
    "translation_differential",
    "frame_at",
    "contact",
    "contact_eval",
    "frame_coords",
    "vector_from_frame",
    "frame_norm",
    "koranyi_norm",
    "koranyi_dist",
]


class GroupDescriptor(NamedTuple):
    """Step-2 group data: topological dimension 2n+1, homogeneous dimension Q."""

    n: int
    Q: int


class TangentVector(NamedTuple):
    """A tangent vector: base point and components in coordinate basis."""

    base: np.ndarray
    vec: np.ndarray


def group_descriptor(n: int) -> GroupDescriptor:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return GroupDescriptor(int(n), 2 * int(n) + 2)


def point(x, y, t) -> np.ndarray:
    """Assemble a point from x, y (scalars or n-vectors) and t."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be scalars or 1-d arrays of equal length")
    return np.concatenate([x, y, [float(t)]])

def identity(n: int = 1) -> np.ndarray:
    return np.zeros(2 * n + 1)


def dim_n(p: np.ndarray) -> int:
    """Recover n from the trailing axis length 2n+1."""
    m = np.shape(p)[-1]
    if m < 3 or m % 2 == 0:
        raise ValueError(f"trailing axis must have odd length >= 3, got {m}")
    return (m - 1) // 2


def split_coords(p: np.ndarray):
    """Views (x, y, t) of a point array; t keeps the leading shape."""
    p = np.asarray(p, dtype=float)
    n = dim_n(p)
    return p[..., :n], p[..., n : 2 * n], p[..., 2 * n]


def _check_same_n(p: np.ndarray, q: np.ndarray) -> int:
    n, m = dim_n(p), dim_n(q)
    if n != m:
        raise ValueError(f"dimension mismatch: H^{n} vs H^{m}")
    return n


def multiply(p, q) -> np.ndarray:
    """Group product p * q (broadcasts over leading axes)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = _check_same_n(p, q)
    px, py, pt = split_coords(p)
    qx, qy, qt = split_coords(q)
    out_xy = p[..., : 2 * n] + q[..., : 2 * n]
    t = pt + qt + 0.5 * (np.sum(px * qy, axis=-1) - np.sum(py * qx, axis=-1))
    return np.concatenate(
        [out_xy, t[..., None]], axis=-1
    )


def inverse(p) -> np.ndarray:
    """Group inverse; in exponential coordinates simply -p."""
    return -np.asarray(p, dtype=float)


def dilate(lam: float, p) -> np.ndarray:
    """Anisotropic dilation (lam x, lam y, lam^2 t); lam must be positive."""
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam}")
    p = np.asarray(p, dtype=float)
    n = dim_n(p)
    out = p.copy()
    out[..., : 2 * n] *= lam
    out[..., 2 * n] *= lam * lam
    return out


def rotate_t_axis(phi: float, p) -> np.ndarray:
    """Rotation about the t-axis, a group automorphism of H^1 preserving theta."""
    p = np.asarray(p, dtype=float)
    if dim_n(p) != 1:
        raise NotImplementedError("t-axis rotation is only provided for H^1")
    c, s = np.cos(phi), np.sin(phi)
    x, y, t = p[..., 0], p[..., 1], p[..., 2]
    return np.stack([c * x - s * y, s * x + c * y, t], axis=-1)


def _join_xy_t(xy, t, lead, n):
    xy = np.broadcast_to(xy, lead + (2 * n,))
    t = np.broadcast_to(t, lead)
    return np.concatenate([xy, t[..., None]], axis=-1)


def translation_differential(p, v) -> np.ndarray:
    """Pushforward of a coordinate vector v under left translation by p.

    The group law is polynomial, so this is exact: the x,y parts pass through
    and the t part picks up (<p_x, v_y> - <p_y, v_x>)/2.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    n = _check_same_n(p, v)
    px, py, _ = split_coords(p)
    vx, vy, vt = split_coords(v)
    t = vt + 0.5 * (np.sum(px * vy, axis=-1) - np.sum(py * vx, axis=-1))
    lead = np.broadcast_shapes(p.shape[:-1], v.shape[:-1])
    return _join_xy_t(v[..., : 2 * n], t, lead, n)


def frame_at(p) -> list[TangentVector]:
    """The left-invariant frame (X_1..X_n, Y_1..Y_n, T) at a single point."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError("frame_at expects a single point")
    n = dim_n(p)
    x, y, _ = split_coords(p)
    vecs = []
    for j in range(n):
        v = np.zeros(2 * n + 1)
        v[j] = 1.0
        v[2 * n] = -0.5 * y[j]
        vecs.append(TangentVector(p, v))
    for j in range(n):
        v = np.zeros(2 * n + 1)
        v[n + j] = 1.0
        v[2 * n] = 0.5 * x[j]
        vecs.append(TangentVector(p, v))
    v = np.zeros(2 * n + 1)
    v[2 * n] = 1.0
    vecs.append(TangentVector(p, v))
    return vecs


def contact(p, v) -> np.ndarray:
    """theta_p(v) = v_t + (<y, v_x> - <x, v_y>)/2, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_same_n(p, v)
    x, y, _ = split_coords(p)
    vx, vy, vt = split_coords(v)
    return vt + 0.5 * (np.sum(y * vx, axis=-1) - np.sum(x * vy, axis=-1))


def contact_eval(tv: TangentVector) -> np.ndarray:
    return contact(tv.base, tv.vec)


def frame_coords(p, v) -> np.ndarray:
    """Coefficients of v in the frame basis: (dx(v), dy(v), theta(v)).

    The coframe dual to (X, Y, T) is (dx, dy, theta), so the horizontal
    coefficients are the raw x,y components and only the last slot differs
    from the coordinate representation.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    n = _check_same_n(p, v)
    th = contact(p, v)
    lead = np.broadcast_shapes(p.shape[:-1], v.shape[:-1])
    return _join_xy_t(v[..., : 2 * n], th, lead, n)


def vector_from_frame(p, coeffs) -> np.ndarray:
    """Inverse of frame_coords: rebuild coordinate components from frame ones."""
    p = np.asarray(p, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    n = _check_same_n(p, coeffs)
    x, y, _ = split_coords(p)
    a, b, c = split_coords(coeffs)  # same layout: (X-part, Y-part, T-part)
    t = c - 0.5 * (np.sum(y * a, axis=-1) - np.sum(x * b, axis=-1))
    lead = np.broadcast_shapes(p.shape[:-1], coeffs.shape[:-1])
    return _join_xy_t(coeffs[..., : 2 * n], t, lead, n)


def frame_norm(p, v) -> np.ndarray:
    """Length of v in the metric making (X, Y, T) orthonormal."""
    return np.linalg.norm(frame_coords(p, v), axis=-1)


def koranyi_norm(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    n = dim_n(p)
    horiz2 = np.sum(p[..., : 2 * n] ** 2, axis=-1)
    t = p[..., 2 * n]
    return (horiz2**2 + 16.0 * t**2) ** 0.25


def koranyi_dist(p, q) -> np.ndarray:
    """Left-invariant gauge distance |p^-1 * q|."""
    return koranyi_norm(multiply(inverse(p), q))
