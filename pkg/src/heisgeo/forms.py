"""Scalar fields and the small complex of forms on the three dimensional group.

Fields evaluate on points of shape (..., 3).  Frame derivatives are exact
whenever a derivative rule is known (coordinate fields, jets, algebra of
such fields) and otherwise fall back to centered differences along the
group flows.  Forms are stored by coefficients in the coframe
(dx, dy, theta) dual to the frame (X, Y, T); there is no dt coefficient
anywhere, which is what makes the complex small.
"""

from __future__ import annotations

import numpy as np

from .core import contact, multiply

__all__ = [
    "ScalarField",
    "const_field",
    "x_field",
    "y_field",
    "t_field",
    "scalar_from_jet",
    "bump_field",
    "bump_form",
    "HorizontalForm",
    "VerticalForm",
    "ThetaWedgeForm",
    "TopForm",
    "eval_form",
    "horizontal_differential",
    "vertical_correction",
    "middle_differential",
    "top_differential",
    "complex_differential",
]

# each nesting level of finite differencing widens the step so the next
# difference is not drowned by the noise of the previous one; the actual
# step scales with the point so far-out evaluations keep relative accuracy
_FD_STEPS = (1e-5, 1e-4, 1e-3)

# third derivatives of jet fields difference the exact second order closures;
# the five point rule with a coarser step keeps both truncation and rounding
# near 1e-12 instead of the 1e-9 a plain centered difference would give
_FD4_STEP = 3e-4


def _fd4_field(func, axis: int) -> "ScalarField":
    def diff(p):
        h = _FD4_STEP * (1.0 + np.linalg.norm(p, axis=-1))
        off = np.zeros_like(p)
        off[..., axis] = h
        far = np.zeros_like(p)
        far[..., axis] = 2.0 * h
        num = (
            -func(multiply(p, far))
            + 8.0 * func(multiply(p, off))
            - 8.0 * func(multiply(p, -off))
            + func(multiply(p, -far))
        )
        return num / (12.0 * h)

    return ScalarField(diff, fd_depth=1)


class ScalarField:
    """Scalar function on the group with lazily built frame derivatives.

    `func` maps points (..., 3) to values (...).  The optional dX, dY, dT
    arguments are zero-argument callables producing the derivative fields;
    they are invoked at most once.  Without them, X(), Y(), T() differentiate
    numerically along the group flow of the corresponding frame vector, so
    even purely numerical fields compose correctly with every operator here.
    """

    def __init__(self, func, dX=None, dY=None, dT=None, fd_depth: int = 0):
        self._func = func
        self._thunks = [dX, dY, dT]
        self._cache: dict = {}
        self.fd_depth = fd_depth

    def __call__(self, p):
        return self._func(np.asarray(p, dtype=float))

    def _derive(self, axis: int) -> "ScalarField":
        if axis not in self._cache:
            thunk = self._thunks[axis]
            self._cache[axis] = thunk() if thunk is not None else self._fd(axis)
        return self._cache[axis]

    def X(self) -> "ScalarField":
        return self._derive(0)

    def Y(self) -> "ScalarField":
        return self._derive(1)

    def T(self) -> "ScalarField":
        return self._derive(2)

    def _fd(self, axis: int) -> "ScalarField":
        base = _FD_STEPS[min(self.fd_depth, len(_FD_STEPS) - 1)]
        func = self._func

        def diff(p):
            h = base * (1.0 + np.linalg.norm(p, axis=-1))
            off = np.zeros_like(p)
            off[..., axis] = h
            return (func(multiply(p, off)) - func(multiply(p, -off))) / (2.0 * h)

        return ScalarField(diff, fd_depth=self.fd_depth + 1)

    def __add__(self, other):
        g = _as_field(other)
        return ScalarField(
            lambda p: self(p) + g(p),
            dX=lambda: self.X() + g.X(),
            dY=lambda: self.Y() + g.Y(),
            dT=lambda: self.T() + g.T(),
            fd_depth=max(self.fd_depth, g.fd_depth),
        )

    __radd__ = __add__

    def __neg__(self):
        return self * (-1.0)

    def __sub__(self, other):
        return self + (-_as_field(other))

    def __rsub__(self, other):
        return _as_field(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            g = other
            return ScalarField(
                lambda p: self(p) * g(p),
                dX=lambda: self.X() * g + self * g.X(),
                dY=lambda: self.Y() * g + self * g.Y(),
                dT=lambda: self.T() * g + self * g.T(),
                fd_depth=max(self.fd_depth, g.fd_depth),
            )
        c = float(other)
        return ScalarField(
            lambda p: c * self(p),
            dX=lambda: self.X() * c,
            dY=lambda: self.Y() * c,
            dT=lambda: self.T() * c,
            fd_depth=self.fd_depth,
        )

    __rmul__ = __mul__


def _as_field(obj) -> ScalarField:
    if isinstance(obj, ScalarField):
        return obj
    return const_field(float(obj))


def const_field(c: float) -> ScalarField:
    c = float(c)
    return ScalarField(
        lambda p: np.full(p.shape[:-1], c),
        dX=lambda: const_field(0.0),
        dY=lambda: const_field(0.0),
        dT=lambda: const_field(0.0),
    )


def x_field() -> ScalarField:
    return ScalarField(
        lambda p: p[..., 0],
        dX=lambda: const_field(1.0),
        dY=lambda: const_field(0.0),
        dT=lambda: const_field(0.0),
    )


def y_field() -> ScalarField:
    return ScalarField(
        lambda p: p[..., 1],
        dX=lambda: const_field(0.0),
        dY=lambda: const_field(1.0),
        dT=lambda: const_field(0.0),
    )


def t_field() -> ScalarField:
    # X t = -y/2 and Y t = x/2, the frame twists the vertical coordinate
    return ScalarField(
        lambda p: p[..., 2],
        dX=lambda: y_field() * (-0.5),
        dY=lambda: x_field() * 0.5,
        dT=lambda: const_field(1.0),
    )


def scalar_from_jet(value, gradient, hessian) -> ScalarField:
    """Field with exact frame derivatives through second order.

    `gradient(p) -> (..., 3)` and `hessian(p) -> (..., 3, 3)` hold coordinate
    derivatives; the chain rule through X = dx - (y/2) dt and Y = dy + (x/2) dt
    is applied here once so callers only supply the flat jet.  Third and
    higher frame derivatives fall back to finite differences.
    """

    # each closure pulls the whole coordinate jet once and combines entries,
    # so evaluating a second frame derivative costs one hessian call
    def X_X(p):
        h = hessian(p)
        y = p[..., 1]
        return h[..., 0, 0] - y * h[..., 0, 2] + 0.25 * y * y * h[..., 2, 2]

    def Y_X(p):
        h = hessian(p)
        x, y = p[..., 0], p[..., 1]
        return (h[..., 0, 1] - 0.5 * gradient(p)[..., 2] - 0.5 * y * h[..., 1, 2]
                + 0.5 * x * h[..., 0, 2] - 0.25 * x * y * h[..., 2, 2])

    def T_X(p):
        h = hessian(p)
        return h[..., 0, 2] - 0.5 * p[..., 1] * h[..., 2, 2]

    def X_Y(p):
        h = hessian(p)
        x, y = p[..., 0], p[..., 1]
        return (h[..., 0, 1] + 0.5 * gradient(p)[..., 2] + 0.5 * x * h[..., 0, 2]
                - 0.5 * y * h[..., 1, 2] - 0.25 * x * y * h[..., 2, 2])

    def Y_Y(p):
        h = hessian(p)
        x = p[..., 0]
        return h[..., 1, 1] + x * h[..., 1, 2] + 0.25 * x * x * h[..., 2, 2]

    def T_Y(p):
        h = hessian(p)
        return h[..., 1, 2] + 0.5 * p[..., 0] * h[..., 2, 2]

    def T_T(p):
        return hessian(p)[..., 2, 2]

    def second(i):
        # frame derivatives of the first-level fields, written in the
        # coordinate jet; T is central so the mixed T rows are symmetric
        if i == 0:  # Xf = f_x - (y/2) f_t
            return X_X, Y_X, T_X
        if i == 1:  # Yf = f_y + (x/2) f_t
            return X_Y, Y_Y, T_Y
        return T_X, T_Y, T_T  # Tf = f_t

    def first(i):
        if i == 0:
            def func(p):
                g = gradient(p)
                return g[..., 0] - 0.5 * p[..., 1] * g[..., 2]
        elif i == 1:
            def func(p):
                g = gradient(p)
                return g[..., 1] + 0.5 * p[..., 0] * g[..., 2]
        else:
            def func(p):
                return gradient(p)[..., 2]
        def exact_second(fn):
            return ScalarField(
                fn,
                dX=lambda: _fd4_field(fn, 0),
                dY=lambda: _fd4_field(fn, 1),
                dT=lambda: _fd4_field(fn, 2),
            )

        dx_, dy_, dt_ = second(i)
        return ScalarField(
            func,
            dX=lambda: exact_second(dx_),
            dY=lambda: exact_second(dy_),
            dT=lambda: exact_second(dt_),
        )

    return ScalarField(
        value,
        dX=lambda: first(0),
        dY=lambda: first(1),
        dT=lambda: first(2),
    )


def bump_field(center, radius: float) -> ScalarField:
    """Fourth power bump (1 - |p - c|^2 / r^2)_+^4, supported in the ball.

    The fourth power keeps three continuous derivatives across the support
    sphere, enough for every operator in the complex to stay continuous.
    The flat jet is closed form, so frame derivatives through second order
    are exact via scalar_from_jet.
    """
    c = np.asarray(center, dtype=float)
    if c.shape != (3,):
        raise ValueError("center must be a single point of shape (3,)")
    r2 = float(radius) ** 2
    if not r2 > 0:
        raise ValueError("radius must be positive")

    def q(p):
        d = p - c
        return np.maximum(1.0 - (d * d).sum(axis=-1) / r2, 0.0)

    def value(p):
        return q(p) ** 4

    def gradient(p):
        d = p - c
        return (-8.0 / r2) * d * (q(p) ** 3)[..., None]

    def hessian(p):
        d = p - c
        qp = q(p)
        eye = np.eye(3)
        return ((-8.0 / r2) * eye * (qp**3)[..., None, None]
                + (48.0 / r2**2) * d[..., :, None] * d[..., None, :] * (qp**2)[..., None, None])

    return scalar_from_jet(value, gradient, hessian)


def bump_form(center, radius: float, degree: int = 1) -> "HorizontalForm":
    """Compactly supported test form chi dx + chi dy with the bump above.

    Carries its support box (corners center +- radius) and the sharper
    `support_ball = (center, radius)` so surface integrators can steer
    refinement toward the support sphere, where the coefficients have a
    thin high curvature layer.
    """
    if degree != 1:
        raise ValueError("only degree 1 test forms are provided")
    c = np.asarray(center, dtype=float)
    chi = bump_field(c, radius)
    return HorizontalForm(
        chi, chi,
        support=(c - radius, c + radius),
        support_ball=(c, float(radius)),
    )


class HorizontalForm:
    """One form f dx + g dy with no theta component.

    `support`, when set, is an axis-aligned box ((lo, hi) corners) outside
    which the coefficients vanish; integrators use it to focus refinement.
    `support_ball = (center, radius)` is the sharper spherical version; the
    differential operators preserve both, since derivatives of the
    coefficients vanish wherever the coefficients do.
    """

    degree = 1

    def __init__(self, f: ScalarField, g: ScalarField, support=None, support_ball=None):
        self.f = f
        self.g = g
        self.support = support
        self.support_ball = support_ball

    def __call__(self, base, vec):
        vec = np.asarray(vec, dtype=float)
        return self.f(base) * vec[..., 0] + self.g(base) * vec[..., 1]


class VerticalForm:
    """One form c theta, annihilating horizontal vectors by construction."""

    degree = 1

    def __init__(self, c: ScalarField, support=None, support_ball=None):
        self.c = c
        self.support = support
        self.support_ball = support_ball

    def __call__(self, base, vec):
        return self.c(base) * contact(base, np.asarray(vec, dtype=float))


class ThetaWedgeForm:
    """Two form a theta^dx + b theta^dy."""

    degree = 2

    def __init__(self, a: ScalarField, b: ScalarField, support=None, support_ball=None):
        self.a = a
        self.b = b
        self.support = support
        self.support_ball = support_ball

    def __call__(self, base, v1, v2):
        v1 = np.asarray(v1, dtype=float)
        v2 = np.asarray(v2, dtype=float)
        th1 = contact(base, v1)
        th2 = contact(base, v2)
        return (self.a(base) * (th1 * v2[..., 0] - th2 * v1[..., 0])
                + self.b(base) * (th1 * v2[..., 1] - th2 * v1[..., 1]))


class TopForm:
    """Volume multiple c theta^dx^dy."""

    degree = 3

    def __init__(self, c: ScalarField, support=None, support_ball=None):
        self.c = c
        self.support = support
        self.support_ball = support_ball

    def __call__(self, base, v1, v2, v3):
        base = np.asarray(base, dtype=float)
        rows = [np.asarray(v, dtype=float) for v in (v1, v2, v3)]
        # cofactor expansion in scalars so single vectors broadcast over
        # batched base points
        (a1, b1, c1), (a2, b2, c2), (a3, b3, c3) = (
            (contact(base, v), v[..., 0], v[..., 1]) for v in rows
        )
        det = (
            a1 * (b2 * c3 - b3 * c2)
            - b1 * (a2 * c3 - a3 * c2)
            + c1 * (a2 * b3 - a3 * b2)
        )
        return self.c(base) * det


def eval_form(form, p, *vectors):
    """Evaluate a form on exactly degree many tangent vectors at p."""
    degree = 0 if isinstance(form, ScalarField) else form.degree
    if len(vectors) != degree:
        raise ValueError(
            f"degree {degree} form needs {degree} vectors, got {len(vectors)}"
        )
    p = np.asarray(p, dtype=float)
    return form(p, *vectors) if vectors else form(p)


def horizontal_differential(u: ScalarField) -> HorizontalForm:
    """Degree zero to one: (Xu) dx + (Yu) dy, the horizontal part of du."""
    return HorizontalForm(u.X(), u.Y())


def vertical_correction(w: HorizontalForm) -> VerticalForm:
    """Vertical form (Xg - Yf) theta that removes the dx^dy term of dw.

    Adding it to the form before differentiating is what makes the degree
    one to two operator below land back in the theta wedge span.
    """
    return VerticalForm(
        w.g.X() - w.f.Y(),
        support=w.support,
        support_ball=getattr(w, "support_ball", None),
    )


def middle_differential(w: HorizontalForm) -> ThetaWedgeForm:
    """Degree one to two, the second order step of the complex.

    With c = Xg - Yf this is d(f dx + g dy + c theta) in the coframe, which
    works out to (Tf - Xc) theta^dx + (Tg - Yc) theta^dy.
    """
    c = vertical_correction(w).c
    return ThetaWedgeForm(
        w.f.T() - c.X(), w.g.T() - c.Y(),
        support=w.support,
        support_ball=getattr(w, "support_ball", None),
    )


def top_differential(w: ThetaWedgeForm) -> TopForm:
    """Degree two to three: (Ya - Xb) theta^dx^dy."""
    return TopForm(
        w.a.Y() - w.b.X(),
        support=w.support,
        support_ball=getattr(w, "support_ball", None),
    )


def complex_differential(form):
    """Differential of any rung: scalar, horizontal, or theta wedge form."""
    if isinstance(form, ScalarField):
        return horizontal_differential(form)
    if isinstance(form, HorizontalForm):
        return middle_differential(form)
    if isinstance(form, ThetaWedgeForm):
        return top_differential(form)
    raise TypeError(f"no differential for {type(form).__name__}")
