"""Acceptance gate: one test per shipped guarantee, one verdict line each.

Each test prints `criterion N: pass/FAIL (measurements)` and then asserts,
so the verdict and the measured numbers travel together.  Tolerances here
are the shipped contract; property tests elsewhere probe beyond them.
"""

import json
import time

import numpy as np

from heisgeo import (
    contact,
    cylinder_embeds,
    detect_period,
    dilate,
    frame_at,
    identity,
    inverse,
    lemniscate,
    lift_closed_defect,
    lift_horizontal,
    multiply,
    self_intersection_gap,
    torus_surface,
    trace_foliation,
    vertical_term_vanishing,
)
from heisgeo.cli import DEFAULT_SEED, _stokes_scene, main
from heisgeo.curves import HCurve
from heisgeo.forms import (
    HorizontalForm,
    bump_form,
    horizontal_differential,
    middle_differential,
    scalar_from_jet,
    top_differential,
    vertical_correction,
)
from heisgeo.integrate import stokes_residual
from heisgeo.surfaces import ParamSurface, characteristic_residual

R_TWO = np.sqrt(1.0 + 2.0 ** (2.0 / 3.0))


def verdict(num, ok, detail):
    line = f"criterion {num}: {'pass' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def random_jet_field(rng, freq_scale=1.0):
    """Polynomial plus one sine wave, with handwritten gradient and hessian."""
    a0 = rng.normal()
    a = rng.normal(size=3)
    M = rng.normal(size=(3, 3))
    M = 0.5 * (M + M.T)
    s = rng.normal()
    k = rng.uniform(0.5, 1.5, size=3) * freq_scale
    phi = rng.uniform(0.0, 2 * np.pi)

    def value(p):
        quad = 0.5 * np.einsum("...i,ij,...j->...", p, M, p)
        return a0 + p @ a + quad + s * np.sin(p @ k + phi)

    def gradient(p):
        lin = a + np.einsum("ij,...j->...i", M, p)
        return lin + s * np.cos(p @ k + phi)[..., None] * k

    def hessian(p):
        osc = -s * np.sin(p @ k + phi)
        return M + osc[..., None, None] * np.outer(k, k)

    return scalar_from_jet(value, gradient, hessian)


def coordinate_exterior_derivative(P, Q, R, p, v1, v2, h=1e-6):
    """d(P dx + Q dy + R dt) evaluated on (v1, v2) by central differences."""

    def partials(F):
        out = []
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = h
            out.append((F(p + e) - F(p - e)) / (2 * h))
        return out

    Px, Py, Pt = partials(P)
    Qx, Qy, Qt = partials(Q)
    Rx, Ry, Rt = partials(R)
    wedge = lambda i, j: v1[..., i] * v2[..., j] - v1[..., j] * v2[..., i]
    return (
        (Qx - Py) * wedge(0, 1)
        + (Rx - Pt) * wedge(0, 2)
        + (Ry - Qt) * wedge(1, 2)
    )


def test_criterion_01_lemniscate_lift_oracle():
    lifted = lift_horizontal(lemniscate(), sign=-1)
    tau = np.linspace(0.0, 2.0 * np.pi, 1000)
    oracle = (-9.0 * np.sin(tau) - np.sin(3.0 * tau)) / 24.0
    err = float(np.max(np.abs(lifted.position(tau)[:, 2] - oracle)))
    verdict(1, err <= 1e-8, f"max lift height error {err:.3e} <= 1e-8")


def test_criterion_02_lift_closure():
    lifted = lift_horizontal(lemniscate(), sign=-1)
    ends = np.abs(lifted.position(2.0 * np.pi) - lifted.position(0.0))
    gap = float(ends.max())
    area = abs(lift_closed_defect(lemniscate()))
    ok = gap <= 1e-10 and area <= 1e-12
    verdict(2, ok, f"endpoint gap {gap:.3e} <= 1e-10, signed area {area:.3e} <= 1e-12")


def test_criterion_03_self_intersection_gap_and_embedding():
    sigma = lift_horizontal(lemniscate(), sign=1)
    gap = self_intersection_gap(sigma)
    gap_ok = abs(gap - 2.0 / 3.0) <= 1e-6
    good = {h: cylinder_embeds(sigma, h, samples=4096) for h in (0.1, 1.0 / 3.0, 0.6)}
    bad = cylinder_embeds(sigma, 0.7, samples=4096)
    ok = gap_ok and all(good.values()) and not bad
    verdict(
        3,
        ok,
        f"vertical gap {gap:.9f} vs 2/3, embeds at 0.1/(1/3)/0.6 "
        f"{tuple(good.values())}, self-intersects at 0.7 {not bad}",
    )


def test_criterion_04_torus_free_of_characteristic_points():
    torus = torus_surface(R_TWO, 1.0)
    g = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    tu, tv = characteristic_residual(torus, uu, vv)
    lo = float(np.hypot(tu, tv).min())
    bound = (R_TWO - 1.0) ** 2 / 2.0 - 1e-9
    verdict(4, lo > 0.0 and lo >= bound, f"grid min {lo:.6f} >= bound {bound:.6f}")


def test_criterion_05_foliation_periodicity():
    details = []
    ok = True
    for n in (1, 2, 3):
        torus = torus_surface(np.sqrt(1.0 + n ** (2.0 / 3.0)), 1.0)
        t0 = time.perf_counter()
        trace = trace_foliation(torus, (0.0, 0.0), 2.0 * np.pi * 1.15 * n + 10.0)
        residual, windings = detect_period(trace, axis=0)
        elapsed = time.perf_counter() - t0
        case_ok = (
            residual <= 1e-6
            and elapsed <= 10.0
            and windings == (1, n)  # required pattern: n v-loops per u-loop
        )
        ok &= case_ok
        details.append(
            f"n={n}: closure {residual:.2e}, windings {windings} want (1, {n}), "
            f"{elapsed:.1f}s"
        )
    verdict(5, ok, "; ".join(details))


def test_criterion_06_complex_identities_and_oracle():
    rng = np.random.default_rng(DEFAULT_SEED)
    worst_first = 0.0
    worst_second = 0.0
    for _ in range(20):
        f, g = random_jet_field(rng), random_jet_field(rng)
        p = rng.uniform(-1.5, 1.5, (1000, 3))
        v1, v2, v3 = rng.normal(size=(3, 3))
        Dd0 = middle_differential(horizontal_differential(f))
        worst_first = max(worst_first, float(np.max(np.abs(Dd0(p, v1, v2)))))
        dD = top_differential(middle_differential(HorizontalForm(f, g)))
        worst_second = max(worst_second, float(np.max(np.abs(dD(p, v1, v2, v3)))))

    worst_oracle = 0.0
    for _ in range(10):
        f, g = random_jet_field(rng), random_jet_field(rng)
        w = HorizontalForm(f, g)
        c = vertical_correction(w).c
        P = lambda p: f(p) + c(p) * p[..., 1] / 2.0
        Q = lambda p: g(p) - c(p) * p[..., 0] / 2.0
        R = lambda p: c(p)
        D = middle_differential(w)
        p = rng.uniform(-1.5, 1.5, (50, 3))
        v1, v2 = rng.normal(size=(2, 3))
        oracle = coordinate_exterior_derivative(P, Q, R, p, v1, v2)
        worst_oracle = max(worst_oracle, float(np.max(np.abs(D(p, v1, v2) - oracle))))

    ok = worst_first <= 1e-10 and worst_second <= 1e-10 and worst_oracle <= 1e-8
    verdict(
        6,
        ok,
        f"second-after-first {worst_first:.2e} <= 1e-10, "
        f"third-after-second {worst_second:.2e} <= 1e-10, "
        f"exterior-derivative oracle gap {worst_oracle:.2e} <= 1e-8",
    )


def test_criterion_07_stokes_verification_three_scenes():
    details = []
    ok = True
    for scene in ("halfplane", "sigma-cylinder", "band"):
        S, draw = _stokes_scene(scene)
        rng = np.random.default_rng(DEFAULT_SEED)
        worst_res = 0.0
        worst_est = 0.0
        for index in range(20):
            center = draw(rng, index)
            radius = rng.uniform(0.2, 0.6)
            report = stokes_residual(S, bump_form(center, radius))
            worst_res = max(worst_res, report.residual)
            worst_est = max(worst_est, report.lhs.estimate + report.rhs.estimate)
        scene_ok = worst_res <= 1e-6 and worst_est <= 2e-7
        ok &= scene_ok
        details.append(f"{scene}: residual {worst_res:.2e}, estimate {worst_est:.2e}")
    verdict(7, ok, "; ".join(details) + " (bounds 1e-6 / 2e-7)")


def test_criterion_08_verticality_mechanism():
    S, draw = _stokes_scene("sigma-cylinder")
    rng = np.random.default_rng(DEFAULT_SEED)
    forms = []
    for index in range(20):
        center = draw(rng, index)
        radius = rng.uniform(0.2, 0.6)
        forms.append(bump_form(center, radius))
    worst = max(vertical_term_vanishing(S, w) for w in forms)

    # negative control: swap the boundary for a segment running straight up
    # near the first drawn bump, offset from its axis so nothing cancels
    c0 = np.asarray(forms[0].support_ball[0], dtype=float)
    base = c0 + np.array([0.13, 0.0, -0.2])

    def pos(tau):
        tau = np.asarray(tau, float)
        return base + np.stack(
            [np.zeros_like(tau), np.zeros_like(tau), 0.5 * tau], axis=-1
        )

    def vel(tau):
        tau = np.asarray(tau, float)
        out = np.zeros(tau.shape + (3,))
        out[..., 2] = 0.5
        return out

    vertical_edge = HCurve(0.0, 1.0, pos, vel)
    sheet = ParamSurface(
        u_dom=(0.0, 1.0),
        v_dom=(0.0, 1.0),
        position=S.position,
        tangent_u=S.tangent_u,
        tangent_v=S.tangent_v,
        boundary=((vertical_edge, 1),),
        periodic=S.periodic,
    )
    control = max(vertical_term_vanishing(sheet, w) for w in forms)
    ok = worst <= 1e-8 and control > 1e-3
    verdict(
        8,
        ok,
        f"max |boundary integral| {worst:.2e} <= 1e-8 on horizontal rims, "
        f"vertical-edge control {control:.2e} > 1e-3",
    )


def test_criterion_09_group_and_frame_suite():
    rng = np.random.default_rng(DEFAULT_SEED)
    p, q, r = rng.uniform(-2.0, 2.0, (3, 200, 3))
    assoc = float(np.max(np.abs(multiply(multiply(p, q), r) - multiply(p, multiply(q, r)))))
    unit = float(np.max(np.abs(multiply(p, identity()) - p)))
    inv = float(np.max(np.abs(multiply(p, inverse(p)))))
    lam = 1.7
    homo = float(np.max(np.abs(dilate(lam, multiply(p, q)) - multiply(dilate(lam, p), dilate(lam, q)))))

    h = 1e-4
    ex, ey = np.array([h, 0.0, 0.0]), np.array([0.0, h, 0.0])
    comm = multiply(inverse(multiply(ey, ex)), multiply(ex, ey))
    comm_err = float(np.max(np.abs(comm / h**2 - np.array([0.0, 0.0, 1.0]))))

    duality = 0.0
    for pt in rng.uniform(-2.0, 2.0, (50, 3)):
        X, Y, T = frame_at(pt)
        duality = max(
            duality,
            abs(float(contact(pt, X.vec))),
            abs(float(contact(pt, Y.vec))),
            abs(float(contact(pt, T.vec)) - 1.0),
        )

    # dyadic box corners and dyadic scale factors keep every product exact,
    # so the homogeneous-dimension scaling law must hold to the last bit
    volume_exact = True
    box = np.array([[-0.75, -0.5, -0.25], [0.5, 1.25, 0.75]])
    vol = np.prod(box[1] - box[0])
    for lam in (0.5, 2.0, 4.0):
        lo, hi = dilate(lam, box[0]), dilate(lam, box[1])
        volume_exact &= bool(np.prod(hi - lo) == lam**4 * vol)

    ok = (
        assoc <= 1e-13
        and unit == 0.0
        and inv <= 1e-13
        and homo <= 1e-13
        and comm_err <= h
        and duality <= 1e-14
        and volume_exact
    )
    verdict(
        9,
        ok,
        f"assoc {assoc:.1e}, identity {unit:.1e}, inverse {inv:.1e}, "
        f"dilation homo {homo:.1e}, commutator/h^2 error {comm_err:.1e} <= {h}, "
        f"theta duality {duality:.1e} <= 1e-14, volume scaling exact {volume_exact}",
    )


def test_criterion_10_deterministic_stokes_reports(tmp_path, monkeypatch):
    monkeypatch.delenv("HEIS_SEED", raising=False)
    outs = [tmp_path / f"run{i}.json" for i in (0, 1)]
    codes = [
        main(["stokes", "--scene", "halfplane", "--seed", "0x5EED", "-o", str(out)])
        for out in outs
    ]
    same = outs[0].read_bytes() == outs[1].read_bytes()
    payload = json.loads(outs[0].read_text())
    ok = codes == [0, 0] and same and payload["seed"] == 0x5EED
    verdict(
        10,
        ok,
        f"exit codes {codes}, byte-identical {same}, "
        f"seed {payload['seed']:#x}, {len(payload['forms'])} forms",
    )
