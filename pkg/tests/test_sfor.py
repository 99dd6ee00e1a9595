import math

import numpy as np
import pytest
from scipy import integrate

from sfor_wave import sfor, space1d
from sfor_wave.errors import NotSPDError, StepError, ValidationError
from sfor_wave.mesh import build_graded_mesh, optimal_grading
from sfor_wave.sfor import Formula, ProblemSpec, Scheme

COMBOS = [(s, f) for s in Scheme for f in Formula]


def example1(alpha, scheme="V_FORM", formula="L1"):
    return ProblemSpec(alpha, space1d.hat(), space1d.hat(), space1d.sine(1), scheme, formula)


def test_problem_spec():
    p = example1(1.5, "z_form", Formula.ALIKHANOV)
    assert p.scheme is Scheme.Z_FORM and p.beta == 0.75 and p.theta == 0.375
    assert example1(1.5).theta == 0.0
    for bad in (1.0, 2.0, 0.5):
        with pytest.raises(ValidationError):
            example1(bad)
    with pytest.raises(ValidationError):
        example1(1.5, "W_FORM")


def test_zero_data_gives_zero_solution():
    z = space1d.zero()
    for scheme, formula in COMBOS:
        spec = ProblemSpec(1.5, z, z, z, scheme, formula)
        tr = sfor.run(spec, build_graded_mesh(1.0, 16, 2.0), space1d.build_fem(math.pi, 10))
        assert not np.any(tr.U) and not np.any(tr.W)


def test_single_step_trajectory():
    spec = example1(1.5)
    disc = space1d.build_fem(math.pi, 20)
    tr = sfor.run(spec, build_graded_mesh(1.0, 1, 1.0), disc)
    assert tr.U.shape == (2, 19)
    np.testing.assert_allclose(tr.U[0], space1d.l2_project(disc, spec.a0))


def _phi_load(g):
    # (g, phi) for the single hat function on (0, 1) peaked at 1/2
    v1, _ = integrate.quad(lambda x: g(x) * 2 * x, 0.0, 0.5, epsabs=1e-15)
    v2, _ = integrate.quad(lambda x: g(x) * 2 * (1 - x), 0.5, 1.0, epsabs=1e-15)
    return v1 + v2


def test_hand_assembled_scalar_step():
    alpha, beta = 1.5, 0.75
    # polynomial data so the production 4-point Gauss loads are exact
    a0 = lambda x: x * (1 - x) * (1 + 2 * x)
    a1 = lambda x: x * (1 - x)
    f = lambda x: 1.0 + 0.0 * x
    spec = ProblemSpec(alpha, space1d.function(np.vectorize(a0)), space1d.function(np.vectorize(a1)),
                       space1d.function(np.vectorize(f)), "V_FORM", "L1", L=1.0)
    disc = space1d.build_fem(1.0, 2)
    mesh = build_graded_mesh(1.0, 4, 2.0)
    state = sfor.initial_state(spec, mesh, disc)
    state = sfor.step(state, spec, mesh, disc)

    m, k = 1.0 / 3.0, 4.0
    t1 = mesh.points[1]
    A0 = t1**-beta / math.gamma(2 - beta)
    U0 = _phi_load(a0) / m
    F1 = _phi_load(a1) * t1 ** (1 - alpha) / math.gamma(2 - alpha) + t1 ** (1 - alpha) * _phi_load(f)
    # A0 (U1 - U0) = V1 and m A0 V1 + k U1 = F1
    U1 = (F1 + m * A0 * A0 * U0) / (m * A0 * A0 + k)
    V1 = A0 * (U1 - U0)
    assert state.level == 1
    assert state.u[0] == pytest.approx(U1, rel=1e-12)
    assert state.w[0] == pytest.approx(V1, rel=1e-12)


@pytest.mark.parametrize("scheme,formula", COMBOS)
def test_residuals_small_at_every_level(scheme, formula):
    spec = example1(1.5, scheme, formula)
    r = optimal_grading(formula, scheme, 1.5)
    mesh = build_graded_mesh(1.0, 40, r)
    tr = sfor.run(spec, mesh, space1d.build_fem(math.pi, 40))
    worst = max(max(sfor.residuals(tr, n)) for n in range(1, 41))
    assert worst <= 1e-9


def test_step_past_end_and_mismatched_grids():
    spec = example1(1.5)
    mesh = build_graded_mesh(1.0, 2, 2.0)
    disc = space1d.build_fem(math.pi, 8)
    st = sfor.initial_state(spec, mesh, disc)
    st = sfor.step(sfor.step(st, spec, mesh, disc), spec, mesh, disc)
    with pytest.raises(ValidationError):
        sfor.step(st, spec, mesh, disc)
    with pytest.raises(ValidationError):
        sfor.run(spec, build_graded_mesh(2.0, 2, 2.0), disc)
    with pytest.raises(ValidationError):
        sfor.run(spec, mesh, space1d.build_fem(1.0, 8))


def test_solve_failure_reports_level(monkeypatch):
    spec = example1(1.5)
    mesh = build_graded_mesh(1.0, 4, 2.0)
    disc = space1d.build_fem(math.pi, 8)
    real = space1d.solve_spd_tridiagonal
    calls = {"n": 0}

    def flaky(diag, off, rhs):
        calls["n"] += 1
        if calls["n"] == 4:  # mass solve for the sources, projection of a0, then two steps
            raise NotSPDError("forced")
        return real(diag, off, rhs)

    monkeypatch.setattr(space1d, "solve_spd_tridiagonal", flaky)
    with pytest.raises(StepError) as info:
        sfor.run(spec, mesh, disc)
    assert info.value.level == 2


def test_l1_offset_is_grid_point():
    spec = example1(1.5)
    mesh = build_graded_mesh(1.0, 8, 2.0)
    assert spec.theta == 0.0
    assert mesh.offset_time(5, spec.theta) == mesh.points[5]


@pytest.mark.parametrize("scheme,formula", COMBOS)
def test_linearity(scheme, formula):
    mesh = build_graded_mesh(1.0, 20, 2.0)
    disc = space1d.build_fem(math.pi, 20)
    d1 = (space1d.hat(), space1d.zero(), space1d.sine(2))
    d2 = (space1d.sine(1), space1d.indicator_left_half(), space1d.zero())
    comb = tuple(
        space1d.function(lambda x, p=p, q=q: 2.0 * p(x) - 0.5 * q(x), p.breakpoints + q.breakpoints)
        for p, q in zip(d1, d2)
    )
    run = lambda d: sfor.run(ProblemSpec(1.5, *d, scheme, formula), mesh, disc)
    t1, t2, tc = run(d1), run(d2), run(comb)
    np.testing.assert_allclose(tc.U, 2.0 * t1.U - 0.5 * t2.U, atol=1e-11)
    np.testing.assert_allclose(tc.W[1:], 2.0 * t1.W[1:] - 0.5 * t2.W[1:], rtol=1e-9, atol=1e-9)


def test_v_and_z_forms_converge_to_each_other():
    disc = space1d.build_fem(math.pi, 40)
    dist = []
    for N in (20, 40, 80, 160):
        mesh = build_graded_mesh(1.0, N, 2.0)
        tv = sfor.run(ProblemSpec(1.5, space1d.hat(), space1d.sine(1), space1d.sine(1), "V_FORM", "L1"), mesh, disc)
        tz = sfor.run(ProblemSpec(1.5, space1d.hat(), space1d.sine(1), space1d.sine(1), "Z_FORM", "L1"), mesh, disc)
        dist.append(max(space1d.h1_norm(disc, a - b) for a, b in zip(tv.U, tz.U)))
    assert all(a > b for a, b in zip(dist, dist[1:]))


@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
@pytest.mark.parametrize("r", [1.0, 2.7, 5.0])
def test_homogeneous_energy_bounded(alpha, r):
    disc = space1d.build_fem(math.pi, 30)
    z = space1d.zero()
    for formula in Formula:
        spec = ProblemSpec(alpha, space1d.hat(), z, z, "V_FORM", formula)
        tr = sfor.run(spec, build_graded_mesh(1.0, 60, r), disc)
        energy = [math.sqrt(w @ disc.mass(w) + u @ disc.stiff(u)) for u, w in zip(tr.U, tr.W)]
        assert max(energy) <= 4.0 * energy[0]


@pytest.mark.parametrize("scheme,formula", COMBOS)
def test_single_mode_converges(scheme, formula):
    from sfor_wave.special import mittag_leffler

    alpha = 1.5
    spec = ProblemSpec(alpha, space1d.sine(1), space1d.zero(), space1d.zero(), scheme, formula)
    disc = space1d.build_fem(math.pi, 100)
    exact = mittag_leffler(alpha, 1.0, -1.0) * np.sin(disc.interior)
    r = optimal_grading(formula, scheme, alpha)
    errs = []
    for N in (20, 40, 80):
        tr = sfor.run(spec, build_graded_mesh(1.0, N, r), disc)
        errs.append(np.abs(tr.U[-1] - exact).max())
    assert errs[-1] < errs[0]
    assert errs[-1] < 1e-2
