import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from sfor_wave import fracops as F
from sfor_wave.errors import ValidationError
from sfor_wave.mesh import GradedMesh, build_graded_mesh, uniform_mesh
from sfor_wave.special import omega

BETAS = (0.55, 0.625, 0.75, 0.875)


def custom_mesh(points):
    points = np.asarray(points, dtype=float)
    return GradedMesh(T=points[-1], N=points.size - 1, r=1.0, points=points, steps=np.diff(points))


# ------------------------------------------------------------ L1


def test_l1_uniform_values():
    m = uniform_mesh(2.0, 2)  # tau = 1
    assert F.l1_kernel_row(m, 1, 0.5).coeffs[0] == pytest.approx(1.1283791670955126, rel=1e-14)
    row = F.l1_kernel_row(m, 2, 0.5)
    assert row.coeffs[0] == pytest.approx(0.46738995451021825, rel=1e-13)  # A_1 = (sqrt 2 - 1) / Gamma(1.5)
    assert row.leading == pytest.approx(1.1283791670955126, rel=1e-14)
    np.testing.assert_allclose(row.by_lag(), row.coeffs[::-1])


@pytest.mark.parametrize("beta", BETAS)
def test_l1_first_level(beta):
    m = build_graded_mesh(1.0, 10, 3.0)
    tau = m.steps[0]
    assert F.l1_kernel_row(m, 1, beta).coeffs[0] == pytest.approx(tau**-beta / math.gamma(2 - beta), rel=1e-13)


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("r", [1.0, 3.0, 7.0])
def test_l1_exact_on_linear(beta, r):
    m = build_graded_mesh(1.0, 40, r)
    for n in (1, 7, 40):
        row = F.l1_kernel_row(m, n, beta)
        assert row.apply(m.points) == pytest.approx(omega(2 - beta, m.points[n]), rel=1e-12)


def test_l1_row_against_quadrature():
    m = build_graded_mesh(1.0, 12, 4.0)
    beta, n = 0.75, 9
    row = F.l1_kernel_row(m, n, beta)
    t = m.points
    for k in range(1, n + 1):
        if k < n:
            q, _ = integrate.quad(lambda s: omega(1 - beta, t[n] - s), t[k - 1], t[k])
        else:  # endpoint singularity (t_n - s)^-beta
            q, _ = integrate.quad(lambda s: 1.0, t[k - 1], t[k], weight="alg", wvar=(0.0, -beta))
            q /= math.gamma(1 - beta)
        assert row.coeffs[k - 1] == pytest.approx(q / m.steps[k - 1], rel=1e-9)


def test_level_validation():
    m = uniform_mesh(1.0, 4)
    with pytest.raises(ValidationError):
        F.l1_kernel_row(m, 0, 0.5)
    with pytest.raises(ValidationError):
        F.l1_kernel_row(m, 5, 0.5)
    with pytest.raises(ValidationError):
        F.l1_kernel_row(m, 1, 1.0)
    with pytest.raises(ValidationError):
        F.kernel_rows(m, 0.5, "L2")


# ------------------------------------------------------------ Alikhanov


def test_alikhanov_first_level():
    m = build_graded_mesh(1.0, 8, 2.0)
    beta = 0.625
    th = beta / 2
    tau = m.steps[0]
    row = F.alikhanov_kernel_row(m, 1, beta)
    assert row.theta == th
    assert row.coeffs[0] == pytest.approx(((1 - th) * tau) ** (1 - beta) / (tau * math.gamma(2 - beta)), rel=1e-14)


def test_alikhanov_uniform_level_two_against_quadrature():
    beta, th = 0.5, 0.25
    m = uniform_mesh(2.0, 2)
    tn = 2.0 - th  # t_{2-theta}
    w = lambda s: omega(1 - beta, tn - s)
    a1, _ = integrate.quad(w, 0.0, 1.0, epsabs=0.0, epsrel=1e-13)
    mom, _ = integrate.quad(lambda s: (s - 0.5) * w(s), 0.0, 1.0, epsabs=0.0, epsrel=1e-13)
    b1 = 2.0 / (1.0 * 2.0) * mom
    a0 = ((1 - th) * 1.0) ** (1 - beta) / math.gamma(2 - beta)
    row = F.alikhanov_kernel_row(m, 2, beta)
    assert row.coeffs[0] == pytest.approx(a1 - b1, abs=1e-12)
    assert row.coeffs[1] == pytest.approx(a0 + 1.0 * b1, abs=1e-12)


def _alikhanov_exact_quadratic(m, n, beta, c):
    # v(s) = s^2 + c s: quadratic interpolation is exact on cells 1..n-1,
    # the last cell uses the linear interpolant up to t_{n-theta}.
    th = beta / 2
    t = m.points
    tn = th * t[n - 1] + (1 - th) * t[n]
    dv = lambda s: 2 * s + c
    total = 0.0
    for k in range(1, n):
        v, _ = integrate.quad(lambda s: omega(1 - beta, tn - s) * dv(s), t[k - 1], t[k], epsabs=1e-16, epsrel=1e-13)
        total += v
    slope = ((t[n] ** 2 + c * t[n]) - (t[n - 1] ** 2 + c * t[n - 1])) / m.steps[n - 1]
    total += slope * omega(2 - beta, tn - t[n - 1])
    return total


@pytest.mark.parametrize("beta", BETAS)
@pytest.mark.parametrize("r", [1.0, 2.5])
def test_alikhanov_against_quadratic_oracle(beta, r):
    m = build_graded_mesh(1.0, 10, r)
    v = m.points**2 + 0.3 * m.points
    for n in (1, 2, 5, 10):
        row = F.alikhanov_kernel_row(m, n, beta)
        assert row.apply(v) == pytest.approx(_alikhanov_exact_quadratic(m, n, beta, 0.3), rel=1e-10)


@pytest.mark.parametrize("beta", BETAS)
def test_alikhanov_exact_on_linear(beta):
    m = build_graded_mesh(1.0, 32, 4.0)
    for n in (1, 2, 16, 32):
        row = F.alikhanov_kernel_row(m, n, beta)
        tn = m.offset_time(n, beta / 2)
        assert row.apply(m.points) == pytest.approx(omega(2 - beta, tn), rel=1e-11)


def test_constant_function_has_zero_derivative():
    m = build_graded_mesh(1.0, 16, 3.0)
    for beta in (1e-6, 0.5):
        for n in (1, 16):
            assert F.alikhanov_kernel_row(m, n, beta).apply(np.full(17, 3.7)) == 0.0
            assert F.l1_kernel_row(m, n, beta).apply(np.full(17, 3.7)) == 0.0


def test_alikhanov_ratio_warning():
    m = custom_mesh([0.0, 0.5, 0.7, 0.8])  # rho = 2.5, 2
    with pytest.warns(RuntimeWarning, match="step ratio"):
        F.alikhanov_kernel_row(m, 2, 0.5)
    graded = build_graded_mesh(1.0, 16, 3.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        F.kernel_rows(graded, 0.5, "ALIKHANOV")


# ------------------------------------------------------------ complementary kernels


def test_complementary_base_case():
    m = build_graded_mesh(1.0, 1, 1.0)
    rows = F.kernel_rows(m, 0.5)
    assert F.complementary_kernels(rows).row(1)[0] == pytest.approx(1.0 / rows[0].leading)


def test_complementary_identity_uniform_n3():
    m = uniform_mesh(3.0, 3)
    rows = F.kernel_rows(m, 0.5, "L1")
    comp = F.complementary_kernels(rows)
    for k in (1, 2, 3):
        s = sum(comp.row(3)[j - 1] * rows[j - 1].coeffs[k - 1] for j in range(k, 4))
        assert s == pytest.approx(1.0, abs=1e-13)


def test_complementary_rejects_bad_rows():
    m = uniform_mesh(1.0, 3)
    rows = F.kernel_rows(m, 0.5)
    with pytest.raises(ValidationError):
        F.complementary_kernels(rows[1:])
    bad = [F.KernelRow(1, 0.5, 0.0, np.array([-1.0]))]
    with pytest.raises(ValidationError):
        F.complementary_kernels(bad)


@pytest.mark.parametrize("formula,pi_a", [("L1", F.PI_L1), ("ALIKHANOV", F.PI_ALIKHANOV)])
@pytest.mark.parametrize("r", [1.0, 3.0, 6.0])
def test_complementary_properties(formula, pi_a, r):
    beta = 0.625
    m = build_graded_mesh(1.0, 64, r)
    rows = F.kernel_rows(m, beta, formula)
    comp = F.complementary_kernels(rows)
    assert F.complementary_identity_residual(rows, comp) <= 1e-12
    assert comp.P.min() >= 0.0
    assert F.complementary_bound_ratio(m, rows, comp, beta, pi_a) <= 1 + 1e-12
    sums = [comp.row(n) @ omega(1 - beta, m.points[1 : n + 1]) for n in range(1, 65)]
    assert max(sums) <= pi_a


# ------------------------------------------------------------ assumptions A1 / A2


@settings(max_examples=80, deadline=None)
@given(N=st.integers(1, 64), r=st.floats(1.0, 6.0), beta=st.sampled_from(BETAS))
def test_a1_random_meshes(N, r, beta):
    m = build_graded_mesh(1.0, N, r)
    for formula in ("L1", "ALIKHANOV"):
        pos, mono, _ = F.check_a1(F.kernel_rows(m, beta, formula))
        assert pos and mono


@pytest.mark.parametrize("formula", ["L1", "ALIKHANOV"])
def test_a2_standard_and_printed(formula):
    m = build_graded_mesh(1.0, 32, 3.0)
    rep = F.check_assumptions(m, 0.75, formula)
    assert rep.a1
    assert rep.a2_standard
    # the printed integrand carries 1/s, divergent on the first cell
    assert not rep.a2_printed and rep.a2_printed_min_margin == -math.inf
