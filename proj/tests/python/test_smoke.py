"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import birot


def test_measure_weight():
    assert birot.measure_weight(0.0, 1.0, 0.1, 0.1) == 0.0
    assert birot.measure_weight(1.0, 1.0, 1.0, 1.0) == pytest.approx(4 * math.pi**2)


def test_f1_closed_form():
    for tau in (0.1, 1.0, 10.0):
        assert birot.f_a(tau, 1.0) == pytest.approx(
            math.pi / math.sqrt(tau * (tau + 4.0)), rel=1e-10
        )


def test_kernel_swap_and_axis():
    q = birot.QuadratureSpec(n_theta=32, n_phi=32)
    assert birot.eval_Fr(0.0, 1.0, 0.8, 1.2, q) == 0.0
    fs = birot.eval_Fs(1.1, 0.7, 0.9, 1.3, q)
    fr = birot.eval_Fr(0.7, 1.1, 1.3, 0.9, q)
    assert fs == fr


def test_fields_and_lorentz():
    g = birot.GridSpec(2.0, 2.0, 24, 24)
    rr = np.array([[g.r(i) for i in range(24)] for _ in range(24)])
    ss = np.array([[g.s(j) for _ in range(24)] for j in range(24)])
    zeta = np.exp(-8 * ((rr - 0.9) ** 2 + (ss - 0.9) ** 2))
    w = birot.w_from_zeta(g, zeta)
    assert w == pytest.approx(rr * ss * zeta)
    back = birot.zeta_from_w(g, w)
    assert back == pytest.approx(zeta)

    p = 2.5
    assert birot.lorentz_norm(g, w, p, p) == pytest.approx(
        birot.lp_norm(g, w, p), rel=1e-10
    )


def test_routes_agree_coarsely():
    g = birot.GridSpec(3.0, 3.0, 48, 48)
    rr = np.array([[g.r(i) for i in range(48)] for _ in range(48)])
    ss = np.array([[g.s(j) for _ in range(48)] for j in range(48)])
    w = rr * ss * np.exp(-8 * ((rr - 1.0) ** 2 + (ss - 1.0) ** 2))

    q = birot.QuadratureSpec(n_theta=16, n_phi=16)
    targets = np.array([[2.2, 0.4]])
    uv = birot.biot_savart(g, w, targets, q)
    oracle = birot.brute_force_velocity_4d(g, w, [2.2, 0.0, 0.4, 0.0], 32)
    mag = math.hypot(oracle["u_r"], oracle["u_s"])
    err = math.hypot(uv[0, 0] - oracle["u_r"], uv[0, 1] - oracle["u_s"])
    assert err <= 0.05 * mag


def test_stream_solver_axis_zeros():
    g = birot.GridSpec(2.0, 2.0, 32, 32, birot.Stagger.node_centered)
    rr = np.array([[g.r(i) for i in range(33)] for _ in range(33)])
    ss = np.array([[g.s(j) for _ in range(33)] for j in range(33)])
    w = rr * ss * np.exp(-8 * ((rr - 0.8) ** 2 + (ss - 0.8) ** 2))
    psi = birot.solve_stream(g, w)
    assert np.all(psi[0, :] == 0) and np.all(psi[:, 0] == 0)
    ur, us = birot.velocity_from_stream(g, psi)
    assert np.all(ur[:, 0] == 0)  # u_r vanishes on r = 0 (column i = 0)
    assert np.all(us[0, :] == 0)  # u_s vanishes on s = 0 (row j = 0)
    assert birot.divergence_residual(g, ur, us) < 0.05


def test_tensor_frobenius():
    t = birot.assemble_tensor(2.0, 0.3, 1.1)
    assert np.allclose(t, -t.T)
    assert np.linalg.norm(t) == pytest.approx(math.sqrt(2) * 2.0, rel=1e-14)
