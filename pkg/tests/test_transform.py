import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles as O
from gblab.errors import DomainError
from gblab.grid import Grid
from gblab.profiles import SolitonParams, eval_Qc, eval_Qc_prime, lambda_Qc, lambda_cQc
from gblab.transform import (PerturbationFrame, helmholtz, helmholtz_inv, lmatrix_apply, localize,
                             make_test_bank, to_z, verify_smoothing_bounds, z_w_ratios)
from gblab.weights import WeightScales, make_weights

G = Grid(40, 1024)


@given(st.floats(1e-4, 5.0), st.integers(1, 40))
def test_helmholtz_modes(eps, m):
    k = np.pi * m / G.L
    np.testing.assert_allclose(helmholtz_inv(eps, np.cos(k * G.x), G), np.cos(k * G.x) / (1 + eps * k * k),
                               atol=1e-13)
    np.testing.assert_allclose(helmholtz_inv(eps, np.full(G.n, 3.0), G), 3.0, atol=1e-13)


@given(st.floats(1e-3, 2.0), st.integers(0, 1000))
def test_round_trip_self_adjoint_positive(eps, seed):
    rng = np.random.default_rng(seed)
    f, g = rng.standard_normal((2, G.n))
    np.testing.assert_allclose(helmholtz(eps, helmholtz_inv(eps, f, G), G), f, atol=1e-12 * (1 + eps * G.k_max ** 2))
    Sf, Sg = helmholtz_inv(eps, f, G), helmholtz_inv(eps, g, G)
    assert abs(G.inner(Sf, g) - G.inner(f, Sg)) <= 1e-12 * G.norm(f) * G.norm(g)
    assert G.inner(Sf, f) >= 0


def test_to_z_round_trip_and_zero():
    s = SolitonParams(3, 0.7)
    v1, v2 = O.localized_frame(G, 11)
    fr = to_z(PerturbationFrame(v1, v2), s, 0.2, G)
    a, b = lmatrix_apply(s, G, v1, v2)
    # (1 - eps d^2) z equals the matrix operator applied to v, componentwise
    assert G.norm(helmholtz(0.2, fr.z1, G) - a) <= 1e-10
    assert G.norm(helmholtz(0.2, fr.z2, G) - b) <= 1e-10
    z0 = to_z(PerturbationFrame(np.zeros(G.n), np.zeros(G.n)), s, 0.2, G)
    assert not np.any(z0.z1) and not np.any(z0.z2)


def test_orthogonality_transport():
    s = SolitonParams(3, 0.7)
    c = s.c
    y = G.x
    qc, qcp = eval_Qc(s, y), eval_Qc_prime(s, y)
    T = (qcp, -c * qcp)
    JQ = (-c * qc, qc)
    v1, v2 = O.localized_frame(G, 5)
    # project v onto the orthogonal complement of T and JQ
    M = np.array([[G.inner(T[0], T[0]) + G.inner(T[1], T[1]), G.inner(T[0], JQ[0]) + G.inner(T[1], JQ[1])],
                  [G.inner(JQ[0], T[0]) + G.inner(JQ[1], T[1]), G.inner(JQ[0], JQ[0]) + G.inner(JQ[1], JQ[1])]])
    r = np.array([G.inner(T[0], v1) + G.inner(T[1], v2), G.inner(JQ[0], v1) + G.inner(JQ[1], v2)])
    a = np.linalg.solve(M, r)
    v1 = v1 - a[0] * T[0] - a[1] * JQ[0]
    v2 = v2 - a[0] * T[1] - a[1] * JQ[1]
    eps = 0.15
    fr = to_z(PerturbationFrame(v1, v2), s, eps, G)
    scale = G.norm(fr.z1) + G.norm(fr.z2)
    # kernel pair: <(1 - eps d^2) T, z> = <T, L v> = <L T, v> = 0
    hT = (helmholtz(eps, T[0], G), helmholtz(eps, T[1], G))
    assert abs(G.inner(hT[0], fr.z1) + G.inner(hT[1], fr.z2)) <= 1e-10 * scale
    # generalized kernel: L D = -J Q, so <(1 - eps d^2) D, z> = -<J Q, v> = 0
    D = (lambda_Qc(s, y), -lambda_cQc(s, y))
    hD = (helmholtz(eps, D[0], G), helmholtz(eps, D[1], G))
    assert abs(G.inner(hD[0], fr.z1) + G.inner(hD[1], fr.z2)) <= 1e-9 * scale


def test_localize_products():
    W = make_weights(WeightScales.from_delta(0.01))
    s = SolitonParams(3, 0.7)
    v1, v2 = O.localized_frame(G, 2)
    fr = localize(to_z(PerturbationFrame(v1, v2), s, 0.3, G), W, G)
    np.testing.assert_allclose(fr.w1, W.zetaA(G.x) * v1, rtol=1e-15)
    np.testing.assert_allclose(fr.w2, W.zetaA(G.x) * v2, rtol=1e-15)
    np.testing.assert_allclose(fr.eta1, W.chiA(G.x) * W.zetaB(G.x) * fr.z1, rtol=1e-15)
    np.testing.assert_allclose(fr.eta2, W.chiA(G.x) * W.zetaB(G.x) * fr.z2, rtol=1e-15)


def test_bank_composition():
    bank = make_test_bank(G, 50, seed=0)
    assert len(bank) == 50 and all(np.all(np.isfinite(b)) and G.norm(b) > 0 for b in bank)


@pytest.mark.parametrize("eps", [0.5, 0.1, 0.02, 1e-3])
def test_smoothing_bounds(eps):
    rep = verify_smoothing_bounds(eps, make_test_bank(G, 50), G, K=0.5)
    assert rep.all_passed, rep.ratios
    assert rep.ratios["l2"] <= 1 and rep.ratios["deriv"] <= 1 and rep.ratios["h2"] <= 2
    assert rep.self_adjoint_error <= 1e-12 and rep.min_positivity > 0


def test_smoothing_bounds_refuses_wide_cosh():
    with pytest.raises(DomainError):
        verify_smoothing_bounds(0.1, make_test_bank(G, 50), G, K=1.0)


def test_z_w_ratios_stable():
    s = SolitonParams(3, 0.75)
    out = []
    for n in (1024, 2048):
        g = Grid(40, n)
        v1, v2 = O.localized_frame(g, 9)
        fr = to_z(PerturbationFrame(v1, v2), s, 0.2, g)
        out.append(z_w_ratios(fr, s, 2.0, g))
    for k in out[0]:
        assert np.isfinite(out[0][k]) and out[0][k] == pytest.approx(out[1][k], rel=1e-3)
