import numpy as np
import pytest

import tdesign

Z = np.diag([1.0, -1.0]).astype(complex)
P0 = np.diag([1.0, 0.0]).astype(complex)


def test_single_qubit_metrics():
    m = tdesign.metrics(tdesign.noise1_model(0.02, 0.98))
    assert m["F"] == pytest.approx(0.98666667, abs=1e-8)
    assert m["u"] == pytest.approx(0.99793024, abs=1e-8)
    assert m["H"] == pytest.approx(0.92470464, abs=1e-8)


def test_two_qubit_rates():
    rates = tdesign.decay_rates(tdesign.noise2_model(0.01, 0.5))
    assert set(rates) == {"0", "I", "II", "III"}
    assert rates["0"] == pytest.approx(1 - 32 / 15 * 0.01 * 0.99 * 0.75, abs=1e-12)


def test_ptm_roundtrip_and_kraus():
    g = 0.2
    k0 = np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex)
    l = tdesign.ptm_from_kraus([k0, k1])
    assert l.q == 1
    again = tdesign.PTM(l.matrix)
    assert np.array_equal(again.matrix, l.matrix)
    with pytest.raises(ValueError):
        tdesign.ptm_from_kraus([2 * k0])


def test_designs():
    ico = tdesign.icosahedral_group()
    assert ico.size == 60
    report = tdesign.verify_design(ico, 4, strong=False)
    assert report["pass"]
    assert report["frame_potential"] == pytest.approx(14, abs=1e-9)
    assert tdesign.verify_design(tdesign.w1(3), 3)["pass"]
    assert tdesign.haar_frame_potential(2, 4) == 14
    u = ico.sample(seed=3, count=2)
    assert len(u) == 2
    assert np.allclose(u[0] @ u[0].conj().T, np.eye(2))


def test_exact_and_monte_carlo_curves_agree():
    noise = tdesign.noise1_model(0.05, 0.5)
    lengths = [1, 2, 4, 8]
    exact = tdesign.v2_exact(noise, Z, P0, lengths)
    mc = tdesign.v_t_monte_carlo(tdesign.icosahedral_group(), 4, noise, 2, Z, P0, lengths, 2000, 0, 7)
    for (m, v, _), (m2, w, se) in zip(exact, mc):
        assert m == m2
        assert abs(v - w) < 4 * se
    again = tdesign.v_t_monte_carlo(tdesign.icosahedral_group(), 4, noise, 2, Z, P0, lengths, 2000, 0, 7)
    assert again == mc


def test_uncertified_design_is_rejected():
    with pytest.raises(ValueError):
        tdesign.v_t_monte_carlo(tdesign.clifford_group(1), 3, tdesign.noise1_model(0.05, 0.5), 2, Z, P0, [1, 2], 10)
