import numpy as np
import pytest
from numpy.testing import assert_allclose

from probebell import (
    HalfInteger,
    coherent_state,
    evolve,
    make_operators,
    mixing_matrix,
    offset_dft_forward,
    offset_dft_inverse,
)


def taylor_propagate(h, v, t, terms=60):
    """Reference propagator: plain Taylor series of exp(-iHt)."""
    acc = v.astype(complex)
    term = v.astype(complex)
    for k in range(1, terms):
        term = (-1j * t / k) * (h @ term)
        acc = acc + term
    return acc


def test_halfinteger_bookkeeping():
    assert HalfInteger.of(3.5).twice == 7
    assert HalfInteger.of(2).twice == 4
    assert HalfInteger(20).value == 10.0
    with pytest.raises(ValueError):
        HalfInteger.of(0.3)


def test_ladder_algebra():
    # [Jx,Jy] = iJz and the Casimir Jx^2+Jy^2+Jz^2 = S(S+1), integer and half-integer
    for spin in (0.5, 1, 1.5, 4):
        ops = make_operators(spin)
        s = HalfInteger.of(spin).value
        dim = ops.jz.shape[0]
        assert dim == int(round(2 * s)) + 1
        comm = ops.jx @ ops.jy - ops.jy @ ops.jx
        assert_allclose(comm, 1j * ops.jz, atol=1e-12)
        casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
        assert_allclose(casimir, s * (s + 1) * np.eye(dim), atol=1e-12)


def test_ladder_matrix_elements():
    ops = make_operators(1)
    r2 = np.sqrt(2.0)
    assert_allclose(ops.jz, np.diag([1.0, 0.0, -1.0]), atol=1e-15)
    assert_allclose(ops.jplus, [[0, r2, 0], [0, 0, r2], [0, 0, 0]], atol=1e-15)
    assert_allclose(ops.jminus, ops.jplus.conj().T, atol=1e-15)


def test_coherent_state_mean_direction():
    # <J> must point along (polar, azimuth) with length S
    rng = np.random.default_rng(3)
    for spin in (0.5, 1, 3.5, 8):
        ops = make_operators(spin)
        s = HalfInteger.of(spin).value
        for _ in range(4):
            th = rng.uniform(0.05, np.pi - 0.05)
            ph = rng.uniform(0.0, 2 * np.pi)
            v = coherent_state(spin, th, ph)
            assert_allclose(np.linalg.norm(v), 1.0, atol=1e-12)
            mean = np.array([v.conj() @ (op @ v) for op in (ops.jx, ops.jy, ops.jz)])
            want = s * np.array(
                [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]
            )
            assert_allclose(mean.real, want, atol=1e-10)
            assert_allclose(mean.imag, 0.0, atol=1e-10)


def test_coherent_state_pole_is_top_of_ladder():
    v = coherent_state(3, 0.0, 0.0)
    assert_allclose(v, np.eye(7)[0], atol=1e-12)


def test_equatorial_state_has_binomial_weights():
    from math import comb

    n = 6
    v = coherent_state(HalfInteger(n), np.pi / 2, 0.0)
    want = np.sqrt([comb(n, k) / 2.0**n for k in range(n + 1)])
    assert_allclose(np.abs(v), want, atol=1e-12)


def test_evolve_matches_taylor_series():
    rng = np.random.default_rng(11)
    h = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = 0.5 * (h + h.conj().T)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    v /= np.linalg.norm(v)
    for t in (0.0, 0.3, 1.7):
        assert_allclose(evolve(h, v, t), taylor_propagate(h, v, t), atol=1e-12)


def test_evolve_is_unitary():
    ops = make_operators(4)
    h = ops.jx @ ops.jx + 0.3 * ops.jz
    v = coherent_state(4, 1.0, 0.2)
    w = evolve(h, v, 2.1)
    assert_allclose(np.linalg.norm(w), 1.0, atol=1e-12)


def test_evolve_rejects_bad_input():
    with pytest.raises(ValueError):
        evolve(np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([1.0, 0.0]), 0.1)
    with pytest.raises(ValueError):
        evolve(np.eye(3), np.array([1.0, 0.0]), 0.1)


def test_mixing_matrix_single_qubit():
    c = 1.0 / np.sqrt(2.0)
    assert_allclose(mixing_matrix(0.5), [[c, -1j * c], [-1j * c, c]], atol=1e-14)


def test_mixing_matrix_is_quarter_turn_about_x():
    for spin in (1, 2.5, 6):
        ops = make_operators(spin)
        w = mixing_matrix(spin)
        dim = w.shape[0]
        assert_allclose(w.conj().T @ w, np.eye(dim), atol=1e-12)
        cols = np.column_stack(
            [taylor_propagate(ops.jx, e, np.pi / 2, terms=80) for e in np.eye(dim) + 0j]
        )
        assert_allclose(w, cols, atol=1e-10)
        # pulse maps the z populations onto an equatorial quadrature
        assert_allclose(w.conj().T @ ops.jz @ w, ops.jy, atol=1e-10)


def test_offset_dft_forward_is_plain_sum():
    rng = np.random.default_rng(5)
    n = 9
    w = rng.random(n + 1)
    w /= w.sum()
    ns = np.arange(n + 1) - n / 2.0  # ascending labels
    for tau in (0, 1, 4.5, 7):
        want = np.sum(w * np.exp(-2j * np.pi * tau * ns / (n + 1)))
        assert_allclose(offset_dft_forward(w, [tau], n)[0], want, atol=1e-13)


def test_offset_dft_roundtrip():
    rng = np.random.default_rng(17)
    for n in (1, 2, 7, 128):
        w = rng.random(n + 1)
        w /= w.sum()
        taus = np.arange(n + 1)
        samples = offset_dft_forward(w, taus, n)
        back = offset_dft_inverse(list(zip(taus, samples)))
        assert_allclose(back.real, w, atol=1e-12)
        assert_allclose(back.imag, 0.0, atol=1e-12)


def test_offset_dft_inverse_validates_ticks():
    n = 3
    w = np.ones(n + 1) / (n + 1)
    taus = np.arange(n + 1)
    samples = offset_dft_forward(w, taus, n)
    pairs = list(zip(taus, samples))
    with pytest.raises(ValueError):
        offset_dft_inverse(pairs[:1])  # a single sample pins nothing
    with pytest.raises(ValueError):
        offset_dft_inverse(pairs[:-1] + [pairs[0]])  # tick duplicated
    with pytest.raises(ValueError):
        offset_dft_inverse(pairs[:-1] + [(n + 1, samples[-1])])  # off the ladder
    with pytest.raises(ValueError):
        offset_dft_inverse(pairs[:-1] + [(2.5, samples[-1])])  # off the tick grid
