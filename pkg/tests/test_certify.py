import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from probebell import (
    ReadoutGrid,
    SymmetricDensityMatrix,
    certification_scan,
    certify,
    depth_bound_from_fisher,
    direct_grid,
    extract_bell_correlator,
    fisher_information,
    moments,
    probe_coherence_symmetric,
    qfi_bound,
    qfi_oracle_pure,
    spin_squeezing,
    twisted_readout_state,
)


@pytest.fixture(scope="module")
def css16():
    # fine grid: the central-difference bias on xi^2 scales as spacing^2/3
    return direct_grid(SymmetricDensityMatrix.css_x(16), 2**17)


@pytest.fixture(scope="module")
def ghz8():
    return direct_grid(SymmetricDensityMatrix.ghz(8), 2**14)


def analytic_twisting_squeezing(n, chi_t):
    """Closed-form slope-normalized squeezing of a twisted equatorial state."""
    a = 1.0 - np.cos(2.0 * chi_t) ** (n - 2)
    b = 4.0 * np.sin(chi_t) * np.cos(chi_t) ** (n - 2)
    var_ratio = 1.0 + (n - 1) / 4.0 * (a - np.hypot(a, b))
    return var_ratio / np.cos(chi_t) ** (2 * (n - 1))


def test_moments_uniform_and_delta():
    thetas = np.arange(8) * np.pi / 4.0
    uniform = ReadoutGrid(2, thetas, np.full((3, 8), 1.0 / 3.0))
    assert moments(uniform, 0, 1) == pytest.approx(0.0, abs=1e-14)
    assert moments(uniform, 5, 2) == pytest.approx(2.0 / 3.0, abs=1e-14)
    delta = np.zeros((3, 8))
    delta[1] = 1.0  # everything on the m=0 rung
    flat = ReadoutGrid(2, thetas, delta)
    assert moments(flat, 0, 1) == 0.0
    assert moments(flat, 0, 2) == 0.0


def test_css_second_moment_is_projection_noise(css16):
    assert moments(css16, 0, 1) == pytest.approx(0.0, abs=1e-12)
    assert moments(css16, 0, 2) == pytest.approx(16.0 / 4.0, abs=1e-9)


def test_css_is_the_squeezing_reference(css16):
    assert spin_squeezing(css16, 0) == pytest.approx(1.0, abs=1e-9)


def test_ghz_is_never_squeezed(ghz8):
    # <M(theta)> vanishes identically for a balanced cat; any residual slope
    # is roundoff, so the ratio is either flagged infinite or astronomically big
    assert math.isinf(spin_squeezing(ghz8, 0))
    assert spin_squeezing(ghz8, 100) > 1e6


def test_twisted_state_beats_the_reference():
    grid = direct_grid(SymmetricDensityMatrix.oat(20, 0.05), 4096)
    xi2, _ = certification_scan(grid)
    best = float(np.min(xi2))
    assert best < 1.0
    assert best == pytest.approx(analytic_twisting_squeezing(20, 0.05), abs=2e-3)


def test_fisher_reference_values(css16, ghz8):
    assert fisher_information(css16, 0) == pytest.approx(16.0, abs=1e-5)
    _, fisher = certification_scan(ghz8)
    assert float(np.max(fisher)) == pytest.approx(64.0, abs=1e-3)


def test_fisher_vanishes_for_the_mixed_state():
    grid = direct_grid(SymmetricDensityMatrix.maximally_mixed(6), 32)
    for j in (0, 7, 19):
        assert fisher_information(grid, j) == pytest.approx(0.0, abs=1e-12)


def test_fisher_discretization_converges_quadratically():
    state = SymmetricDensityMatrix.css_x(8)
    exact = 8.0
    errs = [
        abs(fisher_information(direct_grid(state, n), 0) - exact)
        for n in (256, 512, 1024)
    ]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.15)


def test_qfi_bound_reference_values(ghz8):
    report = certify(ghz8)
    assert report.qfi_bound == pytest.approx(64.0, abs=0.1)
    # flat coherence carries no phase information at all
    mixed = direct_grid(SymmetricDensityMatrix.maximally_mixed(6), 32)
    assert certify(mixed).qfi_bound == pytest.approx(0.0, abs=1e-10)


def test_qfi_bound_never_beats_the_true_qfi():
    rng = np.random.default_rng(2)
    for n in (4, 6):
        for chi_t in rng.uniform(0.02, 1.5, 3):
            vec = twisted_readout_state(n, chi_t)
            grid = direct_grid(SymmetricDensityMatrix.from_state(vec), 1024)
            report = certify(grid, state_oracle=vec)
            assert report.qfi_bound <= report.qfi_oracle + 1e-6


def test_qfi_bound_rejects_mismatched_series(ghz8):
    with pytest.raises(ValueError):
        certify(ghz8, a_series=np.ones(7))


def test_qfi_oracle_trivial_states():
    n = 8
    ghz = np.zeros(n + 1)
    ghz[0] = ghz[-1] = 1.0 / np.sqrt(2.0)
    assert qfi_oracle_pure(ghz) == pytest.approx(n**2, abs=1e-12)
    css = SymmetricDensityMatrix.css_x(n).rho
    vec = np.linalg.eigh(css)[1][:, -1]
    assert qfi_oracle_pure(vec) == pytest.approx(n, abs=1e-10)
    rung = np.zeros(n + 1)
    rung[3] = 1.0
    assert qfi_oracle_pure(rung) == 0.0


def test_extraction_reference_values():
    e, q = extract_bell_correlator(direct_grid(SymmetricDensityMatrix.ghz(64), 260))
    assert e == pytest.approx(0.25, abs=1e-8)
    assert q == pytest.approx(62.0, abs=1e-6)
    e8, q8 = extract_bell_correlator(direct_grid(SymmetricDensityMatrix.oat(8, np.pi / 2), 64))
    assert e8 == pytest.approx(0.25, abs=1e-8)
    assert q8 == pytest.approx(6.0, abs=1e-6)
    e10, _ = extract_bell_correlator(direct_grid(SymmetricDensityMatrix.css_x(10), 64))
    assert e10 == pytest.approx(4.0**-10, rel=0.1)


def test_extraction_equals_the_corner_coherence():
    rng = np.random.default_rng(41)
    n = 7
    states = [SymmetricDensityMatrix.oat(n, ct) for ct in (0.1, 0.8)]
    a = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    b = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    states.append(
        SymmetricDensityMatrix(
            n, 0.6 * np.outer(a, a.conj()) + 0.4 * np.outer(b, b.conj())
        )
    )
    for st in states:
        e, _ = extract_bell_correlator(direct_grid(st, 4 * n + 4))
        assert e == pytest.approx(abs(st.rho[0, -1]) ** 2, abs=1e-8)


def depth_oracle(fisher, n):
    # smallest block size whose best partition already explains the data
    k = 1
    while k < n:
        s, r = divmod(n, k)
        if fisher <= (s * k * k + r * r) * (1.0 + 1e-9):
            return k
        k += 1
    return n


def test_depth_bound_examples():
    assert depth_bound_from_fisher(8.0, 8) == 1
    assert depth_bound_from_fisher(64.0, 8) == 8
    assert depth_bound_from_fisher(2.5 * 12, 12) == depth_oracle(30.0, 12) == 3
    with pytest.raises(ValueError):
        depth_bound_from_fisher(-1.0, 8)


def test_depth_bound_matches_exhaustive_partitions():
    for n in (5, 8, 12):
        prev = 1
        for fisher in np.linspace(0.0, n * n, 97):
            got = depth_bound_from_fisher(float(fisher), n)
            assert got == depth_oracle(float(fisher), n)
            assert got >= prev  # monotone in the information
            prev = got


def test_certify_css_reference(css16):
    report = certify(css16)
    assert report.xi2 == pytest.approx(1.0, abs=1e-9)
    assert report.fisher == pytest.approx(16.0, abs=1e-5)
    assert report.depth_bound == 1
    assert report.hierarchy_ok
    assert report.qfi_oracle is None
    assert report.cramer_rao == pytest.approx(1.0 / report.qfi_bound)


def test_certify_ghz_reference(ghz8):
    vec = np.zeros(9)
    vec[0] = vec[-1] = 1.0 / np.sqrt(2.0)
    report = certify(ghz8, state_oracle=vec)
    assert math.isinf(report.xi2)
    assert report.fisher == pytest.approx(64.0, abs=1e-3)
    assert report.qfi_bound == pytest.approx(64.0, abs=0.1)
    assert report.qfi_oracle == pytest.approx(64.0, abs=1e-12)
    assert report.bell_q == pytest.approx(6.0, abs=1e-6)
    assert report.depth_bound == 8
    assert report.hierarchy_ok


def test_certify_report_serialization(ghz8):
    report = certify(ghz8)
    d = report.to_dict()
    assert list(d.keys()) == [
        "xi2",
        "fisher",
        "qfi_bound",
        "qfi_oracle",
        "bell_E",
        "bell_Q",
        "depth_bound",
        "hierarchy_ok",
        "cramer_rao",
        "theta_star",
        "bell_note",
    ]
    assert d["bell_Q"] == pytest.approx(6.0, abs=1e-6)


def test_certify_uses_external_coherence_series(ghz8):
    # synthesizing the same half-way tick externally must not change anything
    tau_star = (ghz8.n_qubits + 1) / 2.0
    series = np.array(
        [probe_coherence_symmetric(ghz8.p[:, j], tau_star) for j in range(ghz8.thetas.size)]
    )
    r1 = certify(ghz8)
    r2 = certify(ghz8, a_series=series)
    assert r2.qfi_bound == pytest.approx(r1.qfi_bound, abs=1e-9)
    assert r2.fisher == pytest.approx(r1.fisher, abs=1e-9)
    # the flat-information tie-break may pick either parity quadrature
    for r in (r1, r2):
        assert abs(math.sin(8 * r.theta_star)) > 1.0 - 1e-5


def test_hierarchy_holds_on_random_twisted_states():
    rng = np.random.default_rng(13)
    for n in (4, 8, 16):
        for chi_t in rng.uniform(0.01, np.pi / 2, 4):
            vec = twisted_readout_state(n, chi_t)
            grid = direct_grid(SymmetricDensityMatrix.from_state(vec), 4096)
            report = certify(grid, state_oracle=vec)
            assert report.hierarchy_ok, (n, chi_t)
            lhs = 0.0 if math.isinf(report.xi2) else n / report.xi2
            assert lhs <= report.fisher + 1e-6
            assert report.fisher <= report.qfi_oracle + 1e-6
            assert report.qfi_bound <= report.qfi_oracle + 1e-6
