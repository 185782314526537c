"""Single-probe readout of a symmetric register.

The register is prepared, rotated by exp(-i theta J_z) then exp(-i (pi/2) J_x)
(local operations only), and finally interrogated by one probe qubit whose
coherence samples the z populations.  For a uniform coupling J the probe
phase at interrogation time t_k = pi k / (2 J (N+1)) reduces to an offset
discrete Fourier transform of the populations at integer "tick" tau = k, so
N+1 probe measurements recover all N+1 populations of the rotated frame.

Row order everywhere: descending z label n = +N/2 .. -N/2, matching the
collective-spin basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spincore import (
    HalfInteger,
    coherent_state,
    make_operators,
    mixing_matrix,
    offset_dft_inverse,
)

__all__ = [
    "ReconstructionError",
    "SymmetricDensityMatrix",
    "ProbeCoupling",
    "ProbeSample",
    "ReadoutGrid",
    "apply_local_ops",
    "frequency_table",
    "probability_direct",
    "direct_grid",
    "probe_coherence_symmetric",
    "probe_coherence_general",
    "reconstruct_probabilities",
    "simulate_probe_run",
    "population_spectrum",
    "twisted_readout_state",
]


class ReconstructionError(RuntimeError):
    """Probe samples are inconsistent with any physical population vector."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (round-trip residual {residual:.3e})")
        self.residual = residual


_MIX_CACHE: dict[int, np.ndarray] = {}


def _mixing(n_qubits: int) -> np.ndarray:
    if n_qubits not in _MIX_CACHE:
        _MIX_CACHE[n_qubits] = mixing_matrix(HalfInteger(n_qubits))
    return _MIX_CACHE[n_qubits]


def _labels(n_qubits: int) -> np.ndarray:
    return np.arange(n_qubits, -n_qubits - 1, -2, dtype=np.int64) / 2.0


def _equatorial_rotation(n_qubits: int, angle: float, axis: str) -> np.ndarray:
    ops = make_operators(HalfInteger(n_qubits))
    if axis == "x":
        j_op = 0.5 * (ops.jplus + ops.jminus)
    elif axis == "y":
        j_op = -0.5j * (ops.jplus - ops.jminus)
    else:
        raise ValueError("axis must be x or y")
    w, vecs = np.linalg.eigh(j_op)
    return (vecs * np.exp(-1j * angle * w)) @ vecs.conj().T


def twisted_readout_state(n_qubits: int, chi_t: float) -> np.ndarray:
    """One-axis-twisted +x coherent state, aligned for the z readout.

    The twisted ellipse is rotated about the mean-spin (x) axis so its
    narrow quadrature lands in the plane that the mixing pulse maps onto
    the z readout; the rotation angle comes from the closed-form tilt of
    the twisted-state covariance.  At the cat point the ellipse degenerates
    and the state is instead a superposition of the two opposite equatorial
    coherent states; a quarter turn about y parks its branches on the z
    poles, pinning the extremal coherence to the corner elements.
    """
    v = coherent_state(HalfInteger(n_qubits), np.pi / 2.0, 0.0)
    m = _labels(n_qubits)
    v = np.exp(-1j * chi_t * m**2) * v
    if n_qubits >= 2:
        tilt_a = 1.0 - np.cos(2.0 * chi_t) ** (n_qubits - 2)
        tilt_b = 4.0 * np.sin(chi_t) * np.cos(chi_t) ** (n_qubits - 2)
        if np.hypot(tilt_a, tilt_b) > 1e-9:
            alpha = np.pi / 2.0 - 0.5 * np.arctan2(tilt_b, tilt_a)
            v = _equatorial_rotation(n_qubits, alpha, "x") @ v
        elif abs(np.cos(chi_t)) < 0.5:
            v = _equatorial_rotation(n_qubits, -np.pi / 2.0, "y") @ v
    return v


@dataclass(frozen=True)
class SymmetricDensityMatrix:
    """Density matrix on the symmetric (collective spin N/2) sector."""

    n_qubits: int
    rho: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        dim = self.n_qubits + 1
        r = np.asarray(self.rho, dtype=complex)
        if r.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} matrix")
        if np.max(np.abs(r - r.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(r).real - 1.0) > 1e-12:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(r)[0] < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "rho", r)

    @classmethod
    def from_state(cls, vec) -> "SymmetricDensityMatrix":
        v = np.asarray(vec, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(v.shape[0] - 1, np.outer(v, v.conj()))

    @classmethod
    def css_x(cls, n_qubits: int) -> "SymmetricDensityMatrix":
        return cls.from_state(coherent_state(HalfInteger(n_qubits), np.pi / 2.0, 0.0))

    @classmethod
    def ghz(cls, n_qubits: int) -> "SymmetricDensityMatrix":
        """(|all up> + |all down>)/sqrt(2) along z."""
        v = np.zeros(n_qubits + 1, dtype=complex)
        v[0] = v[-1] = 1.0 / np.sqrt(2.0)
        return cls.from_state(v)

    @classmethod
    def oat(cls, n_qubits: int, chi_t: float) -> "SymmetricDensityMatrix":
        """Readout-aligned one-axis-twisted +x coherent state."""
        return cls.from_state(twisted_readout_state(n_qubits, chi_t))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "SymmetricDensityMatrix":
        dim = n_qubits + 1
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim)


def apply_local_ops(state: SymmetricDensityMatrix, theta: float) -> SymmetricDensityMatrix:
    """Rotate the analysis frame: W e^{-i theta J_z} rho e^{+i theta J_z} W^dag."""
    m = _labels(state.n_qubits)
    v = _mixing(state.n_qubits) * np.exp(-1j * theta * m)[None, :]
    return SymmetricDensityMatrix(state.n_qubits, v @ state.rho @ v.conj().T)


def frequency_table(state: SymmetricDensityMatrix) -> np.ndarray:
    """Harmonic content of the rotated populations.

    Returns G with shape (N+1, 2N+1) such that
    p_n(theta) = sum_q G[n, q + N] exp(-i q theta); the column q = -N
    carries the extremal coherence rho_{-S,+S} and nothing else.
    """
    n = state.n_qubits
    w = _mixing(n)
    rho = state.rho
    g = np.zeros((n + 1, 2 * n + 1), dtype=complex)
    for q in range(-n, n + 1):
        i = np.arange(max(0, -q), n + 1 - max(0, q))
        j = i + q
        g[:, q + n] = (w[:, i] * w[:, j].conj()) @ rho[i, j]
    return g


def probability_direct(state: SymmetricDensityMatrix, theta: float) -> np.ndarray:
    """Populations of the rotated frame, descending n."""
    m = _labels(state.n_qubits)
    v = _mixing(state.n_qubits) * np.exp(-1j * theta * m)[None, :]
    return np.einsum("nm,mk,nk->n", v, state.rho, v.conj()).real


@dataclass(frozen=True)
class ReadoutGrid:
    """Populations p[n, j] tabulated on a uniform theta grid."""

    n_qubits: int
    thetas: np.ndarray
    p: np.ndarray
    provenance: str = "direct"

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        pp = np.asarray(self.p, dtype=float)
        if pp.shape != (self.n_qubits + 1, th.shape[0]):
            raise ValueError("grid shape does not match qubit count / thetas")
        if th.shape[0] < 2 * self.n_qubits + 2:
            raise ValueError("theta grid undersamples the harmonics")
        if pp.min() < -1e-10:
            raise ValueError("grid contains a significantly negative probability")
        if np.max(np.abs(pp.sum(axis=0) - 1.0)) > 1e-10:
            raise ValueError("grid columns do not sum to one")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "p", pp)

    @property
    def labels(self) -> np.ndarray:
        return _labels(self.n_qubits)

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.thetas.shape[0]


def _uniform_thetas(n_theta: int) -> np.ndarray:
    return np.arange(n_theta) * (2.0 * np.pi / n_theta)


def direct_grid(state: SymmetricDensityMatrix, n_theta: int) -> ReadoutGrid:
    """Exact populations on n_theta uniform angles covering [0, 2 pi)."""
    n = state.n_qubits
    if n_theta < 2 * n + 2:
        raise ValueError(f"need at least {2 * n + 2} angles for N={n}")
    g = frequency_table(state)
    q = np.arange(-n, n + 1, dtype=float)
    thetas = _uniform_thetas(n_theta)
    p = np.empty((n + 1, n_theta))
    for lo in range(0, n_theta, 16384):  # bound the synthesis workspace
        hi = min(lo + 16384, n_theta)
        p[:, lo:hi] = (g @ np.exp(-1j * np.outer(q, thetas[lo:hi]))).real
    return ReadoutGrid(n, thetas, np.clip(p, 0.0, None), provenance="direct")


def probe_coherence_symmetric(weights, tau: float, n_qubits: int | None = None) -> complex:
    """a(tau) = sum_n p_n exp(-i 2 pi tau n/(N+1)), weights in descending n.

    Normalized so a(0) = 1 for any probability vector.
    """
    p = np.asarray(weights, dtype=float)
    if p.ndim != 1 or p.shape[0] < 2:
        raise ValueError("weights must be a population vector")
    n = p.shape[0] - 1
    if n_qubits is not None and n_qubits != n:
        raise ValueError("weight count does not match qubit count")
    if p.min() < -1e-10 or abs(p.sum() - 1.0) > 1e-10:
        raise ValueError("weights are not a probability vector")
    labels = _labels(n)
    return complex(np.sum(p * np.exp(-2j * np.pi * tau * labels / (n + 1))))


def probe_coherence_general(populations, coupling: "ProbeCoupling", t: float) -> complex:
    """a(t) = sum_s p(s) exp(-2 i t sum_i J_i s_i) over all spin strings s.

    populations: 2^N diagonal of the full register state, qubit 0 in the
    most significant bit, bit value 1 meaning spin down (s_i = -1).
    """
    j = coupling.couplings
    n = j.shape[0]
    if n > 16:
        raise ValueError("string enumeration limited to N <= 16")
    p = np.asarray(populations, dtype=float)
    if p.shape != (2**n,):
        raise ValueError("populations must enumerate all 2^N strings")
    idx = np.arange(2**n, dtype=np.int64)
    total = np.zeros(2**n)
    for i in range(n):
        bit = (idx >> (n - 1 - i)) & 1
        total += j[i] * (1.0 - 2.0 * bit)
    return complex(np.sum(p * np.exp(-2j * t * total)))


@dataclass(frozen=True)
class ProbeCoupling:
    """Ising couplings J_i between each register qubit and the probe."""

    couplings: np.ndarray

    def __post_init__(self):
        j = np.atleast_1d(np.asarray(self.couplings, dtype=float))
        if j.ndim != 1 or j.shape[0] < 1:
            raise ValueError("need one coupling per qubit")
        object.__setattr__(self, "couplings", j)

    @classmethod
    def uniform(cls, j: float, n_qubits: int) -> "ProbeCoupling":
        return cls(np.full(n_qubits, float(j)))

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.couplings == self.couplings[0]))

    def tick_time(self, tau: float) -> float:
        """Interrogation time realizing integer tick tau (uniform J only)."""
        if not self.is_uniform:
            raise ValueError("integer ticks exist only for uniform coupling")
        j = self.couplings[0]
        if j == 0.0:
            raise ValueError("zero coupling never acquires phase")
        n = self.couplings.shape[0]
        return np.pi * tau / (2.0 * j * (n + 1))


@dataclass(frozen=True)
class ProbeSample:
    """One probe interrogation: coherence a and up-population P."""

    tau: int
    t: float
    value: complex
    p_up: float


def reconstruct_probabilities(samples) -> np.ndarray:
    """Invert N+1 probe samples into populations (descending n).

    The inverse transform is exact on consistent data; inconsistent samples
    leave an imaginary/negative residue, which is resynthesized and
    reported as a ReconstructionError instead of being silently dropped.
    """
    samples = list(samples)
    pairs = [(s.tau, s.value) for s in samples]
    w = offset_dft_inverse(pairs)  # ascending n
    n = w.shape[0] - 1
    p = w.real.copy()
    hard_negative = p.min() < -1e-10
    p[(p < 0.0) & (p > -1e-10)] = 0.0
    drift = abs(float(p.sum()) - 1.0)
    # resynthesize from the cleaned weights and compare against the input
    labels_asc = np.arange(n + 1) - n / 2.0
    taus = np.array([s.tau for s in samples], dtype=float)
    resynth = np.exp(-2j * np.pi * np.outer(taus, labels_asc) / (n + 1)) @ p.astype(complex)
    residual = float(np.max(np.abs(resynth - np.array([s.value for s in samples]))))
    if hard_negative or drift >= 1e-10 or residual > 1e-8:
        raise ReconstructionError("probe samples are inconsistent", max(residual, drift))
    p /= p.sum()
    return p[::-1].copy()


def population_spectrum(
    grid: ReadoutGrid, row: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """theta-DFT magnitudes of one population row, sorted by harmonic.

    A grid finer than twice the register size resolves every harmonic
    exactly; the coherence between the z-extremal states shows up at
    harmonics +/-N and nowhere else.  The default row is the central one
    (label n = 0 for even registers), which carries the largest mixing
    weight on that beat.
    """
    if row is None:
        row = grid.n_qubits // 2
    p_row = grid.p[row]
    n_theta = p_row.shape[0]
    mags = np.abs(np.fft.fft(p_row)) / n_theta
    freqs = np.fft.fftfreq(n_theta, d=1.0 / n_theta)
    order = np.argsort(freqs, kind="stable")
    return freqs[order].astype(np.int64), mags[order]


def simulate_probe_run(
    state: SymmetricDensityMatrix,
    n_theta: int,
    coupling: ProbeCoupling | float = 1.0,
) -> tuple[ReadoutGrid, list[list[ProbeSample]]]:
    """Full protocol: rotate, interrogate at every tick, reconstruct.

    Returns the grid rebuilt purely from the probe record together with
    the record itself (one list of N+1 samples per angle).  The probe
    up-population stays at 1/2 for every tick: all information sits in
    the coherence.
    """
    n = state.n_qubits
    if isinstance(coupling, (int, float)):
        coupling = ProbeCoupling.uniform(float(coupling), n)
    if coupling.couplings.shape[0] != n:
        raise ValueError("coupling count does not match qubit count")
    if not coupling.is_uniform:
        raise ValueError("the tick protocol needs uniform coupling")
    exact = direct_grid(state, n_theta)
    labels = exact.labels
    taus = np.arange(n + 1)
    phase = np.exp(-2j * np.pi * np.outer(taus, labels) / (n + 1))
    a_all = phase @ exact.p  # (N+1 ticks, n_theta)
    samples: list[list[ProbeSample]] = []
    p_rec = np.empty_like(exact.p)
    for jcol in range(n_theta):
        row = [
            ProbeSample(int(k), coupling.tick_time(int(k)), complex(a_all[k, jcol]), 0.5)
            for k in taus
        ]
        samples.append(row)
        p_rec[:, jcol] = reconstruct_probabilities(row)
    grid = ReadoutGrid(n, exact.thetas, np.clip(p_rec, 0.0, None), provenance="probe")
    return grid, samples
