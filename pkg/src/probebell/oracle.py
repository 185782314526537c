"""Brute-force tensor-product cross-checks.

Everything here works in the full 2^mu Hilbert space with no collective
shortcuts, so it is exponentially expensive and only exists to validate
the symmetric-sector implementations on small registers.  Qubit 0 occupies
the most significant bit of the basis index (the probe, when present); bit
value 1 means spin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generation import (
    CentralSpinParams,
    JointState,
    bell_correlator,
    initial_plus_x,
)
from .readout import (
    ProbeCoupling,
    SymmetricDensityMatrix,
    apply_local_ops,
    direct_grid,
    probe_coherence_general,
    probe_coherence_symmetric,
    simulate_probe_run,
)
from .spincore import evolve

__all__ = [
    "FullState",
    "embed_symmetric",
    "embedded_populations",
    "full_central_spin_evolution",
    "full_bell_correlator",
    "full_probe_simulation",
    "oracle_suite",
]

_MAX_QUBITS = 12
_MAX_DENSITY_QUBITS = 10

_SZ = np.diag([1.0, -1.0]).astype(complex)
_SP = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_SM = _SP.conj().T


@dataclass(frozen=True)
class FullState:
    """Pure state of mu distinguishable qubits."""

    mu: int
    vec: np.ndarray

    def __post_init__(self):
        if not (1 <= self.mu <= _MAX_QUBITS):
            raise ValueError(f"full tensor states limited to 1..{_MAX_QUBITS} qubits")
        v = np.asarray(self.vec, dtype=complex)
        if v.shape != (2**self.mu,):
            raise ValueError("vector length must be 2^mu")
        object.__setattr__(self, "vec", v)


def _popcounts(n_qubits: int) -> np.ndarray:
    idx = np.arange(2**n_qubits, dtype=np.int64)
    counts = np.zeros(2**n_qubits, dtype=np.int64)
    for i in range(n_qubits):
        counts += (idx >> i) & 1
    return counts


def _embedding(n_qubits: int) -> np.ndarray:
    # isometry from the (N+1)-dim symmetric sector into the 2^N space
    k = _popcounts(n_qubits)
    e = np.zeros((2**n_qubits, n_qubits + 1))
    e[np.arange(2**n_qubits), k] = [
        1.0 / math.sqrt(math.comb(n_qubits, int(kk))) for kk in k
    ]
    return e


def embed_symmetric(state) -> FullState:
    """Lift a collective vector (or JointState) into the full tensor space."""
    if isinstance(state, JointState):
        n = state.n_ensemble
        if n + 1 > _MAX_QUBITS:
            raise ValueError("joint state too large to embed")
        e = _embedding(n)
        full = np.concatenate([e @ state.probe_up, e @ state.probe_down])
        return FullState(n + 1, full)
    psi = np.asarray(state, dtype=complex)
    n = psi.shape[0] - 1
    if n > _MAX_QUBITS:
        raise ValueError("state too large to embed")
    return FullState(n, _embedding(n) @ psi)


def embedded_populations(state: SymmetricDensityMatrix) -> np.ndarray:
    """Diagonal of the embedded density matrix over all 2^N strings."""
    n = state.n_qubits
    if n > 16:
        raise ValueError("population table limited to N <= 16")
    k = _popcounts(n)
    diag = state.rho.real.diagonal()
    return np.array([diag[kk] / math.comb(n, int(kk)) for kk in k])


def _op_at(op: np.ndarray, i: int, mu: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for q in range(mu):
        out = np.kron(out, op if q == i else np.eye(2, dtype=complex))
    return out


def full_central_spin_evolution(
    params: CentralSpinParams,
    n_ensemble: int,
    t: float,
    initial: FullState | None = None,
) -> FullState:
    """Propagate the probe + ensemble with per-qubit Pauli operators."""
    mu = n_ensemble + 1
    if mu > _MAX_QUBITS:
        raise ValueError(f"full evolution limited to {_MAX_QUBITS} qubits total")
    if initial is None:
        joint0, _ = initial_plus_x(n_ensemble)
        initial = embed_symmetric(joint0)
    if initial.mu != mu:
        raise ValueError("initial state has the wrong qubit count")
    h = 0.5 * params.omega_probe * _op_at(_SZ, 0, mu)
    for i in range(1, mu):
        h += 0.5 * params.omega_sys * _op_at(_SZ, i, mu)
        h += params.g * (_op_at(_SP, i, mu) @ _op_at(_SM, 0, mu))
        h += params.g * (_op_at(_SM, i, mu) @ _op_at(_SP, 0, mu))
    return FullState(mu, evolve(h, initial.vec, t))


def full_bell_correlator(state: FullState, azimuth) -> float:
    """E via the literal product of single-qubit lowering operators.

    azimuth: one angle for every qubit, or a per-qubit sequence (probe
    first).  Each qubit is analysed along its own equatorial axis.
    """
    az = np.atleast_1d(np.asarray(azimuth, dtype=float))
    if az.shape[0] == 1:
        az = np.full(state.mu, az[0])
    if az.shape != (state.mu,):
        raise ValueError("need one azimuth per qubit")
    c = math.cos(np.pi / 4.0)
    s = math.sin(np.pi / 4.0)
    u_y = np.array([[c, -s], [s, c]], dtype=complex)
    op = np.eye(1, dtype=complex)
    for a in az:
        u = u_y @ np.diag([np.exp(-0.5j * a), np.exp(+0.5j * a)])
        op = np.kron(op, u.conj().T @ _SM @ u)
    amp = np.vdot(state.vec, op @ state.vec)
    return abs(amp) ** 2


def full_probe_simulation(
    rho_system: np.ndarray,
    coupling: ProbeCoupling,
    t: float,
    probe: np.ndarray | None = None,
) -> np.ndarray:
    """Joint sigma_z sigma_z evolution, then trace out the register.

    rho_system is a full 2^N density matrix; returns the 2x2 reduced probe
    state at time t.
    """
    n = coupling.couplings.shape[0]
    if n > _MAX_DENSITY_QUBITS:
        raise ValueError(f"density-matrix simulation limited to N <= {_MAX_DENSITY_QUBITS}")
    rho_s = np.asarray(rho_system, dtype=complex)
    if rho_s.shape != (2**n, 2**n):
        raise ValueError("system density matrix has the wrong shape")
    if probe is None:
        probe = np.array([1.0, 1.0]) / math.sqrt(2.0)
    rho_p = np.outer(probe, np.conj(probe)).astype(complex)
    rho = np.kron(rho_p, rho_s)
    idx = np.arange(2**n, dtype=np.int64)
    field = np.zeros(2**n)
    for i in range(n):
        bit = (idx >> (n - 1 - i)) & 1
        field += coupling.couplings[i] * (1.0 - 2.0 * bit)
    # H is diagonal: +field on probe-up strings, -field on probe-down
    diag = np.concatenate([field, -field])
    u = np.exp(-1j * diag * t)
    rho_t = (u[:, None] * rho) * u.conj()[None, :]
    rho_t = rho_t.reshape(2, 2**n, 2, 2**n)
    return np.einsum("aibi->ab", rho_t)


def _random_symmetric_mixed(n_qubits: int, rng) -> SymmetricDensityMatrix:
    a = rng.normal(size=(n_qubits + 1, n_qubits + 1)) + 1j * rng.normal(
        size=(n_qubits + 1, n_qubits + 1)
    )
    rho = a @ a.conj().T
    return SymmetricDensityMatrix(n_qubits, rho / np.trace(rho).real)


def oracle_suite(seed: int = 7, n_ensemble: int = 7, n_readout: int = 8) -> list[dict]:
    """Run every cross-check on small registers; returns one record each."""
    rng = np.random.default_rng(seed)
    records: list[dict] = []

    def record(name: str, deviation: float, tol: float):
        records.append(
            {
                "check": name,
                "max_deviation": float(deviation),
                "tolerance": tol,
                "passed": bool(deviation <= tol),
            }
        )

    # exchange model: collective blocks vs raw tensor product
    from .generation import central_spin_hamiltonian  # local to keep imports tidy

    params = CentralSpinParams(omega_probe=11.0, omega_sys=1.0, g=0.05)
    joint0, _ = initial_plus_x(n_ensemble)
    h = central_spin_hamiltonian(params, n_ensemble)
    dev = 0.0
    times = rng.uniform(0.0, 20.0, size=5)
    for t in times:
        dicke = JointState(n_ensemble, evolve(h, joint0.vec, t))
        full = full_central_spin_evolution(params, n_ensemble, t)
        overlap = abs(np.vdot(embed_symmetric(dicke).vec, full.vec)) ** 2
        dev = max(dev, abs(1.0 - overlap))
    record("joint_evolution_overlap", dev, 1e-10)

    dev = 0.0
    for t in times[:3]:
        dicke = JointState(n_ensemble, evolve(h, joint0.vec, t))
        full = embed_symmetric(dicke)
        for az in rng.uniform(0.0, 2.0 * np.pi, size=3):
            e_fast = bell_correlator(dicke, az)
            e_slow = full_bell_correlator(full, az)
            dev = max(dev, abs(e_fast - e_slow))
    record("bell_correlator_bruteforce", dev, 1e-10)

    coupling = ProbeCoupling(rng.uniform(0.5, 1.5, size=n_readout))
    mixed = _random_symmetric_mixed(n_readout, rng)
    pops = embedded_populations(mixed)
    e = _embedding(n_readout)
    rho_full = e @ mixed.rho @ e.T
    dev = 0.0
    for t in rng.uniform(0.0, 5.0, size=4):
        direct = probe_coherence_general(pops, coupling, t)
        rho_probe = full_probe_simulation(rho_full, coupling, t)
        traced = rho_probe[0, 1] / 0.5
        dev = max(dev, abs(direct - traced))
        dev = max(dev, abs(rho_probe[0, 0].real - 0.5))
    record("probe_coherence_vs_trace", dev, 1e-12)

    state = SymmetricDensityMatrix.oat(n_readout, 0.3)
    pops = embedded_populations(state)
    uniform = ProbeCoupling.uniform(1.0, n_readout)
    p_sym = state.rho.real.diagonal()
    dev = 0.0
    for k in range(n_readout + 1):
        via_tick = probe_coherence_general(pops, uniform, uniform.tick_time(k))
        via_sym = probe_coherence_symmetric(p_sym, k)
        dev = max(dev, abs(via_tick - via_sym))
    record("tick_vs_symmetric", dev, 1e-12)

    small = _random_symmetric_mixed(4, rng)
    theta = rng.uniform(0.0, 2.0 * np.pi)
    rotated = apply_local_ops(small, theta)
    e4 = _embedding(4)
    c = 1.0 / math.sqrt(2.0)
    u1 = np.array([[c, -1j * c], [-1j * c, c]]) @ np.diag(
        [np.exp(-0.5j * theta), np.exp(+0.5j * theta)]
    )
    u_all = np.eye(1, dtype=complex)
    for _ in range(4):
        u_all = np.kron(u_all, u1)
    rho_rot_full = u_all @ (e4 @ small.rho @ e4.T) @ u_all.conj().T
    back = e4.T @ rho_rot_full @ e4
    dev = float(np.max(np.abs(back - rotated.rho)))
    record("local_ops_tensorization", dev, 1e-12)

    ghz = SymmetricDensityMatrix.ghz(n_readout)
    grid, _samples = simulate_probe_run(ghz, 4 * (n_readout + 1))
    exact = direct_grid(ghz, 4 * (n_readout + 1))
    record("readout_roundtrip", float(np.max(np.abs(grid.p - exact.p))), 1e-12)

    return records
