"""Collective-spin kernels: basis bookkeeping, operators, states, propagation.

Everything downstream works in the (2S+1)-dimensional irrep with basis
states |S, m> ordered by descending m (row 0 is m = +S).  Half-integer
labels are tracked exactly as doubled integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HalfInteger",
    "CollectiveBasis",
    "SpinOperators",
    "make_operators",
    "coherent_state",
    "evolve",
    "mixing_matrix",
    "offset_dft_forward",
    "offset_dft_inverse",
]


class HalfInteger:
    """Exact half-integer, stored as twice its value."""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        if not isinstance(twice, (int, np.integer)):
            raise TypeError("twice must be an integer")
        self.twice = int(twice)

    @classmethod
    def of(cls, x) -> "HalfInteger":
        """Coerce an int, an exact multiple of 1/2, or a HalfInteger."""
        if isinstance(x, HalfInteger):
            return x
        if isinstance(x, (int, np.integer)):
            return cls(2 * int(x))
        d = 2.0 * float(x)
        if d != round(d):
            raise ValueError(f"{x!r} is not a half-integer")
        return cls(int(round(d)))

    @property
    def value(self) -> float:
        return self.twice / 2.0

    def __eq__(self, other) -> bool:
        if isinstance(other, HalfInteger):
            return self.twice == other.twice
        return self.value == other

    def __hash__(self):
        return hash(("HalfInteger", self.twice))

    def __repr__(self):
        if self.twice % 2 == 0:
            return f"HalfInteger({self.twice // 2})"
        return f"HalfInteger({self.twice}/2)"


@dataclass(frozen=True)
class CollectiveBasis:
    """|S, m> ladder with m descending from +S to -S."""

    spin: HalfInteger
    dim: int = field(init=False)
    twice_labels: np.ndarray = field(init=False)  # 2m, exact ints
    labels: np.ndarray = field(init=False)        # m as floats

    def __post_init__(self):
        two_s = self.spin.twice
        object.__setattr__(self, "dim", two_s + 1)
        tl = np.arange(two_s, -two_s - 1, -2, dtype=np.int64)
        object.__setattr__(self, "twice_labels", tl)
        object.__setattr__(self, "labels", tl / 2.0)


@dataclass(frozen=True)
class SpinOperators:
    basis: CollectiveBasis
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray


def make_operators(spin) -> SpinOperators:
    """Dense J_x, J_y, J_z, J_+/- for total spin S >= 1/2."""
    s = HalfInteger.of(spin)
    if s.twice < 1:
        raise ValueError("spin must be at least 1/2")
    basis = CollectiveBasis(s)
    m = basis.labels
    sval = s.value
    jz = np.diag(m).astype(complex)
    # <m+1| J+ |m> = sqrt(S(S+1) - m(m+1)); row index of m+1 is one above m
    amp = np.sqrt(sval * (sval + 1.0) - m[1:] * (m[1:] + 1.0))
    jplus = np.zeros((basis.dim, basis.dim), dtype=complex)
    jplus[np.arange(basis.dim - 1), np.arange(1, basis.dim)] = amp
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    return SpinOperators(basis, jx, jy, jz, jplus, jminus)


def coherent_state(spin, polar: float, azimuth: float) -> np.ndarray:
    """Spin coherent state pointing along (polar, azimuth).

    Amplitudes in the descending-m basis,
    c_m = sqrt(C(2S, S+m)) cos(polar/2)^(S+m) sin(polar/2)^(S-m) e^{-i m azimuth},
    giving <J> = S * (sin t cos p, sin t sin p, cos t).
    """
    s = HalfInteger.of(spin)
    if s.twice < 1:
        raise ValueError("spin must be at least 1/2")
    two_s = s.twice
    basis = CollectiveBasis(s)
    c, sn = math.cos(polar / 2.0), math.sin(polar / 2.0)
    out = np.empty(basis.dim, dtype=complex)
    for i, tm in enumerate(basis.twice_labels):
        k_up = (two_s + tm) // 2   # S + m
        k_dn = (two_s - tm) // 2
        out[i] = math.sqrt(math.comb(two_s, k_up)) * c**k_up * sn**k_dn
    out *= np.exp(-1j * basis.labels * azimuth)
    return out


def evolve(hamiltonian: np.ndarray, state: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) |state> via a spectral decomposition.

    H must be Hermitian to 1e-10 in max norm; it is symmetrized before
    diagonalizing so the propagation is exactly unitary.
    """
    h = np.asarray(hamiltonian, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("hamiltonian must be square")
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise ValueError("hamiltonian is not Hermitian")
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (h.shape[0],):
        raise ValueError("state dimension does not match hamiltonian")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ psi))


def mixing_matrix(spin) -> np.ndarray:
    """Unitary W = exp(-i (pi/2) J_x) in the descending-m basis.

    Rotates z-basis populations into the coherence-sensitive frame used by
    the readout: diag(W rho W^dag) mixes every rho element into every
    population row.
    """
    ops = make_operators(spin)
    w_eig, v = np.linalg.eigh(ops.jx)
    return (v * np.exp(-0.5j * np.pi * w_eig)) @ v.conj().T


def offset_dft_forward(weights: np.ndarray, taus, n_qubits: int) -> np.ndarray:
    """a(tau) = sum_n p_n exp(-i 2 pi tau n / (N+1)), n ascending -N/2..N/2."""
    p = np.asarray(weights, dtype=complex)
    if p.shape != (n_qubits + 1,):
        raise ValueError("weights must have N+1 entries")
    n = np.arange(n_qubits + 1) - n_qubits / 2.0
    taus = np.asarray(taus, dtype=float)
    return np.exp(-2j * np.pi * np.outer(taus, n) / (n_qubits + 1)) @ p


def offset_dft_inverse(samples) -> np.ndarray:
    """Recover the N+1 weights p_n from coherence samples a(tau), tau = 0..N.

    samples: sequence of (tau, value) pairs covering each integer tau in
    0..N exactly once.  Returns the complex weight vector with n ascending
    from -N/2 to +N/2; realness/positivity is the caller's concern.
    """
    pairs = list(samples)
    n_plus_1 = len(pairs)
    if n_plus_1 < 2:
        raise ValueError("need at least two samples")
    n_qubits = n_plus_1 - 1
    a = np.empty(n_plus_1, dtype=complex)
    seen = np.zeros(n_plus_1, dtype=bool)
    for tau, val in pairs:
        k = int(round(float(tau)))
        if abs(float(tau) - k) > 1e-12 or not (0 <= k <= n_qubits):
            raise ValueError(f"tau={tau} outside the integer ladder 0..{n_qubits}")
        if seen[k]:
            raise ValueError(f"duplicate sample at tau={k}")
        seen[k] = True
        a[k] = val
    if not seen.all():
        raise ValueError("samples must cover every tau in 0..N")
    # a(k) = e^{+i pi k N/(N+1)} DFT_k(p) for p indexed by j = n + N/2
    k = np.arange(n_plus_1)
    b = a * np.exp(-1j * np.pi * k * n_qubits / n_plus_1)
    return np.fft.ifft(b)
