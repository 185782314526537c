"""probebell: Bell-correlation generation in a probed spin ensemble.

One ancilla qubit, dispersively coupled to a symmetric register, both
creates the register's entanglement (probe-conditioned twisting) and reads
it back out (its coherence Fourier-samples the populations).  The package
propagates the exact exchange model, simulates the probe tomography, and
turns the recovered populations into squeezing / Fisher / Bell-correlator
certificates, with brute-force tensor oracles for every shortcut.
"""

from .certify import (
    CertificationReport,
    certification_scan,
    certify,
    depth_bound_from_fisher,
    extract_bell_correlator,
    fisher_information,
    moments,
    qfi_bound,
    qfi_oracle_pure,
    spin_squeezing,
)
from .generation import (
    CentralSpinParams,
    GenerationSweepResult,
    JointState,
    bell_correlator,
    bell_correlator_max,
    central_spin_hamiltonian,
    effective_hamiltonian,
    effective_model_deficit,
    initial_plus_x,
    oat_hamiltonian,
    q_value,
    sweep,
)
from .oracle import (
    FullState,
    embed_symmetric,
    embedded_populations,
    full_bell_correlator,
    full_central_spin_evolution,
    full_probe_simulation,
    oracle_suite,
)
from .readout import (
    ProbeCoupling,
    ProbeSample,
    ReadoutGrid,
    ReconstructionError,
    SymmetricDensityMatrix,
    apply_local_ops,
    direct_grid,
    frequency_table,
    population_spectrum,
    probability_direct,
    probe_coherence_general,
    probe_coherence_symmetric,
    reconstruct_probabilities,
    simulate_probe_run,
    twisted_readout_state,
)
from .spincore import (
    CollectiveBasis,
    HalfInteger,
    SpinOperators,
    coherent_state,
    evolve,
    make_operators,
    mixing_matrix,
    offset_dft_forward,
    offset_dft_inverse,
)

__version__ = "0.1.0"
