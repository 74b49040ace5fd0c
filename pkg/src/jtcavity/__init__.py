"""Dissipative dynamics of a two-frequency Jahn-Teller coupled-cavity system.

The package is organised around six layers:

- ``fockspace``     truncated tensor-product Hilbert spaces and dense operators
- ``jt_model``      model Hamiltonians, normal modes, polaritons, matching checks
- ``liouville``     Lindblad generators, time evolution, steady states
- ``correlations``  two-time correlations, power spectra, coherence functions,
                    input/output port observables
- ``spikes``        spike-train detection, phase locking, regime classification
- ``scenario``/``cli``  configuration, figure presets, CSV/manifest export

All frequencies and rates are dimensionless (units of the first resonator
frequency); time is measured in inverse frequency units.
"""

__version__ = "0.1.0"

from .fockspace import (
    HilbertSpace,
    Operator,
    DensityMatrix,
    SpaceMismatchError,
    qubit,
    boson,
    annihilator,
    creator,
    number_op,
    pauli,
    qubit_lowering,
    identity,
    commutator,
    dagger,
    expectation,
    basis_state,
    fock_density,
    thermal_density,
)
from .jt_model import (
    RawParams,
    EffectiveParams,
    effective_params,
    build_space,
    build_hamiltonian_effective,
    build_hamiltonian_hybrid,
    jt_center_hamiltonian,
    hybrid_mode,
    normal_mode_map,
    bare_mode_ops,
    polariton_ops,
    compare_hamiltonian_forms,
    impedance_matching_check,
)
from .liouville import (
    DissipationParams,
    Liouvillian,
    Trajectory,
    IntegratorFailure,
    DegenerateSteadyStateError,
    lindblad_dissipator,
    build_liouvillian,
    evolve,
    steady_state,
)
from .correlations import (
    CorrelationSeries,
    SpectrumSeries,
    positive_frequency_part,
    port_quadratures,
    output_flux,
    two_time_corr,
    power_spectrum,
    g2,
    g2_batch,
    population_imbalance,
)
from .series import TimeSeries
from .spikes import (
    SpikeTrain,
    SyncReport,
    RegimeReport,
    SpikeConfig,
    detect_spikes,
    phase_locking,
    classify_regime,
    gain_ratio,
)
