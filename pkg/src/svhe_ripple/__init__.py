"""Space-vector PWM sequences, selective harmonic elimination by dwell-time
division, and the stator-flux / torque ripple and current THD they produce in
an induction-motor drive."""

__version__ = "0.1.0"

from .errors import DomainError, NoSolutionError, SimulationError
from .harmonic_elim import EliminationSolution, SpectrumResult, fourier_coefficient, solve_k, spectrum, thd
from .machine_sim import SimConfig, SimResult, SinusoidalSupply, line_current_thd, simulate_no_load, torque_pp_from_sim
from .ripple_analysis import (
    REFERENCE_MACHINE,
    MachineParams,
    crossover_m,
    error_voltage_segments,
    flux_ripple,
    peak_to_peak,
    pp_flux_csv,
    pp_flux_svhe,
    rms_ripple,
    sector_flux_ripple,
    torque_ripple,
    torque_ripple_pp,
)
from .svpwm_core import (
    DEFAULT_VDC,
    SEQUENCES,
    DriveConfig,
    SequenceSpec,
    ThreePhaseWaveform,
    VectorConvention,
    dwell_times,
    get_sequence,
    pole_voltage_waveform,
    sample_plan,
    subcycle_playlist,
    switching_count,
    vector_switch_state,
)
from .waveforms import PiecewiseConstant, PiecewiseLinear
