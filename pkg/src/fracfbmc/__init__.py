"""Link-level simulation and numerical certification of frequency-reversal
Alamouti FBMC-OQAM under inter-antenna carrier frequency offsets."""

from .analysis import (UvwzDecomposition, decompose_uvwz, interference_coeff, interference_table,
                       measure_sir, residual_report)
from .channel import (PROFILES, ChannelRealization, TapDelayProfile, add_awgn, apply_channel,
                      load_profile, realize)
from .config import ConfigurationError, FracConfig
from .filterbank import (PrototypeFilter, TransmuxResponse, design_phydyas, localization_bounds,
                         transmux_response)
from .frac_codec import PayloadGrid, combine_decide, frac_encode, pam_demap, pam_map
from .harness import (BerRecord, SweepConfig, run_sweep, run_trial, theoretical_alamouti_ber,
                      theoretical_single_ber)
from .modem import BasebandSignal, PhaseGridPair, analyze, build_phase_grids, synthesize, validate_phase_grids

__version__ = "0.1.0"

__all__ = [
    "BasebandSignal", "BerRecord", "ChannelRealization", "ConfigurationError", "FracConfig",
    "PROFILES", "PayloadGrid", "PhaseGridPair", "PrototypeFilter", "SweepConfig", "TapDelayProfile",
    "TransmuxResponse", "UvwzDecomposition", "add_awgn", "analyze", "apply_channel",
    "build_phase_grids", "combine_decide", "decompose_uvwz", "design_phydyas", "frac_encode",
    "interference_coeff", "interference_table", "load_profile", "localization_bounds",
    "measure_sir", "pam_demap", "pam_map", "realize", "residual_report", "run_sweep", "run_trial",
    "synthesize", "theoretical_alamouti_ber", "theoretical_single_ber", "transmux_response",
    "validate_phase_grids",
]
