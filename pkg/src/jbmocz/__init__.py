"""Jutted binary modulation on conjugate-reciprocal zeros (J-BMOCZ).

Modules:

- ``polyzeros``: polynomial helpers (roots to coefficients, evaluation, spectra)
- ``constellation``: Huffman and jutted zero grids
- ``codec``: encoder, DiZeT decoder and the fractional (oversampled) decoder
- ``cfo``: Fourier-domain CFO estimator
- ``channel``: flat fading, AWGN and CFO injection
- ``fec``: BCH codes over GF(32) and a (31,16) cyclically permutable code
- ``simulator``: Monte Carlo BER/BLER sweeps
"""

from .cfo import CfoEstimator, EstimatorConfig, SearchWindow, derotate, estimate_cfo, template
from .channel import CfoMode, ChannelDraw, NoiseConfig, apply_cfo, ebn0_to_n0, sample_draw, transmit
from .codec import dizet_decode, dizet_decode_batch, encode, encode_batch, fractional_dizet
from .constellation import ConstellationSpec, default_radius, map_bits
from .fec import BCH_31_16, BCH_31_21, BchCode, DecodeFailure, bch_decode, bch_encode, cpc_build, cpc_decode, cpc_encode
from .simulator import ConfigError, SimConfig, run_point, run_sweep, sweep_zeta

__version__ = "0.1.0"

__all__ = [
    "BCH_31_16", "BCH_31_21", "BchCode", "CfoEstimator", "CfoMode", "ChannelDraw", "ConfigError",
    "ConstellationSpec", "DecodeFailure", "EstimatorConfig", "NoiseConfig", "SearchWindow", "SimConfig",
    "apply_cfo", "bch_decode", "bch_encode", "cpc_build", "cpc_decode", "cpc_encode", "default_radius",
    "derotate", "dizet_decode", "dizet_decode_batch", "ebn0_to_n0", "encode", "encode_batch",
    "estimate_cfo", "fractional_dizet", "map_bits", "run_point", "run_sweep", "sample_draw",
    "sweep_zeta", "template", "transmit",
]
