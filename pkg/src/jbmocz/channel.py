"""Flat-fading / AWGN channel with a per-block carrier frequency offset."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CHANNELS = ("awgn", "rayleigh")


@dataclass(frozen=True)
class CfoMode:
    """``kind`` is ``none``, ``uniform`` (on ``[0, 2 pi)``) or ``fixed``."""

    kind: str = "none"
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "fixed"):
            raise ValueError(f"unknown CFO mode {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "CfoMode":
        if text in ("none", "uniform"):
            return cls(text)
        if text.startswith("fixed:"):
            return cls("fixed", float(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse CFO mode {text!r}")

    def __str__(self) -> str:
        return f"fixed:{self.phi:g}" if self.kind == "fixed" else self.kind


@dataclass(frozen=True)
class NoiseConfig:
    ebn0_db: float
    bits_per_block: int
    block_energy: float

    def __post_init__(self):
        if self.bits_per_block < 1:
            raise ValueError("bits_per_block must be >= 1")


@dataclass
class ChannelDraw:
    h: complex
    phi: float
    noise: np.ndarray


def ebn0_to_n0(cfg: NoiseConfig) -> float:
    """Noise spectral density with all block energy charged to the information bits."""
    return cfg.block_energy / (cfg.bits_per_block * 10.0 ** (cfg.ebn0_db / 10.0))


def apply_cfo(y, phi: float) -> np.ndarray:
    """Phase-modulate entry ``k`` by ``exp(+j phi k)``.

    Works row-wise on 2-D input when ``phi`` is an array of per-row angles.
    """
    y = np.asarray(y, dtype=np.complex128)
    k = np.arange(y.shape[-1])
    phi = np.asarray(phi, dtype=np.float64)
    if phi.ndim:
        return y * np.exp(1j * phi[:, None] * k[None, :])
    return y * np.exp(1j * float(phi) * k)


def transmit(codeword, draw: ChannelDraw) -> np.ndarray:
    """``m_phi * (x h + w)``."""
    x = np.asarray(codeword, dtype=np.complex128)
    w = np.asarray(draw.noise, dtype=np.complex128)
    if w.shape != x.shape:
        raise ValueError(f"noise length {w.shape} does not match codeword length {x.shape}")
    return apply_cfo(x * draw.h + w, draw.phi)


def sample_draw(rng: np.random.Generator, channel: str, cfo: CfoMode, n0: float, length: int) -> ChannelDraw:
    """One channel realization from a numpy ``Generator``."""
    if n0 < 0:
        raise ValueError("n0 must be non-negative")
    if channel not in CHANNELS:
        raise ValueError(f"unknown channel {channel!r}")
    if channel == "rayleigh":
        h = complex(*(rng.standard_normal(2) * math.sqrt(0.5)))
    else:
        h = 1.0 + 0.0j
    if cfo.kind == "uniform":
        phi = float(rng.uniform(0.0, 2.0 * math.pi))
    elif cfo.kind == "fixed":
        phi = cfo.phi
    else:
        phi = 0.0
    if n0 > 0:
        noise = (rng.standard_normal(length) + 1j * rng.standard_normal(length)) * math.sqrt(n0 / 2)
    else:
        noise = np.zeros(length, dtype=np.complex128)
    return ChannelDraw(h=h, phi=phi, noise=noise)
