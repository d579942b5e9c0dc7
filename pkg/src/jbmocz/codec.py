"""BMOCZ encoding and DiZeT decoding.

Single-block functions take 1-D sequences; the ``*_batch`` variants take
``(B, K+1)`` arrays and are what the simulator uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constellation import ConstellationSpec, map_bits, map_bits_batch
from .polyzeros import (
    eval_poly,
    eval_poly_batch,
    normalize_energy,
    normalize_energy_batch,
    poly_from_roots,
    poly_from_roots_batch,
)


class UnsupportedConstellation(ValueError):
    """Raised when an operation needs a rotationally symmetric (Huffman) grid."""


@dataclass(frozen=True)
class FractionalResult:
    epsilon_hat: float
    bits: np.ndarray
    shift: int


def encode(spec: ConstellationSpec, bits) -> np.ndarray:
    """Transmit sequence of length ``K+1`` with energy ``K+1``."""
    zeros = map_bits(spec, bits)[spec.expansion_order]
    return normalize_energy(poly_from_roots(zeros), spec.K + 1)


def encode_batch(spec: ConstellationSpec, bits: np.ndarray) -> np.ndarray:
    zeros = map_bits_batch(spec, bits)[:, spec.expansion_order]
    return normalize_energy_batch(poly_from_roots_batch(zeros), spec.K + 1)


def _check_received(spec: ConstellationSpec, received) -> np.ndarray:
    y = np.asarray(received, dtype=np.complex128)
    if y.shape[-1] != spec.K + 1:
        raise ValueError(f"received sequence must have length {spec.K + 1}, got {y.shape[-1]}")
    return y


def _pair_magnitudes(spec, y):
    outer = np.abs(eval_poly_batch(y, spec.outer_zeros))
    inner = np.abs(eval_poly_batch(y, spec.inner_zeros)) * spec.dizet_weights
    return outer, inner


def dizet_decode(spec: ConstellationSpec, received) -> np.ndarray:
    """Bit ``k`` is 1 iff ``|Y(outer_k)| < r_k**K |Y(inner_k)|``; ties give 0."""
    y = _check_received(spec, received)
    if y.ndim != 1:
        raise ValueError("dizet_decode takes a single block; use dizet_decode_batch")
    return dizet_decode_batch(spec, y[None, :])[0]


def dizet_decode_batch(spec: ConstellationSpec, received: np.ndarray) -> np.ndarray:
    y = _check_received(spec, received)
    outer, inner = _pair_magnitudes(spec, y)
    return (outer < inner).astype(np.uint8)


def dizet_margins(spec: ConstellationSpec, received) -> np.ndarray:
    """Log-domain decision margins ``ln(r_k**K |Y(inner)|) - ln|Y(outer)|``.

    Positive means bit 1.  An exact zero evaluation yields ``+inf`` or
    ``-inf``; both zero gives ``nan``.
    """
    y = _check_received(spec, received)
    outer = np.abs(eval_poly(y, spec.outer_zeros))
    inner = np.abs(eval_poly(y, spec.inner_zeros)) * spec.dizet_weights
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(inner) - np.log(outer)


@lru_cache(maxsize=4)
def _fractional_grid(K: int, R: float, Q: int):
    # column (s, k) evaluates at angle (k Q - s) * 2 pi / (Q K), i.e. zero k of
    # the grid after counter-rotating the received zeros by (s / Q) theta_K
    s = np.arange(Q)[:, None]
    k = np.arange(K)[None, :]
    angles = 2.0 * np.pi * ((k * Q - s) % (Q * K)) / (Q * K)
    phasors = np.exp(1j * angles).ravel()
    powers = np.arange(K + 1)[:, None]
    V_out = (R * phasors[None, :]) ** powers
    V_in = (phasors[None, :] / R) ** powers
    return V_out, V_in


def fractional_dizet(spec: ConstellationSpec, received, Q: int = 200) -> FractionalResult:
    """Oversampled DiZeT decoder for the fractional part of a zero rotation.

    The received polynomial is evaluated on ``Q*K`` uniformly spaced angles on
    both circles.  For every candidate shift ``s`` the score
    ``sum_k |g_out - R**K g_in|`` over the grid aligned with that shift is
    computed and the best shift gives ``epsilon_hat = s / Q``.  The returned
    bits are a cyclic permutation of the transmitted ones.
    """
    y = _check_received(spec, received)
    if y.ndim != 1:
        raise ValueError("fractional_dizet takes a single block")
    eps, bits = fractional_dizet_batch(spec, y[None, :], Q)
    return FractionalResult(epsilon_hat=float(eps[0]), bits=bits[0], shift=int(round(eps[0] * Q)))


_FRACTIONAL_ROWS = 512


def fractional_dizet_batch(spec: ConstellationSpec, received: np.ndarray, Q: int = 200):
    """Batched :func:`fractional_dizet`; returns ``(epsilon_hat, bits)`` arrays."""
    if not spec.is_huffman:
        raise UnsupportedConstellation("fractional DiZeT requires a Huffman constellation (zeta = 1)")
    if Q < 1:
        raise ValueError("oversampling factor Q must be >= 1")
    y = _check_received(spec, received)
    V_out, V_in = _fractional_grid(spec.K, float(spec.R), Q)
    K = spec.K
    weight = float(spec.R) ** K
    s_hat = np.empty(y.shape[0], dtype=np.int64)
    bits = np.empty((y.shape[0], K), dtype=np.uint8)
    for start in range(0, y.shape[0], _FRACTIONAL_ROWS):
        chunk = y[start : start + _FRACTIONAL_ROWS]
        g_out = np.abs(chunk @ V_out).reshape(-1, Q, K)
        g_in = np.abs(chunk @ V_in).reshape(-1, Q, K)
        g_in *= weight
        score = np.abs(g_out - g_in).sum(axis=2)
        best = np.argmax(score, axis=1)
        rows = np.arange(chunk.shape[0])
        s_hat[start : start + chunk.shape[0]] = best
        bits[start : start + chunk.shape[0]] = g_out[rows, best] < g_in[rows, best]
    return s_hat / Q, bits


def cyclic_shift_of(reference: np.ndarray, candidate: np.ndarray) -> int | None:
    """Smallest ``u`` with ``candidate == np.roll(reference, -u)``, else ``None``."""
    for u in range(len(reference)):
        if np.array_equal(np.roll(reference, -u), candidate):
            return u
    return None


def rotation_split(phi: float, K: int) -> tuple[int, float]:
    """Split ``phi`` into integer and fractional multiples of ``2 pi / K``."""
    x = (phi / (2.0 * math.pi) * K) % K
    u = int(math.floor(x))
    return u % K, x - u
