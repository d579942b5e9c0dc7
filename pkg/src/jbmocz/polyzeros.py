"""Polynomial and sequence primitives.

Coefficient sequences are stored in ascending degree order: ``p[k]`` is the
coefficient of ``z**k``.  Every function accepts anything ``np.asarray`` can
turn into a 1-D complex array.
"""

from __future__ import annotations

import numpy as np


def _as_seq(p) -> np.ndarray:
    arr = np.asarray(p, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("coefficient sequence must be a non-empty 1-D array")
    return arr


def poly_from_roots(roots, leading: complex = 1.0) -> np.ndarray:
    """Coefficients of ``leading * prod(z - r)`` by sequential convolution."""
    if leading == 0:
        raise ValueError("leading coefficient must be nonzero")
    roots = np.asarray(roots, dtype=np.complex128).ravel()
    coeffs = np.zeros(roots.size + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    for deg, r in enumerate(roots, start=1):
        # multiply the current degree-(deg-1) polynomial by (z - r)
        coeffs[1 : deg + 1] = coeffs[0:deg] - r * coeffs[1 : deg + 1]
        coeffs[0] = -r * coeffs[0]
    return leading * coeffs


def poly_from_roots_batch(roots: np.ndarray) -> np.ndarray:
    """Monic coefficient rows for a ``(B, K)`` array of root sets."""
    roots = np.asarray(roots, dtype=np.complex128)
    n_blocks, K = roots.shape
    coeffs = np.zeros((n_blocks, K + 1), dtype=np.complex128)
    coeffs[:, 0] = 1.0
    for deg in range(1, K + 1):
        r = roots[:, deg - 1 : deg]
        coeffs[:, 1 : deg + 1] = coeffs[:, 0:deg] - r * coeffs[:, 1 : deg + 1]
        coeffs[:, 0] = -r[:, 0] * coeffs[:, 0]
    return coeffs


def eval_poly(p, z):
    """Evaluate ``sum_k p[k] z**k`` with Horner's scheme.

    ``z`` may be a scalar or an array; the result has the shape of ``z``.
    """
    p = _as_seq(p)
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z)
    for c in p[::-1]:
        acc = acc * z + c
    return acc[()] if acc.ndim == 0 else acc


def eval_poly_batch(p: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner evaluation of each row of ``p`` (shape ``(B, K+1)``) at points ``z``.

    ``z`` is either shared, shape ``(M,)``, or per row, shape ``(B, M)``.
    Returns ``(B, M)``.
    """
    p = np.asarray(p, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if z.ndim == 1:
        z = z[None, :]
    acc = np.zeros((p.shape[0], z.shape[-1]), dtype=np.complex128)
    for k in range(p.shape[1] - 1, -1, -1):
        acc *= z
        acc += p[:, k : k + 1]
    return acc


def spectrum_mag(p, N: int) -> np.ndarray:
    """Magnitudes ``|sum_k p[k] exp(+j 2 pi n k / N)|`` for ``n`` in ``[N]``.

    Unnormalized, positive-exponent transform.  Sequences longer than ``N``
    are aliased (folded modulo ``N``), which is what the sum gives.
    """
    p = _as_seq(p)
    if N < 1:
        raise ValueError("N must be a positive integer")
    folded = np.zeros(N, dtype=np.complex128)
    np.add.at(folded, np.arange(p.size) % N, p)
    return np.abs(np.fft.ifft(folded) * N)


def normalize_energy(p, target: float) -> np.ndarray:
    """Scale ``p`` to squared norm ``target`` with a real positive constant term."""
    p = _as_seq(p)
    if target <= 0:
        raise ValueError("target energy must be positive")
    energy = float(np.vdot(p, p).real)
    if energy == 0.0:
        raise ValueError("cannot normalize the zero sequence")
    if p[0] == 0:
        raise ValueError("constant term is zero; phase convention undefined")
    scale = np.sqrt(target / energy)
    out = p * (scale * np.conj(p[0]) / abs(p[0]))
    out[0] = abs(p[0]) * scale
    return out


def normalize_energy_batch(p: np.ndarray, target: float) -> np.ndarray:
    """Row-wise :func:`normalize_energy` for a ``(B, L)`` array."""
    p = np.asarray(p, dtype=np.complex128)
    energy = np.sum(p.real**2 + p.imag**2, axis=1, keepdims=True)
    mag0 = np.abs(p[:, :1])
    scale = np.sqrt(target / energy)
    out = p * (scale * np.conj(p[:, :1]) / mag0)
    out[:, 0] = (mag0 * scale)[:, 0]
    return out


def aacf(p) -> np.ndarray:
    """Aperiodic auto-correlation, lags ``-K..K``.

    Entry ``K + l`` holds ``a_l = sum_i conj(p_i) p_{i+l}``; negative lags are
    the conjugates of the positive ones.
    """
    p = _as_seq(p)
    K = p.size - 1
    pos = np.array([np.vdot(p[: K + 1 - lag], p[lag:]) for lag in range(K + 1)])
    out = np.empty(2 * K + 1, dtype=np.complex128)
    out[K:] = pos
    out[:K] = np.conj(pos[:0:-1])
    out[K] = pos[0].real
    return out
