"""Fourier-domain CFO estimation for zero constellations without rotational symmetry.

Every codeword of a BMOCZ codebook has the same aperiodic auto-correlation,
so the magnitude spectrum ``|X(e^{jw})|`` is a codebook-wide template.  A
carrier offset ``phi`` shifts the received spectrum by ``phi``; the estimator
correlates de-rotated copies of the received block against the template and
keeps the best candidate, refining the search window over a few iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import encode
from .constellation import ConstellationSpec
from .polyzeros import spectrum_mag

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SearchWindow:
    phi_min: float = 0.0
    phi_max: float = TWO_PI

    def __post_init__(self):
        if not (0.0 <= self.phi_min < self.phi_max <= TWO_PI):
            raise ValueError(f"invalid search window [{self.phi_min}, {self.phi_max})")

    @property
    def width(self) -> float:
        return self.phi_max - self.phi_min

    def candidates(self, N: int) -> np.ndarray:
        return self.width * np.arange(N) / N + self.phi_min


@dataclass(frozen=True)
class EstimatorConfig:
    N: int = 64
    delta: float = 0.2
    n_iterations: int = 2

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be at least 1")

    def check(self, K: int) -> None:
        if self.N < K + 1:
            raise ValueError(f"grid size N={self.N} must be at least K+1={K + 1}")


def template(spec: ConstellationSpec, N: int) -> np.ndarray:
    """N samples of the codebook's magnitude spectrum (all-ones message)."""
    if N < spec.K + 1:
        raise ValueError(f"N={N} must be at least K+1={spec.K + 1}")
    return spectrum_mag(encode(spec, np.ones(spec.K, dtype=np.uint8)), N)


def derotate(received, phi_hat: float) -> np.ndarray:
    """Multiply entry ``k`` by ``exp(-j phi_hat k)``."""
    y = np.asarray(received, dtype=np.complex128)
    return y * np.exp(-1j * phi_hat * np.arange(y.shape[-1]))


def correlation_scores(received, t, window: SearchWindow = SearchWindow()) -> np.ndarray:
    """Template correlation for each of the ``N`` candidate rotations in ``window``.

    Column ``n`` is ``|FFT|`` of the received block de-rotated by candidate
    ``phi_n``; the score is its inner product with the template.
    """
    y = np.asarray(received, dtype=np.complex128)
    t = np.asarray(t, dtype=np.float64)
    if y.ndim != 1 or t.ndim != 1:
        raise ValueError("received and template must be 1-D")
    N = t.size
    if N < y.size:
        raise ValueError(f"template length {N} is shorter than the received block ({y.size})")
    k = np.arange(y.size)
    phis = window.candidates(N)
    columns = y[None, :] * np.exp(-1j * np.outer(phis, k))
    spectra = np.abs(np.fft.ifft(columns, n=N, axis=1)) * N
    return spectra @ t


def estimate_once(received, t, window: SearchWindow = SearchWindow()) -> tuple[float, int]:
    scores = correlation_scores(received, t, window)
    n_hat = int(np.argmax(scores))
    return window.phi_min + window.width * n_hat / len(scores), n_hat


def _next_window(phi_hat, half_width):
    return max(phi_hat - half_width, 0.0), min(phi_hat + half_width, TWO_PI)


def estimate_cfo(received, t, config: EstimatorConfig = EstimatorConfig(), trace=None) -> float:
    """Iterative CFO estimate in ``[0, 2 pi]``.

    Starts on ``[0, 2 pi)``; after iteration ``i`` the window becomes
    ``phi_hat +/- delta / i`` clamped to ``[0, 2 pi]``.  ``trace``, when a
    list, collects the window used at each iteration.
    """
    if len(t) != config.N:
        raise ValueError(f"template length {len(t)} does not match N={config.N}")
    config.check(len(received) - 1)
    lo, hi = 0.0, TWO_PI
    phi_hat = 0.0
    for it in range(1, config.n_iterations + 1):
        if trace is not None:
            trace.append((lo, hi))
        phi_hat, _ = estimate_once(received, t, SearchWindow(lo, hi))
        lo, hi = _next_window(phi_hat, config.delta / it)
    return phi_hat


class CfoEstimator:
    """Batched form of :func:`estimate_cfo` for a fixed constellation.

    Holds the template, the transform matrix and the candidate modulation
    table for the common unclamped window width.
    """

    def __init__(self, spec: ConstellationSpec, config: EstimatorConfig = EstimatorConfig()):
        config.check(spec.K)
        self.spec = spec
        self.config = config
        N, L = config.N, spec.K + 1
        self.t = template(spec, N)
        self._k = np.arange(L)
        self._n = np.arange(N)
        # positive-exponent N-point transform of a length-L sequence
        self._F = np.exp(2j * np.pi * np.outer(self._k, self._n) / N)
        # first iteration: column n is the spectrum circularly shifted by n
        idx = (self._n[:, None] + self._n[None, :]) % N
        self._circulant = self.t[idx]
        self._mod_cache: dict[float, np.ndarray] = {}

    def _modulation(self, width: float) -> np.ndarray:
        M = self._mod_cache.get(width)
        if M is None:
            M = np.exp(-1j * width * np.outer(self._n, self._k) / self.config.N)
            self._mod_cache[width] = M
        return M

    def scores(self, y: np.ndarray, lo: np.ndarray, width: np.ndarray) -> np.ndarray:
        """Correlation scores ``(B, N)`` for per-row windows ``[lo, lo + width)``."""
        N = self.config.N
        out = np.empty((y.shape[0], N))
        full = (lo == 0.0) & (width == TWO_PI)
        if full.any():
            spec = np.abs(y[full] @ self._F)
            out[full] = spec @ self._circulant
        rest = np.flatnonzero(~full)
        if rest.size:
            shifted = y[rest] * np.exp(-1j * lo[rest, None] * self._k[None, :])
            widths = width[rest]
            for w in np.unique(widths):
                sel = np.flatnonzero(widths == w)
                cols = shifted[sel, None, :] * self._modulation(float(w))[None, :, :]
                mag = np.abs(cols.reshape(-1, self._k.size) @ self._F).reshape(sel.size, N, N)
                out[rest[sel]] = mag @ self.t
        return out

    def estimate(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.complex128)
        B, N = y.shape[0], self.config.N
        lo = np.zeros(B)
        width = np.full(B, TWO_PI)
        phi_hat = np.zeros(B)
        for it in range(1, self.config.n_iterations + 1):
            n_hat = np.argmax(self.scores(y, lo, width), axis=1)
            phi_hat = lo + width * n_hat / N
            half = self.config.delta / it
            new_lo = np.maximum(phi_hat - half, 0.0)
            new_hi = np.minimum(phi_hat + half, TWO_PI)
            unclamped = (new_lo > 0.0) & (new_hi < TWO_PI)
            # unclamped windows share the nominal width so one table serves them
            width = np.where(unclamped, 2.0 * half, new_hi - new_lo)
            lo = new_lo
        return phi_hat
