"""Zero-grid geometry for Huffman BMOCZ and jutted BMOCZ."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


def default_radius(K: int) -> float:
    """Base radius ``sqrt(1 + sin(pi / K))`` used for both constellations."""
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    return math.sqrt(1.0 + math.sin(math.pi / K))


@dataclass(frozen=True)
class ConstellationSpec:
    """Zero positions for ``K`` bits.

    Pair ``k`` sits at phase ``2 pi k / K``; its outer radius is ``zeta * R``
    for ``k == 0`` and ``R`` otherwise.  ``zeta == 1`` is Huffman BMOCZ.
    """

    K: int
    R: float | None = None
    zeta: float = 1.0

    def __post_init__(self):
        if self.K < 2:
            raise ValueError(f"K must be at least 2, got {self.K}")
        if self.R is None:
            object.__setattr__(self, "R", default_radius(self.K))
        if not self.R > 1.0:
            raise ValueError(f"R must exceed 1, got {self.R}")
        if not self.zeta >= 1.0:
            raise ValueError(f"zeta must be >= 1, got {self.zeta}")

    @classmethod
    def huffman(cls, K: int, R: float | None = None) -> "ConstellationSpec":
        return cls(K=K, R=R, zeta=1.0)

    @classmethod
    def jutted(cls, K: int, zeta: float = 1.15, R: float | None = None) -> "ConstellationSpec":
        return cls(K=K, R=R, zeta=zeta)

    @property
    def is_huffman(self) -> bool:
        return self.zeta == 1.0

    @property
    def base_angle(self) -> float:
        return 2.0 * math.pi / self.K

    @cached_property
    def radii(self) -> np.ndarray:
        r = np.full(self.K, float(self.R))
        r[0] = self.zeta * self.R
        return r

    @cached_property
    def phases(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.K) / self.K

    @cached_property
    def unit_phasors(self) -> np.ndarray:
        # exact axis points so that e.g. k = K/2 lands on the real axis
        ph = np.exp(1j * self.phases)
        if self.K % 4 == 0:
            q = self.K // 4
            ph[[0, q, 2 * q, 3 * q]] = [1, 1j, -1, -1j]
        elif self.K % 2 == 0:
            ph[[0, self.K // 2]] = [1, -1]
        return ph

    @cached_property
    def outer_zeros(self) -> np.ndarray:
        return self.radii * self.unit_phasors

    @cached_property
    def inner_zeros(self) -> np.ndarray:
        return self.unit_phasors / self.radii

    @cached_property
    def expansion_order(self) -> np.ndarray:
        """Pair indices in bit-reversed order.

        Expanding the zeros in this order keeps every partial product's zeros
        spread around the circle, so intermediate coefficients stay small.
        In natural order they grow like a central binomial coefficient and
        cost about eight digits at K = 32.
        """
        width = max(1, (self.K - 1).bit_length())
        rev = [int(format(k, f"0{width}b")[::-1], 2) for k in range(self.K)]
        return np.argsort(rev, kind="stable")

    @cached_property
    def dizet_weights(self) -> np.ndarray:
        """Per-pair scaling ``r_k**K`` applied to the inner evaluation."""
        return self.radii ** self.K


def zero_pair(spec: ConstellationSpec, k: int) -> tuple[complex, complex]:
    """Outer and inner zero of pair ``k``; the two are conjugate-reciprocal."""
    if not 0 <= k < spec.K:
        raise IndexError(f"pair index {k} outside [0, {spec.K})")
    return complex(spec.outer_zeros[k]), complex(spec.inner_zeros[k])


def _check_bits(spec: ConstellationSpec, bits) -> np.ndarray:
    b = np.asarray(bits)
    if b.shape[-1] != spec.K:
        raise ValueError(f"expected {spec.K} bits, got {b.shape[-1]}")
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("bits must be 0 or 1")
    return b.astype(bool)


def map_bits(spec: ConstellationSpec, bits) -> np.ndarray:
    """Zero pattern for a message: outer zero for a 1 bit, inner zero for a 0."""
    b = _check_bits(spec, bits)
    if b.ndim != 1:
        raise ValueError("map_bits takes a single message; use map_bits_batch")
    return np.where(b, spec.outer_zeros, spec.inner_zeros)


def map_bits_batch(spec: ConstellationSpec, bits: np.ndarray) -> np.ndarray:
    b = _check_bits(spec, bits)
    return np.where(b, spec.outer_zeros[None, :], spec.inner_zeros[None, :])
