"""Counter-based random streams for Monte Carlo trials.

Each trial owns a fixed-size slice of a Philox stream keyed by
``(seed, point)``: trial ``i`` reads uniforms from counter ``i * S / 4``.
What a trial sees therefore depends only on ``(seed, point, i)``, never on
how trials are grouped into chunks or spread over workers.
"""

from __future__ import annotations

import math

import numpy as np


def _pad4(n: int) -> int:
    return (n + 3) // 4 * 4


class TrialStreams:
    def __init__(self, seed: int, point: int, n_msg_bits: int, seq_len: int):
        key = np.random.SeedSequence([int(seed) & (2**64 - 1), int(point)]).generate_state(2, np.uint64)
        self._key = int(key[0]) | (int(key[1]) << 64)
        self.n_msg_bits = n_msg_bits
        self.seq_len = seq_len
        # bits, one CFO uniform, then Box-Muller pairs for h and the noise
        self._n_pairs = seq_len + 1
        self.slots = _pad4(n_msg_bits + 1 + 2 * self._n_pairs)

    def uniforms(self, start: int, count: int) -> np.ndarray:
        counter = start * self.slots // 4
        gen = np.random.Generator(np.random.Philox(key=self._key, counter=counter))
        return gen.random(count * self.slots).reshape(count, self.slots)

    def draw(self, start: int, count: int) -> dict[str, np.ndarray]:
        """Random inputs for trials ``start .. start+count-1``.

        Returns message bits, a uniform CFO angle on ``[0, 2 pi)``, a unit
        complex Gaussian ``h`` and unit-variance complex noise of length
        ``seq_len`` (scale by ``sqrt(N0)`` before use).
        """
        u = self.uniforms(start, count)
        B = self.n_msg_bits
        bits = (u[:, :B] < 0.5).astype(np.uint8)
        phi = 2.0 * math.pi * u[:, B]
        m = self._n_pairs
        u1 = u[:, B + 1 : B + 1 + m]
        u2 = u[:, B + 1 + m : B + 1 + 2 * m]
        r = np.sqrt(-2.0 * np.log1p(-u1))
        theta = 2.0 * math.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)], axis=1)
        L = self.seq_len
        h = (z[:, 0] + 1j * z[:, 1]) * math.sqrt(0.5)
        noise = (z[:, 2 : 2 + L] + 1j * z[:, 2 + L : 2 + 2 * L]) * math.sqrt(0.5)
        return {"bits": bits, "phi": phi, "h": h, "noise": noise}
