"""Binary BCH codes of length 31 and a table-based cyclically permutable code.

Words are handled as Python ints (or numpy ``uint64`` arrays) in which bit
``j`` is the coefficient of ``x**j``.  The public bit-tuple form lists the
coefficients from ``x**30`` down to ``x**0``, so a systematic codeword reads
as the message followed by the parity bits, integer order equals
lexicographic order of the tuples, and ``np.roll(bits, -u)`` is a left
rotation of the integer by ``u``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import numpy as np

N_BITS = 31
_MASK = (1 << N_BITS) - 1
PRIMITIVE_POLY = 0b100101  # x^5 + x^2 + 1


class DecodeFailure(Exception):
    """The received word is not within the decoding radius of any codeword."""


class ConstructionFailure(RuntimeError):
    pass


# GF(2^5) arithmetic --------------------------------------------------------

_EXP = [0] * 62
_LOG = [0] * 32
_v = 1
for _i in range(31):
    _EXP[_i] = _v
    _LOG[_v] = _i
    _v <<= 1
    if _v & 0b100000:
        _v ^= PRIMITIVE_POLY
for _i in range(31, 62):
    _EXP[_i] = _EXP[_i - 31]


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(32)")
    return _EXP[(31 - _LOG[a]) % 31]


def gf_pow_alpha(e: int) -> int:
    return _EXP[e % 31]


def minimal_polynomial(i: int) -> int:
    """Minimal polynomial of ``alpha**i`` over GF(2), as a bit mask."""
    coset = []
    e = i % 31
    while e not in coset:
        coset.append(e)
        e = (2 * e) % 31
    poly = [1]  # GF(32) coefficients, ascending
    for e in coset:
        root = gf_pow_alpha(e)
        nxt = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] ^= c
            nxt[d] ^= gf_mul(c, root)
        poly = nxt
    if any(c not in (0, 1) for c in poly):
        raise ArithmeticError("minimal polynomial has non-binary coefficients")
    return sum(c << d for d, c in enumerate(poly))


def _clmul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length() - 1
    while a and a.bit_length() - 1 >= dm:
        a ^= m << (a.bit_length() - 1 - dm)
    return a


# BCH ------------------------------------------------------------------------


@dataclass(frozen=True)
class BchCode:
    """Narrow-sense binary BCH code of length 31 correcting ``t`` errors."""

    t: int
    n: int = N_BITS
    generator: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        if self.t not in (1, 2, 3):
            raise ValueError("supported error-correction capabilities are 1, 2 and 3")
        g, seen = 1, set()
        for i in range(1, 2 * self.t, 2):
            m = minimal_polynomial(i)
            if m not in seen:
                seen.add(m)
                g = _clmul(g, m)
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "k", self.n - (g.bit_length() - 1))

    @property
    def n_parity(self) -> int:
        return self.n - self.k

    def encode_int(self, m: int) -> int:
        shifted = m << self.n_parity
        return shifted ^ poly_mod(shifted, self.generator)

    def is_codeword(self, w: int) -> bool:
        return poly_mod(w, self.generator) == 0


BCH_31_16 = BchCode(t=3)
BCH_31_21 = BchCode(t=2)


def bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def bch_encode(code: BchCode, msg) -> np.ndarray:
    """Systematic encoding: message bits, then the parity remainder."""
    if len(msg) != code.k:
        raise ValueError(f"message must have {code.k} bits, got {len(msg)}")
    return int_to_bits(code.encode_int(bits_to_int(msg)), code.n)


def _syndromes(code: BchCode, w: int) -> list[int]:
    positions = [p for p in range(code.n) if (w >> p) & 1]
    syn = []
    for j in range(1, 2 * code.t + 1):
        s = 0
        for p in positions:
            s ^= gf_pow_alpha(j * p)
        syn.append(s)
    return syn


def _berlekamp_massey(syn: list[int]) -> list[int]:
    """Shortest error-locator polynomial (ascending GF(32) coefficients)."""
    C, B = [1], [1]
    L, m, b = 0, 1, 1
    for n_idx in range(len(syn)):
        d = syn[n_idx]
        for i in range(1, L + 1):
            if i < len(C):
                d ^= gf_mul(C[i], syn[n_idx - i])
        if d == 0:
            m += 1
            continue
        coef = gf_mul(d, gf_inv(b))
        T = list(C)
        shifted = [0] * m + [gf_mul(coef, c) for c in B]
        if len(shifted) > len(C):
            C = C + [0] * (len(shifted) - len(C))
        for i, c in enumerate(shifted):
            C[i] ^= c
        if 2 * L <= n_idx:
            L, B, b, m = n_idx + 1 - L, T, d, 1
        else:
            m += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    return C


def _chien(locator: list[int], n: int) -> list[int]:
    """Error positions ``p`` with ``locator(alpha**-p) == 0``."""
    found = []
    for p in range(n):
        x = gf_pow_alpha(-p)
        acc, xp = 0, 1
        for c in locator:
            acc ^= gf_mul(c, xp)
            xp = gf_mul(xp, x)
        if acc == 0:
            found.append(p)
    return found


def bch_correct_int(code: BchCode, w: int) -> int:
    """Nearest codeword within distance ``t`` of ``w``, else :class:`DecodeFailure`."""
    syn = _syndromes(code, w)
    if not any(syn):
        return w
    locator = _berlekamp_massey(syn)
    degree = len(locator) - 1
    if degree > code.t:
        raise DecodeFailure("error locator degree exceeds t")
    positions = _chien(locator, code.n)
    if len(positions) != degree:
        raise DecodeFailure("error locator does not split over the code positions")
    for p in positions:
        w ^= 1 << p
    if not code.is_codeword(w):
        raise DecodeFailure("correction did not yield a codeword")
    return w


def bch_decode(code: BchCode, word) -> np.ndarray:
    """Message bits of the codeword within distance ``t`` of ``word``.

    Syndromes over GF(32), Berlekamp-Massey locator, Chien search.  Raises
    :class:`DecodeFailure` when no such codeword exists.
    """
    if len(word) != code.n:
        raise ValueError(f"word must have {code.n} bits, got {len(word)}")
    corrected = bch_correct_int(code, bits_to_int(word))
    return int_to_bits(corrected >> code.n_parity, code.k)


class SyndromeTable:
    """Vectorized bounded-distance decoder using a coset-leader table.

    Equivalent to :func:`bch_correct_int` (same corrections, same failures);
    used by the simulator on whole batches.
    """

    def __init__(self, code: BchCode):
        self.code = code
        self._bit_rem = np.array([poly_mod(1 << j, code.generator) for j in range(code.n)], dtype=np.uint64)
        table = np.full(1 << code.n_parity, -1, dtype=np.int64)
        for weight in range(code.t + 1):
            for pos in combinations(range(code.n), weight):
                e = sum(1 << p for p in pos)
                s = poly_mod(e, code.generator)
                if table[s] != -1:
                    raise ConstructionFailure("syndromes of correctable patterns collide")
                table[s] = e
        self._table = table

    def syndrome(self, words: np.ndarray) -> np.ndarray:
        w = np.asarray(words, dtype=np.uint64)
        s = np.zeros_like(w)
        for j in range(self.code.n):
            s ^= ((w >> np.uint64(j)) & np.uint64(1)) * self._bit_rem[j]
        return s

    def correct(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Corrected words and a success mask."""
        w = np.asarray(words, dtype=np.uint64)
        e = self._table[self.syndrome(w).astype(np.int64)]
        ok = e >= 0
        return np.where(ok, w ^ e.clip(min=0).astype(np.uint64), w), ok


@lru_cache(maxsize=None)
def syndrome_table(t: int) -> SyndromeTable:
    return SyndromeTable(BchCode(t=t))


def bits_to_ints(bits: np.ndarray) -> np.ndarray:
    """Rows of a ``(B, width)`` bit array to integers, first column most significant."""
    bits = np.asarray(bits, dtype=np.uint64)
    width = bits.shape[1]
    weights = np.uint64(1) << np.arange(width - 1, -1, -1, dtype=np.uint64)
    return (bits * weights).sum(axis=1, dtype=np.uint64)


def ints_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    v = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((v[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)


def bch_encode_batch(code: BchCode, msgs: np.ndarray) -> np.ndarray:
    m = bits_to_ints(msgs) << np.uint64(code.n_parity)
    rem = syndrome_table(code.t).syndrome(m)
    return ints_to_bits(m ^ rem, code.n)


def bch_decode_batch(code: BchCode, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Decoded message bits and success mask.  Failed rows keep their systematic part."""
    corrected, ok = syndrome_table(code.t).correct(bits_to_ints(words))
    return ints_to_bits(corrected >> np.uint64(code.n_parity), code.k), ok


# Cyclically permutable code ---------------------------------------------------


def rotl(w, u: int):
    """Rotate 31-bit words left by ``u`` (same as ``np.roll(bits, -u)``)."""
    u %= N_BITS
    if isinstance(w, np.ndarray):
        w = w.astype(np.uint64)
        if u == 0:
            return w.copy()
        mask = np.uint64(_MASK)
        return ((w << np.uint64(u)) | (w >> np.uint64(N_BITS - u))) & mask
    return ((w << u) | (w >> (N_BITS - u))) & _MASK if u else w


def min_rotation(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smallest rotation of each word and the left-rotation amount reaching it."""
    w = np.asarray(w, dtype=np.uint64)
    best = w.copy()
    amount = np.zeros(w.shape, dtype=np.int64)
    for u in range(1, N_BITS):
        r = rotl(w, u)
        better = r < best
        best = np.where(better, r, best)
        amount = np.where(better, u, amount)
    return best, amount


MESSAGE_BITS = 16
N_MESSAGES = 1 << MESSAGE_BITS
_MAGIC = b"CPC1"


@dataclass(frozen=True)
class CpcCodebook:
    """Message ``m`` maps to ``representatives[m]``, a full-period (31,21) BCH codeword."""

    representatives: np.ndarray
    outer: BchCode = BCH_31_21

    def save(self, path) -> None:
        path = Path(path)
        with path.open("wb") as fh:
            fh.write(_MAGIC)
            fh.write(self.representatives.astype("<u4").tobytes())

    @classmethod
    def load(cls, path) -> "CpcCodebook":
        data = Path(path).read_bytes()
        if data[:4] != _MAGIC or len(data) != 4 + 4 * N_MESSAGES:
            raise ValueError(f"{path}: not a CPC1 codebook file")
        reps = np.frombuffer(data[4:], dtype="<u4").astype(np.uint64)
        return cls(representatives=reps)


def cpc_build() -> CpcCodebook:
    """Enumerate the (31,21) code, keep full-period cyclic classes, take the first 2**16.

    Each class is represented by its smallest member; classes are ordered by
    that representative.
    """
    code = BCH_31_21
    msgs = np.arange(1 << code.k, dtype=np.uint64) << np.uint64(code.n_parity)
    words = msgs ^ syndrome_table(code.t).syndrome(msgs)
    full = (words != 0) & (words != np.uint64(_MASK))
    canon, _ = min_rotation(words[full])
    reps = np.unique(canon)
    if reps.size < N_MESSAGES:
        raise ConstructionFailure(f"only {reps.size} full-period classes, need {N_MESSAGES}")
    return CpcCodebook(representatives=reps[:N_MESSAGES].copy())


@lru_cache(maxsize=1)
def default_codebook() -> CpcCodebook:
    return cpc_build()


def cpc_encode(book: CpcCodebook, msg) -> np.ndarray:
    m = bits_to_int(msg) if not isinstance(msg, (int, np.integer)) else int(msg)
    if not 0 <= m < N_MESSAGES:
        raise ValueError(f"message index {m} out of range")
    return int_to_bits(int(book.representatives[m]), N_BITS)


def cpc_decode_batch(book: CpcCodebook, words: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Message indices, shifts and success mask for ``(B, 31)`` received bits.

    Bounded-distance decoding commutes with cyclic shifts for a cyclic code,
    so correcting once and canonicalizing the result gives the same answer as
    trying every shift.
    """
    corrected, ok = syndrome_table(book.outer.t).correct(bits_to_ints(words))
    canon, amount = min_rotation(corrected)
    idx = np.searchsorted(book.representatives, canon)
    idx = np.minimum(idx, N_MESSAGES - 1)
    ok &= book.representatives[idx] == canon
    # corrected = rotl(rep, u) and rotl(corrected, amount) = rep
    shift = (-amount) % N_BITS
    return np.where(ok, idx, -1), np.where(ok, shift, -1), ok


def cpc_decode(book: CpcCodebook, word) -> tuple[np.ndarray, int]:
    """Message bits and left shift ``u`` with ``word ~ np.roll(cpc_encode(m), -u)``.

    Tries every cyclic shift of ``word`` against the outer BCH decoder; raises
    :class:`DecodeFailure` when none lands in a tabulated class.
    """
    if len(word) != N_BITS:
        raise ValueError(f"word must have {N_BITS} bits, got {len(word)}")
    w = bits_to_int(word)
    for s in range(N_BITS):
        try:
            c = bch_correct_int(book.outer, rotl(w, s))
        except DecodeFailure:
            continue
        canon, amount = min_rotation(np.array([c], dtype=np.uint64))
        i = int(np.searchsorted(book.representatives, canon[0]))
        if i < N_MESSAGES and book.representatives[i] == canon[0]:
            u = (-(s + int(amount[0]))) % N_BITS
            return int_to_bits(i, MESSAGE_BITS), u
    raise DecodeFailure("no cyclic shift decodes to a tabulated class")
