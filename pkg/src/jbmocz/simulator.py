"""Monte Carlo BER/BLER harness for coded and uncoded BMOCZ links."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fec
from .cfo import CfoEstimator, EstimatorConfig
from .channel import CHANNELS, CfoMode, NoiseConfig, apply_cfo, ebn0_to_n0
from .codec import dizet_decode_batch, encode_batch, fractional_dizet_batch
from .constellation import ConstellationSpec, default_radius
from .streams import TrialStreams

log = logging.getLogger(__name__)

SCHEMES = ("huffman", "jutted")
CODES = ("none", "bch", "acpc")
ESTIMATORS = ("none", "fourier", "fractional")
CODED_K = 31
CODED_B = 16
# trials per vectorized batch; fixed so results never depend on worker count
CHUNK = 2048

CSV_HEADER = [
    "scheme", "K", "zeta", "R", "code", "channel", "cfo", "estimator",
    "ebn0_db", "trials", "bits_sent", "bit_errors", "block_errors", "ber", "bler", "seed",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    scheme: str = "jutted"
    K: int = 32
    zeta: float = 1.15
    R: float | None = None
    code: str = "none"
    channel: str = "awgn"
    cfo: CfoMode = CfoMode()
    estimator: str = "none"
    estimator_config: EstimatorConfig = EstimatorConfig()
    Q: int = 200
    ebn0_grid: tuple[float, ...] = ()
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.cfo, str):
            object.__setattr__(self, "cfo", CfoMode.parse(self.cfo))
        object.__setattr__(self, "ebn0_grid", tuple(float(v) for v in self.ebn0_grid))
        if self.R is None and self.K >= 2:
            object.__setattr__(self, "R", default_radius(self.K))
        self.validate()

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.code not in CODES:
            raise ConfigError(f"unknown code {self.code!r}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"unknown channel {self.channel!r}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if self.K < 2:
            raise ConfigError("K must be at least 2")
        if not self.R > 1:
            raise ConfigError("R must exceed 1")
        if self.scheme == "jutted" and not self.zeta > 1:
            raise ConfigError("jutted scheme requires zeta > 1")
        if self.code == "acpc" and (self.scheme != "huffman" or self.K != CODED_K):
            raise ConfigError("acpc requires scheme=huffman and K=31")
        if self.code == "bch" and self.K != CODED_K:
            raise ConfigError("bch requires K=31")
        if self.estimator == "fractional" and self.scheme != "huffman":
            raise ConfigError("the fractional estimator requires scheme=huffman")
        if self.estimator == "fourier" and self.estimator_config.N < self.K + 1:
            raise ConfigError(f"grid size N must be at least K+1={self.K + 1}")
        if self.Q < 1:
            raise ConfigError("oversampling factor must be >= 1")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")

    @property
    def bits_per_block(self) -> int:
        return CODED_B if self.code != "none" else self.K

    @property
    def constellation(self) -> ConstellationSpec:
        zeta = self.zeta if self.scheme == "jutted" else 1.0
        return ConstellationSpec(K=self.K, R=self.R, zeta=zeta)

    @property
    def effective_zeta(self) -> float:
        return self.constellation.zeta


@dataclass
class PointResult:
    ebn0_db: float
    trials: int
    bits_sent: int
    bit_errors: int
    blocks_sent: int
    block_errors: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @property
    def bler(self) -> float:
        return self.block_errors / self.blocks_sent if self.blocks_sent else 0.0


class _Link:
    """Per-point state shared by all chunks of a run."""

    def __init__(self, cfg: SimConfig, ebn0_db: float, point: int):
        self.cfg = cfg
        self.spec = cfg.constellation
        self.B = cfg.bits_per_block
        self.n0 = ebn0_to_n0(NoiseConfig(ebn0_db, self.B, cfg.K + 1))
        self.streams = TrialStreams(cfg.seed, point, self.B, cfg.K + 1)
        self.estimator = CfoEstimator(self.spec, cfg.estimator_config) if cfg.estimator == "fourier" else None
        self.book = fec.default_codebook() if cfg.code == "acpc" else None

    def run_chunk(self, start: int, count: int) -> tuple[int, int]:
        cfg = self.cfg
        d = self.streams.draw(start, count)
        msg = d["bits"]
        if cfg.code == "bch":
            tx_bits = fec.bch_encode_batch(fec.BCH_31_16, msg)
        elif cfg.code == "acpc":
            reps = self.book.representatives[fec.bits_to_ints(msg).astype(np.int64)]
            tx_bits = fec.ints_to_bits(reps, fec.N_BITS)
        else:
            tx_bits = msg
        x = encode_batch(self.spec, tx_bits)
        h = d["h"][:, None] if cfg.channel == "rayleigh" else 1.0
        y = x * h
        if self.n0 > 0:
            y = y + d["noise"] * math.sqrt(self.n0)
        if cfg.cfo.kind == "uniform":
            y = apply_cfo(y, d["phi"])
        elif cfg.cfo.kind == "fixed":
            y = apply_cfo(y, cfg.cfo.phi)

        if cfg.estimator == "fourier":
            phi_hat = self.estimator.estimate(y)
            hard = dizet_decode_batch(self.spec, derotate_rows(y, phi_hat))
        elif cfg.estimator == "fractional":
            _, hard = fractional_dizet_batch(self.spec, y, cfg.Q)
        else:
            hard = dizet_decode_batch(self.spec, y)

        failed = np.zeros(count, dtype=bool)
        if cfg.code == "bch":
            msg_hat, _ = fec.bch_decode_batch(fec.BCH_31_16, hard)
        elif cfg.code == "acpc":
            idx, _, ok = fec.cpc_decode_batch(self.book, hard)
            msg_hat = fec.ints_to_bits(np.maximum(idx, 0), fec.MESSAGE_BITS)
            failed = ~ok
        else:
            msg_hat = hard
        wrong = (msg_hat != msg).sum(axis=1)
        wrong[failed] = self.B // 2
        block_err = (wrong > 0) | failed
        return int(wrong.sum()), int(block_err.sum())


def derotate_rows(y: np.ndarray, phi_hat: np.ndarray) -> np.ndarray:
    return y * np.exp(-1j * phi_hat[:, None] * np.arange(y.shape[1])[None, :])


def run_point(cfg: SimConfig, ebn0_db: float, point: int = 0, workers: int = 1) -> PointResult:
    """Simulate ``cfg.trials`` blocks at one Eb/N0 value."""
    cfg.validate()
    t0 = time.perf_counter()
    link = _Link(cfg, ebn0_db, point)
    starts = range(0, cfg.trials, CHUNK)
    jobs = [(s, min(CHUNK, cfg.trials - s)) for s in starts]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: link.run_chunk(*j), jobs))
    else:
        parts = [link.run_chunk(*j) for j in jobs]
    bit_errors = sum(p[0] for p in parts)
    block_errors = sum(p[1] for p in parts)
    res = PointResult(
        ebn0_db=float(ebn0_db),
        trials=cfg.trials,
        bits_sent=cfg.trials * link.B,
        bit_errors=bit_errors,
        blocks_sent=cfg.trials,
        block_errors=block_errors,
        wall_time=time.perf_counter() - t0,
    )
    log.info("Eb/N0=%.2f dB  BER=%.3e  BLER=%.3e  (%.1fs)", ebn0_db, res.ber, res.bler, res.wall_time)
    return res


def csv_row(cfg: SimConfig, res: PointResult) -> list[str]:
    g = lambda v: f"{v:.6g}"  # noqa: E731
    return [
        cfg.scheme, str(cfg.K), g(cfg.effective_zeta), g(cfg.R), cfg.code, cfg.channel,
        str(cfg.cfo), cfg.estimator, g(res.ebn0_db), str(res.trials), str(res.bits_sent),
        str(res.bit_errors), str(res.block_errors), g(res.ber), g(res.bler), str(cfg.seed),
    ]


def _row_dict(cfg: SimConfig, res: PointResult) -> dict:
    row = dict(zip(CSV_HEADER, csv_row(cfg, res)))
    row.update(
        K=cfg.K, zeta=cfg.effective_zeta, R=cfg.R, ebn0_db=res.ebn0_db, trials=res.trials,
        bits_sent=res.bits_sent, bit_errors=res.bit_errors, block_errors=res.block_errors,
        ber=res.ber, bler=res.bler, seed=cfg.seed, blocks_sent=res.blocks_sent, wall_time=res.wall_time,
    )
    return row


def run_sweep(cfg: SimConfig, out=None, fmt: str = "csv", workers: int = 1) -> list[PointResult]:
    """Run every grid point; ``out`` (path or text stream) receives rows as they finish."""
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    cfg.validate()
    owned = None
    if isinstance(out, (str, Path)):
        owned = open(out, "w", newline="", encoding="utf-8")
        stream = owned
    else:
        stream = out
    results: list[PointResult] = []
    try:
        writer = None
        if stream is not None and fmt == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            stream.flush()
        for point, ebn0 in enumerate(cfg.ebn0_grid):
            res = run_point(cfg, ebn0, point=point, workers=workers)
            results.append(res)
            if writer is not None:
                writer.writerow(csv_row(cfg, res))
                stream.flush()
        if stream is not None and fmt == "json":
            json.dump([_row_dict(cfg, r) for r in results], stream, indent=2)
            stream.write("\n")
    finally:
        if owned is not None:
            owned.close()
    return results


def sweep_csv(cfg: SimConfig, workers: int = 1) -> str:
    buf = io.StringIO()
    run_sweep(cfg, buf, workers=workers)
    return buf.getvalue()


@dataclass
class ZetaSweep:
    rows: list[tuple[float, PointResult]]

    @property
    def best_zeta(self) -> float:
        return min(self.rows, key=lambda r: (r[1].ber, r[0]))[0]


def sweep_zeta(cfg: SimConfig, zeta_grid, ebn0_db: float, workers: int = 1) -> ZetaSweep:
    """BER at fixed Eb/N0 for each asymmetry factor; ``zeta == 1`` runs plain Huffman."""
    if cfg.scheme != "jutted":
        raise ConfigError("sweep_zeta requires scheme=jutted")
    rows = []
    for z in zeta_grid:
        c = replace(cfg, zeta=float(z), scheme="jutted" if z > 1 else "huffman")
        rows.append((float(z), run_point(c, ebn0_db, point=0, workers=workers)))
    return ZetaSweep(rows)


def ebn0_at_ber(ebn0: np.ndarray, ber: np.ndarray, target: float) -> float:
    """First crossing of ``target`` by log-linear interpolation; ``nan`` if never reached."""
    ebn0 = np.asarray(ebn0, dtype=float)
    ber = np.asarray(ber, dtype=float)
    for i in range(1, len(ber)):
        if ber[i - 1] >= target > ber[i]:
            if ber[i] <= 0:
                return float(ebn0[i])
            a, b = math.log10(ber[i - 1]), math.log10(ber[i])
            frac = (a - math.log10(target)) / (a - b)
            return float(ebn0[i - 1] + frac * (ebn0[i] - ebn0[i - 1]))
    return math.nan
