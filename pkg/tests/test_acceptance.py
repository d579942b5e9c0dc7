"""End-to-end acceptance checks.

Each test prints exactly one ``[PASS]`` / ``[FAIL]`` line (visible even under
output capture) and then asserts.  The Monte Carlo criteria take tens of
minutes on one core.
"""

from __future__ import annotations

import math
import os
from functools import lru_cache
from itertools import combinations

import numpy as np
import pytest

from jbmocz.cfo import CfoEstimator, correlation_scores, derotate, estimate_cfo, estimate_once, template
from jbmocz.channel import ChannelDraw, apply_cfo, transmit
from jbmocz.codec import dizet_decode, dizet_decode_batch, encode, encode_batch
from jbmocz.constellation import ConstellationSpec
from jbmocz.fec import (
    BCH_31_16,
    BCH_31_21,
    N_MESSAGES,
    bch_decode,
    bch_decode_batch,
    bch_encode,
    bits_to_int,
    cpc_decode,
    cpc_decode_batch,
    cpc_encode,
    default_codebook,
    ints_to_bits,
)
from jbmocz.polyzeros import aacf, eval_poly, spectrum_mag
from jbmocz.simulator import SimConfig, ebn0_at_ber, run_point, run_sweep, sweep_csv, sweep_zeta

WORKERS = os.cpu_count() or 1
BLOCKS = 200_000
TARGET_BER = 1e-3

# Fading BER falls roughly as 1/SNR, so 1e-3 is only crossed near 30 dB;
# the fading grids extend past 20 dB to reach it.
GRID_AWGN = tuple(range(0, 21))
GRID_FADING = tuple(range(0, 35))
GRID_FADING_CFO = tuple(range(10, 37))
GRID_CODED = tuple(range(6, 41))


def report(capsys, label: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")


def gap_ok(gap: float, target: float, tol: float) -> bool:
    return not math.isnan(gap) and abs(gap - target) <= tol


@lru_cache(maxsize=None)
def curve(**kwargs):
    cfg = SimConfig(trials=BLOCKS, seed=2024, **kwargs)
    res = run_sweep(cfg, workers=WORKERS)
    return (
        np.array([r.ebn0_db for r in res]),
        np.array([r.ber for r in res]),
        np.array([r.bler for r in res]),
    )


def crossing(c, target=TARGET_BER, which=1):
    return ebn0_at_ber(c[0], c[which], target)


# 1 -------------------------------------------------------------------------


def test_criterion_1_example_chain(capsys):
    spec = ConstellationSpec(K=2, R=1.5, zeta=1.2)
    checks = {}
    t = template(spec, 4)
    checks["template"] = np.allclose(t, [1.20, 2.22, 0.84, 2.22], atol=0.01)
    x = encode(spec, (1, 0))
    checks["transmit"] = np.allclose(x, [1.08, 1.02, -0.90], atol=0.01)
    y_tilde = transmit(x, ChannelDraw(math.sqrt(0.5) * (0.6 + 1j), math.pi, np.zeros(3)))
    checks["y_tilde"] = np.allclose(y_tilde, [0.46 + 0.76j, -0.43 - 0.72j, -0.38 - 0.63j], atol=0.01)
    scores = correlation_scores(y_tilde, t)
    checks["scores"] = np.allclose(scores, [9.79, 7.45, 9.90, 7.45], atol=0.05)
    phi_hat, n_hat = estimate_once(y_tilde, t)
    checks["argmax"] = n_hat == 2 and abs(phi_hat - math.pi) < 1e-12
    y_hat = derotate(y_tilde, phi_hat)
    checks["y_hat"] = np.allclose(y_hat, [0.46 + 0.76j, 0.43 + 0.72j, -0.38 - 0.63j], atol=0.01)
    zero_evals = [abs(eval_poly(y_hat, 1.8)), abs(eval_poly(y_hat, -1 / 1.5))]
    checks["zero evaluations"] = max(zero_evals) <= 0.02
    checks["bits"] = dizet_decode(spec, y_hat).tolist() == [1, 0]
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report(capsys, "criterion 1 (example chain)", ok, "all stages match" if ok else f"mismatch in {failed}")
    assert ok


# 2 -------------------------------------------------------------------------


def test_criterion_2_property_suite(capsys):
    rng = np.random.default_rng(2)
    checks = {}

    worst = 0.0
    for K in (8, 16, 32):
        for zeta in (1.0, 1.15):
            spec = ConstellationSpec(K=K, zeta=zeta)
            for _ in range(100):
                b1, b2 = rng.integers(0, 2, (2, K))
                d = np.abs(aacf(encode(spec, b1)) - aacf(encode(spec, b2))).max() / (K + 1)
                worst = max(worst, d)
    checks["aacf identity"] = worst <= 1e-9

    ok_t = True
    for zeta in (1.0, 1.15):
        spec = ConstellationSpec(K=32, zeta=zeta)
        t = template(spec, 64)
        for _ in range(50):
            ok_t &= np.allclose(spectrum_mag(encode(spec, rng.integers(0, 2, 32)), 64), t, rtol=1e-9)
    checks["template independence"] = bool(ok_t)

    t_h = template(ConstellationSpec(K=16, R=1.093), 256)
    periodic = np.allclose(t_h, np.roll(t_h, 16), rtol=1e-9)
    broken = all(
        np.abs(t_j - np.roll(t_j, 16)).max() > 0.1
        for t_j in (template(ConstellationSpec(K=16, R=1.093, zeta=z), 256) for z in (1.1, 1.2))
    )
    checks["template periodicity"] = periodic and broken

    spec = ConstellationSpec(K=16, zeta=1.15)
    scale_ok = True
    for _ in range(100):
        y = rng.standard_normal(17) + 1j * rng.standard_normal(17)
        c = complex(*rng.standard_normal(2)) * 10 ** rng.uniform(-3, 3)
        scale_ok &= np.array_equal(dizet_decode(spec, c * y), dizet_decode(spec, y))
    checks["scale invariance"] = bool(scale_ok)

    y = rng.standard_normal((100, 33)) + 1j * rng.standard_normal((100, 33))
    phi = rng.uniform(0, 2 * np.pi, 100)
    back = np.array([derotate(row, p) for row, p in zip(apply_cfo(y, phi), phi)])
    checks["derotate identity"] = np.abs(back - y).max() <= 1e-12

    pars = True
    for N in (33, 64, 128):
        x = encode(ConstellationSpec(K=32, zeta=1.15), rng.integers(0, 2, 32))
        pars &= math.isclose(np.sum(spectrum_mag(x, N) ** 2), N * 33, rel_tol=1e-12)
    checks["parseval"] = bool(pars)

    errors = 0
    for K in (2, 8, 16, 32):
        for zeta in (1.0, 1.15):
            spec = ConstellationSpec(K=K, zeta=zeta)
            bits = rng.integers(0, 2, (10_000, K)).astype(np.uint8)
            h = (rng.standard_normal(10_000) + 1j * rng.standard_normal(10_000)) / math.sqrt(2)
            errors += np.count_nonzero(dizet_decode_batch(spec, encode_batch(spec, bits) * h[:, None]) != bits)
    checks["noiseless round trips"] = errors == 0

    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    report(capsys, "criterion 2 (properties)", ok,
           f"worst AACF deviation {worst:.2e}(K+1), round-trip errors {errors}" + ("" if ok else f"; failed {failed}"))
    assert ok


# 3 -------------------------------------------------------------------------


def grid_search_oracle(y, t, M=1_000_000):
    """Argmax of the correlation objective over ``M`` equispaced angles.

    ``|Y|`` is sampled once on an ``M``-point grid; the spectrum of the
    derotated sequence at bin ``m`` is then ``|Y|`` at ``M m / N - i``.
    """
    N = len(t)
    if M % N:
        raise ValueError("M must be a multiple of N")
    step = M // N
    A = np.abs(np.fft.ifft(y, n=M) * M)
    i = np.arange(M)
    c = np.zeros(M)
    for m in range(N):
        c += t[m] * A[(m * step - i) % M]
    return 2 * np.pi * int(np.argmax(c)) / M


def test_criterion_3_cfo_accuracy(capsys):
    spec = ConstellationSpec(K=32, zeta=1.15)
    est = CfoEstimator(spec)
    rng = np.random.default_rng(3)
    n = 1000
    bits = rng.integers(0, 2, (n, 32))
    h = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    phi = rng.uniform(0.1, 2 * np.pi - 0.1, n)
    y = apply_cfo(encode_batch(spec, bits) * h[:, None], phi)
    batch_err = np.abs(est.estimate(y) - phi).max()
    scalar_err = max(abs(estimate_cfo(row, est.t) - p) for row, p in zip(y, phi))
    bound = 2 * (2 * 0.2 / 2) / 64
    # the objective itself peaks at the true angle, so the bound is the estimator's bin width
    oracle_err = max(abs(grid_search_oracle(y[i], est.t) - phi[i]) for i in range(20))
    ok = batch_err <= 0.0063 and scalar_err <= 0.0063 and oracle_err <= 2 * np.pi / 1_000_000
    report(capsys, "criterion 3 (CFO accuracy)", ok,
           f"max error {max(batch_err, scalar_err):.5f} rad (bound 0.0063 = {bound:.5f}); "
           f"grid-search oracle peak offset {oracle_err:.1e} rad")
    assert ok


# 4 -------------------------------------------------------------------------


def test_criterion_4_fec(capsys):
    rng = np.random.default_rng(4)
    details = []
    ok = True
    for code in (BCH_31_16, BCH_31_21):
        patterns = [sum(1 << p for p in pos) for w in range(code.t + 1) for pos in combinations(range(31), w)]
        patterns = np.array(patterns, dtype=np.uint64)
        exact = [p for p in patterns if bin(int(p)).count("1") == code.t]
        bad_table = bad_bm = 0
        for m in rng.integers(0, 2, (50, code.k)):
            c = bch_encode(code, m)
            dec, good = bch_decode_batch(code, ints_to_bits(np.uint64(bits_to_int(c)) ^ patterns, 31))
            bad_table += int((~good).sum() + (dec != m).any(axis=1).sum())
            for p in exact:
                w = c ^ ints_to_bits(np.array([p]), 31)[0]
                bad_bm += int(not np.array_equal(bch_decode(code, w), m))
        ok &= bad_table == 0 and bad_bm == 0
        details.append(f"({code.n},{code.k}) {len(exact)} weight-{code.t} patterns x50: {bad_table + bad_bm} failures")

    book = default_codebook()
    cases = 1000
    msgs = rng.integers(0, N_MESSAGES, cases)
    words, want_m, want_u = [], [], []
    for m in msgs:
        base = cpc_encode(book, int(m))
        for u in range(31):
            w = np.roll(base, -u)
            w[rng.choice(31, int(rng.integers(0, 3)), replace=False)] ^= 1
            words.append(w)
            want_m.append(m)
            want_u.append(u)
    words = np.array(words)
    idx, shift, good = cpc_decode_batch(book, words)
    cpc_bad = int((~good | (idx != want_m) | (shift != want_u)).sum())
    for i in range(0, len(words), 97):
        msg, s = cpc_decode(book, words[i])
        cpc_bad += int((bits_to_int(msg), s) != (want_m[i], want_u[i]))
    ok &= cpc_bad == 0
    details.append(f"CPC {cases} cases x 31 shifts: {cpc_bad} failures")
    report(capsys, "criterion 4 (FEC)", ok, "; ".join(details))
    assert ok


# 5 -------------------------------------------------------------------------


def test_criterion_5a_awgn_gap(capsys):
    j = curve(scheme="jutted", channel="awgn", ebn0_grid=GRID_AWGN)
    h = curve(scheme="huffman", channel="awgn", ebn0_grid=GRID_AWGN)
    gap = crossing(j) - crossing(h)
    bler_gap = crossing(j, 1e-2, 2) - crossing(h, 1e-2, 2)
    ok = gap_ok(gap, 1.0, 0.75)
    report(capsys, "criterion 5a (AWGN, no CFO)", ok,
           f"BER gap {gap:.2f} dB (target 1.0 +/- 0.75); BLER gap at 1e-2 {bler_gap:.2f} dB")
    assert ok


def test_criterion_5b_fading_gap(capsys):
    j = curve(scheme="jutted", channel="rayleigh", ebn0_grid=GRID_FADING)
    h = curve(scheme="huffman", channel="rayleigh", ebn0_grid=GRID_FADING)
    gap = crossing(j) - crossing(h)
    ok = gap_ok(gap, 0.7, 0.75)
    report(capsys, "criterion 5b (fading, no CFO)", ok, f"BER gap {gap:.2f} dB (target 0.7 +/- 0.75)")
    assert ok


def test_criterion_5c_fading_cfo_gap(capsys):
    j = curve(scheme="jutted", channel="rayleigh", cfo="uniform", estimator="fourier", ebn0_grid=GRID_FADING_CFO)
    h = curve(scheme="huffman", channel="rayleigh", ebn0_grid=GRID_FADING)
    gap = crossing(j) - crossing(h)
    ok = gap_ok(gap, 2.0, 0.75)
    report(capsys, "criterion 5c (fading, CFO vs Huffman without CFO)", ok,
           f"BER gap {gap:.2f} dB (target 2.0 +/- 0.75)")
    assert ok


def test_criterion_5d_error_floor(capsys):
    bers = {
        ch: run_point(SimConfig(scheme="huffman", channel=ch, cfo="uniform", trials=BLOCKS, seed=2024), 20.0,
                      workers=WORKERS).ber
        for ch in ("awgn", "rayleigh")
    }
    ok = min(bers.values()) >= 0.1
    report(capsys, "criterion 5d (uncorrected CFO floor)", ok,
           ", ".join(f"{ch} BER {b:.3f}" for ch, b in bers.items()) + " at 20 dB (need >= 0.1)")
    assert ok


# 6 -------------------------------------------------------------------------


def test_criterion_6_coded(capsys):
    j = curve(scheme="jutted", K=31, code="bch", channel="rayleigh", cfo="uniform", estimator="fourier",
              ebn0_grid=GRID_CODED)
    a = curve(scheme="huffman", K=31, code="acpc", channel="rayleigh", cfo="uniform", estimator="fractional",
              ebn0_grid=GRID_CODED)
    gap = crossing(a) - crossing(j)
    bler_gaps = [abs(crossing(a, lvl, 2) - crossing(j, lvl, 2)) for lvl in (1e-1, 3e-2, 1e-2)]
    ber_ok = gap_ok(gap, 1.75, 0.9)
    bler_ok = all(not math.isnan(g) and g <= 1.0 for g in bler_gaps)
    ok = ber_ok and bler_ok
    report(capsys, "criterion 6 (coded, fading + CFO)", ok,
           f"BER gap {gap:.2f} dB (target 1.75 +/- 0.9); BLER gaps at 1e-1/3e-2/1e-2: "
           + "/".join(f"{g:.2f}" for g in bler_gaps) + " dB (need <= 1)")
    assert ok


# 7 -------------------------------------------------------------------------


def test_criterion_7_zeta_sweep(capsys):
    cfg = SimConfig(scheme="jutted", K=32, channel="rayleigh", cfo="uniform", estimator="fourier",
                    trials=100_000, seed=2024)
    grid = [1.05, 1.10, 1.15, 1.20, 1.25, 1.30]
    sweep = sweep_zeta(cfg, grid, 14.0, workers=WORKERS)
    best = sweep.best_zeta
    within = abs(best - 1.15) <= 0.05 + 1e-9
    table = ", ".join(f"{z:.2f}:{r.ber:.3e}" for z, r in sweep.rows)
    # informative only; the line reports the outcome but never fails the suite
    report(capsys, "criterion 7 (zeta sweep, informative)", within, f"best zeta {best:.2f}; BER {table}")
    assert len(sweep.rows) == len(grid)


# 8 -------------------------------------------------------------------------


def test_criterion_8_determinism(capsys):
    cfg = SimConfig(scheme="jutted", channel="rayleigh", cfo="uniform", estimator="fourier",
                    ebn0_grid=(6.0, 12.0, 18.0), trials=20_000, seed=77)
    one = sweep_csv(cfg, workers=1)
    eight = sweep_csv(cfg, workers=8)
    again = sweep_csv(cfg, workers=1)
    ok = one == eight == again
    report(capsys, "criterion 8 (determinism)", ok,
           f"{len(one.splitlines()) - 1} rows, 1-thread and 8-thread CSV {'identical' if ok else 'differ'}")
    assert ok
