"""Acceptance criteria 1-8. Each test prints one PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from fracfbmc import cli
from fracfbmc.analysis import interference_coeff, residual_report
from fracfbmc.channel import ChannelRealization, apply_channel
from fracfbmc.config import FracConfig
from fracfbmc.frac_codec import PayloadGrid, combine_decide, frac_encode, payload_shape
from fracfbmc.harness import (SweepConfig, run_sweep, theoretical_alamouti_ber,
                              theoretical_single_ber)
from fracfbmc.modem import analyze, synthesize
from fracfbmc.schemes import get_link

DESK = 2_000


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def _report(n, ok, detail, budget_s=None):
        elapsed = time.perf_counter() - start
        in_time = budget_s is None or elapsed < budget_s
        verdict = "PASS" if ok and in_time else "FAIL"
        limit = f" (limit {budget_s:.0f} s)" if budget_s else ""
        with capsys.disabled():
            print(f"\n[criterion {n}] {verdict}: {detail}; {elapsed:.1f} s{limit}")
        assert ok, detail
        assert in_time, f"took {elapsed:.1f} s, limit {budget_s} s"

    return _report


def _ci_overlap(a, b):
    return abs(a.ber - b.ber) <= a.ci95 + b.ci95


def test_criterion_1_orthogonality(report):
    rng = np.random.default_rng(1)
    worst = 0.0
    for nf in (8, 16, 256):
        cfg = FracConfig(N_F=nf)
        link = get_link(cfg)
        for _ in range(64):
            k = int(rng.integers(2, cfg.N))
            n = int(rng.integers(4, cfg.M_half - 4))
            for ant in "ab":
                for l in range(-1, 2):
                    for m in range(-4, 5):
                        c = interference_coeff(link.grids, link.p, ant, ant, l, m, k, n, 0.0)
                        worst = max(worst, abs(c.real - (l == 0 and m == 0)))
    report(1, worst <= 1e-3, f"max |Re F - delta| = {worst:.2e} (bound 1e-3)", budget_s=10)


def test_criterion_2_self_cancellation(report):
    rng = np.random.default_rng(2)
    worst_ratio, n_pos = 0.0, 0
    failures = []
    for nf in (8, 16, 256):
        cfg = FracConfig(N=256, N_F=nf, L_n=1)
        sh = payload_shape(cfg)
        pl = PayloadGrid(rng.choice([-1.0, 1.0], sh), rng.choice([-1.0, 1.0], sh))
        rows = residual_report(pl, cfg, [0.0, 0.1, 0.2, 0.3])
        n_pos += len(rows)
        for r in rows:
            worst_ratio = max(worst_ratio, r["residual"] / max(r["abs_V"], 1e-12))
            if not r["ok"]:
                failures.append((nf, r["subcarrier"], r["n"], r["delta_f_norm"]))
    report(2, not failures,
           f"{n_pos} positions, max |W*+V|/max(|V|,1e-12) = {worst_ratio:.2e} (bound 1e-5), "
           f"first failures {failures[:3]}", budget_s=60)


def test_criterion_3_diversity_contract(report):
    rng = np.random.default_rng(3)
    df = 0.3
    worst = math.inf
    for nf in (8, 16, 256):
        cfg = FracConfig(N_F=nf)
        link = get_link(cfg)
        sh = payload_shape(cfg)
        for _ in range(3):
            x, y = rng.choice([-1.0, 1.0], sh), rng.choice([-1.0, 1.0], sh)
            ha, hb = (rng.standard_normal(2) + 1j * rng.standard_normal(2)) / np.sqrt(2)
            a, b = frac_encode(PayloadGrid(x, y), cfg)
            sa = synthesize(a, link.grids.zeta_a, link.p, cfg.eps)
            sb = synthesize(b, link.grids.zeta_b, link.p, cfg.eps)
            rx = (apply_channel(sa, ChannelRealization(np.array([ha]), np.array([0]), 0.0))
                  + apply_channel(sb, ChannelRealization(np.array([hb]), np.array([0]),
                                                         df * cfg.eps)))
            r_a = analyze(rx, 0.0, link.grids.zeta_a, link.p, cfg)
            r_b = analyze(rx, df * cfg.eps, link.grids.zeta_b, link.p, cfg)
            d_x, d_y = combine_decide(r_a, r_b, ha, hb, cfg)
            g = abs(ha) ** 2 + abs(hb) ** 2
            want = np.concatenate([g * x, g * y])
            got = np.concatenate([d_x, d_y])
            sir = 10 * np.log10(np.sum(want ** 2) / np.sum((got - want) ** 2))
            worst = min(worst, sir)
    report(3, worst >= 50, f"min SIR over N_F in (8, 16, 256) = {worst:.1f} dB (need >= 50)",
           budget_s=60)


def test_criterion_4_iafo_invariance(report):
    details, ok = [], True
    for snr in (10.0, 20.0):
        r0, r3 = run_sweep(SweepConfig("frac", "flat", [snr], [0.0, 0.3], [128], DESK, seed=4))
        same = _ci_overlap(r0, r3)
        ok &= same
        details.append(f"{snr:g} dB: BER(0)={r0.ber:.4e} BER(0.3)={r3.ber:.4e} "
                       f"|diff|={abs(r0.ber - r3.ber):.1e} <= {r0.ci95 + r3.ci95:.1e}? {same}")
    report(4, ok, "; ".join(details), budget_s=600)


def test_criterion_5_baseline_degradation(report):
    r0, r3 = run_sweep(SweepConfig("naive_alamouti", "flat", [20.0], [0.0, 0.3], [128], DESK,
                                   seed=5))
    margin = r0.ci95 + r3.ci95
    ok = r3.ber > r0.ber + margin
    report(5, ok, f"naive BER(0)={r0.ber:.4e} BER(0.3)={r3.ber:.4e}, need BER(0.3) > "
                  f"BER(0) + {margin:.1e}", budget_s=600)


def _horizontal_shift(rec, theory):
    return rec.snr_db - brentq(lambda s: theory(s) - rec.ber, -30.0, 80.0)


def test_criterion_6_theory_crosscheck(report):
    cases = [("single_antenna", [4.0, 8.0, 12.0, 16.0, 20.0, 24.0], theoretical_single_ber),
             ("frac", [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0], theoretical_alamouti_ber)]
    ok, details = True, []
    for scheme, snrs, theory in cases:
        recs = run_sweep(SweepConfig(scheme, "flat", snrs, [0.0], [128], DESK, seed=6))
        used = [r for r in recs if 1e-3 <= r.ber <= 1e-1]
        shifts = [_horizontal_shift(r, theory) for r in used]
        worst = max(abs(s) for s in shifts)
        ok &= worst <= 0.5 and len(used) >= 3
        details.append(f"{scheme}: {len(used)} points in [1e-3, 1e-1], max shift {worst:.2f} dB")
    report(6, ok, "; ".join(details) + " (bound 0.5 dB)", budget_s=900)


def test_criterion_7_frequency_selectivity(report):
    small, large = run_sweep(SweepConfig("frac", "itu_va", [25.0], [0.3], [4, 64], DESK, seed=7))
    selective = large.ber > small.ber + small.ci95 + large.ci95
    flat = run_sweep(SweepConfig("frac", "flat", [10.0], [0.3], [4, 8, 64, 128], DESK, seed=7))
    flat_ok = all(_ci_overlap(a, b) for i, a in enumerate(flat) for b in flat[i + 1:])
    report(7, selective and flat_ok,
           f"itu_va 25 dB: BER(N_F/2=4)={small.ber:.3e} BER(N_F/2=64)={large.ber:.3e} "
           f"worse? {selective}; flat 10 dB BERs "
           f"{', '.join(f'{r.nf_half}:{r.ber:.4e}' for r in flat)} consistent? {flat_ok}",
           budget_s=1200)


def test_criterion_8_reproducibility(report, tmp_path, capsys):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"scheme": "frac", "channel": "itu_pa", "snr_db": [5.0, 15.0],
                               "iafo_norm": [0.0, 0.3], "nf_half": [8], "trials": 40}))
    outs = []
    for workers in (1, 8):
        out = tmp_path / f"w{workers}.csv"
        code = cli.main(["ber-sweep", "--config", str(cfg), "--out", str(out), "--seed", "1234",
                         "--workers", str(workers)])
        assert code == 0
        outs.append(out.read_bytes())
    capsys.readouterr()
    same = outs[0] == outs[1]
    report(8, same, f"workers 1 vs 8: {len(outs[0])} bytes, identical={same}")
