from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracfbmc.channel import ChannelRealization, apply_channel
from fracfbmc.config import ConfigurationError, FracConfig
from fracfbmc.frac_codec import (PayloadGrid, bandwidth_efficiency, check_guard, combine_decide,
                                 frac_encode, pam_demap, pam_map, payload_rows, payload_shape)
from fracfbmc.modem import analyze, build_phase_grids, synthesize
from fracfbmc.schemes import get_link


def test_pam2_convention():
    np.testing.assert_array_equal(pam_map([0, 1], 2), [1.0, -1.0])


@pytest.mark.parametrize("levels", [2, 4])
def test_pam_round_trip(rng, levels):
    bits = rng.integers(0, 2, 10_000)
    np.testing.assert_array_equal(pam_demap(pam_map(bits, levels), levels), bits)


def test_pam4_alphabet():
    sym = pam_map([0, 0, 0, 1, 1, 0, 1, 1], 4)
    assert sorted(np.round(sym * np.sqrt(5), 12)) == [-3, -1, 1, 3]
    assert np.mean(sym ** 2) == pytest.approx(1.0)


def test_pam4_is_gray():
    order = np.argsort(pam_map([0, 0, 0, 1, 1, 0, 1, 1], 4))
    labels = [(0, 0), (0, 1), (1, 0), (1, 1)]
    seq = [labels[i] for i in order]
    for a, b in zip(seq, seq[1:]):
        assert sum(x != y for x, y in zip(a, b)) == 1


def test_pam_errors():
    with pytest.raises(ValueError):
        pam_map([0, 1], 8)
    with pytest.raises(ValueError):
        pam_map([0, 1, 1], 4)
    with pytest.raises(ValueError):
        pam_demap([0.5], 3)


def test_encode_single_subblock():
    cfg = FracConfig(N=8, N_F=8, L_n=1, M_half=1)
    x = np.array([[2.0], [3.0], [4.0]])
    y = np.array([[20.0], [30.0], [40.0]])
    a, b = frac_encode(PayloadGrid(x, y), cfg)
    np.testing.assert_array_equal(a[:, 0], [0, 2, 3, 4, 0, -40, -30, -20])
    np.testing.assert_array_equal(b[:, 0], [0, 20, 30, 40, 0, 4, 3, 2])


def test_encode_zero_and_shape():
    cfg = FracConfig(N=64, N_F=16, M_half=3)
    z = np.zeros(payload_shape(cfg))
    a, b = frac_encode(PayloadGrid(z, z), cfg)
    assert not a.any() and not b.any()
    with pytest.raises(ValueError):
        frac_encode(PayloadGrid(np.zeros((3, 3)), np.zeros((3, 3))), cfg)


@pytest.mark.parametrize("nf,ln", [(8, 1), (16, 1), (16, 2), (64, 1)])
def test_nulls_and_extended_antisymmetry(rng, nf, ln):
    cfg = FracConfig(N=64, N_F=nf, L_n=ln, M_half=4)
    sh = payload_shape(cfg)
    a, b = frac_encode(PayloadGrid(rng.standard_normal(sh), rng.standard_normal(sh)), cfg)
    for q in range(cfg.K):
        base = q * nf
        for k in list(range(1, ln + 1)) + list(range(nf // 2 + 1, nf // 2 + ln + 1)):
            assert not a[base + k - 1].any() and not b[base + k - 1].any()
        # 1 - L + L_n <= k <= N_F/2 + L with L = 1
        for k in range(ln, nf // 2 + 2):
            lo, up = base + k - 1, base + cfg.mirror(k) - 1
            if not (0 <= lo < cfg.N and 0 <= up < cfg.N):
                continue
            np.testing.assert_array_equal(a[up], -b[lo])
            np.testing.assert_array_equal(b[up], a[lo])


def test_bandwidth_efficiency():
    assert bandwidth_efficiency(FracConfig(N_F=256)) == Fraction(254, 256)
    assert bandwidth_efficiency(FracConfig(N_F=16)) == Fraction(14, 16)
    assert bandwidth_efficiency(FracConfig(N_F=8)) == Fraction(6, 8)


def test_guard_check():
    check_guard(FracConfig(L_n=1), 1)
    with pytest.raises(ConfigurationError):
        check_guard(FracConfig(L_n=1), 2)


def _flat_chain(cfg, x, y, ha, hb, df):
    link = get_link(cfg)
    a, b = frac_encode(PayloadGrid(x, y), cfg)
    sa = synthesize(a, link.grids.zeta_a, link.p, cfg.eps)
    sb = synthesize(b, link.grids.zeta_b, link.p, cfg.eps)
    ch_a = ChannelRealization(np.array([ha]), np.array([0]), 0.0)
    ch_b = ChannelRealization(np.array([hb]), np.array([0]), df * cfg.eps)
    y_rx = apply_channel(sa, ch_a) + apply_channel(sb, ch_b)
    r_a = analyze(y_rx, 0.0, link.grids.zeta_a, link.p, cfg)
    r_b = analyze(y_rx, df * cfg.eps, link.grids.zeta_b, link.p, cfg)
    return r_a, r_b


def test_single_antenna_degeneration(rng):
    cfg = FracConfig(N=64, N_F=16, M_half=10)
    sh = payload_shape(cfg)
    x, y = rng.choice([-1.0, 1.0], sh), rng.choice([-1.0, 1.0], sh)
    r_a, r_b = _flat_chain(cfg, x, y, 1.0, 0.0, 0.0)
    d_x, d_y = combine_decide(r_a, r_b, 1.0, 0.0, cfg)
    assert np.max(np.abs(d_x - x)) < 10 ** (-50 / 20)


@pytest.mark.parametrize("n,nf", [(64, 8), (64, 16), (64, 64), (256, 8), (256, 16), (256, 256)])
def test_noiseless_chain_recovers_bits(rng, n, nf):
    cfg = FracConfig(N=n, N_F=nf, M_half=8)
    sh = payload_shape(cfg)
    bx, by = rng.integers(0, 2, sh), rng.integers(0, 2, sh)
    x, y = pam_map(bx.ravel()).reshape(sh), pam_map(by.ravel()).reshape(sh)
    ha, hb = (rng.standard_normal(2) + 1j * rng.standard_normal(2)) / np.sqrt(2)
    df = rng.uniform(0, 0.3)
    r_a, r_b = _flat_chain(cfg, x, y, ha, hb, df)
    d_x, d_y = combine_decide(r_a, r_b, ha, hb, cfg)
    np.testing.assert_array_equal(pam_demap(d_x.ravel()).reshape(sh), bx)
    np.testing.assert_array_equal(pam_demap(d_y.ravel()).reshape(sh), by)


@settings(max_examples=15, deadline=None)
@given(re=st.floats(-3, 3), im=st.floats(-3, 3))
def test_scaling_equivariance(re, im):
    c = complex(re, im)
    if abs(c) < 1e-3:
        return
    cfg = FracConfig(N=64, N_F=16, M_half=4)
    r = np.random.default_rng(3)
    r_a = r.standard_normal((64, 4)) + 1j * r.standard_normal((64, 4))
    r_b = r.standard_normal((64, 4)) + 1j * r.standard_normal((64, 4))
    ha, hb = 0.3 + 0.8j, -1.1 + 0.2j
    # the received samples scale with the channel too
    d1 = combine_decide(r_a, r_b, ha, hb, cfg)
    d2 = combine_decide(c * r_a, c * r_b, c * ha, c * hb, cfg)
    for u, v in zip(d1, d2):
        np.testing.assert_allclose(v, abs(c) ** 2 * u, rtol=1e-9, atol=1e-9)
        np.testing.assert_array_equal(pam_demap(v.ravel()), pam_demap(u.ravel()))


def test_zero_inputs_and_erasure():
    cfg = FracConfig(N=64, N_F=16, M_half=4)
    z = np.zeros((64, 4), complex)
    d_x, d_y = combine_decide(z, z, 1.0, 1.0, cfg)
    assert not d_x.any() and not d_y.any()
    r = np.ones((64, 4), complex)
    ha = np.array([0, 1, 1, 1], complex)
    d_x, _ = combine_decide(r, r, ha, np.zeros(4), cfg)
    rows = payload_shape(cfg)[0] // cfg.K
    assert not d_x[:rows].any() and d_x[rows:].all()


def test_combine_shape_mismatch():
    cfg = FracConfig(N=64, N_F=16, M_half=4)
    with pytest.raises(ValueError):
        combine_decide(np.zeros((64, 3)), np.zeros((64, 3)), 1, 1, cfg)


def test_payload_rows_layout():
    cfg = FracConfig(N=32, N_F=16, L_n=2, M_half=2)
    lower, mirror = payload_rows(cfg)
    np.testing.assert_array_equal(lower + 1, [3, 4, 5, 6, 7, 8, 19, 20, 21, 22, 23, 24])
    np.testing.assert_array_equal(mirror + 1, [16, 15, 14, 13, 12, 11, 32, 31, 30, 29, 28, 27])


def test_grids_used_by_link_validate():
    from fracfbmc.modem import validate_phase_grids
    cfg = FracConfig(N=64, N_F=8)
    assert validate_phase_grids(get_link(cfg).grids, cfg)
    assert validate_phase_grids(build_phase_grids(cfg), cfg)
