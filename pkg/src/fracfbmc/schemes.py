"""Transmit/receive chains for the simulated diversity schemes.

``frac``
    Frequency-reversal Alamouti over two antennas (the scheme under study).
``naive_alamouti``
    Alamouti pairs on adjacent subcarriers ``(2p+1, 2p+2)`` with no reversal
    and no guard nulls. Its cross-antenna and neighbouring-pair terms do not
    cancel, so it carries an intrinsic-interference floor even at zero
    offset and degrades further as the inter-antenna offset grows.
``single_antenna``
    Antenna A alone, full power, on the same payload subcarriers as ``frac``.

Every real information symbol is sent with total energy 1 summed over the
antennas, so the per-bit SNR means the same thing for all three.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .channel import ChannelRealization, frequency_response, subblock_response
from .config import FracConfig
from .filterbank import design_phydyas
from .frac_codec import ERASURE_GAIN, PayloadGrid, combine_decide, frac_encode, payload_rows
from .modem import analyze, build_phase_grids, synthesize

SCHEMES = ("frac", "naive_alamouti", "single_antenna")
_SQRT_HALF = np.sqrt(0.5)


class Link:
    """Filter, phase grids and index maps for one configuration."""

    def __init__(self, config: FracConfig):
        self.config = config
        self.p = design_phydyas(config.N, config.overlap)
        self.grids = build_phase_grids(config)
        self.lower, self.mirror = payload_rows(config)
        l = np.arange(1, config.N + 1)[:, None]
        m = np.arange(config.M_half)[None, :]
        self.plain_zeta = np.array([1, 1j, -1, -1j])[(l + m) % 4]

    def n_rows(self, scheme: str) -> int:
        """Real information symbols per half-symbol."""
        if scheme == "naive_alamouti":
            return self.config.N
        if scheme in ("frac", "single_antenna"):
            return 2 * len(self.lower)
        raise ValueError(f"unknown scheme {scheme!r}")

    def zetas(self, scheme: str):
        if scheme == "naive_alamouti":
            return self.plain_zeta, self.plain_zeta
        return self.grids.zeta_a, self.grids.zeta_b

    def transmit(self, scheme: str, symbols: np.ndarray):
        """Baseband signals of antennas A and B (B is None for a single antenna)."""
        cfg = self.config
        za, zb = self.zetas(scheme)
        half = symbols.shape[0] // 2
        first, second = symbols[:half], symbols[half:]
        if scheme == "frac":
            a, b = frac_encode(PayloadGrid(first, second), cfg)
            a, b = a * _SQRT_HALF, b * _SQRT_HALF
        elif scheme == "naive_alamouti":
            a = np.zeros((cfg.N, cfg.M_half))
            b = np.zeros((cfg.N, cfg.M_half))
            a[0::2], a[1::2] = first, -second
            b[0::2], b[1::2] = second, first
            a, b = a * _SQRT_HALF, b * _SQRT_HALF
        elif scheme == "single_antenna":
            a = np.zeros((cfg.N, cfg.M_half))
            a[self.lower], a[self.mirror] = first, second
            return synthesize(a, za, self.p, cfg.eps), None
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        return synthesize(a, za, self.p, cfg.eps), synthesize(b, zb, self.p, cfg.eps)

    def receive(self, scheme: str, y, ch_a: ChannelRealization, ch_b: ChannelRealization | None):
        """Decision statistics and their expected gains.

        Returns ``(raw, gain)``: ``raw`` has one row per information symbol and
        ``raw / gain`` is the unit-scale estimate fed to the PAM slicer.
        ``gain`` is zero on erased positions.
        """
        cfg = self.config
        za, zb = self.zetas(scheme)
        r_a = analyze(y, ch_a.f_offset, za, self.p, cfg)
        if scheme == "single_antenna":
            h = frequency_response(ch_a, cfg)
            rows = np.concatenate([self.lower, self.mirror])
            hh = h[rows][:, None]
            raw = np.real(np.conj(hh) * r_a[rows])
            gain = np.abs(hh) ** 2
        else:
            r_b = analyze(y, ch_b.f_offset, zb, self.p, cfg)
            if scheme == "frac":
                centre = cfg.N_F // 2
                ha = np.array([subblock_response(ch_a, q, centre, cfg) for q in range(cfg.K)])
                hb = np.array([subblock_response(ch_b, q, centre, cfg) for q in range(cfg.K)])
                d_x, d_y = combine_decide(r_a, r_b, ha, hb, cfg)
                g = np.repeat(np.abs(ha) ** 2 + np.abs(hb) ** 2, cfg.payload_per_half)
                raw = np.vstack([d_x, d_y])
                gain = np.tile(g, 2)[:, None] * _SQRT_HALF
            else:
                ha = frequency_response(ch_a, cfg)[0::2][:, None]
                hb = frequency_response(ch_b, cfg)[0::2][:, None]
                d_x = np.real(np.conj(ha) * r_a[0::2] + hb * np.conj(r_b[1::2]))
                d_y = np.real(np.conj(hb) * r_b[0::2] - ha * np.conj(r_a[1::2]))
                raw = np.vstack([d_x, d_y])
                gain = np.tile(np.abs(ha) ** 2 + np.abs(hb) ** 2, (2, 1)) * _SQRT_HALF
        gain = np.where(gain < ERASURE_GAIN, 0.0, gain)
        return raw, np.broadcast_to(gain, raw.shape)


@lru_cache(maxsize=16)
def get_link(config: FracConfig) -> Link:
    return Link(config)
