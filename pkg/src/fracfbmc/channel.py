"""Per-antenna multipath channels with carrier frequency offset, plus AWGN."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import FracConfig
from .modem import BasebandSignal


@dataclass(frozen=True)
class TapDelayProfile:
    name: str
    delays: tuple  # seconds
    powers_db: tuple

    def __post_init__(self):
        if len(self.delays) != len(self.powers_db) or not self.delays:
            raise ValueError(f"profile {self.name!r}: delays and powers must be non-empty and equal length")
        d = np.asarray(self.delays, dtype=float)
        if np.any(d < 0) or np.any(np.diff(d) < 0):
            raise ValueError(f"profile {self.name!r}: delays must be non-negative and ascending")

    @property
    def linear_powers(self) -> np.ndarray:
        lin = 10.0 ** (np.asarray(self.powers_db, dtype=float) / 10.0)
        return lin / lin.sum()


@dataclass(frozen=True)
class ChannelRealization:
    taps: np.ndarray  # complex gains
    tap_samples: np.ndarray  # integer delays
    f_offset: float  # Hz


# ITU-R M.1225 outdoor-to-indoor/pedestrian A and vehicular A (tapped delay line).
PROFILES = {
    "flat": TapDelayProfile("flat", (0.0,), (0.0,)),
    "itu_pa": TapDelayProfile(
        "itu_pa", (0.0, 110e-9, 190e-9, 410e-9), (0.0, -9.7, -19.2, -22.8)),
    "itu_va": TapDelayProfile(
        "itu_va", (0.0, 310e-9, 710e-9, 1090e-9, 1730e-9, 2510e-9),
        (0.0, -1.0, -9.0, -10.0, -15.0, -20.0)),
}


def load_profile(name: str) -> TapDelayProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown channel profile {name!r}; known: {sorted(PROFILES)}") from None


def read_profiles(path) -> dict:
    """Custom profiles from JSON: a list of ``{name, delays_ns, powers_db}``."""
    with open(path) as fh:
        entries = json.load(fh)
    if isinstance(entries, dict):
        entries = [entries]
    out = {}
    for e in entries:
        out[e["name"]] = TapDelayProfile(
            e["name"], tuple(float(d) * 1e-9 for d in e["delays_ns"]),
            tuple(float(p) for p in e["powers_db"]))
    return out


def realize(profile: TapDelayProfile, f_offset_norm: float, rng: np.random.Generator | None,
            config: FracConfig | None = None, uniforms=None) -> ChannelRealization:
    """Draw one block-static Rayleigh realisation.

    Each tap gain is circularly-symmetric complex Gaussian with the profile's
    normalised power, built by inverse CDF from two uniforms per tap
    (exponential power, uniform phase). Pass ``uniforms`` (length
    ``2 * n_taps``) to drive the draw from a stratified sequence; otherwise
    they come from ``rng``.

    Tap delays are rounded to the nearest sample at ``N * eps``; taps landing
    on the same sample are kept separate (their gains add in the convolution).
    """
    if abs(f_offset_norm) > 0.5:
        raise ValueError("|f_offset_norm| must not exceed 0.5")
    config = config or FracConfig()
    powers = profile.linear_powers
    if uniforms is None:
        uniforms = rng.random(2 * len(powers))
    u = np.asarray(uniforms, dtype=float).reshape(len(powers), 2)
    gains = np.sqrt(-powers * np.log1p(-u[:, 0])) * np.exp(2j * np.pi * u[:, 1])
    tap_samples = np.rint(np.asarray(profile.delays) * config.sample_rate).astype(int)
    return ChannelRealization(gains, tap_samples, f_offset_norm * config.eps)


def apply_channel(signal: BasebandSignal, ch: ChannelRealization) -> BasebandSignal:
    """``exp(j2 pi f t) * (h conv s)(t)``; the output grows by the largest tap delay."""
    x = signal.samples
    out = np.zeros(len(x) + int(ch.tap_samples.max()), dtype=complex)
    for g, d in zip(ch.taps, ch.tap_samples):
        out[d:d + len(x)] += g * x
    if ch.f_offset:
        t = np.arange(len(out)) + signal.t0
        out *= np.exp(2j * np.pi * (ch.f_offset / signal.sample_rate) * t)
    return BasebandSignal(out, signal.sample_rate, signal.t0)


def add_awgn(signal: BasebandSignal, noise_variance_per_sample: float,
             rng: np.random.Generator) -> BasebandSignal:
    if noise_variance_per_sample < 0:
        raise ValueError("noise variance must be non-negative")
    if noise_variance_per_sample == 0:
        return BasebandSignal(signal.samples.copy(), signal.sample_rate, signal.t0)
    n = len(signal)
    noise = np.sqrt(noise_variance_per_sample / 2.0) * (
        rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return BasebandSignal(signal.samples + noise, signal.sample_rate, signal.t0)


def subblock_response(ch: ChannelRealization, q: int, k, config: FracConfig):
    """Channel frequency response at subcarrier ``k + q N_F`` (k is 1-based, may be an array)."""
    if not 0 <= q < config.K:
        raise ValueError(f"subblock {q} out of range")
    l = np.asarray(k) + q * config.N_F
    return np.exp(-2j * np.pi * np.multiply.outer(l, ch.tap_samples) / config.N) @ ch.taps


def frequency_response(ch: ChannelRealization, config: FracConfig) -> np.ndarray:
    """Response at every subcarrier 1..N."""
    l = np.arange(1, config.N + 1)
    return np.exp(-2j * np.pi * np.multiply.outer(l, ch.tap_samples) / config.N) @ ch.taps


def quasi_static_mismatch(ch: ChannelRealization, config: FracConfig) -> float:
    """Worst relative deviation of any subcarrier's response from its subblock centre."""
    h = frequency_response(ch, config).reshape(config.K, config.N_F)
    centre = h[:, config.N_F // 2 - 1][:, None]
    return float(np.max(np.abs(h - centre) / np.abs(centre)))
