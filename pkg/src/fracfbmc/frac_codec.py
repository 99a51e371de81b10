"""Frequency-reversal Alamouti encoding and combining, plus PAM mapping.

Within subblock ``i`` the payload subcarrier ``k`` (``L_n < k <= N_F/2``) is
paired with its mirror ``N_F - k + 1 + L_n``::

    a[k] =  x_k     a[mirror] = -y_k
    b[k] =  y_k     b[mirror] =  x_k

Subcarriers ``1..L_n`` and ``N_F/2 + 1 .. N_F/2 + L_n`` of every subblock
are nulled.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import ConfigurationError, FracConfig

ERASURE_GAIN = 1e-12

_PAM4 = np.array([1.0, 3.0, -1.0, -3.0]) / np.sqrt(5.0)  # index = 2*b0 + b1, Gray along the line


@dataclass
class PayloadGrid:
    """Information symbols ``x``, ``y`` of shape ``(K * (N_F/2 - L_n), M_half)``.

    Row ``q * P + (k - L_n - 1)`` holds subblock ``q``, local subcarrier ``k``
    where ``P = N_F/2 - L_n``.
    """

    x: np.ndarray
    y: np.ndarray


def pam_map(bits, levels: int = 2) -> np.ndarray:
    """Gray-mapped unit-energy PAM. 2-PAM: 0 -> +1, 1 -> -1."""
    bits = np.asarray(bits, dtype=np.int8)
    if levels == 2:
        return 1.0 - 2.0 * bits
    if levels == 4:
        if bits.size % 2:
            raise ValueError("4-PAM needs an even number of bits")
        pairs = bits.reshape(-1, 2)
        return _PAM4[2 * pairs[:, 0] + pairs[:, 1]]
    raise ValueError(f"unsupported PAM order {levels}")


def pam_demap(values, levels: int = 2) -> np.ndarray:
    """Nearest-neighbour inverse of :func:`pam_map` (ties go to bit 0)."""
    v = np.asarray(values, dtype=float).ravel()
    if levels == 2:
        return (v < 0).astype(np.int8)
    if levels == 4:
        out = np.empty((v.size, 2), dtype=np.int8)
        out[:, 0] = v < 0
        out[:, 1] = np.abs(v) > 2.0 / np.sqrt(5.0)
        return out.ravel()
    raise ValueError(f"unsupported PAM order {levels}")


def payload_rows(config: FracConfig):
    """0-based rows of the payload subcarriers and of their mirrors, in payload order."""
    k = np.arange(config.L_n + 1, config.half + 1)
    q = np.arange(config.K)[:, None]
    lower = (q * config.N_F + k - 1).ravel()
    mirror = (q * config.N_F + config.mirror(k) - 1).ravel()
    return lower, mirror


def subblock_of_rows(config: FracConfig) -> np.ndarray:
    """Subblock index of each payload row."""
    return np.repeat(np.arange(config.K), config.payload_per_half)


def payload_shape(config: FracConfig) -> tuple[int, int]:
    return config.K * config.payload_per_half, config.M_half


def frac_encode(payload: PayloadGrid, config: FracConfig):
    """Map ``(x, y)`` onto the two antennas' real OQAM grids ``(a, b)``."""
    shape = payload_shape(config)
    if payload.x.shape != shape or payload.y.shape != shape:
        raise ValueError(f"payload must be {shape}, got {payload.x.shape} / {payload.y.shape}")
    lower, mirror = payload_rows(config)
    a = np.zeros((config.N, config.M_half))
    b = np.zeros((config.N, config.M_half))
    a[lower] = payload.x
    a[mirror] = -payload.y
    b[lower] = payload.y
    b[mirror] = payload.x
    return a, b


def combine_decide(r_a: np.ndarray, r_b: np.ndarray, H_a, H_b, config: FracConfig):
    """Alamouti combining of the two demodulated branches.

    ``d_x = Re[conj(H_a) r_a[k] + H_b conj(r_b[mirror])]`` and
    ``d_y = Re[conj(H_b) r_b[k] - H_a conj(r_a[mirror])]`` per payload
    position, with one channel scalar per subblock. Positions whose subblock
    has ``|H_a|^2 + |H_b|^2`` below ``ERASURE_GAIN`` are erased (set to 0).
    """
    H_a = np.broadcast_to(np.asarray(H_a, dtype=complex), (config.K,))
    H_b = np.broadcast_to(np.asarray(H_b, dtype=complex), (config.K,))
    if r_a.shape != (config.N, config.M_half) or r_b.shape != r_a.shape:
        raise ValueError("received matrices do not match the configuration")
    lower, mirror = payload_rows(config)
    q = subblock_of_rows(config)
    ha = H_a[q][:, None]
    hb = H_b[q][:, None]
    d_x = np.real(np.conj(ha) * r_a[lower] + hb * np.conj(r_b[mirror]))
    d_y = np.real(np.conj(hb) * r_b[lower] - ha * np.conj(r_a[mirror]))
    erased = (np.abs(ha) ** 2 + np.abs(hb) ** 2) < ERASURE_GAIN
    if erased.any():
        d_x = np.where(erased, 0.0, d_x)
        d_y = np.where(erased, 0.0, d_y)
    return d_x, d_y


def bandwidth_efficiency(config: FracConfig) -> Fraction:
    return Fraction(config.N_F - 2 * config.L_n, config.N_F)


def check_guard(config: FracConfig, localization_l: int) -> None:
    if config.L_n < localization_l:
        raise ConfigurationError(
            f"L_n={config.L_n} is below the filter's frequency localization L={localization_l}")
