"""PHYDYAS prototype filter and its time-frequency (transmultiplexer) response.

All continuous-time integrals are evaluated as sums on the modem sample grid
(``N`` samples per symbol period ``T``). The pulse is sampled half a sample
off its centre, so tap ``i`` sits at time ``i - (len - 1) / 2`` samples from
the pulse centre; this keeps ``taps[i] == taps[len - 1 - i]`` exact and makes
the discrete ambiguity function real up to the carrier phase, which is what
real-field orthogonality needs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigurationError

# Frequency-sampling coefficients for overlap 4 (Bellanger, PHYDYAS D5.1).
PHYDYAS_COEFFS = {4: (1.0, 0.971960, np.sqrt(2.0) / 2.0, 0.235147)}

_H = PHYDYAS_COEFFS[4]
assert abs(_H[1] ** 2 + _H[3] ** 2 - 1.0) < 1e-3
del _H

L_SEARCH = 8


@dataclass(frozen=True, eq=False)
class PrototypeFilter:
    """Real, even-symmetric, unit-energy pulse of length ``overlap * samples_per_symbol``."""

    taps: np.ndarray
    overlap: int
    samples_per_symbol: int
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return len(self.taps)

    @property
    def times(self) -> np.ndarray:
        """Tap times relative to the pulse centre, in samples (half-integers)."""
        return np.arange(len(self.taps)) - (len(self.taps) - 1) / 2.0

    @property
    def energy(self) -> float:
        return float(np.sum(self.taps ** 2))

    @property
    def symmetry_residual(self) -> float:
        return float(np.max(np.abs(self.taps - self.taps[::-1])))


@dataclass(frozen=True)
class TransmuxResponse:
    value: complex
    l: int
    m: int
    n: int
    delta_f_norm: float


def design_phydyas(samples_per_symbol: int, overlap: int = 4) -> PrototypeFilter:
    """Frequency-sampling PHYDYAS pulse.

    ``p(t) = 1 + 2 sum_k H_k cos(2 pi k t / (overlap T))`` for ``|t| < overlap T / 2``,
    sampled at ``t = (i + 1/2) T/N - overlap T / 2`` and normalised to unit energy.
    """
    if overlap not in PHYDYAS_COEFFS:
        raise ConfigurationError(f"unsupported overlap factor {overlap} (supported: 4)")
    n = int(samples_per_symbol)
    if n < 16 or n & (n - 1):
        raise ConfigurationError(
            f"samples_per_symbol must be a power of two >= 16, got {samples_per_symbol}")
    coeffs = PHYDYAS_COEFFS[overlap]
    length = overlap * n
    t = np.arange(length) - (length - 1) / 2.0
    taps = np.full(length, coeffs[0])
    for k, hk in enumerate(coeffs[1:], start=1):
        taps += 2.0 * hk * np.cos(2.0 * np.pi * k * t / length)
    taps /= np.sqrt(np.sum(taps ** 2))
    return PrototypeFilter(taps=taps, overlap=overlap, samples_per_symbol=n)


def _ambiguity(p: PrototypeFilter, l, m: int, delta_f_norm: float):
    """n-independent part: sum_u p(u - m N/2) p(u) exp(j 2 pi (l + df) u / N)."""
    n_sym = p.samples_per_symbol
    shift = m * n_sym // 2
    length = len(p.taps)
    l = np.asarray(l, dtype=float)
    if abs(shift) >= length:
        return np.zeros(l.shape, dtype=complex)
    if shift >= 0:
        prod = p.taps[shift:] * p.taps[:length - shift]
        u = p.times[shift:]
    else:
        prod = p.taps[:length + shift] * p.taps[-shift:]
        u = p.times[:length + shift]
    phase = np.exp(2j * np.pi * np.multiply.outer(l + delta_f_norm, u) / n_sym)
    return phase @ prod


def transmux_table(p: PrototypeFilter, delta_f_norm: float = 0.0) -> np.ndarray:
    """n-independent response over ``|l| <= 8``, ``|m| <= 2*overlap``.

    Returns an array indexed ``[l + 8, m + 2*overlap]``. Cached per filter
    and offset; the returned array is read-only.
    """
    key = float(delta_f_norm)
    table = p._tables.get(key)
    if table is None:
        m_max = 2 * p.overlap
        ls = np.arange(-L_SEARCH, L_SEARCH + 1)
        table = np.stack([_ambiguity(p, ls, m, key) for m in range(-m_max, m_max + 1)], axis=1)
        table.setflags(write=False)
        p._tables[key] = table
    return table


def transmux_rows(p: PrototypeFilter, ls, delta_f_norm: float = 0.0) -> np.ndarray:
    """n-independent response for arbitrary lags ``ls``, indexed ``[i, m + 2*overlap]``."""
    ls = np.asarray(ls)
    m_max = 2 * p.overlap
    return np.stack([_ambiguity(p, ls, m, float(delta_f_norm)) for m in range(-m_max, m_max + 1)],
                    axis=1)


def transmux_value(p: PrototypeFilter, l: int, m: int, n: int, delta_f_norm: float = 0.0) -> complex:
    """``F_{l,m,n}`` including the leading phase ``exp(j pi n (l + df))``."""
    m_max = 2 * p.overlap
    if abs(m) >= m_max:
        return 0j
    if abs(l) <= L_SEARCH:
        g = transmux_table(p, delta_f_norm)[l + L_SEARCH, m + m_max]
    else:
        g = _ambiguity(p, l, m, delta_f_norm)[()]
    return complex(np.exp(1j * np.pi * n * (l + delta_f_norm)) * g)


def transmux_response(p: PrototypeFilter, l: int, m: int, n: int,
                      delta_f_norm: float = 0.0) -> TransmuxResponse:
    return TransmuxResponse(transmux_value(p, l, m, n, delta_f_norm), l, m, n, float(delta_f_norm))


def localization_bounds(p: PrototypeFilter, threshold: float) -> tuple[int, int]:
    """Smallest (L, M) with ``|F(l, m)| < threshold`` whenever ``|l| > L`` or ``|m| > M``.

    Searched over ``|l| <= 8`` and ``|m| <= 4 * overlap`` (the response is
    identically zero for ``|m| >= 2 * overlap``).
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    mag = np.abs(transmux_table(p, 0.0))
    m_max = 2 * p.overlap
    l_abs = np.abs(np.arange(-L_SEARCH, L_SEARCH + 1))
    m_abs = np.abs(np.arange(-m_max, m_max + 1))
    above = mag >= threshold
    big_l = int(l_abs[above.any(axis=1)].max(initial=0))
    big_m = int(m_abs[above.any(axis=0)].max(initial=0))
    return big_l, big_m


def write_transmux_csv(path, p: PrototypeFilter, delta_f_values=(0.0,)) -> None:
    m_max = 2 * p.overlap
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["l", "m", "delta_f_norm", "re", "im", "abs"])
        for df in delta_f_values:
            table = transmux_table(p, df)
            for i, l in enumerate(range(-L_SEARCH, L_SEARCH + 1)):
                for j, m in enumerate(range(-m_max, m_max + 1)):
                    v = table[i, j]
                    writer.writerow([l, m, repr(float(df)), f"{v.real:.17g}",
                                     f"{v.imag:.17g}", f"{abs(v):.17g}"])
