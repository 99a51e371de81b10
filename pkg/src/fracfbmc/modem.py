"""FBMC-OQAM synthesis/analysis and the alternating phase grids.

Time convention: a burst's sample ``s`` sits at time ``s + t0`` (in samples)
where ``t0 = -(len(p) - 1) / 2``, i.e. time zero is the centre of the pulse
of half-symbol 0. Carriers, the channel's frequency offset and the
receiver's compensation all use this same clock, so the demodulated
cross-antenna terms reduce to exactly ``F_{l,m,n}^{(f_b - f_a)}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .config import ConfigurationError, FracConfig
from .filterbank import PrototypeFilter


@dataclass
class BasebandSignal:
    """Complex baseband samples; ``t0`` is the time of ``samples[0]`` in samples."""

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __len__(self):
        return len(self.samples)

    @property
    def time(self) -> np.ndarray:
        return np.arange(len(self.samples)) + self.t0

    def __add__(self, other: "BasebandSignal") -> "BasebandSignal":
        if other.t0 != self.t0 or other.sample_rate != self.sample_rate:
            raise ValueError("signals are not on the same time grid")
        n = max(len(self), len(other))
        out = np.zeros(n, dtype=complex)
        out[:len(self)] += self.samples
        out[:len(other)] += other.samples
        return BasebandSignal(out, self.sample_rate, self.t0)


@dataclass(frozen=True)
class PhaseGridPair:
    zeta_a: np.ndarray
    zeta_b: np.ndarray
    chi: complex


def burst_length(n_sub: int, m_half: int, overlap: int) -> int:
    return (m_half + 2 * overlap - 1) * n_sub // 2


# ---------------------------------------------------------------------------
# phase grids
# ---------------------------------------------------------------------------

def _grid_exponents(config: FracConfig, c: int, offset: int):
    """Exponents (powers of j) of both grids for chi = j**c.

    Lower halves: zeta_b = j^(l+m), zeta_a = j^(l+m+offset). Upper halves
    follow from the reversal constraints; the same closed form is used on the
    upper guard nulls, which the constraints leave free.
    """
    n_sub, nf = config.N, config.N_F
    l = np.arange(1, n_sub + 1)[:, None]
    m = np.arange(config.M_half)[None, :]
    block = (l - 1) // nf
    local = l - block * nf
    lower = local <= nf // 2
    s = (2 * block + 1) * nf + config.L_n + 1  # l + mirror(l) within the block
    e_b_low = l + m
    e_a_low = l + m + offset
    e_a_up = c - ((s - l) + m)
    e_b_up = c - ((s - l) + m + offset)
    e_a = np.where(lower, e_a_low, e_a_up) % 4
    e_b = np.where(lower, e_b_low, e_b_up) % 4
    return e_a, e_b


def _jpow(e):
    return np.array([1, 1j, -1, -1j])[e]


def build_phase_grids(config: FracConfig) -> PhaseGridPair:
    """Phase grids satisfying OQAM alternation and the frequency-reversal rule.

    ``chi = +-j`` is preferred; ``+-1`` is used when the guard width forces it.
    """
    failures = []
    for c in (1, 3, 0, 2):
        for offset in (0, 1):
            e_a, e_b = _grid_exponents(config, c, offset)
            grids = PhaseGridPair(_jpow(e_a), _jpow(e_b), complex(_jpow(c)))
            why = phase_grid_violation(grids, config)
            if why is None:
                return grids
            failures.append(why)
    raise ConfigurationError(
        f"no chi gives valid phase grids for N_F={config.N_F}, L_n={config.L_n}: {failures[0]}")


def phase_grid_violation(grids: PhaseGridPair, config: FracConfig) -> str | None:
    """Describe the first violated phase-grid constraint, or None if all hold."""
    shape = (config.N, config.M_half)
    for name, z in (("zeta_a", grids.zeta_a), ("zeta_b", grids.zeta_b)):
        if z.shape != shape:
            return f"{name} has shape {z.shape}, expected {shape}"
        if not np.allclose(np.abs(z), 1.0):
            return f"{name} has entries off the unit circle"
        for ratio, label in ((z[1:] / z[:-1], "frequency"), (z[:, 1:] / z[:, :-1], "time")):
            bad = ~np.isclose(np.abs(ratio.real), 0.0) | ~np.isclose(np.abs(ratio.imag), 1.0)
            if bad.any():
                i, j = np.argwhere(bad)[0]
                return (f"{name} breaks OQAM alternation in {label} at "
                        f"l={i + 1}, m={j}: ratio {ratio[i, j]:.3g}")
    chi = grids.chi
    nf = config.N_F
    for i in range(config.K):
        for l in range(1 + config.L_n, nf // 2 + 1):
            lo = l + i * nf - 1
            up = (i + 1) * nf - l + config.L_n  # 0-based row of (i+1)N_F - l + L_n + 1
            if not np.allclose(grids.zeta_a[up], chi * np.conj(grids.zeta_b[lo])):
                return f"zeta_a reversal constraint fails at subblock {i}, l={l}"
            if not np.allclose(grids.zeta_b[up], chi * np.conj(grids.zeta_a[lo])):
                return f"zeta_b reversal constraint fails at subblock {i}, l={l}"
    return None


def validate_phase_grids(grids: PhaseGridPair, config: FracConfig) -> bool:
    return phase_grid_violation(grids, config) is None


# ---------------------------------------------------------------------------
# synthesis / analysis
# ---------------------------------------------------------------------------

def synthesize(grid: np.ndarray, zeta: np.ndarray, p: PrototypeFilter,
               eps: float = 15e3) -> BasebandSignal:
    """Transmit signal ``sum_l sum_m grid[l,m] zeta[l,m] p(t - mT/2) exp(j2 pi l t / T)``.

    ``grid`` and ``zeta`` are ``N x M_half`` (row ``l - 1`` holds subcarrier
    ``l``). Implemented as one IFFT per half-symbol, periodic extension to the
    pulse length, windowing and overlap-add with stride ``N/2``.
    """
    grid = np.asarray(grid)
    if grid.shape != zeta.shape:
        raise ValueError(f"grid {grid.shape} and zeta {zeta.shape} differ in shape")
    n_sub, m_half = grid.shape
    if n_sub != p.samples_per_symbol:
        raise ValueError(f"filter is for N={p.samples_per_symbol}, grid has {n_sub} rows")
    lam, half = p.overlap, n_sub // 2
    t0 = -(len(p) - 1) / 2.0

    l = np.arange(1, n_sub + 1)[:, None]
    start = (np.arange(m_half) * half)[None, :]
    coeffs = grid * zeta * np.exp(2j * np.pi * l * (start + t0) / n_sub)
    # subcarrier l -> FFT bin l mod N
    blocks = n_sub * np.fft.ifft(np.roll(coeffs, 1, axis=0), axis=0)  # N x M
    segs = np.tile(blocks.T, (1, lam)) * p.taps  # M x lam*N
    segs = segs.reshape(m_half, 2 * lam, half)

    out = np.zeros((m_half + 2 * lam - 1, half), dtype=complex)
    for j in range(2 * lam):
        out[j:j + m_half] += segs[:, j, :]
    return BasebandSignal(out.ravel(), n_sub * eps, t0)


def analyze(signal: BasebandSignal, f_offset: float, zeta: np.ndarray,
            p: PrototypeFilter, config: FracConfig) -> np.ndarray:
    """Demodulate with carrier-offset compensation.

    Entry ``[k-1, n]`` is ``sum_t exp(-j2 pi f t) y(t) conj(zeta[k,n])
    p(t - nT/2) exp(-j2 pi k t / T)``. Samples beyond the burst (channel
    tails) lie outside every analysis window and are ignored.
    """
    n_sub, m_half, lam = config.N, config.M_half, p.overlap
    if zeta.shape != (n_sub, m_half):
        raise ValueError(f"zeta shape {zeta.shape} does not match config")
    need = burst_length(n_sub, m_half, lam)
    if len(signal) < need:
        raise ValueError(f"signal has {len(signal)} samples, burst needs {need}")
    if abs(f_offset) >= config.eps:
        raise ValueError("only fractional carrier offsets (|f| < eps) are supported")
    half = n_sub // 2
    y = signal.samples[:need]
    tt = np.arange(need) + signal.t0
    if f_offset:
        y = y * np.exp(-2j * np.pi * (f_offset / signal.sample_rate) * tt)

    windows = sliding_window_view(y, lam * n_sub)[::half][:m_half]  # M x lam*N
    folded = (windows * p.taps).reshape(m_half, lam, n_sub).sum(axis=1)
    spec = np.roll(np.fft.fft(folded, axis=1).T, -1, axis=0)  # row k-1 <- bin k mod N
    k = np.arange(1, n_sub + 1)[:, None]
    start = (np.arange(m_half) * half)[None, :] + signal.t0
    return spec * np.exp(-2j * np.pi * k * start / n_sub) * np.conj(zeta)
