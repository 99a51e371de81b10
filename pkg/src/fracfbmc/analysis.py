"""Numerical certification of the FRAC interference algebra.

For payload position ``k`` of subblock ``q`` at half-symbol ``n`` the two
demodulated branches decompose (flat channels, no noise) as::

    r_a[k]      = H_a U + H_b V
    r_b[mirror] = H_a W + H_b Z

with ``U, V, W, Z`` finite sums of symbols weighted by the interference
coefficients ``zeta_src[k+l, n+m] conj(zeta_dst[k, n]) F_{l,m,n}``. The
frequency-reversal mapping makes ``W* = -V`` for any inter-antenna offset,
which is what removes the inter-antenna ICI from the Alamouti combiner.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .channel import apply_channel, load_profile, realize
from .config import FracConfig
from .filterbank import L_SEARCH, PrototypeFilter, transmux_rows, transmux_table, transmux_value
from .frac_codec import PayloadGrid, frac_encode
from .modem import PhaseGridPair
from .schemes import get_link

# Localization factors of the PHYDYAS overlap-4 pulse.
LOCALIZATION_WINDOW = (1, 4)
SELF_CANCEL_RTOL = 1e-5
SELF_CANCEL_FLOOR = 1e-12

# Truncation leakage of the (1, 4) window for PHYDYAS overlap 4, N = 256: the
# l1-norm of |F_{l,m}^{(df)}| outside the window (|l| <= 8, |m| < 8), maximised
# over df in [-0.3, 0.3].
# A symbol alphabet bounded by 1 and channel gains |H_a| + |H_b| give
# |r_a - (H_a U + H_b V)| <= (|H_a| + |H_b|) * WINDOW_LEAKAGE.
WINDOW_LEAKAGE = 0.0337


@dataclass(frozen=True)
class UvwzDecomposition:
    U: complex
    V: complex
    W: complex
    Z: complex
    k: int
    n: int
    q: int

    @property
    def residual_wv(self) -> float:
        return abs(np.conj(self.W) + self.V)


def _offset_for(src: str, dst: str, delta_f_norm: float) -> float:
    if src == dst:
        return 0.0
    return delta_f_norm if (src, dst) == ("b", "a") else -delta_f_norm


def _zeta(grids: PhaseGridPair, which: str) -> np.ndarray:
    if which == "a":
        return grids.zeta_a
    if which == "b":
        return grids.zeta_b
    raise ValueError(f"antenna must be 'a' or 'b', got {which!r}")


def interference_coeff(grids: PhaseGridPair, p: PrototypeFilter, src: str, dst: str,
                       l: int, m: int, k: int, n: int, delta_f_norm: float) -> complex:
    """Coefficient with which symbol ``(k+l, n+m)`` of antenna ``src`` reaches ``(k, n)`` of branch ``dst``.

    ``k`` is the 1-based subcarrier, ``n`` the 0-based half-symbol.
    ``delta_f_norm`` is ``(f_b - f_a) / eps``; the branch-``a`` cross term sees
    ``+delta_f_norm`` and the branch-``b`` one ``-delta_f_norm``.
    """
    zs, zd = _zeta(grids, src), _zeta(grids, dst)
    n_sub, m_half = zd.shape
    if not (1 <= k <= n_sub and 1 <= k + l <= n_sub and 0 <= n < m_half and 0 <= n + m < m_half):
        raise IndexError(f"(k={k}, l={l}, n={n}, m={m}) falls outside the {n_sub}x{m_half} lattice")
    df = _offset_for(src, dst, delta_f_norm)
    return complex(zs[k + l - 1, n + m] * np.conj(zd[k - 1, n]) * transmux_value(p, l, m, n, df))


def interference_table(grids: PhaseGridPair, p: PrototypeFilter, k: int, n: int,
                       delta_f_norm: float, window=LOCALIZATION_WINDOW) -> dict:
    """All four coefficient arrays at one position, indexed ``[l + L, m + M]``.

    Entries whose source falls outside the lattice are NaN.
    """
    big_l, big_m = window
    out = {}
    for src in "ab":
        for dst in "ab":
            arr = np.full((2 * big_l + 1, 2 * big_m + 1), np.nan, dtype=complex)
            for i, l in enumerate(range(-big_l, big_l + 1)):
                for j, m in enumerate(range(-big_m, big_m + 1)):
                    try:
                        arr[i, j] = interference_coeff(grids, p, src, dst, l, m, k, n, delta_f_norm)
                    except IndexError:
                        pass
            out[(src, dst)] = arr
    return out


def _lags(window, n_sub: int):
    """Frequency lags covered by ``window``; ``L >= N/2`` means every source subcarrier once."""
    big_l = window[0]
    if big_l >= n_sub // 2:
        return np.arange(-(n_sub // 2) + 1, n_sub // 2 + 1)
    return np.arange(-big_l, big_l + 1)


def _coeff_rows(p: PrototypeFilter, ls, df: float) -> np.ndarray:
    if np.max(np.abs(ls)) <= L_SEARCH:
        return transmux_table(p, df)[ls + L_SEARCH]
    return transmux_rows(p, ls, df)


def _branch_sum(symbols, zeta_src, zeta_dst, p, row, n, df, window):
    """sum_{l,m} symbols[row+l, n+m] zeta_src[..] conj(zeta_dst[row, n]) F_{l,m,n}^{(df)}.

    Subcarrier rows wrap modulo N; a wrapped source carries a sign flip because
    the carrier of subcarrier ``l +- N`` differs from that of ``l`` by
    ``exp(+-j 2 pi t)`` and the sample times are half-integers.
    """
    n_sub, m_half = symbols.shape
    m_tab = 2 * p.overlap
    big_m = min(window[1], m_tab - 1)
    ls = _lags(window, n_sub)
    rows = _coeff_rows(p, ls, df)
    total = 0j
    for i, l in enumerate(ls):
        src = row + l
        sign = 1.0
        if src < 0 or src >= n_sub:
            src %= n_sub
            sign = -1.0
        lead = np.exp(1j * np.pi * n * (l + df))
        for m in range(-big_m, big_m + 1):
            col = n + m
            if not 0 <= col < m_half:
                continue
            s = symbols[src, col]
            if s == 0:
                continue
            total += sign * s * zeta_src[src, col] * lead * rows[i, m + m_tab]
    return total * np.conj(zeta_dst[row, n])


def decompose_uvwz(payload: PayloadGrid, config: FracConfig, delta_f_norm: float,
                   k: int, n: int, q: int, window=LOCALIZATION_WINDOW, link=None) -> UvwzDecomposition:
    """U, V, W, Z at local payload subcarrier ``k`` of subblock ``q``, half-symbol ``n``.

    ``window=(L, M)`` truncates the sums to ``|l| <= L, |m| <= M``; the
    default is the pulse's localization window. ``window=(N // 2, 2*overlap - 1)``
    takes every source subcarrier and every overlapping half-symbol, which
    reproduces the modem exactly.
    """
    if not config.L_n < k <= config.half:
        raise ValueError(f"k={k} is outside the payload range {config.L_n + 1}..{config.half}")
    if not 0 <= q < config.K:
        raise ValueError(f"subblock {q} out of range")
    link = link or get_link(config)
    a, b = frac_encode(payload, config)
    za, zb = link.grids.zeta_a, link.grids.zeta_b
    p = link.p
    row = q * config.N_F + k - 1
    mrow = q * config.N_F + config.mirror(k) - 1
    df = float(delta_f_norm)
    U = _branch_sum(a, za, za, p, row, n, 0.0, window)
    V = _branch_sum(b, zb, za, p, row, n, df, window)
    W = _branch_sum(a, za, zb, p, mrow, n, -df, window)
    Z = _branch_sum(b, zb, zb, p, mrow, n, 0.0, window)
    return UvwzDecomposition(U, V, W, Z, k, n, q)


def self_cancellation_ok(dec: UvwzDecomposition) -> bool:
    return dec.residual_wv <= SELF_CANCEL_RTOL * max(abs(dec.V), SELF_CANCEL_FLOOR)


def branch_grid(symbols: np.ndarray, zeta_src: np.ndarray, zeta_dst: np.ndarray,
                p: PrototypeFilter, delta_f_norm: float, window=LOCALIZATION_WINDOW) -> np.ndarray:
    """Whole-lattice version of the truncated branch sum: entry ``[row, n]``
    is what antenna ``src`` contributes to branch ``dst`` at that position."""
    n_sub, m_half = symbols.shape
    m_tab = 2 * p.overlap
    big_m = min(window[1], m_tab - 1)
    ls = _lags(window, n_sub)
    rows = _coeff_rows(p, ls, delta_f_norm)
    src = symbols * zeta_src
    n_idx = np.arange(m_half)
    total = np.zeros((n_sub, m_half), dtype=complex)
    for i, l in enumerate(ls):
        shifted = np.roll(src, -l, axis=0)
        if l > 0:
            shifted[n_sub - l:] *= -1.0
        elif l < 0:
            shifted[:-l] *= -1.0
        lead = np.exp(1j * np.pi * n_idx * (l + delta_f_norm))
        for m in range(-big_m, big_m + 1):
            moved = np.zeros_like(shifted)
            if m >= 0:
                moved[:, :m_half - m] = shifted[:, m:]
            else:
                moved[:, -m:] = shifted[:, :m_half + m]
            total += moved * (lead * rows[i, m + m_tab])
    return total * np.conj(zeta_dst)


def uvwz_grid(payload: PayloadGrid, config: FracConfig, delta_f_norm: float,
              window=LOCALIZATION_WINDOW, link=None):
    """U, V, W, Z at every payload position, each shaped like ``payload.x``."""
    link = link or get_link(config)
    a, b = frac_encode(payload, config)
    za, zb = link.grids.zeta_a, link.grids.zeta_b
    df = float(delta_f_norm)
    U = branch_grid(a, za, za, link.p, 0.0, window)[link.lower]
    V = branch_grid(b, zb, za, link.p, df, window)[link.lower]
    W = branch_grid(a, za, zb, link.p, -df, window)[link.mirror]
    Z = branch_grid(b, zb, zb, link.p, 0.0, window)[link.mirror]
    return U, V, W, Z


def naive_uvwz_grid(payload: PayloadGrid, config: FracConfig, delta_f_norm: float,
                    window=LOCALIZATION_WINDOW, link=None):
    """The same four terms for the adjacent-pair baseline.

    Pair ``p`` occupies subcarriers ``2p+1`` and ``2p+2``; ``U, V`` are taken
    at the first and ``W, Z`` at the second. ``payload.x`` and ``payload.y``
    are ``(N/2, M_half)``.
    """
    link = link or get_link(config)
    shape = (config.N // 2, config.M_half)
    if payload.x.shape != shape or payload.y.shape != shape:
        raise ValueError(f"baseline payload must be {shape}")
    a = np.zeros((config.N, config.M_half))
    b = np.zeros_like(a)
    a[0::2], a[1::2] = payload.x, -payload.y
    b[0::2], b[1::2] = payload.y, payload.x
    z = link.plain_zeta
    df = float(delta_f_norm)
    U = branch_grid(a, z, z, link.p, 0.0, window)[0::2]
    V = branch_grid(b, z, z, link.p, df, window)[0::2]
    W = branch_grid(a, z, z, link.p, -df, window)[1::2]
    Z = branch_grid(b, z, z, link.p, 0.0, window)[1::2]
    return U, V, W, Z


def residual_report(payload: PayloadGrid, config: FracConfig, delta_f_values, link=None,
                    scheme: str = "frac"):
    """Self-cancellation ``|W* + V|`` at every payload position and offset.

    Returns a list of dicts with keys ``subcarrier`` (1-based absolute),
    ``n, delta_f_norm, abs_V, abs_W, residual, ok``. ``scheme`` is ``frac``
    or ``naive_alamouti``.
    """
    link = link or get_link(config)
    if scheme == "frac":
        grid_fn, subs = uvwz_grid, link.lower + 1
    elif scheme == "naive_alamouti":
        grid_fn, subs = naive_uvwz_grid, np.arange(1, config.N + 1, 2)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    rows = []
    for df in delta_f_values:
        _, V, W, _ = grid_fn(payload, config, df, link=link)
        resid = np.abs(np.conj(W) + V)
        ok = resid <= SELF_CANCEL_RTOL * np.maximum(np.abs(V), SELF_CANCEL_FLOOR)
        for i, sub in enumerate(subs):
            for n in range(config.M_half):
                rows.append(dict(subcarrier=int(sub), n=n, delta_f_norm=float(df),
                                 abs_V=float(abs(V[i, n])), abs_W=float(abs(W[i, n])),
                                 residual=float(resid[i, n]), ok=bool(ok[i, n])))
    return rows


def write_residual_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "n", "delta_f_norm", "abs_V", "abs_W", "residual"])
        for r in rows:
            writer.writerow([r["subcarrier"], r["n"], r["delta_f_norm"], f"{r['abs_V']:.6e}",
                             f"{r['abs_W']:.6e}", f"{r['residual']:.6e}"])


def write_interference_csv(path, table: dict, k: int, n: int, delta_f_norm: float) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "l", "m", "k", "n", "delta_f_norm", "re", "im", "abs"])
        for (src, dst), arr in table.items():
            big_l = (arr.shape[0] - 1) // 2
            big_m = (arr.shape[1] - 1) // 2
            for i in range(arr.shape[0]):
                for j in range(arr.shape[1]):
                    v = arr[i, j]
                    if np.isnan(v.real):
                        continue
                    writer.writerow([src, dst, i - big_l, j - big_m, k, n, delta_f_norm,
                                     f"{v.real:.12e}", f"{v.imag:.12e}", f"{abs(v):.12e}"])


def measure_sir(scheme: str, channel: str, delta_f_norm: float, config: FracConfig,
                trials: int, rng: np.random.Generator) -> float:
    """Signal-to-residual-interference ratio (dB) of the combiner output, noiseless.

    Desired power is ``(gain * symbol)^2`` summed over decisions; the residual
    is whatever else the decision statistic contains. Antenna A has zero
    offset, antenna B ``delta_f_norm * eps``.
    """
    if trials < 100:
        raise ValueError(f"measure_sir needs at least 100 trials, got {trials}")
    link = get_link(config)
    profile = load_profile(channel)
    desired = residual = 0.0
    for _ in range(trials):
        symbols = rng.choice([-1.0, 1.0], size=(link.n_rows(scheme), config.M_half))
        ch_a = realize(profile, 0.0, rng, config)
        ch_b = realize(profile, delta_f_norm, rng, config)
        sig_a, sig_b = link.transmit(scheme, symbols)
        y = apply_channel(sig_a, ch_a)
        if sig_b is not None:
            y = y + apply_channel(sig_b, ch_b)
        raw, gain = link.receive(scheme, y, ch_a, ch_b)
        desired += float(np.sum((gain * symbols) ** 2))
        residual += float(np.sum((raw - gain * symbols) ** 2))
    return 10.0 * np.log10(desired / residual)
