"""Monte Carlo BER sweeps over SNR, inter-antenna offset, subblock size and channel.

SNR convention
--------------
``snr_db`` is Eb/N0 per information bit. Every real information symbol is
sent with total energy 1 summed over the transmit antennas and the analysis
filter has unit energy, so the complex noise variance per sample is
``1 / (bits_per_symbol * Eb/N0)``. Guard nulls carry no energy, so the
bandwidth-efficiency loss ``(N_F - 2 L_n) / N_F`` shows up as rate, not as
an SNR penalty.

Randomness
----------
Trial ``t`` of every grid point draws its bits, fading and noise from child
streams of ``SeedSequence(seed, spawn_key=(t,))``; the fading uniforms come
from a scrambled Sobol sequence indexed by ``t``. Grid points of one sweep
therefore see the same bursts, fades and noise (common random numbers), which
makes offset and subblock-size comparisons paired, and the result does not
depend on how trials are split across workers.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy.stats import qmc
from statsmodels.stats.proportion import proportion_confint

from .channel import ChannelRealization, TapDelayProfile, add_awgn, apply_channel, load_profile, realize
from .config import ConfigurationError, FracConfig
from .frac_codec import pam_demap, pam_map
from .schemes import SCHEMES, get_link

CSV_HEADER = ("scheme", "channel", "snr_db", "iafo_norm", "nf_half", "trials",
              "bits", "bit_errors", "ber", "ci95")
INCOMPLETE_MARK = "# incomplete"
FULL_TRIALS = 40_000
DESK_TRIALS = 2_000
_CHUNK = 50


@dataclass
class SweepConfig:
    scheme: str = "frac"
    channel: str = "flat"
    snr_db: list = field(default_factory=lambda: [10.0])
    iafo_norm: list = field(default_factory=lambda: [0.0])
    nf_half: list = field(default_factory=lambda: [128])
    trials: int = DESK_TRIALS
    seed: int = 0
    N: int = 256
    L_n: int = 1
    pam_levels: int = 2
    M_half: int = 28

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")
        load_profile(self.channel)
        if int(self.trials) < 1:
            raise ConfigurationError(f"trials must be at least 1, got {self.trials}")
        if not self.snr_db or not self.iafo_norm or not self.nf_half:
            raise ConfigurationError("snr_db, iafo_norm and nf_half must be non-empty")
        for f in self.iafo_norm:
            if not 0.0 <= f < 0.5:
                raise ConfigurationError(f"iafo_norm {f} outside [0, 0.5)")
        for h in self.nf_half:
            if h < 1 or (self.N // 2) % h:
                raise ConfigurationError(f"nf_half {h} does not divide N/2 = {self.N // 2}")
            self.frac_config(h)  # surfaces L_n / N problems early

    def frac_config(self, nf_half: int) -> FracConfig:
        return FracConfig(N=self.N, N_F=2 * int(nf_half), L_n=self.L_n,
                          M_half=self.M_half, pam_levels=self.pam_levels)

    def points(self):
        """Grid points in output order: nf_half, then iafo, then snr."""
        return [(h, f, s) for h in self.nf_half for f in self.iafo_norm for s in self.snr_db]


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    channel: str
    snr_db: float
    iafo_norm: float
    nf_half: int
    trials: int
    bits: int
    bit_errors: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def ci95(self) -> float:
        """Half-width of the 95% Wilson score interval."""
        if not self.bits:
            return 0.0
        lo, hi = proportion_confint(self.bit_errors, self.bits, alpha=0.05, method="wilson")
        return float(hi - lo) / 2.0

    def row(self):
        return [self.scheme, self.channel, _fmt(self.snr_db), _fmt(self.iafo_norm), self.nf_half,
                self.trials, self.bits, self.bit_errors, f"{self.ber:.6e}", f"{self.ci95:.6e}"]


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# one burst
# ---------------------------------------------------------------------------

def noise_variance(snr_db: float, config: FracConfig) -> float:
    """Complex noise variance per sample for Eb/N0 = ``snr_db``."""
    return 1.0 / (config.bits_per_symbol * 10.0 ** (snr_db / 10.0))


def trial_streams(seed: int, trial: int):
    """Independent generators for (bits, channel, noise) of one trial."""
    ss = np.random.SeedSequence(seed, spawn_key=(trial,))
    return [np.random.default_rng(s) for s in ss.spawn(3)]


def run_trial(scheme: str, profile: TapDelayProfile, snr_db: float, iafo_norm: float,
              config: FracConfig, rng, uniforms=None):
    """Simulate one burst and count bit errors.

    ``rng`` is a single generator or a ``(bits, channel, noise)`` triple.
    ``uniforms`` (length ``4 * n_taps``) drives the two antennas' fading;
    without it the fading comes from the channel generator. The first and
    last half-symbols are not counted.

    Returns
    -------
    (bits_sent, bit_errors)
    """
    if isinstance(rng, np.random.Generator):
        rng_bits = rng_ch = rng_noise = rng
    else:
        rng_bits, rng_ch, rng_noise = rng
    link = get_link(config)
    bps = config.bits_per_symbol
    n_rows = link.n_rows(scheme)
    bits = rng_bits.integers(0, 2, size=n_rows * config.M_half * bps, dtype=np.int8)
    symbols = pam_map(bits, config.pam_levels).reshape(n_rows, config.M_half)

    n_taps = len(profile.delays)
    u_a = u_b = None
    if uniforms is not None:
        uniforms = np.asarray(uniforms, dtype=float)
        u_a, u_b = uniforms[:2 * n_taps], uniforms[2 * n_taps:4 * n_taps]
    ch_a = realize(profile, 0.0, rng_ch, config, u_a)
    ch_b = realize(profile, iafo_norm, rng_ch, config, u_b)

    sig_a, sig_b = link.transmit(scheme, symbols)
    if snr_db == -math.inf:
        y = apply_channel(sig_a, ChannelRealization(np.zeros(1, complex), np.zeros(1, int), 0.0))
        y = add_awgn(y, 1.0, rng_noise)
    else:
        y = apply_channel(sig_a, ch_a)
        if sig_b is not None:
            y = y + apply_channel(sig_b, ch_b)
        if snr_db != math.inf:
            y = add_awgn(y, noise_variance(snr_db, config), rng_noise)

    raw, gain = link.receive(scheme, y, ch_a, ch_b)
    live = gain > 0
    est = np.where(live, raw / np.where(live, gain, 1.0), 0.0)
    if not live.all():
        # erased positions get a coin flip
        est = np.where(live, est, rng_noise.choice([-1.0, 1.0], size=est.shape))
    decided = pam_demap(est.ravel(), config.pam_levels).reshape(n_rows, config.M_half * bps)
    sent = bits.reshape(n_rows, config.M_half * bps)
    inner = slice(bps, (config.M_half - 1) * bps)
    errors = int(np.count_nonzero(decided[:, inner] != sent[:, inner]))
    return int(sent[:, inner].size), errors


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def fading_uniforms(seed: int, trials: int, n_taps: int) -> np.ndarray:
    """Scrambled Sobol points, one row of ``4 * n_taps`` uniforms per trial."""
    scramble = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2**31,)))
    sampler = qmc.Sobol(4 * n_taps, scramble=True, seed=scramble)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        pts = sampler.random_base2(max(0, math.ceil(math.log2(trials))))
    return pts[:trials]


def _run_chunk(args):
    scheme, channel, snr_db, iafo_norm, config, seed, start, uniforms = args
    profile = load_profile(channel)
    bits = errors = 0
    for i, u in enumerate(uniforms):
        b, e = run_trial(scheme, profile, snr_db, iafo_norm, config,
                         trial_streams(seed, start + i), u)
        bits += b
        errors += e
    return bits, errors


def _point_tasks(cfg: SweepConfig, point, uniforms):
    nf_half, iafo, snr = point
    config = cfg.frac_config(nf_half)
    for start in range(0, cfg.trials, _CHUNK):
        yield (cfg.scheme, cfg.channel, float(snr), float(iafo), config, cfg.seed, start,
               uniforms[start:start + _CHUNK])


def iter_sweep(cfg: SweepConfig, workers: int = 1):
    """Yield one :class:`BerRecord` per grid point, in grid order."""
    cfg.validate()
    uniforms = fading_uniforms(cfg.seed, cfg.trials, len(load_profile(cfg.channel).delays))
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for point in cfg.points():
            tasks = list(_point_tasks(cfg, point, uniforms))
            results = pool.map(_run_chunk, tasks) if pool else map(_run_chunk, tasks)
            bits = errors = 0
            for b, e in results:
                bits += b
                errors += e
            nf_half, iafo, snr = point
            yield BerRecord(cfg.scheme, cfg.channel, float(snr), float(iafo), int(nf_half),
                            cfg.trials, bits, errors)
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list[BerRecord]:
    return list(iter_sweep(cfg, workers))


# ---------------------------------------------------------------------------
# reference curves
# ---------------------------------------------------------------------------

def theoretical_single_ber(snr_db: float) -> float:
    """2-PAM over flat Rayleigh, one branch: ``(1 - sqrt(g / (1 + g))) / 2``."""
    g = 10.0 ** (snr_db / 10.0)
    return 0.5 * (1.0 - math.sqrt(g / (1.0 + g)))


def theoretical_alamouti_ber(snr_db: float) -> float:
    """2x1 Alamouti 2-PAM over i.i.d. flat Rayleigh with power 1/2 per antenna.

    With per-branch SNR ``g_c = g / 2`` and ``mu = sqrt(g_c / (1 + g_c))``
    the BER is ``((1 - mu) / 2)**2 * (2 + mu)``.
    """
    gc = 10.0 ** (snr_db / 10.0) / 2.0
    mu = math.sqrt(gc / (1.0 + gc))
    return ((1.0 - mu) / 2.0) ** 2 * (2.0 + mu)


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

class MalformedCSV(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def write_records(fh, records, complete: bool = True) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.row())
    if not complete:
        fh.write(INCOMPLETE_MARK + "\n")


def read_records(path) -> list[BerRecord]:
    """Parse a sweep CSV; comment lines are skipped."""
    out = []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or tuple(lines[0].split(",")) != CSV_HEADER:
        raise MalformedCSV(1, "missing or wrong header")
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        cells = next(csv.reader([line]))
        if len(cells) != len(CSV_HEADER):
            raise MalformedCSV(i, f"expected {len(CSV_HEADER)} fields, got {len(cells)}")
        try:
            rec = BerRecord(cells[0], cells[1], float(cells[2]), float(cells[3]), int(cells[4]),
                            int(cells[5]), int(cells[6]), int(cells[7]))
            float(cells[8]), float(cells[9])
        except ValueError as exc:
            raise MalformedCSV(i, str(exc)) from None
        if rec.bits < 0 or not 0 <= rec.bit_errors <= rec.bits:
            raise MalformedCSV(i, "bit counts out of range")
        out.append(rec)
    if not out:
        raise MalformedCSV(len(lines), "no data rows")
    return out


def load_config(path) -> SweepConfig:
    """Read a JSON file whose keys mirror :class:`SweepConfig`."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    known = {f.name for f in fields(SweepConfig)}
    extra = set(data) - known
    if extra:
        raise ConfigurationError(f"unknown config keys: {sorted(extra)}")
    return SweepConfig(**data)


def dump_config(cfg: SweepConfig) -> str:
    return json.dumps(asdict(cfg), indent=2)


_SNR_GRID = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
_FIG3_IAFO = [0.0, 0.1, 0.3]


def preset(name: str, scheme: str = "frac", trials: int = FULL_TRIALS) -> SweepConfig:
    """Grids of the three experiment families.

    ``fig3-flat``, ``fig3-pa``, ``fig3-va``: scheme comparison per channel with
    half-subblock sizes 128, 8 and 4. ``fig2-pa`` and ``fig2-va``: BER surface
    over half-subblock size and offset at 20 dB.
    """
    if name == "fig3-flat":
        return SweepConfig(scheme, "flat", list(_SNR_GRID), list(_FIG3_IAFO), [128], trials)
    if name == "fig3-pa":
        return SweepConfig(scheme, "itu_pa", list(_SNR_GRID), list(_FIG3_IAFO), [8], trials)
    if name == "fig3-va":
        return SweepConfig(scheme, "itu_va", list(_SNR_GRID), list(_FIG3_IAFO), [4], trials)
    if name in ("fig2-pa", "fig2-va"):
        ch = "itu_pa" if name == "fig2-pa" else "itu_va"
        return SweepConfig(scheme, ch, [20.0], [0.0, 0.1, 0.2, 0.3],
                           [4, 8, 16, 32, 64, 128], trials)
    raise ConfigurationError(f"unknown preset {name!r}; known: {PRESETS}")


PRESETS = ("fig2-pa", "fig2-va", "fig3-flat", "fig3-pa", "fig3-va")
