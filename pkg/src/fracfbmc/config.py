"""System configuration shared by the modem, codec and harness."""

from __future__ import annotations

from dataclasses import dataclass


class ConfigurationError(ValueError):
    """Raised for parameter combinations the system cannot be built with."""


@dataclass(frozen=True)
class FracConfig:
    """Parameters of one FRAC-FBMC link.

    Subcarriers are numbered 1..N on the outside (as in the usual FBMC
    notation); arrays are indexed 0..N-1, so subcarrier ``l`` lives in row
    ``l - 1``.

    Parameters
    ----------
    N : int
        Number of subcarriers (= FFT size, samples per symbol period).
    N_F : int
        Subblock size. Must be even and divide ``N``.
    L_n : int
        Guard nulls at the left edge of each half-subblock.
    overlap : int
        Prototype filter overlap factor.
    eps : float
        Subcarrier spacing in Hz. The sample rate is ``N * eps``.
    M_half : int
        Half-symbol instants per burst.
    pam_levels : int
        2 or 4.
    """

    N: int = 256
    N_F: int = 256
    L_n: int = 1
    overlap: int = 4
    eps: float = 15e3
    M_half: int = 28
    pam_levels: int = 2

    def __post_init__(self):
        if self.N <= 0 or self.N % 4:
            raise ConfigurationError(f"N must be a positive multiple of 4, got {self.N}")
        if self.N_F <= 0 or self.N_F % 2:
            raise ConfigurationError(f"N_F must be even, got {self.N_F}")
        if self.N % self.N_F:
            raise ConfigurationError(f"N_F={self.N_F} does not divide N={self.N}")
        if self.L_n < 1:
            raise ConfigurationError("L_n must be at least 1")
        if self.N_F // 2 - self.L_n <= 0:
            raise ConfigurationError(
                f"no payload left: N_F/2={self.N_F // 2} with L_n={self.L_n}")
        if self.pam_levels not in (2, 4):
            raise ConfigurationError(f"pam_levels must be 2 or 4, got {self.pam_levels}")
        if self.M_half < 1:
            raise ConfigurationError("M_half must be positive")

    @property
    def K(self) -> int:
        """Number of subblocks."""
        return self.N // self.N_F

    @property
    def half(self) -> int:
        return self.N_F // 2

    @property
    def payload_per_half(self) -> int:
        """Information symbols per half-subblock per half-symbol."""
        return self.N_F // 2 - self.L_n

    @property
    def sample_rate(self) -> float:
        return self.N * self.eps

    @property
    def bits_per_symbol(self) -> int:
        return 1 if self.pam_levels == 2 else 2

    def mirror(self, k: int) -> int:
        """Subblock-local partner index ``N_F - k + 1 + L_n`` (1-based)."""
        return self.N_F - k + 1 + self.L_n
