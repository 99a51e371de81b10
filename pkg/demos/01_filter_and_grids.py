"""The overlap-4 PHYDYAS pulse, its transmultiplexer response and the phase grids.

Run:  python demos/01_filter_and_grids.py
"""

import numpy as np

from fracfbmc.config import FracConfig
from fracfbmc.filterbank import design_phydyas, localization_bounds, transmux_table
from fracfbmc.modem import build_phase_grids, validate_phase_grids

p = design_phydyas(256, 4)
print(f"{len(p)} taps, energy {p.energy:.12f}, symmetry residual {p.symmetry_residual:.1e}")

# |F(l, m)| near the origin. Row l = 1 decays as 0.239, 0.206, 0.125, 0.043, 0.005
# along m, which is why the window is (1, 4) only below a 5.4e-3 threshold.
t = np.abs(transmux_table(p, 0.0))
print("\n|F(l, m)|, l = 0..2 (rows), m = 0..5 (cols)")
for l in range(3):
    print("  ", " ".join(f"{t[8 + l, 8 + m]:.4f}" for m in range(6)))

for thr in (1e-2, 5e-3, 1e-4):
    print(f"localization at {thr:g}: (L, M) = {localization_bounds(p, thr)}")

# An offset leaks energy into neighbouring subcarriers: compare |F(l, 0)| with and without it.
t3 = np.abs(transmux_table(p, 0.3))
print("\n|F(l, 0)| for l = -2..2 at df = 0 and df = 0.3")
print("  df=0  ", " ".join(f"{t[8 + l, 8]:.4f}" for l in range(-2, 3)))
print("  df=0.3", " ".join(f"{t3[8 + l, 8]:.4f}" for l in range(-2, 3)))

# Phase grids for a 16-subcarrier subblock: lower half of zeta_b is plain j^(l+m),
# the upper halves follow from the reversal rule.
cfg = FracConfig(N=32, N_F=16, L_n=1, M_half=4)
g = build_phase_grids(cfg)
sym = {1: " 1", -1: "-1", 1j: " j", -1j: "-j"}
print(f"\nchi = {g.chi}, valid = {validate_phase_grids(g, cfg)}")
print("zeta_a / zeta_b, subcarriers 1..16 at m = 0")
print("  a:", " ".join(sym[complex(np.round(z))] for z in g.zeta_a[:16, 0]))
print("  b:", " ".join(sym[complex(np.round(z))] for z in g.zeta_b[:16, 0]))
