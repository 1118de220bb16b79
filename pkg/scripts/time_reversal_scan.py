"""Largest time-reversal asymmetry delta_chi over |Gamma_f| <= f Gamma_edge.

Scans the dimerization angle and the window fraction f, and prints the
angle where Gamma_r0 = Gamma_edge.
"""

import math

import numpy as np

from quasibic import SystemParams, edge_decay_rate
from quasibic.analysis import delta_chi, find_time_reversal_phi


def main():
    fractions = (0.5, 0.8, 0.9, 0.95, 0.99)
    print("phi/pi   " + "  ".join(f"f={f:<5}" for f in fractions))
    for phi in np.array([0.15, 0.2, 0.22, 0.241, 0.26, 0.3]) * math.pi:
        p = SystemParams(phi=float(phi))
        ge = edge_decay_rate(p)
        vals = [delta_chi(p, np.linspace(0, f * ge, 2001), override=True).max() for f in fractions]
        print(f"{phi / math.pi:.3f}   " + "  ".join(f"{v:7.4f}" for v in vals))
    print(f"Gamma_r0 = Gamma_edge at phi = {find_time_reversal_phi() / math.pi:.5f} pi")


if __name__ == "__main__":
    main()
