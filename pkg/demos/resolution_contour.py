"""Rate over the (DAC bits, ADC bits) grid and the cheapest 99% corner.

The grid makes the asymmetry visible: walking up the ADC axis pays off
faster than walking up the DAC axis, and a handful of bits on both
sides already buys nearly the ideal rate.
"""

import math

from qmimo import SystemConfig, rate_grid

N_ANTENNAS, N_USERS, SNR_DB = 128, 16, -10.0

cfg = SystemConfig.with_snr(N_ANTENNAS, N_USERS, 10.0 ** (SNR_DB / 10.0))
bits = list(range(1, 9)) + [math.inf]
grid = rate_grid(cfg, bits, bits)
ideal = grid[-1, -1]

labels = [("inf" if b == math.inf else str(b)) for b in bits]
print(f"rate in bits/s/Hz at {SNR_DB:g} dB, load 1/8 "
      f"(rows: DAC bits, columns: ADC bits)")
print("       " + "  ".join(f"{c:>6s}" for c in labels))
for row_label, row in zip(labels, grid):
    print(f"{row_label:>6s} " + "  ".join(f"{r:6.4f}" for r in row))

print()
print(f"ideal-converter rate: {ideal:.4f}")
print("cheapest pairings reaching 99% of it (by total bits):")
candidates = [
    (bits[i] + bits[j], bits[i], bits[j])
    for i in range(len(bits) - 1)
    for j in range(len(bits) - 1)
    if grid[i, j] >= 0.99 * ideal
]
for total, b_da, b_ad in sorted(candidates)[:5]:
    print(f"  DAC {b_da} bits + ADC {b_ad} bits "
          f"(total {total}, rate {grid[bits.index(b_da), bits.index(b_ad)]:.4f})")
