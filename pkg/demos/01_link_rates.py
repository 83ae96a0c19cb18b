"""
Uplink rates under FDMA and 2-user NOMA
=======================================

Shows how the achievable uplink rate responds to bandwidth, transmit
power and channel gain, and how the gain-sorted pairing groups users
onto shared NOMA channels.
"""

import numpy as np

from flmar import (
    LinkParams,
    fdma_rate,
    noma_channel_rates,
    pair_users,
    sic_decode_order,
)

NOISE_PSD = 3.98e-21  # W/Hz

# A single dedicated link: rate grows with both knobs, but with
# diminishing returns in power (log) and near-linear gains in bandwidth
# until the SNR per Hz collapses.
link = LinkParams(gain=1e-9, noise_psd=NOISE_PSD)

print("FDMA, one user on a private band")
for bw in (1e6, 5e6, 20e6):
    for p in (0.05, 0.2):
        r = fdma_rate(bw, p, link)
        print(f"  bw={bw / 1e6:5.1f} MHz  p={p:.2f} W  rate={r / 1e6:8.3f} Mbit/s")

# Same total spectrum, split two ways, versus one NOMA channel carrying
# both users at once. SIC decodes the strong user first, so the weak
# user sees an interference-free channel and the strong one pays for it.
print("\nTwo users sharing 10 MHz")
g_strong, g_weak = 4e-9, 4e-10
p = 0.2

half = 5e6
r1 = fdma_rate(half, p, LinkParams(g_strong, NOISE_PSD))
r2 = fdma_rate(half, p, LinkParams(g_weak, NOISE_PSD))
print(f"  FDMA split      strong={r1 / 1e6:7.3f}  weak={r2 / 1e6:7.3f} Mbit/s")

rs, rw = noma_channel_rates(10e6, (g_strong, p), (g_weak, p), NOISE_PSD)
print(f"  NOMA shared     strong={rs / 1e6:7.3f}  weak={rw / 1e6:7.3f} Mbit/s")
print(f"  sum rates       fdma={(r1 + r2) / 1e6:7.3f}  noma={(rs + rw) / 1e6:7.3f}")

# Decode order is by descending gain; ties fall back to ascending id.
gains = np.array([2e-10, 9e-10, 9e-10, 5e-9])
order = sic_decode_order(enumerate(gains))
print("\nSIC decode order for gains", gains, "->", order)

# Pairing for a 6-user cell: strongest with weakest, second strongest
# with second weakest, and so on. Each pair gets an equal slice of the
# total band.
gains = np.array([5e-9, 1e-10, 8e-10, 3e-9, 2e-9, 4e-10])
pairing = pair_users(gains, n_channels=3, total_bandwidth_hz=20e6)
print("\nPairing on 3 channels,", f"{pairing.channel_bandwidth_hz / 1e6:.3f} MHz each")
for strong_id, weak_id in pairing.channels:
    print(f"  channel: strong user {strong_id} (g={gains[strong_id]:.1e})"
          f"  weak user {weak_id} (g={gains[weak_id]:.1e})")
