"""
Per-device training cost and the resolution trade-off
=====================================================

Local training cost scales quadratically with frame resolution through
the cycles-per-frame model, while detection accuracy saturates. This
tension is what the resolution knob in the optimizer trades on.
"""

import numpy as np

from flmar import (
    comp_energy,
    comp_time,
    cycles_per_frame,
    detection_accuracy,
)

CPP = 737.0        # cycles per pixel
KAPPA = 1e-28      # effective switched capacitance
FRAMES = 100
ITERATIONS = 10

print("Cost of one local round, 100 frames, f = 1 GHz")
print(f"{'res':>5} {'cycles/frame':>14} {'time s':>9} {'energy J':>9} {'accuracy':>9}")
for r in (100, 200, 400, 600, 800, 1000):
    cyc = cycles_per_frame(r, CPP)
    t = comp_time(ITERATIONS, cyc, FRAMES, 1e9)
    e = comp_energy(KAPPA, ITERATIONS, cyc, FRAMES, 1e9)
    a = detection_accuracy(r)
    print(f"{r:5d} {cyc:14.3e} {t:9.3f} {e:9.4f} {a:9.4f}")

# Energy grows with f^2 while time shrinks as 1/f, so the
# energy-delay product is linear in f: slow clocks always win on
# energy, fast clocks always win on time.
print("\nSame workload at 400 px across CPU frequencies")
cyc = cycles_per_frame(400, CPP)
for f in np.array([0.2, 0.5, 1.0, 1.5, 2.0]) * 1e9:
    t = comp_time(ITERATIONS, cyc, FRAMES, f)
    e = comp_energy(KAPPA, ITERATIONS, cyc, FRAMES, f)
    print(f"  f={f / 1e9:4.1f} GHz  time={t:8.3f} s  energy={e:7.4f} J  e*t={e * t:8.3f}")

# The accuracy curve clamps to 0 below roughly 70 px: tiny frames
# carry no usable signal under this model.
print("\nAccuracy at the low end")
for r in (40, 70, 71, 100):
    print(f"  {r:4d} px -> {detection_accuracy(r):.6f}")
