"""
Error profiles against the Cramér-Rao bound
===========================================

Which correlator is most accurate depends on where R sits.  The product
correlator wins near zero, the linear rectifier near the ends.
"""

# %%
import numpy as np

from pwlcorr import CorrelatorSpec, RngStream, calibrate, error_std_sweep

N = 256
specs = [CorrelatorSpec.empirical(), CorrelatorSpec.linear_rectifier(), CorrelatorSpec.mp(1.45)]
models = {str(s): calibrate(s, rng=RngStream(10, 1)) for s in specs}

# %%
runs = {str(s): error_std_sweep(s, models[str(s)], n=N, trials=1000, rng=RngStream(10, 2))
        for s in specs}
first = next(iter(runs.values()))

print("    R    crb   " + "  ".join(f"{k:>14}" for k in runs))
for j, r in enumerate(first.r_grid):
    vals = "  ".join(f"{res.sigma[0, j]:14.4f}" for res in runs.values())
    print(f"{r:+.2f}  {first.crb_sigma[0, j]:.4f}  {vals}")

# %%
for k, res in runs.items():
    print(k, "SNR %.2f dB" % res.snr_db[0])
