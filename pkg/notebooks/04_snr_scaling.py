"""
SNR against record length
=========================

Averaged error falls like 1/sqrt(N), so SNR should gain about 3 dB every
time N doubles.  Small N falls short because estimates are clipped to [-1, 1].
"""

# %%
import numpy as np

from pwlcorr import CorrelatorSpec, RngStream, calibrate, snr_sweep

n_values = (16, 64, 256, 1024)
specs = [CorrelatorSpec.empirical(), CorrelatorSpec.linear_rectifier(), CorrelatorSpec.mp(2.0)]

# %%
# same seed for every spec: all correlators see the same samples
table = {}
for s in specs:
    m = calibrate(s, rng=RngStream(3, 1))
    table[str(s)] = snr_sweep(s, m, n_values=n_values, trials=300, rng=RngStream(3, 2)).snr_db

print("N     " + "  ".join(f"{k:>14}" for k in table))
for i, n in enumerate(n_values):
    print(f"{n:<5} " + "  ".join(f"{v[i]:14.2f}" for v in table.values()))

# %%
for k, v in table.items():
    print(k, "dB per doubling:", np.round(np.diff(v) / 2, 2))
