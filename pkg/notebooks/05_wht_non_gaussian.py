"""
Non-Gaussian inputs and the Walsh-Hadamard transform
====================================================

The calibration assumes Gaussian inputs.  Rotating both records with the
same orthonormal Hadamard matrix keeps their inner product but makes each
coordinate a sum of many samples, which is close to Gaussian.
"""

# %%
import numpy as np

from pwlcorr import (
    CorrelatorSpec,
    Family,
    RngStream,
    calibrate,
    empirical_product_variance,
    estimate_r,
    fwht,
    sample_block,
)

x = np.arange(8.0)
print(fwht(np.ones(4)), np.allclose(fwht(fwht(x)), x))

# %%
spec = CorrelatorSpec.linear_rectifier()
model = calibrate(spec, rng=RngStream(5, 1))

for fam in (Family.GAUSSIAN, Family.UNIFORM, Family.GAMMA):
    xs, ys = sample_block(1024, 0.8, fam, RngStream(5, 2), 300)
    raw = estimate_r(xs, ys, spec, model).mean()
    rot = estimate_r(xs, ys, spec, model, use_wht=True).mean()
    print(f"{fam.value:>8}: plain {raw:.4f}  after WHT {rot:.4f}")

# %% [markdown]
# The product correlator needs no Gaussianization for its mean, but the
# variance of a single product depends on the distribution.

# %%
for r in (0.0, 0.5, 0.9):
    g = empirical_product_variance(r, Family.GAUSSIAN, 10 ** 6, RngStream(6))
    u = empirical_product_variance(r, Family.UNIFORM, 10 ** 6, RngStream(6))
    print(f"R={r}: gaussian {g:.3f} (1+R^2={1 + r * r:.3f})  uniform {u:.3f} (1-R^2/5={1 - r * r / 5:.3f})")
