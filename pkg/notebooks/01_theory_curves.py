"""
Expected correlator output g(R)
===============================

Every piecewise-linear correlator has a mean output that depends only on
the true correlation when the inputs are jointly Gaussian.  Here we
tabulate it for a few members of the family and check the one curve that
has a closed form.
"""

# %%
import numpy as np

from pwlcorr import PwlMixture, build_gcurve, g_l1_closed, l1_quartic_identity

grid = np.linspace(-0.99, 0.99, 199)

# %% [markdown]
# The linear rectifier is the single-offset mixture with alpha = 0.

# %%
l1 = build_gcurve(PwlMixture.single(0.0), grid)
print("max |quad - closed|:", np.max(np.abs(l1.g_values - g_l1_closed(grid))))

# %% [markdown]
# Larger offsets flatten g near R = 0 and steepen it near the ends.

# %%
for alpha in (0.0, 0.5, 1.0, 2.0):
    c = build_gcurve(PwlMixture.single(alpha), grid)
    print(f"alpha={alpha:3.1f}  g(0.5)={c(0.5):.4f}  g(0.95)={c(0.95):.4f}")

# %%
# the closed form can be undone exactly, up to the sign of R
for r in (0.3, 0.8):
    print(r, l1_quartic_identity(g_l1_closed(r)), r * r)

# %% [markdown]
# A fine uniform ramp of offsets behaves like a scaled product correlator.

# %%
c = 16.0
ramp = build_gcurve(PwlMixture.uniform_ramp(4096, c), np.linspace(-0.5, 0.5, 11))
print(np.round(c / 2 * ramp.g_values - ramp.r_grid, 5))
