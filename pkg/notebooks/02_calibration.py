"""
Calibrating the inverse map
===========================

The estimate of R is a polynomial in the correlator score, fitted on
Monte-Carlo data at known correlations.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from pwlcorr import (
    CorrelatorSpec,
    RngStream,
    build_table,
    estimate_r,
    fit_inverse,
    load_model,
    sample_pairs,
    save_model,
)

spec = CorrelatorSpec.mp(1.45)
table = build_table(spec, n=4096, trials=200, rng=RngStream(1))
model = fit_inverse(table)
print("degree", model.degree, "residual", round(model.residual, 5), "domain", model.domain)

# %%
for r, score, se in table.rows()[::8]:
    print(f"R={r:+.3f}  score={score:+.4f}  se={se:.1e}")

# %% [markdown]
# Models are bound to the correlator they were fitted for, and survive a
# trip through a file.

# %%
path = Path(tempfile.mkdtemp()) / "mp.cal"
save_model(model, path)
again = load_model(path)

batch = sample_pairs(4096, 0.6, "gaussian", RngStream(2))
print("estimate:", estimate_r(batch.xs, batch.ys, spec, again))

try:
    estimate_r(batch.xs, batch.ys, CorrelatorSpec.empirical(), again)
except Exception as exc:
    print(type(exc).__name__, exc)
