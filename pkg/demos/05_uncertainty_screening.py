"""Uncertainty-gated screening: enumerate candidates, then audit honesty.

The screening rule keeps predictions inside a target value window whose
sigma is below a ceiling, mimicking a materials search for near-zero
adsorption energies with tight uncertainty. A selected prediction is honest
if its mu +/- 3 sigma interval contains the ground truth. Recalibrating
first makes the gate far more trustworthy.
"""

import uqregress as uq
from uqregress.core import RngSeed
from uqregress.screening import ScreenCriteria, screen

rng = RngSeed(404).generator()
n = 30_000
mu = rng.uniform(-0.5, 0.5, n)
sigma_true = rng.uniform(0.01, 0.12, n)
y = mu + sigma_true * rng.standard_normal(n)
ids = tuple(f"cand{i:05d}" for i in range(n))

# the model under-reports its uncertainty by 3x
reported = uq.PredictionSet(ids=ids, y_true=y, mu=mu, sigma=sigma_true / 3.0)

criteria = ScreenCriteria(value_lo=-0.1, value_hi=0.1, sigma_max=0.05, honesty_multiplier=3.0)

raw = screen(reported, criteria)
fit = uq.fit_scalar(reported)
recal = uq.apply_scalar(reported, fit.scalar)
fixed = screen(recal, criteria)

print(f"window [{criteria.value_lo}, {criteria.value_hi}], "
      f"sigma <= {criteria.sigma_max}, honesty at +/-{criteria.honesty_multiplier} sigma\n")
for name, rep, pset in (("overconfident as reported", raw, reported),
                        (f"after scalar recalibration (x{fit.scalar:.3f})", fixed, recal)):
    honest_share = rep.n_honest / rep.n_selected if rep.n_selected else float("nan")
    print(f"{name}:")
    print(f"  selected {rep.n_selected:5d}   honest {rep.n_honest:5d}   "
          f"dishonest {rep.n_dishonest:5d}   honest share {honest_share:.1%}")
    print(f"  overall 3-sigma honesty rate: {uq.honesty_rate(pset, 3.0):.4f}\n")

print("the overconfident gate admits many candidates whose intervals miss the")
print("truth; after recalibration the sigma <= 0.05 gate is stricter (sigmas")
print("grew), and the surviving candidates' intervals can be taken at face value.")
