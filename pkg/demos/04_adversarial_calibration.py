"""Probe calibration below the average: adversarial group calibration.

A curve averaged over the whole test set can look flawless while small
subgroups are badly miscalibrated. For each subgroup size we repeatedly draw
ten random subgroups and keep the worst miscalibration area; the mean of
those worst cases, as the size shrinks toward single predictions, estimates
how deep the calibration really goes.
"""

import uqregress as uq
from uqregress.core import RngSeed

data = uq.generate_synthetic(40_000, 2, seed=RngSeed(31))
calibrated = uq.calibrated_prediction_set(data)
miscalibrated = calibrated.with_sigma(calibrated.sigma * 0.6)

fractions = [0.005, 0.01, 0.02, 0.05, 0.2, 1.0]
print(f"{'fraction':>9} | {'calibrated':>22} | {'overconfident':>22}")
curves = {
    name: uq.adversarial_group_calibration(p, fractions, trials=60, subgroups=10,
                                           seed=RngSeed(5))
    for name, p in (("calibrated", calibrated), ("overconfident", miscalibrated))
}
for i, f in enumerate(fractions):
    cells = []
    for name in ("calibrated", "overconfident"):
        adv = curves[name]
        cells.append(f"{adv.mean_worst_area[i]:.4f} +/- {adv.std_error[i]:.4f}")
    print(f"{f:>9.3f} | {cells[0]:>22} | {cells[1]:>22}")

print("\nreading the table:")
print(" - at fraction 1.0 the 'worst subgroup' is the whole set, so the value")
print("   equals the ordinary miscalibration area and the error bar vanishes;")
print(" - on calibrated data the worst-case area grows as groups shrink purely")
print("   from sampling noise; a real calibration defect keeps it high at")
print("   every scale, as the overconfident column shows.")
