"""Group-sequential boundaries from error spending.

Shows efficacy/futility z-boundaries for a one-interim design as the
interim moves from 10% to 90% information, under (a) direct cumulative
spends of half the error budget at the interim and (b) O'Brien-Fleming
type spending functions.  Futility is binding; the alternative drift is
calibrated so the boundaries meet at the final look.

Run:  python3 demos/03_sequential_boundaries.py
Writes demos/output/boundaries.png
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dtedesign import SpendingSpec, compute_boundaries

out_dir = pathlib.Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

fractions = np.arange(0.1, 1.0, 0.1)


def direct_spec(f):
    return SpendingSpec(
        alpha_rule="direct",
        beta_rule="direct",
        direct_cumulative=((f, 0.0125, 0.05), (1.0, 0.025, 0.10)),
    )


fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, make_spec, title in [
    (axes[0], direct_spec, "direct spends (half the budget at the interim)"),
    (axes[1], lambda f: SpendingSpec(), "O'Brien-Fleming-type spending"),
]:
    rows = [compute_boundaries(make_spec(float(f)), (float(f), 1.0)) for f in fractions]
    ax.plot(fractions, [b.efficacy_b[0] for b in rows], "o-", label="efficacy b1")
    ax.plot(fractions, [b.futility_a[0] for b in rows], "s-", label="futility a1")
    ax.plot(fractions, [b.efficacy_b[1] for b in rows], "^--", label="final b2 = a2")
    ax.set_xlabel("interim information fraction")
    ax.set_title(title)
    ax.grid(alpha=0.3)
axes[0].set_ylabel("z-scale boundary")
axes[0].legend()

fig.tight_layout()
fig.savefig(out_dir / "boundaries.png", dpi=130)
print(f"wrote {out_dir / 'boundaries.png'}")

b = compute_boundaries(direct_spec(0.5), (0.5, 1.0))
hr_implied = np.exp(-b.drift / np.sqrt(450 / 4))
print(
    f"interim at 50%: a1={b.futility_a[0]:+.3f}, b1={b.efficacy_b[0]:.3f}, "
    f"final={b.efficacy_b[1]:.3f}; calibrated drift {b.drift:.3f} "
    f"(implied design hazard ratio {hr_implied:.3f} at 450 events)"
)
