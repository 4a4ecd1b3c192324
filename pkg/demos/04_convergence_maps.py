"""Transformations reshape the convergence neighborhood of unit-step Newton.

Each cell of a grid over [-4, 4]^2 starts a unit-stepsize Newton run on
f^r for the Beale function; a cell counts as converged when an iterate comes
within 1e-6 of the minimizer (3, 0.5). Different exponents r give visibly
different converged regions.
"""

import numpy as np

from newton_transforms import NewtonConfig, make_benchmark, make_table1
from newton_transforms.scans import scan_convergence

loss = make_benchmark("beale")
cfg = NewtonConfig(max_iters=40)
maps = {}
for r in (0.5, 1.0, 2.0):
    scan = scan_convergence(loss, make_table1("polynomial", r=r), (-4, 4, 40), (-4, 4, 40), cfg=cfg)
    maps[r] = scan
    print(f"r = {r:3g}: {int(np.sum(scan.converged)):4d}/{scan.converged.size} cells converge")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    for ax, (r, scan) in zip(axes, maps.items()):
        ax.imshow(scan.converged.T, origin="lower", extent=(-4, 4, -4, 4), cmap="Greens", vmin=0, vmax=1)
        ax.plot(3.0, 0.5, "r*")
        ax.set_title(f"Beale, transform f^{r:g}", fontsize=9)
    fig.tight_layout()
    fig.savefig("convergence_maps.png", dpi=130)
    print("wrote convergence_maps.png")
except ImportError:
    pass
