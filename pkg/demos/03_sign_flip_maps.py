"""Where does the Newton step reverse direction?

The scaling factor 1 + (phi''/phi') ||grad f||_x*^2 can go negative: there
the Newton direction on phi(f) is the exact reversal of the direction on f,
so a schedule transferred across the transform must use a negative stepsize.
This maps the factor's sign for a polynomial and a logarithmic transform on
the Beale function.
"""

import numpy as np

from newton_transforms import make_benchmark, make_table1
from newton_transforms.scans import scan_sign_flip

loss = make_benchmark("beale")
scans = {}
for label, t in [
    ("f^0.25", make_table1("polynomial", r=0.25)),
    ("log(1+f)", make_table1("logarithmic", a=1.0)),
]:
    scan = scan_sign_flip(loss, t, (-4, 4, 120), (-4, 4, 120), seed=0)
    neg = int(np.sum(scan.scaling_sign == -1))
    total = scan.scaling_sign.size
    print(f"{label:10s}: {neg}/{total} cells with a reversed step "
          f"({scan.cross_check_mismatches} cross-check mismatches)")
    scans[label] = scan

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, (label, scan) in zip(axes, scans.items()):
        ax.imshow(scan.scaling_sign.T, origin="lower", extent=(-4, 4, -4, 4), cmap="RdBu", vmin=-1, vmax=1)
        ax.set_title(f"sign of scaling factor, {label} on Beale", fontsize=9)
    fig.tight_layout()
    fig.savefig("sign_flip_maps.png", dpi=130)
    print("wrote sign_flip_maps.png")
except ImportError:
    pass
