"""Walk a few ball points through every stage of the embedding.

For each point: the per-factor disc map, the product chart point, the
complex coordinates, the recovered actions, and the distance from the
torus.  Points on the real slice (all momenta zero) land exactly on it.
"""

import argparse

import numpy as np

from relpack import (
    chart_j,
    clifford_distance,
    make_params,
    moment_map,
    phi,
    sigma_inv,
)


TOUR = [
    ("center (real slice)", [0.0, 0.0, 0.0, 0.0]),
    ("real slice, half radius", [0.4, 0.0, 0.2, 0.0]),
    ("just off the slice", [0.4, 1e-7, 0.2, -1e-7]),
    ("generic interior", [0.3, 0.25, -0.35, 0.1]),
    ("near the boundary", [0.55, 0.3, 0.35, -0.2]),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=0.8)
    args = ap.parse_args(argv)
    params = make_params(2, args.r)

    for label, point in TOUR:
        x = np.asarray(point, dtype=float)
        u = x[0::2] ** 2 + x[1::2] ** 2
        if u.sum() >= params.r**2:
            print(f"{label}: skipped, outside the r={params.r} ball")
            continue
        image = phi(x, params)
        z = chart_j(image)
        mom = moment_map(z)
        back = np.empty_like(x)
        for i in range(2):
            back[2 * i], back[2 * i + 1] = sigma_inv(
                image[2 * i], image[2 * i + 1], params
            )
        print(label)
        print(f"  ball point      {np.array2string(x, precision=6)}")
        print(f"  factor actions  u = {np.array2string(u, precision=6)}")
        print(f"  chart point     {np.array2string(image, precision=6)}")
        print(f"  z               {np.array2string(z, precision=6)}")
        print(f"  moment map      {np.array2string(mom, precision=15)}")
        print(f"  torus distance  {clifford_distance(z, params):.3e}")
        print(f"  inverse error   {np.max(np.abs(back - x)):.3e}")
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
