"""Boundary curves of the L^p spectrum regions on K-type 0.

Run with ``python demos/spectrum_regions.py > regions.csv``; the output is
plain CSV for any plotting tool.
"""

import csv
import sys

from sl2harmonic.spectrum import boundary_points, par_region

writer = csv.writer(sys.stdout)
writer.writerow(["p", "delta", "re", "im"])
for p in (1.1, 4.0 / 3.0, 1.6, 2.0):
    R = par_region(p, 0.0)
    curve, _ = boundary_points(R, 41, y_max=2.0)
    for z in curve:
        writer.writerow([f"{p:.6g}", f"{R.delta:.6g}", f"{z.real:.17g}", f"{z.imag:.17g}"])
