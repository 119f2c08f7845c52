"""
Egocentric group geometry
=========================

Everything the direction models see is measured from the focal animal:
the summed distance to its associates (IID), how tightly the directions
to them cluster (DA, the mean resultant length) and the circular mean of
those directions (CM).
"""

import math

import numpy as np

from forcematch import circular_mean, directional_agreement, iid

# three associates spread north, north-east and east of the focal animal
focal = (0.0, 0.0)
others = [(0.0, 40.0), (30.0, 30.0), (50.0, 0.0)]
dirs = [math.atan2(y, x) for x, y in others]

print(f"IID = {iid(focal, others):.1f} m")
print(f"DA  = {directional_agreement(dirs):.3f}")
print(f"CM  = {math.degrees(circular_mean(dirs)):.1f} deg")

###############################################################################
# Rotating the whole scene leaves DA unchanged and rotates CM with it.

phi = 1.0
print(directional_agreement(np.add(dirs, phi)), math.degrees(circular_mean(np.add(dirs, phi)) - phi))

###############################################################################
# Associates on opposite sides cancel: DA is zero and CM is undefined.

print(directional_agreement([0.0, math.pi]))
