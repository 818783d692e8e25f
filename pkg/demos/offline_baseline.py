"""Offline enclosing-ellipsoid baseline on the hardest body.

The minimum-volume enclosing ellipsoid of a regular simplex, shrunk about
its center until it fits inside, realizes the classical factor d. This is
the benchmark the streaming factor should be compared against.
"""

import numpy as np

from ellipstream import mvee_khachiyan
from ellipstream.adversary import simplex_vertices

for d in range(2, 7):
    verts = simplex_vertices(d)
    e = mvee_khachiyan(verts, eps=1e-7)
    m = e.axes * e.semiaxes[None, :]
    factors = []
    for i in range(d + 1):
        normal = -verts[i] / np.linalg.norm(verts[i])
        offset = 1.0 - float(normal @ e.center)
        factors.append(float(np.linalg.norm(m.T @ normal)) / offset)
    print(f"d={d}: enclosing radius {e.semiaxes.max():.4f}, "
          f"sandwich factor {max(factors):.4f} (theory: exactly d)")
