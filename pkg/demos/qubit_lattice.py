"""NV-dressed magnon sites on a checkerboard lattice."""
import numpy as np

from hml.couplings import qubit_coupling
from hml.lattice import LatticeSpec, bands
from hml.units import yig_preset

mat = yig_preset()
q = qubit_coupling(np.pi / 2, 0.0, 370e-9, 350e-9, mat, 0.07)
print(f"g/2pi = {q.g / 2 / np.pi:.0f} Hz, omega_sigma/2pi = {q.omega_sigma / 2 / np.pi / 1e9:.4f} GHz")

spec = LatticeSpec("checkerboard", 2 * np.pi * 2.6749e9, 2 * np.pi * 2.0556e6, N=8, a=1.0)
res = bands(spec, nk=32)
w = (res.bands - spec.omega0) / spec.Jrate
print(f"band 0 spans [{w[:, 0].min():.3f}, {w[:, 0].max():.3f}] J")
print(f"band 1 spans [{w[:, 1].min():.3f}, {w[:, 1].max():.3f}] J")
