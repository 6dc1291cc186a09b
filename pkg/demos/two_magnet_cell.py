"""Flux factors and tunneling rates of two YIG spheres sharing a superconducting loop."""
import numpy as np

from hml.couplings import single_loop_pair
from hml.geometry import LoopSpec, Placement, circular_flux_integrals
from hml.units import yig_preset

mat = yig_preset()
loop, place = LoopSpec(30e-6, 50e-9), Placement(1.5e-6)
r = single_loop_pair(loop, place, 1e-6, mat, 0.07)
print(f"J12/2pi  = {r.J12 / 2 / np.pi:10.1f} Hz")
print(f"Jd12/2pi = {r.Jd12 / 2 / np.pi:10.1f} Hz")
print(f"ratio    = {r.ratio:.2f}  (large-loop estimate {r.ratio_paper_formula:.2f})")

# the in-plane factor falls off as the magnet rises above the wire
print("\nh/d    Ix       Iz")
for h in np.linspace(0, 2, 5):
    ix, iz = circular_flux_integrals(20, h)[0]
    print(f"{h:4.1f}  {ix:7.4f}  {iz:7.4f}")
