"""State transfer through a detuned bus and the optimal operating point."""
import numpy as np

from hml.dynamics import TwoSiteModel, fit_alpha, optimize_epsilon, swap_fidelity

m = TwoSiteModel.from_detuning(1.0, 1.0, 0.05)
out = swap_fidelity(m)
print(f"lossless: t* = {out.t_star:.1f}, eps = {out.epsilon:.2e}, t* g^2/J / (pi/2) = {2 * out.t_star * 0.05**2 / np.pi:.3f}")

fit = fit_alpha(m, n_points=6)
print(f"alpha_gamma = {fit.alpha_gamma:.3f}, alpha_kappa = {fit.alpha_kappa:.3f}")

for C0 in (1e2, 1e3, 1e4):
    gamma = 1 / np.sqrt(333 * C0)
    rep = optimize_epsilon(TwoSiteModel.from_detuning(1.0, 1.0, 1.0, kappa=333 * gamma, gamma=gamma),
                           alpha_gamma=fit.alpha_gamma, alpha_kappa=fit.alpha_kappa)
    print(f"C0 = {C0:.0e}: eps* = {rep.epsilon_star:.3e}")
