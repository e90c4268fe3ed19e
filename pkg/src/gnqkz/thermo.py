"""Thermodynamic limit of the Bethe equations: root densities, spinons, mass gap.

Root densities solve

    rho(x) + int phi(x - y, 1) rho(y) dy = (N/2) sum_s phi(x + s theta, 1/2) - sum_h delta(x - x_h),
    phi(x, n) = (n/pi)/(n^2 + x^2),

where theta is the position of the two inhomogeneity sources ("inv_g") and
x_h are hole rapidities.  Each hole contributes -delta(x - x_h) plus a smooth
back-flow sigma_h with sigma_h + K sigma_h = phi(x - x_h, 1); its Fourier
transform is -e^{i x_h w}/(1 + e^{-|w|}).  The smooth part of a density is
stored on the grid and the delta terms as point masses.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.linalg import lapack, lu_factor, lu_solve
from scipy.optimize import brentq
from scipy.special import digamma

from .bethe import (BetheSector, counting_function, hole_quantum_numbers,
                    solve_log_bethe, spin_energy_density, vacancies)
from .errors import DomainError, NumericError
from .scattering import characteristic_time, g_of_t, gap_from_coupling


def phi(x, n):
    return (n / np.pi) / (n * n + np.asarray(x) ** 2)


def closed_form_density(N, inv_g, lam):
    """(N/4)[sech(pi(lam + inv_g)) + sech(pi(lam - inv_g))]."""
    lam = np.asarray(lam, dtype=float)
    sech = lambda x: 2 * np.exp(-np.abs(x)) / (1 + np.exp(-2 * np.abs(x)))  # overflow-free
    return (N / 4.0) * (sech(np.pi * (lam + inv_g)) + sech(np.pi * (lam - inv_g)))


@dataclass
class DensityGrid:
    nodes: np.ndarray
    rho: np.ndarray               # smooth part
    source: str                   # "nystrom" or "closed_form"
    N: int
    inv_g: float
    point_masses: list = field(default_factory=list)   # (position, weight)
    condition: float = None
    tail_mass: float = 0.0        # smooth density outside the grid

    @property
    def weights(self):
        return _trapezoid_weights(self.nodes)

    def integral(self):
        return float(np.dot(self.weights, self.rho) + self.tail_mass
                     + sum(wt for _, wt in self.point_masses))

    def sz(self):
        """S^z = N/2 - int rho."""
        return self.N / 2.0 - self.integral()

    def to_csv(self):
        lines = ["lambda,rho"]
        lines += [f"{x:.12g},{r:.12g}" for x, r in zip(self.nodes, self.rho)]
        return "\n".join(lines) + "\n"


def uniform_grid(lam_max=20.0, n_nodes=2001):
    if n_nodes < 3 or lam_max <= 0:
        raise DomainError("grid needs at least 3 nodes and lam_max > 0")
    return np.linspace(-lam_max, lam_max, n_nodes)


def _driving(N, inv_g, x):
    return (N / 2.0) * (phi(x + inv_g, 0.5) + phi(x - inv_g, 0.5))


def _trapezoid_weights(nodes):
    h = nodes[1] - nodes[0]
    w = np.full(len(nodes), h)
    w[0] = w[-1] = h / 2
    return w


@lru_cache(maxsize=16)
def _factored_operator(lam_max, n_nodes):
    """LU factors of I + K on the grid, with a 1-norm condition estimate."""
    nodes = uniform_grid(lam_max, n_nodes)
    w = _trapezoid_weights(nodes)
    a = np.eye(len(nodes)) + phi(nodes[:, None] - nodes[None, :], 1.0) * w[None, :]
    lu, piv = lu_factor(a)
    rcond, info = lapack.dgecon(lu, np.linalg.norm(a, 1), norm="1")
    cond = 1.0 / rcond if rcond > 0 else np.inf
    return lu, piv, float(cond)


def _solve(nodes, rhs):
    lam_max, n_nodes = float(nodes[-1]), len(nodes)
    lu, piv, cond = _factored_operator(lam_max, n_nodes)
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericError(f"Nystrom matrix is ill-conditioned (condition estimate {cond:.3e})")
    return lu_solve((lu, piv), rhs), cond


def backflow_closed_form(lam, holes, eta=1.0):
    """Smooth spinon density sum_h sigma(lam - x_h).

    sigma(x) = (1/(2 pi eta)) Re[psi(1 + i x/(2 eta)) - psi(1/2 + i x/(2 eta))],
    the transform of e^{-eta|w|}/(1 + e^{-eta|w|}); it decays like 1/(4 pi x^2).
    """
    lam = np.asarray(lam, dtype=float)
    out = np.zeros(lam.shape)
    for x in holes:
        y = (lam - x) / eta
        out = out + np.real(digamma(1 + 0.5j * y) - digamma(0.5 + 0.5j * y)) / (2 * np.pi * eta)
    return out


def _far_field(lam_max, holes, n_gauss=200):
    """Gauss-Legendre nodes for |y| > lam_max via y = +-lam_max/s, with sigma there."""
    s, ws = np.polynomial.legendre.leggauss(n_gauss)
    s = 0.5 * (s + 1.0)
    ws = 0.5 * ws
    y = lam_max / s
    wy = ws * lam_max / s ** 2
    y = np.concatenate([y, -y])
    wy = np.concatenate([wy, wy])
    return y, wy, backflow_closed_form(y, holes)


def solve_density_nystrom(N, inv_g, lam_max=20.0, n_nodes=2001, holes=()):
    """Trapezoid Nystrom solution; hole sources enter as kernel columns.

    The back-flow of a hole decays algebraically, so its part outside
    [-lam_max, lam_max] is taken from the closed form: it is moved to the
    right-hand side of the grid equation and its mass is kept in tail_mass.
    """
    # truncation: the ground-state density must be negligible at the edge
    edge = closed_form_density(N, inv_g, lam_max)
    if edge > 1e-8 * max(N, 1):
        raise DomainError(f"lam_max={lam_max} too small for inv_g={inv_g} (edge density {edge:.2e})")
    nodes = uniform_grid(lam_max, n_nodes)
    rhs = _driving(N, inv_g, nodes)
    tail = 0.0
    if holes:
        for x in holes:
            rhs = rhs + phi(nodes - x, 1.0)
        y, wy, sig = _far_field(lam_max, holes)
        rhs = rhs - (phi(nodes[:, None] - y[None, :], 1.0) * (wy * sig)[None, :]).sum(1)
        tail = float(np.dot(wy, sig))
    rho, cond = _solve(nodes, rhs)
    masses = [(float(x), -1.0) for x in holes]
    return DensityGrid(nodes, rho, "nystrom", N, inv_g, masses, cond, tail)


def closed_form_grid(N, inv_g, lam_max=20.0, n_nodes=2001):
    nodes = uniform_grid(lam_max, n_nodes)
    return DensityGrid(nodes, closed_form_density(N, inv_g, nodes), "closed_form", N, inv_g)


def spinon_fourier_density(omega, holes, eta=1.0):
    """-sum_h e^{i x_h w}/(1 + e^{-eta |w|})."""
    omega = np.asarray(omega, dtype=float)
    out = np.zeros(omega.shape, dtype=complex)
    for x in holes:
        out = out - np.exp(1j * x * omega) / (1 + np.exp(-eta * np.abs(omega)))
    return out


def spinon_backflow(lam, holes, eta=1.0):
    """Smooth part of the spinon density by inverse Fourier transform.

    The -delta part of -1/(1 + e^{-|w|}) is split off, leaving
    e^{-eta|w|}/(1 + e^{-eta|w|}), whose transform is summed numerically.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.zeros(lam.shape)
    f = lambda w: np.exp(-eta * w) / (1 + np.exp(-eta * w))
    top = 60.0 / eta  # integrand below e^{-60} beyond this
    for x in holes:
        for k, y in enumerate(lam):
            val = integrate.quad(f, 0, top, weight="cos", wvar=abs(y - x), limit=2000)[0]
            out[k] += val / np.pi
    return out


# --- spinon energy ------------------------------------------------------------

def _sector_for_theta(N, inv_g):
    return BetheSector.from_theta(N // 2, N - N // 2, (), inv_g)


def spinon_energy(hole, N, inv_g, L=1.0, lam_max=None, n_nodes=2001):
    """Dressed energy of one hole at rapidity `hole` in the thermodynamic limit.

    (1/L)[-e(hole) + int sigma_h e] + pi Lambda / 2, with e the bare root
    energy and Lambda = N/L.  The constant removes the bulk vacancy term
    -pi Lambda/2 that every hole carries independently of its rapidity.
    """
    lam_max = lam_max or max(20.0, abs(inv_g) + abs(hole) + 20.0)
    nodes = uniform_grid(lam_max, n_nodes)
    y, wy, sig_out = _far_field(lam_max, [hole])
    rhs = phi(nodes - hole, 1.0) - (phi(nodes[:, None] - y[None, :], 1.0) * (wy * sig_out)[None, :]).sum(1)
    sigma, _ = _solve(nodes, rhs)
    sector = _sector_for_theta(N, inv_g)
    e = spin_energy_density(sector, nodes)
    inner = float(np.dot(_trapezoid_weights(nodes), sigma * e))
    outer = float(np.dot(wy, sig_out * spin_energy_density(sector, y)))
    bare = float(spin_energy_density(sector, np.array([hole]))[0])
    return (-bare + inner + outer) / L + np.pi * (N / L) / 2.0


def predicted_gap(N, inv_g, L=1.0):
    """2 Lambda e^{-pi inv_g}, Lambda = N/L."""
    return 2.0 * (N / L) * np.exp(-np.pi * inv_g)


@dataclass
class DispersionFit:
    m_fit: float
    max_rel_dev: float
    lam: np.ndarray
    energy: np.ndarray
    route: str
    ratio_to_prediction: float
    shape_dev: float = None       # max |E(lam)/(E(0) cosh(pi lam)) - 1|
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {"m_fit": self.m_fit, "max_rel_dev": self.max_rel_dev,
                "ratio_to_prediction": self.ratio_to_prediction, "route": self.route,
                "shape_dev": self.shape_dev,
                "lambda": [float(x) for x in self.lam], "energy": [float(x) for x in self.energy],
                "detail": self.detail}


def spinon_dispersion_fit(N, inv_g, lam_grid, L=1.0, n_nodes=2001):
    """Fit E(lam) = m cosh(pi lam) to thermodynamic spinon energies."""
    lam = np.asarray(lam_grid, dtype=float)
    eps = np.array([spinon_energy(x, N, inv_g, L, n_nodes=n_nodes) for x in lam])
    c = np.cosh(np.pi * lam)
    m = float(np.dot(eps, c) / np.dot(c, c))
    if not np.isfinite(m) or m <= 0:
        raise NumericError(f"dispersion fit failed (m = {m})")
    dev = float(np.max(np.abs(eps / (m * c) - 1.0)))
    e0 = spinon_energy(0.0, N, inv_g, L, n_nodes=n_nodes)
    shape = float(np.max(np.abs(eps / (e0 * c) - 1.0)))
    return DispersionFit(m, dev, lam, eps, "thermodynamic", m / predicted_gap(N, inv_g, L), shape)


def finite_size_gap(N, inv_g, L=1.0, holes=None):
    """Two central holes at finite N.

    Returns (m_N, hole rapidities): m_N = (Delta E + pi Lambda) / sum cosh(pi x_h),
    with Delta E the spin-sector energy difference to the ground state.
    """
    if N % 2:
        raise DomainError("finite-size gap needs even N")
    nl = N // 2
    ground = BetheSector.from_theta(nl, N - nl, vacancies(N, N // 2), inv_g)
    g_sol = solve_log_bethe(ground)
    n_vac = len(vacancies(N, N // 2 - 1))
    if holes is None:
        c = n_vac // 2
        holes = (c - 1, c) if n_vac % 2 == 0 else (c, c + 1)
    taken, hole_m = hole_quantum_numbers(N, holes)
    exc = BetheSector.from_theta(nl, N - nl, taken, inv_g)
    e_sol = solve_log_bethe(exc)
    span = abs(inv_g) + 40.0
    x_h = [brentq(lambda x: counting_function(exc, e_sol.roots, x)[0] - q, -span, span) for q in hole_m]
    de = (np.sum(spin_energy_density(exc, e_sol.roots)) - np.sum(spin_energy_density(ground, g_sol.roots))) / L
    m_n = (de + np.pi * N / L) / np.sum(np.cosh(np.pi * np.array(x_h)))
    return float(m_n), [float(x) for x in x_h]


def finite_size_extrapolation(sizes, inv_g, L_per_site=None):
    """Extrapolate m_N / (2 Lambda e^{-pi inv_g}) linearly in 1/N.

    Lambda = N/L; with L proportional to N the cutoff is fixed.
    """
    sizes = np.asarray(sizes, dtype=int)
    ratios = []
    for n in sizes:
        L = 1.0 if L_per_site is None else L_per_site * n
        m_n, _ = finite_size_gap(int(n), inv_g, L)
        ratios.append(m_n / predicted_gap(int(n), inv_g, L))
    ratios = np.array(ratios)
    slope, intercept = np.polyfit(1.0 / sizes, ratios, 1)
    return float(intercept), ratios


# --- time-dependent gap --------------------------------------------------------

@dataclass
class MassGap:
    t: float
    g_t: float
    m_t: float
    cutoff: float
    m0: float = None
    t0: float = None

    def to_dict(self):
        return {"t": self.t, "g": self.g_t, "m": self.m_t, "Lambda": self.cutoff,
                "m0": self.m0, "t0": self.t0}


def mass_gap(model, t, cutoff, m0=None, convention="exact"):
    """m(t) = 2 Lambda e^{-pi/g(t)}; t0 = ln(2 Lambda/m0)/(pi alpha0) when m0 is given."""
    g = g_of_t(model, t, convention)
    m = gap_from_coupling(g, cutoff)
    t0 = characteristic_time(cutoff, m0, model.alpha0) if m0 is not None else None
    return MassGap(float(t), float(g), float(m), float(cutoff), m0, t0)


@dataclass
class LogGapFit:
    slope: float
    intercept: float
    max_residual: float     # max |ln m - (slope t + intercept)|
    kappa: float            # -slope/(pi alpha)
    window: tuple


def log_gap_fit(model, t_grid, cutoff, convention="exact"):
    """Least-squares line through ln m(t); exponential decay means a small residual."""
    t = np.asarray(t_grid, dtype=float)
    if len(t) < 3:
        raise DomainError("need at least three times")
    logm = np.array([np.log(2 * cutoff) - np.pi / g_of_t(model, s, convention) for s in t])
    slope, icpt = np.polyfit(t, logm, 1)
    res = float(np.max(np.abs(logm - (slope * t + icpt))))
    return LogGapFit(float(slope), float(icpt), res, float(-slope / (np.pi * model.alpha)),
                     (float(t[0]), float(t[-1])))


def gap_series_csv(model, t_grid, cutoff, convention="exact"):
    lines = ["t,g,m"]
    for s in t_grid:
        mg = mass_gap(model, s, cutoff, convention=convention)
        lines.append(f"{mg.t:.12g},{mg.g_t:.12g},{mg.m_t:.12g}")
    return "\n".join(lines) + "\n"


def grid_convergence(N, inv_g, lam_max=20.0, node_counts=(41, 81, 161, 321)):
    """Max-norm error against the closed form on successively halved grids.

    Returns (errors, observed orders); the order between two grids is
    log(e_coarse/e_fine)/log(h_coarse/h_fine).
    """
    errs, hs = [], []
    for n in node_counts:
        grid = solve_density_nystrom(N, inv_g, lam_max, n)
        errs.append(float(np.max(np.abs(grid.rho - closed_form_density(N, inv_g, grid.nodes)))))
        hs.append(2 * lam_max / (n - 1))
    orders = [float(np.log(errs[k] / errs[k + 1]) / np.log(hs[k] / hs[k + 1]))
              for k in range(len(errs) - 1)]
    return errs, orders
