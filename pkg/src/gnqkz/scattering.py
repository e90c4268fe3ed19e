"""Coupling model, physical S-matrices and the RG-like trajectory of g(t).

The left/right S-matrix depends on its argument x = zbar - z through a
coupling c(x) = alpha*x + beta that is linear in x, while the phase and the
coupling g are evaluated at half the argument.  Inverting
c = (1/(2g))(1 - 3g^2/4) therefore gives the exact trajectory

    g(t) = invert_c(2*alpha*t + beta),

whose large-t form is the universal 1/(4(alpha*t + beta/2)).
"""

from dataclasses import dataclass, asdict

import numpy as np

from .errors import DomainError, SingularityError
from .spin import IDENTITY4, PERMUTATION, build_r_matrix

G_MAX = 2.0 / np.sqrt(3.0)  # c_of_g(G_MAX) == 0


@dataclass(frozen=True)
class CouplingModel:
    """Linear drive c(x) = alpha*x + beta; alpha may be negative."""

    alpha: float
    beta: float
    alpha0: float = 1.0  # reference drive rate used for regime classification

    def __post_init__(self):
        if self.alpha == 0:
            raise DomainError("alpha must be nonzero")
        if self.alpha0 <= 0:
            raise DomainError("reference rate alpha0 must be positive")

    def c(self, x):
        return self.alpha * x + self.beta

    def check_window(self, t_lo, t_hi, convention="exact"):
        """Raise DomainError unless g(t) > 0 at both window endpoints."""
        for t in (t_lo, t_hi):
            g_of_t(self, t, convention)


def c_of_g(g):
    """c = (1 - 3g^2/4)/(2g)."""
    if g == 0:
        raise DomainError("c_of_g is singular at g = 0")
    return (1.0 - 0.75 * g * g) / (2.0 * g)


def invert_c(c):
    """Positive root g of 3g^2 + 8cg - 4 = 0, so that c_of_g(g) == c.

    The two algebraic forms below avoid cancellation for either sign of c.
    """
    c = float(c)
    disc = np.sqrt(4.0 * c * c + 3.0)
    if c >= 0:
        return 2.0 / (2.0 * c + disc)
    return (disc - 2.0 * c) / 1.5


def g_of_t(model, t, convention="exact"):
    """Coupling at time t.

    exact      invert_c(2 alpha t + beta), restricted to the branch c > 0
    universal  1 / (4 (alpha t + beta/2))
    """
    if convention == "exact":
        c = model.c(2.0 * t)
        if c <= 0:
            raise DomainError(f"c(2t) = {c:.6g} <= 0 at t = {t}: outside the weak-coupling branch")
        return invert_c(c)
    if convention == "universal":
        den = 4.0 * (model.alpha * t + model.beta / 2.0)
        if den <= 0:
            raise DomainError(f"universal coupling is not positive at t = {t}")
        return 1.0 / den
    raise DomainError(f"unknown convention {convention!r}")


def phase_factor(g):
    """e^{i phi} = (2ig - 1 + 3g^2/4) / (ig - (1 + 3g^2/4)); unit modulus for real g."""
    q = 0.75 * g * g
    return (2j * g - 1.0 + q) / (1j * g - (1.0 + q))


def s_matrix_from_g(g):
    """e^{i phi(g)} (i c I + P)/(i c + 1) with c = c_of_g(g)."""
    c = c_of_g(g)
    den = 1j * c + 1.0
    if abs(den) < 1e-14:
        raise SingularityError("S-matrix pole i c = -1")
    return phase_factor(g) * (1j * c * IDENTITY4 + PERMUTATION) / den


def phase_of_argument(x, model):
    """Phase e^{i phi(x)} of the left/right S-matrix at argument x = zbar - z."""
    c = model.c(x)
    return phase_factor(invert_c(c))


def build_s_lr(z_j, zbar_k, model):
    """Left/right S-matrix S^{jk}(z_j, zbar_k).

    With x = zbar_k - z_j the matrix is e^{i phi(x)} (i c(x) I + P)/(i c(x) + 1);
    equivalently e^{i phi(x)} R(x + beta/alpha) with crossing 1/alpha.
    """
    x = zbar_k - z_j
    c = model.c(x)
    den = 1j * c + 1.0
    if abs(den) < 1e-14:
        raise SingularityError(f"S-matrix pole at x = {x}")
    return phase_of_argument(x, model) * (1j * c * IDENTITY4 + PERMUTATION) / den


def build_s_same_chirality(z_j, z_k, alpha):
    """(i alpha (z_k - z_j) I + P)/(i alpha (z_k - z_j) + 1) = R(z_k - z_j)."""
    return build_r_matrix(z_k - z_j, alpha)


@dataclass
class RGTrajectory:
    t: np.ndarray
    g: np.ndarray
    dgdt: np.ndarray
    kappa: float          # fitted from dg/dt = -kappa * alpha * g^2
    loglog_slope: float   # slope of log|dg/dt| against log g
    convention: str


def rg_trajectory(model, t_grid, convention="exact", h=None):
    """Sample g(t) and a centered-difference dg/dt along t_grid.

    Fits a single kappa in dg/dt = -kappa alpha g^2 and the log-log slope of
    |dg/dt| against g.
    """
    t = np.asarray(t_grid, dtype=float)
    g = np.array([g_of_t(model, s, convention) for s in t])
    dg = np.empty_like(g)
    for k, s in enumerate(t):
        step = h if h is not None else 1e-4 * max(1.0, abs(s))
        dg[k] = (g_of_t(model, s + step, convention) - g_of_t(model, s - step, convention)) / (2 * step)
    ratio = -dg / (model.alpha * g * g)
    kappa = float(np.mean(ratio))
    slope = float(np.polyfit(np.log(g), np.log(np.abs(dg)), 1)[0])
    return RGTrajectory(t, g, dg, kappa, slope, convention)


def running_coupling(cutoff, m):
    """Static running coupling g(Lambda) = pi / ln(2 Lambda / m)."""
    arg = 2.0 * cutoff / m
    if arg <= 1.0:
        raise DomainError(f"2*Lambda/m = {arg:.6g} must exceed 1")
    return np.pi / np.log(arg)


def static_beta_check(cutoff, m, rel_step=1e-4):
    """Compare d g / d ln Lambda (finite difference) with -g^2/pi.  Returns |difference|."""
    h = rel_step
    up = running_coupling(cutoff * np.exp(h), m)
    dn = running_coupling(cutoff * np.exp(-h), m)
    g = running_coupling(cutoff, m)
    return abs((up - dn) / (2 * h) + g * g / np.pi)


def gap_from_coupling(g, cutoff):
    """m = 2 Lambda exp(-pi / g)."""
    if g <= 0:
        raise DomainError("gap formula needs g > 0")
    return 2.0 * cutoff * np.exp(-np.pi / g)


def identification_fit(model, t_grid, m, convention="exact"):
    """Fit ln Lambda = a t + b so that g(Lambda) from the static map tracks g(t).

    The static map is inverted pointwise, ln Lambda = pi/g + ln(m/2); the
    returned residual is the maximum relative deviation of g(Lambda(t)) from
    g(t) after the affine fit.
    """
    t = np.asarray(t_grid, dtype=float)
    g = np.array([g_of_t(model, s, convention) for s in t])
    log_cut = np.pi / g + np.log(m / 2.0)
    a, b = np.polyfit(t, log_cut, 1)
    g_fit = np.pi / (a * t + b - np.log(m / 2.0))
    return float(a), float(b), float(np.max(np.abs(g_fit - g) / g))


REGIMES = ("adiabatic", "intermediate", "fast-driving")


@dataclass(frozen=True)
class RegimeThresholds:
    window_fraction: float = 0.2
    rate_factor: float = 2.0
    fast_ratio: float = 10.0


@dataclass
class RegimeReport:
    t0: float
    regime: str
    gap_at_t: float
    drive_ratio: float

    def to_dict(self):
        return asdict(self)


def characteristic_time(cutoff, m0, alpha0=1.0):
    """t0 = ln(2 Lambda / m0) / (pi alpha0)."""
    if not cutoff > m0 / 2.0 > 0:
        raise DomainError("need Lambda > m0/2 > 0")
    return np.log(2.0 * cutoff / m0) / (np.pi * alpha0)


def classify_regime(model, t, cutoff, m0, thresholds=RegimeThresholds(), convention="exact"):
    t0 = characteristic_time(cutoff, m0, model.alpha0)
    rate = model.alpha / model.alpha0
    ratio = model.alpha * t / (model.alpha0 * t0)
    if ratio >= thresholds.fast_ratio:
        regime = "fast-driving"
    elif abs(t - t0) <= thresholds.window_fraction * t0 and 1.0 / thresholds.rate_factor <= rate <= thresholds.rate_factor:
        regime = "adiabatic"
    else:
        regime = "intermediate"
    try:
        gap = gap_from_coupling(g_of_t(model, t, convention), cutoff)
    except DomainError:
        gap = float("nan")
    return RegimeReport(float(t0), regime, float(gap), float(ratio))
