"""Quantum Knizhnik-Zamolodchikov transport and its Jackson-type solution.

Particles are labelled 1..N with the N_L left-movers first.  In the mapped
("w") variables

    left   wbar = zbar/L + beta/(2 alpha L)
    right  w    = z/L    - beta/(2 alpha L)
    eta  = 1/(alpha L)

and the qKZ transport for particle j is the ordered product

    Z'_j = prod_{m>j} R_jm(w_m + 1 - w_j) * prod_{m<j} R_jm(w_m - w_j),

both blocks in ascending m.  Shifting w_j -> w_j - 1 (z_j -> z_j - L) acts
on a solution as A(w_j - 1) = Z'_j A(w).

The amplitude is a lattice ("Jackson") sum over u = u~ - l, l in Z.  Its
summand only decays like |l|^{-1 + i N eta}, so the symmetric partial sums
oscillate without settling.  We sum the window exactly and replace each
tail by a fitted asymptotic series whose terms are summed with the Hurwitz
zeta function (the analytic continuation of sum_{l>L} l^{-s}).
"""

from dataclasses import dataclass, field, asdict
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import loggamma

from .errors import ConvergenceError, DomainError, SingularityError
from .scattering import CouplingModel, build_s_lr
from .spin import (PERMUTATION, build_monodromy_B, build_r_matrix, embed_two_site,
                   r_matrix, reference_state, sz_values)


@dataclass(frozen=True)
class KinematicFrame:
    """Particle coordinates and their mapped rapidities.

    zbar holds the left-mover coordinates (particles 1..N_L), z the
    right-mover coordinates (particles N_L+1..N).
    """

    zbar: tuple
    z: tuple
    L: float
    model: CouplingModel

    def __post_init__(self):
        object.__setattr__(self, "zbar", tuple(float(x) for x in self.zbar))
        object.__setattr__(self, "z", tuple(float(x) for x in self.z))
        if self.L <= 0:
            raise DomainError("system length must be positive")

    @classmethod
    def from_rapidities(cls, wbar, w, eta, beta=0.0, L=1.0):
        """Build the frame whose mapped rapidities are exactly (wbar, w)."""
        alpha = 1.0 / (eta * L)
        shift = beta / (2 * alpha * L)
        model = CouplingModel(alpha, beta)
        zbar = [(x - shift) * L for x in wbar]
        z = [(x + shift) * L for x in w]
        return cls(tuple(zbar), tuple(z), L, model)

    @property
    def n_left(self):
        return len(self.zbar)

    @property
    def n_right(self):
        return len(self.z)

    @property
    def n(self):
        return self.n_left + self.n_right

    @property
    def eta(self):
        return 1.0 / (self.model.alpha * self.L)

    @property
    def wbar(self):
        a, b = self.model.alpha, self.model.beta
        return np.array(self.zbar) / self.L + b / (2 * a * self.L)

    @property
    def w(self):
        a, b = self.model.alpha, self.model.beta
        return np.array(self.z) / self.L - b / (2 * a * self.L)

    @property
    def rapidities(self):
        """Mapped rapidities in particle order (left-movers first)."""
        return np.concatenate([self.wbar, self.w])

    @property
    def chirality(self):
        return ["L"] * self.n_left + ["R"] * self.n_right

    def coordinate(self, j):
        """Coordinate (zbar or z) of 1-based particle j."""
        if j <= self.n_left:
            return self.zbar[j - 1]
        return self.z[j - 1 - self.n_left]

    def shifted(self, j, by=-1.0):
        """Frame with particle j moved by `by` system lengths."""
        zbar, z = list(self.zbar), list(self.z)
        if not 1 <= j <= self.n:
            raise DomainError(f"particle {j} out of range 1..{self.n}")
        if j <= self.n_left:
            zbar[j - 1] += by * self.L
        else:
            z[j - 1 - self.n_left] += by * self.L
        return KinematicFrame(tuple(zbar), tuple(z), self.L, self.model)

    def to_dict(self):
        return {"zbar": list(self.zbar), "z": list(self.z), "L": self.L,
                "alpha": self.model.alpha, "beta": self.model.beta}


def log_gamma(z):
    """Principal-branch log Gamma (scipy's implementation)."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == np.floor(z.real):
        raise DomainError(f"log_gamma pole at z = {z.real:g}")
    return complex(loggamma(z))


def log_gamma_integral(z, x_max=60.0):
    """Oracle: ln Gamma(z) = int_0^inf dx/x [(z-1)e^{-x} - (e^{-x} - e^{-zx})/(1-e^{-x})].

    Valid for Re z > 0; slow, used only in tests.
    """
    z = complex(z)
    if z.real <= 0:
        raise DomainError("integral representation needs Re z > 0")

    def f(x):
        return ((z - 1) * np.exp(-x) - (np.exp(-x) - np.exp(-z * x)) / (-np.expm1(-x))) / x

    # the integrand is bounded at x -> 0, so dropping [0, 1e-9] costs ~1e-9
    re = integrate.quad(lambda x: f(x).real, 1e-9, x_max, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    im = integrate.quad(lambda x: f(x).imag, 1e-9, x_max, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    return complex(re, im)


def _transport_product(j, n, factor):
    """Ordered product over m>j then m<j of embed(factor(m), j, m)."""
    d = 2 ** n
    out = np.eye(d, dtype=complex)
    for m in list(range(j + 1, n + 1)) + list(range(1, j)):
        out = out @ embed_two_site(factor(m), j, m, n)
    return out


def build_qkz_transport(j, frame):
    """qKZ transport Z'_j built from crossing-eta R-matrices in w variables."""
    n = frame.n
    if not 1 <= j <= n:
        raise DomainError(f"particle {j} out of range 1..{n}")
    if n > 8:
        raise DomainError("qKZ transport is limited to N <= 8")
    v, eta = frame.rapidities, frame.eta

    def factor(m):
        shift = 1.0 if m > j else 0.0
        return r_matrix(v[m - 1] + shift - v[j - 1], eta)

    return _transport_product(j, n, factor)


def build_transport_operator(j, frame):
    """Physical transport Z_j assembled from S-matrices in z coordinates.

    Same-chirality factors are R(z_m - z_j) with crossing 1/alpha.  A
    right-mover scatters off the left-movers with S^{jm}(z_j, zbar_m); a
    left-mover passes the (shifted) right-movers with the inverse of
    S^{mj}(z_m + L, zbar_j).
    """
    n, nl = frame.n, frame.n_left
    if not 1 <= j <= n:
        raise DomainError(f"particle {j} out of range 1..{n}")
    model, L = frame.model, frame.L
    x = [frame.coordinate(k) for k in range(1, n + 1)]
    left = lambda k: k <= nl

    def factor(m):
        shift = L if m > j else 0.0
        if left(j) == left(m):
            return build_r_matrix(x[m - 1] + shift - x[j - 1], model.alpha)
        if not left(j):
            return build_s_lr(x[j - 1], x[m - 1], model)
        return np.linalg.inv(build_s_lr(x[m - 1] + shift, x[j - 1], model))

    return _transport_product(j, n, factor)


# --- Jackson sum -------------------------------------------------------------

def _check_base_point(u, w, eta):
    for wn in w:
        d = wn - u
        # Gamma(w_n - u~ + l) has poles when w_n - u~ is an integer
        if abs(d.imag) < 1e-12 and abs(d.real - round(d.real)) < 1e-12:
            raise SingularityError(f"base point {u} sits on a Gamma pole of inhomogeneity {wn}")


def log_weight(u, w, eta):
    """ln prod_n Gamma(w_n - u)/Gamma(w_n - u - i eta)."""
    a = np.asarray(w, dtype=complex) - u
    return complex(np.sum(loggamma(a) - loggamma(a - 1j * eta)))


def log_pair_factor(b, eta):
    """ln [ b Gamma(b - i eta) / Gamma(b + i eta + 1) ] for b = u_alpha - u_beta."""
    return complex(np.log(b) + loggamma(b - 1j * eta) - loggamma(b + 1j * eta + 1))


def _b_column(u, w, eta):
    """B(u)|Omega> for the given inhomogeneities."""
    return build_monodromy_B(u, w, eta)[:, 0]


def _zeta_tail(samples, ls, kappas, order, l_max):
    """Sum_{l > l_max} of the asymptotic series fitted to samples(l), l in ls.

    The model is sum_kappa sum_k c l^{-1 + i kappa - k}; each power sums to a
    Hurwitz zeta value.
    """
    cols, zetas = [], []
    x = ls / l_max  # scaled columns keep the least-squares problem well conditioned
    for kap in kappas:
        for k in range(order + 1):
            p = 1j * kap - 1.0 - k
            cols.append(x ** p)
            zetas.append(complex(mpmath.zeta(-p, l_max + 1)) * l_max ** (-p))
    V = np.array(cols).T
    coef, *_ = np.linalg.lstsq(V, samples, rcond=None)
    return np.tensordot(np.array(zetas), coef, axes=(0, 0))


def regularized_lattice_sum(values, l_max, kappas, order=4, fit_from=0.5):
    """Zeta-regularized sum over l in Z of a sequence given on [-l_max, l_max].

    `values` maps integer l to an array; tails on both sides are modelled as
    |l|^{-1+i kappa} times a polynomial in 1/|l| fitted on
    [fit_from*l_max, l_max].  Returns (window sum, tail correction).
    """
    if any(abs(k) < 1e-12 for k in kappas):
        raise DomainError("kappa = 0 puts the leading tail power on the zeta pole")
    window = sum(values[l] for l in range(-l_max, l_max + 1))
    tail = 0
    ls = np.arange(max(2, int(fit_from * l_max)), l_max + 1)
    for sgn in (1, -1):
        samples = np.array([values[sgn * l] for l in ls])
        tail = tail + _zeta_tail(samples, ls.astype(float), kappas, order, l_max)
    return window, tail


@dataclass
class JacksonAmplitude:
    M: int
    base_points: list
    l_max: int
    value: np.ndarray
    tail_estimate: float
    tail_correction_norm: float
    regularized: bool
    sector_leak: float = 0.0

    def to_dict(self):
        return {
            "M": self.M,
            "base_points": [[complex(u).real, complex(u).imag] for u in self.base_points],
            "l_max": self.l_max,
            "norm": float(np.linalg.norm(self.value)),
            "tail_estimate": self.tail_estimate,
            "tail_correction_norm": self.tail_correction_norm,
            "regularized": self.regularized,
            "sector_leak": self.sector_leak,
        }


def _amplitude_terms_m1(frame, u0, l_max):
    w, eta = frame.rapidities, frame.eta
    out = {}
    for l in range(-l_max, l_max + 1):
        u = u0 - l
        out[l] = np.exp(log_weight(u, w, eta)) * _b_column(u, w, eta)
    return out


def _amplitude_m1(frame, u0, l_max, order, regularize):
    terms = _amplitude_terms_m1(frame, u0, l_max)
    kap = frame.n * frame.eta
    if not regularize:
        return sum(terms.values()), 0.0
    window, tail = regularized_lattice_sum(terms, l_max, [kap], order)
    return window + tail, float(np.linalg.norm(tail))


def _amplitude_m2(frame, u0, l_max, order, regularize, inner_factor=4):
    w, eta, n = frame.rapidities, frame.eta, frame.n
    if abs((u0[0] - u0[1] - 1j * eta).imag) < 1e-12:
        d = (u0[0] - u0[1] - 1j * eta).real
        if abs(d - round(d)) < 1e-12:
            raise SingularityError("pair factor pole: u~1 - u~2 - i eta is an integer")
    l_in = inner_factor * l_max

    @lru_cache(maxsize=None)
    def b_op(k, l):
        u = u0[k] - l
        return np.exp(log_weight(u, w, eta)) * build_monodromy_B(u, w, eta)

    omega = reference_state(n)
    inner_cols = {l: b_op(1, l) @ omega for l in range(-l_in, l_in + 1)}
    outer, tail_norm = {}, 0.0
    for l1 in range(-l_max, l_max + 1):
        u1 = u0[0] - l1
        b1 = b_op(0, l1)
        vals = {l2: np.exp(log_pair_factor(u1 - (u0[1] - l2), eta)) * (b1 @ inner_cols[l2])
                for l2 in range(-l_in, l_in + 1)}
        if regularize:
            win, tail = regularized_lattice_sum(vals, l_in, [(n - 2) * eta], order=5, fit_from=1 / 3)
            outer[l1] = win + tail
        else:
            outer[l1] = sum(vals.values())
    if not regularize:
        return sum(outer.values()), 0.0
    # after the inner sum two power families survive in the outer variable
    win, tail = regularized_lattice_sum(outer, l_max, [(n - 2) * eta, (n + 2) * eta], order=3, fit_from=0.25)
    return win + tail, float(np.linalg.norm(tail))


def eval_jackson_amplitude(frame, M, base_points, l_max=60, order=4, regularize=True):
    """Jackson-sum amplitude sum_l prod_a [weight * B(u_a)] |Omega>, u_a = u~_a - l_a.

    tail_estimate is the norm of the change between cutoffs l_max//2 and
    l_max, relative to the norm of the value.
    """
    n = frame.n
    if n > 4 or M > 2:
        raise DomainError("Jackson amplitudes are limited to N <= 4, M <= 2")
    if M < 0 or 2 * M > n:
        raise DomainError(f"need 0 <= M <= N/2, got M={M}, N={n}")
    base_points = [complex(u) for u in base_points]
    if len(base_points) != M:
        raise DomainError(f"expected {M} base points, got {len(base_points)}")
    if l_max < 8:
        raise DomainError("l_max must be at least 8")
    if M == 0:
        return JacksonAmplitude(0, [], l_max, reference_state(n), 0.0, 0.0, regularize)
    for u in base_points:
        _check_base_point(u, frame.rapidities, frame.eta)
    fn = _amplitude_m1 if M == 1 else _amplitude_m2
    arg = base_points[0] if M == 1 else tuple(base_points)
    value, tail_norm = fn(frame, arg, l_max, order, regularize)
    half, _ = fn(frame, arg, l_max // 2, order, regularize)
    scale = np.linalg.norm(value)
    if not np.isfinite(scale) or scale == 0:
        raise ConvergenceError(f"amplitude norm is {scale}", iterations=l_max)
    sz = sz_values(n)
    leak = float(np.linalg.norm(value[sz != n / 2 - M]) / scale)
    return JacksonAmplitude(M, base_points, l_max, value,
                            float(np.linalg.norm(value - half) / scale),
                            tail_norm / scale, regularize, leak)


@dataclass
class QKZResidual:
    j: int
    M: int
    l_max: int
    projective: float
    linear: float
    tail_estimate: float

    def to_dict(self):
        return asdict(self)


def projective_distance(a, b):
    """|| a^ - b^ || with unit norms and the phase fixed on the largest entry of a."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    k = int(np.argmax(np.abs(a)))
    ah = a / np.linalg.norm(a) * (abs(a[k]) / a[k])
    bh = b / np.linalg.norm(b)
    if abs(b[k]) > 0:
        bh = bh * (abs(b[k]) / b[k])
    return float(np.linalg.norm(ah - bh))


def check_qkz_residual(frame, M, base_points, j, l_max=60, order=4):
    """Compare A(w_j - 1) with Z'_j A(w).

    `projective` normalizes both sides; `linear` is ||A(w_j-1) - Z'_j A||/||A||,
    which also fixes the scalar and so tells Z'_j apart from its inverse.
    """
    a0 = eval_jackson_amplitude(frame, M, base_points, l_max, order)
    a1 = eval_jackson_amplitude(frame.shifted(j, -1.0), M, base_points, l_max, order)
    z = build_qkz_transport(j, frame)
    za = z @ a0.value
    proj = projective_distance(a1.value, za)
    lin = float(np.linalg.norm(a1.value - za) / np.linalg.norm(a0.value))
    return QKZResidual(j, M, l_max, proj, lin, max(a0.tail_estimate, a1.tail_estimate))


# --- Yang-Yang action ----------------------------------------------------------

def _series_exp(c, order):
    out = np.zeros(order + 1, dtype=complex)
    term = 1.0 + 0j
    for k in range(order + 1):
        out[k] = term
        term = term * c / (k + 1)
    return out


def _series_div(num, den):
    out = np.zeros_like(num)
    for k in range(len(num)):
        out[k] = (num[k] - np.dot(out[:k], den[k:0:-1])) / den[0]
    return out


def _small_x_series(decay, eta, pair, order=4):
    """Taylor coefficients of the regularized integrand near x = 0.

    single: [ (1 - e^{i eta x}) e^{-decay x}/(1 - e^{-x}) + i eta e^{-x} ] / x
    pair:   [ (e^{-i eta x} - e^{i eta x}) e^{-decay x}/(1 - e^{-x}) + 2 i eta e^{-x} ] / x
    """
    p = order + 2
    # (1 - e^{-x})/x
    den = np.array([-((-1.0) ** (k + 1)) / np.prod(np.arange(1, k + 2)) for k in range(p)], dtype=complex)
    if pair:
        num = _series_exp(-1j * eta, p) - _series_exp(1j * eta, p)
        ct = 2j * eta
    else:
        num = -_series_exp(1j * eta, p)
        num[0] += 1.0
        ct = 1j * eta
    kern = _series_div(num[1:], den)  # numerator/x over (1-e^{-x})/x
    body = np.convolve(kern, _series_exp(-decay, p))[:p] + ct * _series_exp(-1.0, p)[:p]
    # body(0) vanishes because of the counterterm; divide by x
    return body[1:order + 2]


def kernel_single(x, eta):
    """K(x) = (1 - e^{i eta x})/(1 - e^{-x})."""
    return -np.expm1(1j * eta * x) / -np.expm1(-x)


def kernel_pair(x, eta):
    """K~(x) = (e^{-i eta x} - e^{i eta x})/(1 - e^{-x})."""
    return -2j * np.sin(eta * x) / -np.expm1(-x)


def _action_integral(decay, eta, pair, x_small=1e-3, tol=1e-12):
    """int_0^inf dx/x [kernel(x) e^{-decay x} + counterterm e^{-x}] for Re decay > 0."""
    decay = complex(decay)
    ct = 2j * eta if pair else 1j * eta
    kern = kernel_pair if pair else kernel_single
    coeffs = _small_x_series(decay, eta, pair)
    # integral of the Taylor polynomial over [0, x_small]
    head = sum(c * x_small ** (k + 1) / (k + 1) for k, c in enumerate(coeffs))

    def f(x):
        return (kern(x, eta) * np.exp(-decay * x) + ct * np.exp(-x)) / x

    rate = min(decay.real, 1.0)
    x_max = max(40.0, 36.0 / rate)
    opts = dict(limit=500, epsabs=tol, epsrel=tol)
    re = integrate.quad(lambda x: f(x).real, x_small, x_max, **opts)[0]
    im = integrate.quad(lambda x: f(x).imag, x_small, x_max, **opts)[0]
    # exponential tail beyond x_max, bounded by |kernel| e^{-rate x}/x
    bound = (2 + abs(ct)) * np.exp(-rate * x_max) / (rate * x_max)
    return head + complex(re, im), bound


@dataclass
class ActionValue:
    value: complex
    error_bound: float
    method: str


def _ordered_pairs(u):
    """Pairs (a, b) with a < b after sorting by decreasing real part."""
    order = sorted(range(len(u)), key=lambda k: -u[k].real)
    for p in range(len(order)):
        for q in range(p + 1, len(order)):
            yield order[p], order[q]


def yang_yang_action(u, frame, method="quadrature"):
    """Action S(u) with exp(-S) = prod Gamma(a)/Gamma(a - i eta) prod Gamma(b - i eta)/Gamma(b + i eta).

    a = w_n - u_alpha, b = u_alpha - u_beta (pairs ordered so Re b > 0).
    method="quadrature" integrates the kernel representation and raises
    DomainError when an exponent leaves the half-plane Re > 0.
    method="loggamma" uses closed forms; terms with Re < 0 are taken on the
    reflected contour, which changes S only by a function that is constant
    along each lattice u -> u + 1.
    """
    u = [complex(x) for x in u]
    w, eta = frame.rapidities, frame.eta
    total, err = 0j, 0.0
    for alpha, ua in enumerate(u):
        for n, wn in enumerate(w):
            a = wn - ua
            if method == "quadrature":
                if a.real <= 0:
                    raise DomainError(f"single integral diverges: Re(w_{n + 1} - u_{alpha + 1}) = {a.real:.4g} <= 0")
                val, b = _action_integral(a, eta, pair=False)
                total -= val
                err += b
            elif method == "loggamma":
                if a.real > 0:
                    total -= loggamma(a) - loggamma(a - 1j * eta)
                else:
                    # Gamma(a)/Gamma(a - i eta) = Gamma(1 - a + i eta)/Gamma(1 - a) * (periodic in a)
                    total -= loggamma(1 - a + 1j * eta) - loggamma(1 - a)
            else:
                raise DomainError(f"unknown method {method!r}")
    for p, q in _ordered_pairs(u):
        b = u[p] - u[q]
        if method == "quadrature":
            if b.real <= 0:
                raise DomainError(f"pair integral diverges: Re(u_{p + 1} - u_{q + 1}) = {b.real:.4g} <= 0")
            val, bnd = _action_integral(b, eta, pair=True)
            total += val
            err += bnd
        else:
            total += loggamma(b + 1j * eta) - loggamma(b - 1j * eta)
    return ActionValue(complex(total), float(err), method)


def gamma_ratio_product(u, frame):
    """prod_{alpha,n} Gamma(a)/Gamma(a - i eta) * prod_{pairs} Gamma(b - i eta)/Gamma(b + i eta)."""
    u = [complex(x) for x in u]
    w, eta = frame.rapidities, frame.eta
    s = sum(log_weight(ua, w, eta) for ua in u)
    for p, q in _ordered_pairs(u):
        b = u[p] - u[q]
        s += loggamma(b - 1j * eta) - loggamma(b + 1j * eta)
    return complex(np.exp(s))


def action_gradient(lam, frame, h=1e-4):
    """Central-difference dS/d lambda_alpha on the closed-form action."""
    lam = [complex(x) for x in lam]
    grad = []
    for k in range(len(lam)):
        up, dn = list(lam), list(lam)
        up[k] += h
        dn[k] -= h
        s_up = yang_yang_action(up, frame, "loggamma").value
        s_dn = yang_yang_action(dn, frame, "loggamma").value
        grad.append((s_up - s_dn) / (2 * h))
    return np.array(grad)


def driven_log_bethe_residual(lam, frame, m):
    """max |sum_n Theta(lambda - w_n, eta/2) - pi m - sum_b Theta(lambda - lambda_b, eta)|."""
    lam = np.asarray(lam, dtype=float)
    w, eta = frame.rapidities, frame.eta
    out = []
    for k, x in enumerate(lam):
        lhs = np.sum(np.arctan((x - w) / (eta / 2)))
        pair = np.sum(np.arctan((x - np.delete(lam, k)) / eta))
        out.append(lhs - np.pi * m[k] - pair)
    return float(np.max(np.abs(out))) if out else 0.0


def saddle_quantum_numbers(lam, frame, m_bethe):
    """Integers m_s with dS/d lambda + 2 pi i m_s = 0 at roots of the logarithmic Bethe form."""
    lam = np.asarray(lam, dtype=float)
    w = frame.rapidities
    out = []
    for k, x in enumerate(lam):
        s = np.sum(np.sign(w - x)) + np.sum(np.sign(x - np.delete(lam, k)))
        out.append(int(round(-m_bethe[k] - s / 2)))
    return out


@dataclass
class SaddleReport:
    saddle_residual: float
    bethe_residual: float
    gradient: list

    def to_dict(self):
        return {"saddle_residual": self.saddle_residual, "bethe_residual": self.bethe_residual,
                "gradient": [[complex(g).real, complex(g).imag] for g in self.gradient]}


def saddle_residual(lam, frame, m, m_bethe=None):
    """max_alpha |dS/d lambda_alpha + 2 pi i m_alpha| together with the Bethe-form residual.

    If m_bethe is given, the Bethe residual uses those quantum numbers;
    otherwise it is reported against the best integer or half-integer.
    """
    grad = action_gradient(lam, frame)
    res = float(np.max(np.abs(grad + 2j * np.pi * np.asarray(m, dtype=float))))
    if m_bethe is None:
        lam_r = np.asarray(lam, dtype=float)
        w, eta = frame.rapidities, frame.eta
        m_bethe = []
        for k, x in enumerate(lam_r):
            val = (np.sum(np.arctan((x - w) / (eta / 2))) - np.sum(np.arctan((x - np.delete(lam_r, k)) / eta))) / np.pi
            m_bethe.append(round(2 * val) / 2)
    return SaddleReport(res, driven_log_bethe_residual(lam, frame, m_bethe), list(grad))


# --- quasi-classical limit ------------------------------------------------------

def classical_r_limit(lam, eta_sequence):
    """Extract r(lam) = lim_{eta->0} (R(lam; eta) - I)/eta by Richardson extrapolation.

    Returns (r, observed order of the remainder).
    """
    if lam == 0:
        raise DomainError("classical limit needs lam != 0")
    etas = np.asarray(eta_sequence, dtype=float)
    if len(etas) < 3 or np.any(np.diff(etas) >= 0) or etas[-1] <= 0:
        raise DomainError("eta_sequence must be positive, strictly decreasing, length >= 3")
    vals = np.array([(r_matrix(lam, e) - np.eye(4)) / e for e in etas])
    # Neville extrapolation of a polynomial in eta to eta = 0
    table = list(vals)
    for level in range(1, len(etas)):
        table = [(etas[k] * table[k + 1] - etas[k + level] * table[k]) / (etas[k] - etas[k + level])
                 for k in range(len(table) - 1)]
    r = table[0]
    errs = [np.max(np.abs(v - r)) for v in vals]
    e1, e2 = errs[-2], errs[-1]
    if not (e1 > 0 and e2 > 0):
        return r, float("nan")
    rate = float(np.log(e1 / e2) / np.log(etas[-2] / etas[-1]))
    if not np.all(np.isfinite(r)):
        raise DomainError("extrapolation produced non-finite values")
    return r, rate


def _r_on_pair(r, a, b):
    return embed_two_site(r, a, b, 3)


def check_classical_r(lams, eta_sequence):
    """Antisymmetry and classical Yang-Baxter residuals of the extracted r-matrix.

    lams = (lam_1, lam_2, lam_3) are spectral parameters on three sites; r is
    extracted independently for every difference, with eta_sequence scaled
    by the smallest |lam_a - lam_b| when that is below one.  Returns a dict with
    antisymmetry, cybe, order (worst observed convergence rate) and the
    distance to the closed form (P - I)/(i lam).
    """
    l1, l2, l3 = (float(x) for x in lams)
    diffs = {(1, 2): l1 - l2, (1, 3): l1 - l3, (2, 3): l2 - l3}
    # the expansion parameter is eta/lam, so the ladder is scaled to the closest pair
    eta_sequence = np.asarray(eta_sequence, dtype=float) * min(1.0, min(abs(d) for d in diffs.values()))
    r, rates, closed = {}, [], 0.0
    for key, d in diffs.items():
        r[key], rate = classical_r_limit(d, eta_sequence)
        rates.append(rate)
        closed = max(closed, float(np.max(np.abs(r[key] - (PERMUTATION - np.eye(4)) / (1j * d)))))
    anti = 0.0
    for d in diffs.values():
        ra, _ = classical_r_limit(d, eta_sequence)
        rb, _ = classical_r_limit(-d, eta_sequence)
        # r_12(lam) + r_21(-lam) with r_21 = P r_12 P
        anti = max(anti, float(np.max(np.abs(ra + PERMUTATION @ rb @ PERMUTATION))))
    a, b, c = (_r_on_pair(r[(1, 2)], 1, 2), _r_on_pair(r[(1, 3)], 1, 3), _r_on_pair(r[(2, 3)], 2, 3))
    cybe = a @ b - b @ a + a @ c - c @ a + b @ c - c @ b
    return {"antisymmetry": anti, "cybe": float(np.max(np.abs(cybe))),
            "order": float(min(rates)), "closed_form_distance": closed}


def qkz_ladder(frame, M, base_points, j, l_start=25, rungs=4, order=4):
    """Residuals at the doubling cutoffs l_start * 2^k, k < rungs."""
    return [check_qkz_residual(frame, M, base_points, j, l_start * 2 ** k, order)
            for k in range(rungs)]


def sample_action_points(frame, M, count, seed=0, margin=0.5, spread=2.0):
    """Random u-tuples inside the quadrature domain: Re(w_n - u_a) > margin and,
    for M = 2, Re(u_1 - u_2) > margin."""
    rng = np.random.default_rng(seed)
    top = min(frame.rapidities) - margin
    out = []
    for _ in range(count):
        re = top - rng.uniform(0.0, spread, M)
        re = np.sort(re)[::-1] - margin * np.arange(M)
        out.append([complex(r, i) for r, i in zip(re, rng.uniform(-1.0, 1.0, M))])
    return out


def yang_yang_check(frame, points):
    """Max relative difference between exp(-S) by quadrature and the Gamma-ratio product."""
    worst = 0.0
    for u in points:
        s = yang_yang_action(u, frame, "quadrature").value
        ref = gamma_ratio_product(u, frame)
        worst = max(worst, abs(np.exp(-s) - ref) / abs(ref))
    return float(worst)
