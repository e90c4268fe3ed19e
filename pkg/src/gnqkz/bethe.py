"""Bethe ansatz for the transport operators.

Roots solve the logarithmic equations

    sum_n Theta(lam_a - v_n, eta/2) = pi m_a + sum_b Theta(lam_a - lam_b, eta),
    Theta(x, c) = arctan(x/c),

where v_n are the site inhomogeneities.  In the instantaneous problem
(eta = 1) left-movers sit at +theta and right-movers at -theta with
theta = c(g)/2.  Quantum numbers are half-odd integers when N + M - 1 is
odd and integers otherwise; the allowed window is |m| <= (N - M - 1)/2.

Bethe vectors are prod_a B(lam_a - i eta/2)|Omega> built from the monodromy
with the same inhomogeneities.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .scattering import c_of_g, g_of_t, phase_factor, s_matrix_from_g
from .spin import (PERMUTATION, build_monodromy_B, eigen_decompose,
                   embed_two_site, reference_state, sz_values)


def theta_fn(x, c):
    return np.arctan(np.asarray(x) / c)


def _is_half_odd(m):
    return abs(2 * m - round(2 * m)) < 1e-9 and int(round(2 * m)) % 2 != 0


def _is_integer(m):
    return abs(m - round(m)) < 1e-9


def quantum_numbers_are_half_odd(n, m_count):
    return (n + m_count - 1) % 2 == 1


def vacancies(n, m_count):
    """All admissible quantum numbers for M = m_count roots on n sites."""
    if not 0 <= 2 * m_count <= n:
        raise DomainError(f"need 0 <= M <= N/2, got M={m_count}, N={n}")
    top = (n - m_count - 1) / 2.0
    vals = np.arange(-top, top + 0.5, 1.0)
    return [float(v) + 0.0 for v in vals]  # no signed zeros


def ground_quantum_numbers(n, m_count):
    """The m_count most central vacancies."""
    vac = vacancies(n, m_count)
    extra = len(vac) - m_count
    lo = extra // 2
    return vac[lo:lo + m_count]


def hole_quantum_numbers(n, holes):
    """Quantum numbers with the given vacancy indices left empty.

    With M roots there are N - M vacancies, so h holes mean M = (N - h)/2.
    """
    if (n - len(holes)) % 2:
        raise DomainError("N - number of holes must be even")
    m_count = (n - len(holes)) // 2
    vac = vacancies(n, m_count)
    if len(vac) - m_count != len(holes):
        raise DomainError("number of holes does not match the vacancy count")
    for h in holes:
        if not 0 <= h < len(vac):
            raise DomainError(f"hole index {h} outside 0..{len(vac) - 1}")
    taken = [v for k, v in enumerate(vac) if k not in set(holes)]
    return taken, [vac[h] for h in holes]


@dataclass(frozen=True)
class BetheSector:
    """Root count, quantum numbers and inhomogeneities (left-movers first)."""

    n_left: int
    n_right: int
    quantum_numbers: tuple
    inhomogeneities: tuple
    eta: float = 1.0
    theta: float = None   # set for the symmetric instantaneous problem
    g: float = None

    def __post_init__(self):
        object.__setattr__(self, "quantum_numbers", tuple(float(m) for m in self.quantum_numbers))
        object.__setattr__(self, "inhomogeneities", tuple(float(v) for v in self.inhomogeneities))
        n, m_count = self.n, self.M
        if len(self.inhomogeneities) != n:
            raise DomainError("one inhomogeneity per particle is required")
        if 2 * m_count > n:
            raise DomainError(f"M={m_count} exceeds N/2 for N={n}")
        half = quantum_numbers_are_half_odd(n, m_count)
        for m in self.quantum_numbers:
            ok = _is_half_odd(m) if half else _is_integer(m)
            if not ok:
                kind = "half-odd integers" if half else "integers"
                raise DomainError(f"quantum number {m} invalid: N={n}, M={m_count} requires {kind}")
        if len(set(self.quantum_numbers)) != m_count:
            raise DomainError("quantum numbers must be distinct")
        if self.eta <= 0:
            raise DomainError("eta must be positive")

    @classmethod
    def instantaneous(cls, n_left, n_right, quantum_numbers, g):
        theta = c_of_g(g) / 2.0
        inh = [theta] * n_left + [-theta] * n_right
        return cls(n_left, n_right, tuple(quantum_numbers), tuple(inh), 1.0, theta, g)

    @classmethod
    def from_theta(cls, n_left, n_right, quantum_numbers, theta, eta=1.0):
        inh = [theta] * n_left + [-theta] * n_right
        return cls(n_left, n_right, tuple(quantum_numbers), tuple(inh), eta, theta)

    @classmethod
    def driven(cls, frame, quantum_numbers):
        return cls(frame.n_left, frame.n_right, tuple(quantum_numbers),
                   tuple(frame.rapidities), frame.eta)

    @property
    def n(self):
        return self.n_left + self.n_right

    @property
    def M(self):
        return len(self.quantum_numbers)


@dataclass
class BetheSolution:
    roots: np.ndarray
    residual: float
    iterations: int
    converged: bool
    restarts: int = 0


def log_bethe_defect(sector, lam):
    v = np.asarray(sector.inhomogeneities)
    eta = sector.eta
    lam = np.asarray(lam, dtype=float)
    m = np.asarray(sector.quantum_numbers)
    d = lam[:, None] - lam[None, :]
    return (theta_fn(lam[:, None] - v[None, :], eta / 2).sum(1) - np.pi * m
            - theta_fn(d, eta).sum(1))


def _jacobian(sector, lam):
    v = np.asarray(sector.inhomogeneities)
    eta = sector.eta
    d = lam[:, None] - lam[None, :]
    k = eta / (d * d + eta * eta)
    np.fill_diagonal(k, 0.0)
    x = lam[:, None] - v[None, :]
    diag = ((eta / 2) / (x * x + eta * eta / 4)).sum(1) - k.sum(1)
    return np.diag(diag) + k


def counting_function(sector, lam_roots, x):
    """z(x) = [sum_n Theta(x - v_n, eta/2) - sum_b Theta(x - lam_b, eta)]/pi; z(lam_a) = m_a."""
    v = np.asarray(sector.inhomogeneities)
    eta = sector.eta
    x = np.atleast_1d(np.asarray(x, dtype=float))
    val = theta_fn(x[:, None] - v[None, :], eta / 2).sum(1) - theta_fn(x[:, None] - np.asarray(lam_roots)[None, :], eta).sum(1)
    return val / np.pi


def _cumulative_density(x, n, theta, eta):
    """Roots to the left of x in the thermodynamic ground state (closed form)."""
    y = np.pi / eta
    return (n / (2 * np.pi)) * (np.arctan(np.exp(y * (x + theta))) + np.arctan(np.exp(y * (x - theta))))


def _initial_guess(sector, jitter=0.0, rng=None):
    """Invert the thermodynamic counting function at each quantum number."""
    n, m_count = sector.n, sector.M
    m = np.array(sector.quantum_numbers)
    if sector.theta is not None:
        # vacancies fill (0, N/2) in proportion
        target = (m + (n - m_count) / 2.0) * (n / 2.0) / (n - m_count)
        lo, hi = -abs(sector.theta) - 60 * sector.eta, abs(sector.theta) + 60 * sector.eta
        guess = np.array([brentq(lambda x: _cumulative_density(x, n, sector.theta, sector.eta) - q, lo, hi)
                          for q in target])
    else:
        guess = 0.5 * np.tan(np.pi * m / (n - m_count + 1))
    if jitter and rng is not None:
        guess = guess + jitter * rng.standard_normal(m_count)
    return guess


def solve_log_bethe(sector, initial=None, tol=1e-12, max_iter=200, max_restarts=3, seed=0):
    """Damped Newton on the logarithmic Bethe equations.

    Steps are halved until the max-norm defect decreases.  A root collision
    or a stalled line search restarts from a jittered guess.
    """
    if sector.M == 0:
        return BetheSolution(np.zeros(0), 0.0, 0, True)
    rng = np.random.default_rng(seed)
    lam = np.array(initial, dtype=float) if initial is not None else _initial_guess(sector)
    total = 0
    for restart in range(max_restarts + 1):
        f = log_bethe_defect(sector, lam)
        err = np.abs(f).max()
        stalled = False
        for it in range(max_iter):
            total += 1
            if err < tol:
                return BetheSolution(lam, float(err), total, True, restart)
            try:
                step = np.linalg.solve(_jacobian(sector, lam), f)
            except np.linalg.LinAlgError:
                stalled = True
                break
            s = 1.0
            while True:
                trial = lam - s * step
                ft = log_bethe_defect(sector, trial)
                et = np.abs(ft).max()
                if et < err or s < 1e-6:
                    break
                s *= 0.5
            if s < 1e-6 and et >= err:
                stalled = True
                break
            lam, f, err = trial, ft, et
            gaps = np.diff(np.sort(lam))
            if len(gaps) and gaps.min() < 1e-12:
                stalled = True
                break
        if err < tol:
            return BetheSolution(lam, float(err), total, True, restart)
        if not stalled and restart == max_restarts:
            break
        lam = _initial_guess(sector, jitter=0.1 * (restart + 1), rng=rng)
    raise ConvergenceError(f"Bethe equations did not converge (defect {err:.3e})",
                           iterations=total, residual=float(err))


def bethe_vector(sector, roots):
    """prod_a B(lam_a - i eta/2)|Omega>."""
    psi = reference_state(sector.n)
    for lam in roots:
        psi = build_monodromy_B(lam - 0.5j * sector.eta, sector.inhomogeneities, sector.eta) @ psi
    return psi


# --- instantaneous transport -----------------------------------------------------

def instantaneous_transport(j, n_left, n_right, g):
    """Z_j at fixed coupling: P between equal chiralities, S_I or S_I^{-1} across."""
    n = n_left + n_right
    if not 1 <= j <= n:
        raise DomainError(f"particle {j} out of range 1..{n}")
    s = s_matrix_from_g(g)
    s_inv = np.linalg.inv(s)
    left = lambda k: k <= n_left
    out = np.eye(2 ** n, dtype=complex)
    for m in list(range(j + 1, n + 1)) + list(range(1, j)):
        if left(j) == left(m):
            f = PERMUTATION
        elif left(j):
            f = s_inv
        else:
            f = s
        out = out @ embed_two_site(f, j, m, n)
    return out


def build_transfer_matrix(t, j, n_left, n_right, model, convention="exact"):
    """Instantaneous transport Z_j(t) at the coupling g(t)."""
    return instantaneous_transport(j, n_left, n_right, g_of_t(model, t, convention))


def transport_phase(j, sector):
    """Scalar part of the instantaneous Z_j eigenvalue."""
    ph = phase_factor(sector.g)
    if j <= sector.n_left:
        return ph ** (-sector.n_right)
    return ph ** sector.n_left


MOMENTUM_VARIANTS = ("printed", "unit-exponent", "single-particle")


def bethe_momentum(sector, roots, j, variant="single-particle"):
    """e^{i k_j L} without the scalar phase, in one of three candidate forms.

    printed          prod_a ((l - th - i/2)/(l - th + i/2))^{N_R} ((l + th - i/2)/(l + th + i/2))^{N_L}
    unit-exponent    the same with both exponents set to one
    single-particle  prod_a (l - v_j + i eta/2)/(l - v_j - i eta/2), v_j the particle's own site
    """
    lam = np.asarray(roots, dtype=float)
    h = sector.eta / 2
    if variant == "single-particle":
        v = sector.inhomogeneities[j - 1]
        return complex(np.prod((lam - v + 1j * h) / (lam - v - 1j * h)))
    if sector.theta is None:
        raise DomainError(f"variant {variant!r} needs a symmetric instantaneous sector")
    th = sector.theta
    a = (lam - th - 1j * h) / (lam - th + 1j * h)
    b = (lam + th - 1j * h) / (lam + th + 1j * h)
    if variant == "printed":
        return complex(np.prod(a ** sector.n_right * b ** sector.n_left))
    if variant == "unit-exponent":
        return complex(np.prod(a * b))
    raise DomainError(f"unknown variant {variant!r}")


@dataclass
class EigenCheck:
    residuals: list          # per j, projective ||Z psi - mu psi|| / ||psi||
    eigenvalues: list        # measured Rayleigh quotients
    ed_distance: float       # distance of psi from the matching ED eigenspace
    variant_errors: dict     # per variant, max |measured/phase - predicted|
    selected_variant: str

    @property
    def max_residual(self):
        return max(self.residuals) if self.residuals else 0.0


def _ed_distance(ops, psi, seed=0):
    """Distance of psi from the eigenspace of a random combination of ops."""
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal(len(ops)) + 1j * rng.standard_normal(len(ops))
    h = sum(c * o for c, o in zip(coef, ops))
    pairs = eigen_decompose(h)
    vals = np.array([p.value for p in pairs])
    vecs = np.array([p.vector for p in pairs]).T
    psi = psi / np.linalg.norm(psi)
    mu = np.vdot(psi, h @ psi)
    close = np.abs(vals - mu) < 1e-7 * max(1.0, np.abs(vals).max())
    if not close.any():
        return 1.0
    q, _ = np.linalg.qr(vecs[:, close])
    return float(np.linalg.norm(psi - q @ (q.conj().T @ psi)))


def verify_bethe_eigenvector(sector, roots, g=None):
    """Check the Bethe vector against every instantaneous Z_j and against ED."""
    g = sector.g if g is None else g
    if g is None:
        raise DomainError("coupling g is required")
    psi = bethe_vector(sector, roots)
    nrm = np.linalg.norm(psi)
    if nrm < 1e-12:
        raise DomainError("Bethe vector vanishes (roots are not admissible)")
    psi = psi / nrm
    ops = [instantaneous_transport(j, sector.n_left, sector.n_right, g) for j in range(1, sector.n + 1)]
    res, mus = [], []
    for z in ops:
        zp = z @ psi
        mu = np.vdot(psi, zp)
        res.append(float(np.linalg.norm(zp - mu * psi)))
        mus.append(complex(mu))
    errs = {}
    for variant in MOMENTUM_VARIANTS:
        try:
            errs[variant] = max(abs(mus[j - 1] / transport_phase(j, sector) - bethe_momentum(sector, roots, j, variant))
                                for j in range(1, sector.n + 1))
        except DomainError:
            errs[variant] = float("inf")
    best = min(errs, key=errs.get)
    return EigenCheck(res, mus, _ed_distance(ops, psi), errs, best)


def real_root_states(n_left, n_right, g):
    """Solve every admissible quantum-number choice of the instantaneous problem.

    Yields (sector, solution) for each converged choice with a nonvanishing
    Bethe vector; M runs from 0 to N/2.
    """
    n = n_left + n_right
    for m_count in range(n // 2 + 1):
        for qn in combinations(vacancies(n, m_count), m_count):
            sector = BetheSector.instantaneous(n_left, n_right, qn, g)
            try:
                sol = solve_log_bethe(sector)
            except ConvergenceError:
                continue
            if np.linalg.norm(bethe_vector(sector, sol.roots)) > 1e-10:
                yield sector, sol


# --- energies ------------------------------------------------------------------

@dataclass(frozen=True)
class ChargeConfig:
    """Charge quantum numbers n_j; each must satisfy |n_j| < N (cutoff pi|n|/L < pi N/L)."""

    n: tuple
    L: float
    N: int

    def __post_init__(self):
        if len(set(self.n)) != len(self.n):
            raise DomainError("charge quantum numbers must be distinct")
        for k in self.n:
            if abs(k) >= self.N:
                raise DomainError(f"charge quantum number {k} violates the cutoff |n| < {self.N}")

    @property
    def cutoff(self):
        return self.N / self.L


def spin_energy_density(sector, x):
    """Bare energy of one root at x: N [Theta(theta - x, eta/2) + Theta(theta + x, eta/2)].

    Right-movers enter with the opposite sign of left-movers; the weight N
    per chirality term is the normalization fixed in the design notes.
    """
    if sector.theta is None:
        raise DomainError("energies are defined for the symmetric instantaneous problem")
    h = sector.eta / 2
    return sector.n * (theta_fn(sector.theta - x, h) + theta_fn(sector.theta + x, h))


def state_energy(sector, roots, charges):
    """E = sum 2 pi n_j / L + (1/L) sum_b e(lam_b)."""
    if charges.N != sector.n:
        raise DomainError("charge configuration and sector disagree on N")
    e_charge = 2 * np.pi * sum(charges.n) / charges.L
    e_spin = float(np.sum(spin_energy_density(sector, np.asarray(roots)))) / charges.L
    return e_charge + e_spin
