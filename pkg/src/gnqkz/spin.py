"""Dense linear algebra on the N-site spin-1/2 space.

Conventions used throughout the package:

* basis state 0 is spin up, 1 is spin down;
* site 1 is the most significant tensor factor, so the all-up reference
  state |Omega> is basis vector 0;
* site labels are 1-based, matching particle labels 1..N.

Operators are plain complex ndarrays of shape (2**n, 2**n).
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, NumericError, SingularityError

MAX_SITES = 12
MAX_DIM = 4096

IDENTITY4 = np.eye(4, dtype=complex)
PERMUTATION = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex)

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # lowers up -> down


def _check_sites(n):
    if n < 1:
        raise DomainError(f"site count must be positive, got {n}")
    if n > MAX_SITES:
        raise CapacityError(f"{n} sites exceeds the dense cap of {MAX_SITES}")


def embed_two_site(op4, i, j, n):
    """Embed a 4x4 operator acting on the ordered site pair (i, j) into n sites."""
    _check_sites(n)
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise DomainError(f"invalid site pair ({i}, {j}) for n={n}")
    op4 = np.asarray(op4, dtype=complex)
    if op4.shape != (4, 4):
        raise DomainError(f"expected a 4x4 operator, got shape {op4.shape}")
    d = 2 ** n
    # act on the row index of the identity, viewed as an n-leg tensor
    psi = np.eye(d, dtype=complex).reshape((2,) * n + (d,))
    out = np.tensordot(op4.reshape(2, 2, 2, 2), psi, axes=([2, 3], [i - 1, j - 1]))
    out = np.moveaxis(out, [0, 1], [i - 1, j - 1])
    return out.reshape(d, d)


def embed_one_site(op2, i, n):
    _check_sites(n)
    if not 1 <= i <= n:
        raise DomainError(f"site {i} out of range for n={n}")
    return np.kron(np.kron(np.eye(2 ** (i - 1)), op2), np.eye(2 ** (n - i)))


def reference_state(n):
    """All spins up."""
    _check_sites(n)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    return psi


def total_sz(n):
    """Diagonal total S^z = sum_i sigma^z_i / 2."""
    _check_sites(n)
    idx = np.arange(2 ** n)
    downs = np.array([bin(k).count("1") for k in idx])
    return np.diag(n / 2 - downs).astype(complex)


def sz_values(n):
    """S^z of every basis state, as a vector."""
    downs = np.array([bin(k).count("1") for k in range(2 ** n)])
    return n / 2 - downs


def spin_flip(n):
    """Global spin flip: every up <-> down."""
    _check_sites(n)
    d = 2 ** n
    return np.eye(d, dtype=complex)[::-1]


def r_matrix(lam, eta):
    """Rational XXX R-matrix (i lam I + eta P)/(i lam + eta).

    R(0) = P and R(lam) R(-lam) = I.
    """
    den = 1j * lam + eta
    if abs(den) <= 1e-14 * max(1.0, abs(lam), abs(eta)):
        raise SingularityError(f"R-matrix pole at lam={lam}, eta={eta}")
    return (1j * lam * IDENTITY4 + eta * PERMUTATION) / den


def build_r_matrix(lam, alpha):
    """R-matrix with crossing 1/alpha, i.e. (i lam I + P/alpha)/(i lam + 1/alpha)."""
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    return r_matrix(lam, 1.0 / alpha)


def monodromy(u, inhomogeneities, eta):
    """Monodromy T(u) = R_01(w_1 - u) R_02(w_2 - u) ... R_0N(w_N - u).

    Site 0 is the auxiliary space.  Returns an array of shape (2, d, 2, d)
    indexed as T[a, :, b, :], so the blocks are A = T[0,:,0,:],
    B = T[0,:,1,:], C = T[1,:,0,:], D = T[1,:,1,:].
    """
    w = list(inhomogeneities)
    n = len(w) + 1
    _check_sites(n)
    t = np.eye(2 ** n, dtype=complex)
    for k, wk in enumerate(w):
        t = t @ embed_two_site(r_matrix(wk - u, eta), 1, k + 2, n)
    d = 2 ** (n - 1)
    return t.reshape(2, d, 2, d)


def monodromy_blocks(u, inhomogeneities, eta):
    t = monodromy(u, inhomogeneities, eta)
    return t[0, :, 0, :], t[0, :, 1, :], t[1, :, 0, :], t[1, :, 1, :]


def build_monodromy_B(u, inhomogeneities, eta):
    """Spin-lowering block B(u) of the monodromy."""
    return monodromy(u, inhomogeneities, eta)[0, :, 1, :].copy()


def xxx_transfer_matrix(u, inhomogeneities, eta):
    """Trace over the auxiliary space, A(u) + D(u)."""
    t = monodromy(u, inhomogeneities, eta)
    return t[0, :, 0, :] + t[1, :, 1, :]


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray
    residual: float


def eigen_decompose(op, tol=1e-9):
    """Dense eigen-decomposition with a per-pair residual certificate.

    Raises CapacityError above 4096 dimensions and NumericError if any pair
    fails ||op v - mu v|| <= tol ||v||.
    """
    shape = np.shape(op)
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DomainError(f"operator must be square, got {shape}")
    if shape[0] > MAX_DIM:
        raise CapacityError(f"dimension {shape[0]} exceeds {MAX_DIM}")
    op = np.asarray(op, dtype=complex)
    try:
        vals, vecs = np.linalg.eig(op)
    except np.linalg.LinAlgError as exc:
        # LAPACK does not expose its QR sweep count
        raise NumericError(f"eigenvalue iteration did not converge: {exc}") from exc
    scale = max(1.0, np.linalg.norm(op, 2)) if op.shape[0] <= 512 else max(1.0, np.abs(op).sum(1).max())
    pairs = []
    for k in range(len(vals)):
        v = vecs[:, k]
        r = np.linalg.norm(op @ v - vals[k] * v) / np.linalg.norm(v)
        if r > tol * scale:
            raise NumericError(f"eigenpair {k} residual {r:.3e} exceeds {tol:.1e}")
        pairs.append(EigenPair(complex(vals[k]), v, float(r)))
    return pairs
