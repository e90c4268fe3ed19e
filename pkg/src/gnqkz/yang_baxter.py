"""Residual checks for the algebraic identities behind integrability.

Every check returns an IdentityReport with the max-norm residual of
(lhs - rhs).  Three-particle identities are evaluated on the 8-dimensional
space with the particles (i, j, k) on sites (1, 2, 3).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .bethe import build_transfer_matrix
from .errors import DomainError, SingularityError
from .qkz import KinematicFrame, build_transport_operator
from .scattering import CouplingModel, build_s_lr, build_s_same_chirality, s_matrix_from_g
from .spin import PERMUTATION, embed_two_site

IDENTITIES = ("YB_mixed_1", "YB_mixed_2", "YB_same_chirality", "YB_instantaneous",
              "transport_compat", "transfer_commute")
# identities that are expected to fail; they guard against vacuous passes
WITNESSES = ("YB_instantaneous_printed", "transfer_commute_unequal_time")

DEFAULT_TOL = 1e-10


@dataclass
class IdentityReport:
    identity_id: str
    residual: float
    params: dict
    seed: int = None
    tolerance: float = DEFAULT_TOL
    error: str = None

    @property
    def expected_failure(self):
        return self.identity_id in WITNESSES

    @property
    def passed(self):
        if self.error is not None:
            return False
        if self.expected_failure:
            return self.residual >= self.tolerance
        return self.residual <= self.tolerance

    def to_dict(self):
        return {"identity_id": self.identity_id, "residual": self.residual,
                "params": self.params, "seed": self.seed, "tolerance": self.tolerance,
                "expected_failure": self.expected_failure, "pass": self.passed,
                "error": self.error}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _maxnorm(a):
    return float(np.max(np.abs(a)))


def _e3(op, a, b):
    return embed_two_site(op, a, b, 3)


def _guarded(identity_id, params, fn, tol):
    try:
        return IdentityReport(identity_id, fn(), params, tolerance=tol)
    except SingularityError as exc:
        return IdentityReport(identity_id, float("inf"), params, tolerance=tol, error=str(exc))


def check_yb_mixed(z_i, zbar_j, zbar_k, model, tol=DEFAULT_TOL):
    """Right-mover i scattering through left-movers j, k:
    S^{ij} S^{ik} S'^{jk} = S'^{jk} S^{ik} S^{ij}."""
    def run():
        s_ij = _e3(build_s_lr(z_i, zbar_j, model), 1, 2)
        s_ik = _e3(build_s_lr(z_i, zbar_k, model), 1, 3)
        s_jk = _e3(build_s_same_chirality(zbar_j, zbar_k, model.alpha), 2, 3)
        return _maxnorm(s_ij @ s_ik @ s_jk - s_jk @ s_ik @ s_ij)
    params = {"z_i": z_i, "zbar_j": zbar_j, "zbar_k": zbar_k, "alpha": model.alpha, "beta": model.beta}
    return _guarded("YB_mixed_1", params, run, tol)


def check_yb_mixed_mirror(z_i, z_j, zbar_k, model, tol=DEFAULT_TOL):
    """Right-movers i, j against left-mover k:
    S^{ik} S^{jk} S'^{ji} = S'^{ji} S^{jk} S^{ik}."""
    def run():
        s_ik = _e3(build_s_lr(z_i, zbar_k, model), 1, 3)
        s_jk = _e3(build_s_lr(z_j, zbar_k, model), 2, 3)
        s_ji = _e3(build_s_same_chirality(z_j, z_i, model.alpha), 2, 1)
        return _maxnorm(s_ik @ s_jk @ s_ji - s_ji @ s_jk @ s_ik)
    params = {"z_i": z_i, "z_j": z_j, "zbar_k": zbar_k, "alpha": model.alpha, "beta": model.beta}
    return _guarded("YB_mixed_2", params, run, tol)


def check_yb_same(z_i, z_j, z_k, alpha, tol=DEFAULT_TOL):
    """S'^{ij} S'^{ik} S'^{jk} = S'^{jk} S'^{ik} S'^{ij} for one chirality."""
    def run():
        a = _e3(build_s_same_chirality(z_i, z_j, alpha), 1, 2)
        b = _e3(build_s_same_chirality(z_i, z_k, alpha), 1, 3)
        c = _e3(build_s_same_chirality(z_j, z_k, alpha), 2, 3)
        return _maxnorm(a @ b @ c - c @ b @ a)
    params = {"z_i": z_i, "z_j": z_j, "z_k": z_k, "alpha": alpha}
    return _guarded("YB_same_chirality", params, run, tol)


def check_yb_instantaneous(g, tol=DEFAULT_TOL):
    """Instantaneous limit of the mixed identity, where S' collapses to P:
    S^{ij} S^{ik} P^{jk} = P^{jk} S^{ik} S^{ij}."""
    def run():
        s = s_matrix_from_g(g)
        s_ij, s_ik = _e3(s, 1, 2), _e3(s, 1, 3)
        p_jk = _e3(PERMUTATION, 2, 3)
        return _maxnorm(s_ij @ s_ik @ p_jk - p_jk @ s_ik @ s_ij)
    return _guarded("YB_instantaneous", {"g": g}, run, tol)


def check_yb_instantaneous_printed(g, tol=1e-3):
    """Witness: the index placement S^{ij} S^{jk} P^{ij} = P^{ij} S^{jk} S^{ij} does not hold."""
    def run():
        s = s_matrix_from_g(g)
        s_ij, s_jk = _e3(s, 1, 2), _e3(s, 2, 3)
        p_ij = _e3(PERMUTATION, 1, 2)
        return _maxnorm(s_ij @ s_jk @ p_ij - p_ij @ s_jk @ s_ij)
    return _guarded("YB_instantaneous_printed", {"g": g}, run, tol)


def check_transport_compat(frame, j, k, tol=1e-9):
    """Z_j(.., x_k - L, ..) Z_k(..) = Z_k(.., x_j - L, ..) Z_j(..) for the physical transport."""
    if frame.n > 8:
        raise DomainError("transport compatibility is limited to N <= 8")
    if j == k:
        raise DomainError("j and k must differ")

    def run():
        lhs = build_transport_operator(j, frame.shifted(k)) @ build_transport_operator(k, frame)
        rhs = build_transport_operator(k, frame.shifted(j)) @ build_transport_operator(j, frame)
        return _maxnorm(lhs - rhs)
    params = dict(frame.to_dict(), j=j, k=k)
    return _guarded("transport_compat", params, run, tol)


def check_transfer_commute(t, n_left, n_right, model, tol=DEFAULT_TOL, convention="exact"):
    """max over pairs of ||[Z_i(t), Z_j(t)]||."""
    n = n_left + n_right
    if n > 10:
        raise DomainError("commutation check is limited to N <= 10")

    def run():
        ops = [build_transfer_matrix(t, j, n_left, n_right, model, convention) for j in range(1, n + 1)]
        worst = 0.0
        for a in range(n):
            for b in range(a + 1, n):
                worst = max(worst, _maxnorm(ops[a] @ ops[b] - ops[b] @ ops[a]))
        return worst
    params = {"t": t, "n_left": n_left, "n_right": n_right, "alpha": model.alpha, "beta": model.beta}
    return _guarded("transfer_commute", params, run, tol)


def check_transfer_commute_unequal(t1, t2, n_left, n_right, model, tol=1e-3, convention="exact"):
    """Witness: max over pairs of ||[Z_i(t1), Z_j(t2)]||, expected to be large."""
    n = n_left + n_right

    def run():
        a = [build_transfer_matrix(t1, j, n_left, n_right, model, convention) for j in range(1, n + 1)]
        b = [build_transfer_matrix(t2, j, n_left, n_right, model, convention) for j in range(1, n + 1)]
        return max(_maxnorm(a[p] @ b[q] - b[q] @ a[p]) for p in range(n) for q in range(n) if p != q)
    params = {"t1": t1, "t2": t2, "n_left": n_left, "n_right": n_right,
              "alpha": model.alpha, "beta": model.beta}
    return _guarded("transfer_commute_unequal_time", params, run, tol)


def run_yb_suite(samples=100, seed=0, model=None, span=5.0, tol=DEFAULT_TOL):
    """Seeded random sweep of the four Yang-Baxter families."""
    model = model or CouplingModel(1.0, 2.0)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        x = rng.uniform(-span, span, 3)
        out.append(check_yb_mixed(*x, model, tol))
        out.append(check_yb_mixed_mirror(*x, model, tol))
        out.append(check_yb_same(*x, model.alpha, tol))
        out.append(check_yb_instantaneous(float(rng.uniform(0.01, 1.0)), tol))
    for r in out:
        r.seed = seed
    return out


def random_frame(n_left, n_right, rng, model, L=None, span=3.0):
    L = L if L is not None else float(rng.uniform(1.0, 4.0))
    return KinematicFrame(tuple(rng.uniform(-span, span, n_left)),
                          tuple(rng.uniform(-span, span, n_right)), L, model)


def run_transport_suite(n_left, n_right, samples=5, seed=0, model=None, tol=1e-9):
    model = model or CouplingModel(1.0, 2.0)
    rng = np.random.default_rng(seed)
    n = n_left + n_right
    out = []
    for _ in range(samples):
        frame = random_frame(n_left, n_right, rng, model)
        for j in range(1, n + 1):
            for k in range(j + 1, n + 1):
                rep = check_transport_compat(frame, j, k, tol)
                rep.seed = seed
                out.append(rep)
    return out


def summarize(reports):
    worst = {}
    for r in reports:
        worst[r.identity_id] = max(worst.get(r.identity_id, 0.0), r.residual)
    return {"n": len(reports), "all_pass": all(r.passed for r in reports),
            "max_residual": worst}
