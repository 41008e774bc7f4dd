"""Laplacian construction and the spectral/rank kernel.

Two protocols are supported for a signed graph with weights ``a_ij``:

* ``abs`` -- diagonal ``sum |a_ij|`` over the in-neighborhood, off-diagonal
  ``-a_ij``.  Self-feedback is always stabilizing.
* ``signed`` -- diagonal ``sum a_ij``, off-diagonal ``-a_ij``.  Rows sum to
  zero, so the all-ones vector is always in the kernel.

The dynamics analyzed everywhere are ``xdot = -M x + B u`` with ``M`` one of
the two Laplacians and ``B`` the 0/1 leader selection matrix.  The Kalman
matrix is built with powers of ``-M`` to match that sign convention.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import rational
from .errors import (DisconnectedGraphError, EigendecompositionError,
                     GraphFormatError, UnreachableTargetError)
from .graph import LeaderSet

DEFAULT_EIG_TOL = 1e-9
_CLUSTER_REL = 1e-7


class Protocol(str, enum.Enum):
    ABS = "abs"
    SIGNED = "signed"

    @classmethod
    def of(cls, value):
        if isinstance(value, Protocol):
            return value
        v = str(value).lower()
        aliases = {"abs": cls.ABS, "absdiag": cls.ABS, "l": cls.ABS,
                   "signed": cls.SIGNED, "signeddiag": cls.SIGNED, "l*": cls.SIGNED,
                   "lstar": cls.SIGNED}
        if v not in aliases:
            raise ValueError(f"unknown protocol {value!r}")
        return aliases[v]


@dataclass(frozen=True)
class LaplacianMatrix:
    """Dense Laplacian tagged with its protocol kind and source graph."""

    kind: Protocol
    data: np.ndarray
    exact: tuple | None  # Fraction rows when the graph weights are rational
    source: str

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def is_exact(self):
        return self.exact is not None

    def scale(self):
        """Largest singular value; reference scale for all tolerances."""
        if self.n == 0:
            return 0.0
        s = np.linalg.svd(self.data, compute_uv=False)
        return float(s[0]) if s.size else 0.0


def build_laplacian(g, kind):
    """Build the protocol Laplacian of ``g`` (rows over in-neighborhoods)."""
    kind = Protocol.of(kind)
    n = g.n
    exact = g.weights_exact
    rows = [[Fraction(0)] * n for _ in range(n)] if exact else None
    data = np.zeros((n, n))
    for i in range(n):
        diag = Fraction(0) if exact else 0.0
        for j, w in g.neighbors(i):
            data[i, j] -= float(w)
            diag += abs(w) if kind is Protocol.ABS else w
            if exact:
                rows[i][j] -= w
        data[i, i] = float(diag)
        if exact:
            rows[i][i] = diag
    return LaplacianMatrix(
        kind=kind,
        data=data,
        exact=tuple(tuple(r) for r in rows) if exact else None,
        source=g.fingerprint(),
    )


def _resolve_exact(M, exact):
    if exact is None:
        return M.is_exact
    if exact and not M.is_exact:
        raise ValueError("exact mode requires rational weights")
    return exact


def zero_multiplicity(M, tol=None, exact=None):
    """Multiplicity of the zero eigenvalue of ``M``.

    Exact mode returns the rational nullity.  Float mode counts eigenvalues
    with ``|lam| <= tol * scale(M)``; for symmetric input this equals the
    numerical nullity.  Non-symmetric input must be safely diagonalizable.
    """
    if _resolve_exact(M, exact):
        return rational.nullity(M.exact)
    tol = DEFAULT_EIG_TOL if tol is None else tol
    scale = max(M.scale(), 1.0)
    A = M.data
    if np.allclose(A, A.T, atol=1e-12 * scale):
        eig = np.linalg.eigvalsh(A)
        return int(np.sum(np.abs(eig) <= tol * scale))
    eigval, eigvec = np.linalg.eig(A)
    cond = np.linalg.cond(eigvec)
    if not np.isfinite(cond) or cond > 1e12:
        raise EigendecompositionError(
            f"matrix is too far from diagonalizable (eigenvector cond {cond:.2e})")
    return int(np.sum(np.abs(eigval) <= tol * scale))


@dataclass(frozen=True)
class ControllabilityVerdict:
    """Dimension of the controllable subspace plus PBH failure witnesses."""

    dim: int
    n: int
    witnesses: tuple  # of (eigenvalue, eigenvector tuple)
    mode: str

    @property
    def controllable(self):
        return self.dim == self.n

    def to_dict(self):
        return {
            "dim": self.dim,
            "n": self.n,
            "controllable": self.controllable,
            "mode": self.mode,
            "witnesses": [
                {"eigenvalue": _num(lam), "eigenvector": [_num(x) for x in vec]}
                for lam, vec in self.witnesses
            ],
        }


def _num(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        return [x.real, x.imag] if abs(x.imag) > 0 else x.real
    return float(x)


def _b_matrix(n, leaders):
    leaders = LeaderSet.of(leaders)
    leaders.check_against(n)
    B = np.zeros((n, len(leaders)))
    for c, i in enumerate(leaders):
        B[i, c] = 1.0
    return leaders, B


def _float_rank(K, tol=None):
    if K.size == 0:
        return 0
    s = np.linalg.svd(K, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    cutoff = (max(K.shape) * np.finfo(float).eps if tol is None else tol) * s[0]
    return int(np.sum(s > cutoff))


def kalman_dim(M, leaders, tol=None, exact=None, with_witnesses=True):
    """Rank of ``[B, -MB, ..., (-M)^{n-1}B]`` as a ControllabilityVerdict."""
    leaders, B = _b_matrix(M.n, leaders)
    n = M.n
    if _resolve_exact(M, exact):
        Bq = [[Fraction(1) if i in leaders.ids and leaders.ids.index(i) == c else Fraction(0)
               for c in range(len(leaders))] for i in range(n)]
        negM = [[-x for x in row] for row in M.exact]
        blocks = []
        P = Bq
        for _ in range(n):
            blocks.append(P)
            P = rational.matmul(negM, P)
        K_rows = [[blocks[k][i][c] for k in range(n) for c in range(len(leaders))]
                  for i in range(n)]
        dim = rational.rank(K_rows)
        mode = "exact-rational"
    else:
        A = -M.data
        blocks = [B]
        P = B
        for _ in range(n - 1):
            P = A @ P
            blocks.append(P)
        dim = _float_rank(np.hstack(blocks), tol)
        mode = f"float(tol={DEFAULT_EIG_TOL if tol is None else tol:g})"
    witnesses = ()
    if with_witnesses and dim < n:
        witnesses = pbh_test(M, leaders, tol=tol).witnesses
    return ControllabilityVerdict(dim=dim, n=n, witnesses=witnesses, mode=mode)


def _cluster(values, width):
    """Group sorted scalars into runs whose consecutive gaps are < width."""
    order = np.argsort(values)
    groups = []
    current = [order[0]]
    for idx in order[1:]:
        if abs(values[idx] - values[current[-1]]) < width:
            current.append(idx)
        else:
            groups.append(current)
            current = [idx]
    groups.append(current)
    return groups


def pbh_test(M, leaders, tol=None):
    """Eigenvalue-by-eigenvalue rank test of ``[lam I + M | B]``.

    Witnesses are (left) eigenvectors orthogonal to every input column.  The
    reported dimension is ``n`` minus the total PBH rank deficiency, which for
    diagonalizable systems equals the Kalman dimension.
    """
    leaders, B = _b_matrix(M.n, leaders)
    n = M.n
    tol_eff = DEFAULT_EIG_TOL if tol is None else tol
    scale = max(M.scale(), 1.0)
    A = -M.data
    symmetric = np.allclose(A, A.T, atol=1e-12 * scale)
    witnesses = []
    deficiency = 0
    if symmetric:
        lam, V = np.linalg.eigh(A)
        for group in _cluster(lam, _CLUSTER_REL * scale):
            Vc = V[:, group]
            prod = Vc.T @ B  # m x q
            s = np.linalg.svd(prod, compute_uv=False) if prod.size else np.array([])
            r = int(np.sum(s > max(tol_eff, 1e-12) * max(1.0, s[0] if s.size else 0.0)))
            gap = len(group) - r
            if gap > 0:
                deficiency += gap
                if prod.size:
                    # left null directions of Vc'B give eigenvectors orthogonal to B
                    U_p = np.linalg.svd(prod)[0]
                    null_dirs = U_p[:, r:].T
                else:
                    null_dirs = np.eye(len(group))
                for z in null_dirs:
                    vec = _orient(Vc @ z)
                    witnesses.append((float(np.mean(lam[group])), tuple(float(x) for x in vec)))
    else:
        # The pencil rank itself decides each eigenvalue; no eigenvector basis
        # is needed, so defective (e.g. directed-tree) systems are fine.
        lam = np.linalg.eigvals(A)
        for group in _cluster(lam, _CLUSTER_REL * scale):
            lam_rep = complex(np.mean(lam[group]))
            pencil = np.hstack([lam_rep * np.eye(n) - A, B])
            U, s, _ = np.linalg.svd(pencil)
            r = int(np.sum(s > max(tol_eff, 1e-12) * max(scale, s[0] if s.size else 0.0)))
            gap = n - r
            if gap > 0:
                deficiency += gap
                if abs(lam_rep.imag) < tol_eff * scale:
                    lam_rep = lam_rep.real
                for col in range(r, n):
                    vec = _orient(U[:, col].conj())
                    witnesses.append((lam_rep, tuple(vec)))
    mode = f"float(tol={tol_eff:g})"
    return ControllabilityVerdict(dim=n - deficiency, n=n,
                                  witnesses=tuple(witnesses), mode=mode)


def _orient(vec):
    """Deterministic sign: first component of significant magnitude is positive."""
    v = np.asarray(vec)
    nrm = np.linalg.norm(v)
    if nrm > 0:
        v = v / nrm
    for x in v:
        if abs(x) > 1e-8:
            if (x.real if np.iscomplexobj(v) else x) < 0:
                v = -v
            break
    return v


def pbh_zero_witnesses_exact(M, leaders):
    """Exact kernel vectors of ``M`` orthogonal to every input column.

    Rational counterpart of the PBH test at eigenvalue zero: basis of
    ``ker(M) ∩ {v : v_i = 0 for every leader i}``.
    """
    if not M.is_exact:
        raise ValueError("exact witnesses require rational weights")
    leaders = LeaderSet.of(leaders)
    leaders.check_against(M.n)
    rows = [list(r) for r in M.exact]
    for i in leaders:
        sel = [Fraction(0)] * M.n
        sel[i] = Fraction(1)
        rows.append(sel)
    return rational.nullspace(rows)


def distance_lower_bound(g, leader):
    """``r + 1`` with ``r`` the largest hop distance from the single leader."""
    if not g.is_connected():
        raise DisconnectedGraphError("distance bound requires a connected graph")
    if not 0 <= leader < g.n:
        raise GraphFormatError(f"leader {leader} out of range")
    return max(g.distances_from(leader)) + 1


@dataclass(frozen=True)
class SteerResult:
    """Discretized minimum-energy steering trajectories."""

    times: np.ndarray
    states: np.ndarray  # (steps+1, n)
    inputs: np.ndarray  # (steps+1, q)
    terminal_error: float
    gramian_rank: int

    def to_csv(self):
        n = self.states.shape[1]
        q = self.inputs.shape[1]
        buf = io.StringIO()
        buf.write("t," + ",".join(f"x{i}" for i in range(n))
                  + "," + ",".join(f"u{i}" for i in range(q)) + "\n")
        for k, t in enumerate(self.times):
            row = [repr(float(t))]
            row += [repr(float(x)) for x in self.states[k]]
            row += [repr(float(u)) for u in self.inputs[k]]
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def steer(M, leaders, x0, xf, horizon, steps=200, tol=1e-8):
    """Minimum-energy input driving ``xdot = -Mx + Bu`` from x0 to xf.

    The finite-horizon Gramian is accumulated with a fixed-step matrix
    exponential; the target must lie in the controllable subspace up to
    ``tol`` or UnreachableTargetError is raised.
    """
    leaders, B = _b_matrix(M.n, leaders)
    n = M.n
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    xf = np.asarray(xf, dtype=float).reshape(-1)
    if x0.shape != (n,) or xf.shape != (n,):
        raise ValueError(f"state vectors must have length {n}")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    A = -M.data
    dt = horizon / steps
    Ed = scipy.linalg.expm(A * dt)
    C = np.block([[-A, B @ B.T], [np.zeros((n, n)), A.T]])
    Fd = scipy.linalg.expm(C * dt)
    # E[k] = expm(A t_k); F12[k] = expm(-A t_k) @ integral_0^{t_k} e^{As} BB' e^{A's} ds
    E = [np.eye(n)]
    F = [np.eye(2 * n)]
    for _ in range(steps):
        E.append(Ed @ E[-1])
        F.append(Fd @ F[-1])
    W_T = E[steps] @ F[steps][:n, n:]
    W_T = (W_T + W_T.T) / 2
    nu = xf - E[steps] @ x0
    sing = np.linalg.svd(W_T, compute_uv=False)
    w_scale = sing[0] if sing.size and sing[0] > 0 else 1.0
    gramian_rank = int(np.sum(sing > max(n * np.finfo(float).eps, tol * 1e-3) * w_scale))
    W_pinv = np.linalg.pinv(W_T, rcond=max(n * np.finfo(float).eps, tol * 1e-3))
    eta = W_pinv @ nu
    residual = float(np.linalg.norm(W_T @ eta - nu))
    if residual > tol * (1.0 + np.linalg.norm(nu)):
        raise UnreachableTargetError(
            f"target outside controllable subspace (projection residual {residual:.3e})",
            residual=residual)
    times = np.array([k * dt for k in range(steps + 1)])
    states = np.empty((steps + 1, n))
    inputs = np.empty((steps + 1, len(leaders)))
    for k in range(steps + 1):
        W_k = E[k] @ F[k][:n, n:]
        states[k] = E[k] @ x0 + W_k @ (E[steps - k].T @ eta)
        inputs[k] = B.T @ (E[steps - k].T @ eta)
    terminal_error = float(np.linalg.norm(states[-1] - xf))
    return SteerResult(times=times, states=states, inputs=inputs,
                       terminal_error=terminal_error, gramian_rank=gramian_rank)
