"""Finite-rank collocation of the transfer operator on boundary intervals.

The weighted composition operator

    (L(s) u)(x) = sum_{i != t(x)} |sigma_i'(x)|^s  u(sigma_i(x))

acts on functions over the boundary intervals (t(x) = owning generator).
Sampling at Chebyshev points and interpolating barycentrically yields a
square matrix whose leading eigenvalue lambda(s) is strictly decreasing in
real s with lambda(0) = L - 1; the root of lambda(s) = 1 is the limit-set
dimension (Bowen's equation), independent of the cycle-expansion route.

`depth` refines the partition into cylinder cells sigma_i(I_j).  The
spectrum is unchanged, but each cell is small relative to the eigenfunction's
analyticity domain, which buys spectral accuracy for weakly contracting
groups (wide arcs); depth 0 suffices for strongly contracting ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import BracketFailure, NoConvergence
from .geometry import GroupConfig, to_boundary_maps

DEFAULT_DEGREE = 32
EIG_TOL = 1e-14
EIG_MAX_ITER = 50_000


def _cheb_nodes(a: float, b: float, K: int) -> np.ndarray:
    t = np.cos(np.pi * np.arange(K + 1) / K)
    return 0.5 * (a + b) + 0.5 * (b - a) * t


def _bary_weights(K: int) -> np.ndarray:
    w = np.ones(K + 1)
    w[1::2] = -1.0
    w[0] *= 0.5
    w[K] *= 0.5
    return w


@dataclass(frozen=True)
class _Cell:
    label: tuple[int, ...]   # leading symbol first
    a: float
    b: float

    @property
    def top(self) -> int:
        return self.label[0]


@dataclass(frozen=True)
class BowenResult:
    delta: float
    K: int
    eigen_residual: float


@dataclass
class CollocationOperator:
    """Chebyshev collocation of the transfer operator for one group."""

    config: GroupConfig
    K: int = DEFAULT_DEGREE
    depth: int = 0
    cells: tuple[_Cell, ...] = field(init=False)
    nodes: np.ndarray = field(init=False)          # (ncells, K+1)
    contraction_margin: float = field(init=False)

    def __post_init__(self):
        maps, intervals = to_boundary_maps(self.config)
        self._p = np.array([iv.center for iv in intervals])
        self._rho = np.array([iv.radius for iv in intervals])
        L = self.config.num_circles
        cells = [_Cell((i,), iv.x1, iv.x2)
                 for i, iv in enumerate(intervals)]
        for _ in range(self.depth):
            refined = []
            for cell in cells:
                for i in range(L):
                    if i == cell.top:
                        continue
                    ya, yb = sorted((self._sigma(i, cell.a),
                                     self._sigma(i, cell.b)))
                    refined.append(_Cell((i,) + cell.label, ya, yb))
            cells = refined
        self.cells = tuple(sorted(cells, key=lambda c: c.label))
        self._index = {c.label: k for k, c in enumerate(self.cells)}
        self.nodes = np.array([_cheb_nodes(c.a, c.b, self.K)
                               for c in self.cells])
        self._bw = _bary_weights(self.K)
        self.contraction_margin = self._min_margin()
        if self.contraction_margin <= 0:
            raise BracketFailure(
                "branch images are not strictly inside their target cells")

    # -- geometry helpers -------------------------------------------------

    def _sigma(self, i: int, x):
        return self._p[i] + self._rho[i] ** 2 / (x - self._p[i])

    def _dsigma_abs(self, i: int, x):
        return self._rho[i] ** 2 / (x - self._p[i]) ** 2

    def _target(self, i: int, cell: _Cell) -> int:
        label = ((i,) + cell.label)[: self.depth + 1]
        return self._index[label]

    def _min_margin(self) -> float:
        margin = math.inf
        L = self.config.num_circles
        for cell in self.cells:
            for i in range(L):
                if i == cell.top:
                    continue
                tgt = self.cells[self._target(i, cell)]
                ya, yb = sorted((self._sigma(i, cell.a),
                                 self._sigma(i, cell.b)))
                margin = min(margin, ya - tgt.a, tgt.b - yb)
        return margin

    @property
    def size(self) -> int:
        return len(self.cells) * (self.K + 1)

    # -- assembly ----------------------------------------------------------

    def _basis_rows(self, cell_idx: int, y: np.ndarray) -> np.ndarray:
        """Barycentric Lagrange basis of the target cell at points y."""
        diff = y[:, None] - self.nodes[cell_idx][None, :]
        exact = diff == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            tmp = self._bw[None, :] / diff
            rows = tmp / tmp.sum(axis=1, keepdims=True)
        hit = exact.any(axis=1)
        if np.any(hit):
            rows[hit] = exact[hit].astype(float)
        return rows

    def matrix(self, s) -> np.ndarray:
        """Collocation matrix of L(s); complex when s is complex."""
        dtype = complex if isinstance(s, complex) and s.imag != 0 else float
        s_val = s if dtype is complex else float(np.real(s))
        out = np.zeros((self.size, self.size), dtype=dtype)
        L = self.config.num_circles
        Kp1 = self.K + 1
        for jc, cell in enumerate(self.cells):
            x = self.nodes[jc]
            rows = slice(jc * Kp1, (jc + 1) * Kp1)
            for i in range(L):
                if i == cell.top:
                    continue
                ic = self._target(i, cell)
                y = self._sigma(i, x)
                weight = self._dsigma_abs(i, x) ** s_val
                basis = self._basis_rows(ic, y)
                out[rows, ic * Kp1:(ic + 1) * Kp1] = weight[:, None] * basis
        return out


def build_collocation(config: GroupConfig, K: int = DEFAULT_DEGREE,
                      depth: int = 0) -> CollocationOperator:
    return CollocationOperator(config=config, K=K, depth=depth)


def leading_eigenvalue(op: CollocationOperator, s: float, *,
                       tol: float = EIG_TOL,
                       max_iter: int = EIG_MAX_ITER) -> tuple[float, float]:
    """Dominant eigenvalue of the collocation matrix by power iteration."""
    A = op.matrix(float(s))
    v = np.ones(A.shape[0])
    lam_prev = 0.0
    for _ in range(max_iter):
        w = A @ v
        lam = float(v @ w / (v @ v))
        nm = np.linalg.norm(w)
        if nm == 0.0:
            raise NoConvergence("power iteration collapsed to zero")
        v = w / nm
        if abs(lam - lam_prev) <= tol * max(1.0, abs(lam)):
            residual = float(np.max(np.abs(A @ v - lam * v)))
            return lam, residual
        lam_prev = lam
    raise NoConvergence(
        f"eigenvalue iteration did not converge in {max_iter} steps")


def eigenfunction_values(op: CollocationOperator, s: float,
                         max_iter: int = EIG_MAX_ITER) -> np.ndarray:
    """Leading eigenvector (node values), normalized to max value 1."""
    A = op.matrix(float(s))
    v = np.ones(A.shape[0])
    for _ in range(max_iter):
        w = A @ v
        w /= np.max(np.abs(w))
        if np.max(np.abs(w - v)) < 1e-13:
            return w
        v = w
    raise NoConvergence("eigenfunction iteration did not converge")


def bowen_dimension(op: CollocationOperator, tol: float = 1e-12) -> BowenResult:
    """Root of lambda(s) = 1 on (0, 1), bracketed then refined by Brent."""
    lam0, _ = leading_eigenvalue(op, 0.0)
    if lam0 <= 1.0:
        raise BracketFailure(f"lambda(0) = {lam0:.6f} <= 1; no root in (0,1)")
    lam1, _ = leading_eigenvalue(op, 1.0)
    if lam1 >= 1.0:
        raise BracketFailure(f"lambda(1) = {lam1:.6f} >= 1; no root in (0,1)")
    delta = brentq(lambda s: leading_eigenvalue(op, s)[0] - 1.0,
                   0.0, 1.0, xtol=tol)
    lam_d, _ = leading_eigenvalue(op, delta)
    return BowenResult(delta=float(delta), K=op.K,
                       eigen_residual=abs(lam_d - 1.0))


def singular_value_profile(op: CollocationOperator, s) -> np.ndarray:
    """Singular values of the collocation matrix, descending."""
    return np.linalg.svd(op.matrix(s), compute_uv=False)


def operator_determinant(op: CollocationOperator, s) -> complex:
    """det(I - L(s)) of the finite-rank approximation (diagnostic only;
    its weights differ from the orbit-sum zeta away from the real axis)."""
    A = op.matrix(s)
    return complex(np.linalg.det(np.eye(A.shape[0]) - A))


def geometric_decay_fit(svals: np.ndarray, *, skip: int = 4,
                        floor_ratio: float = 1e-12
                        ) -> tuple[float, float, int]:
    """Least-squares fit of log mu_l against l on the usable tail.

    Returns (ratio, r_squared, points_used) where ratio = e^slope is the
    fitted geometric decay factor.  The first `skip` values (burn-in) and
    anything below floor_ratio * mu_0 (rounding plateau) are excluded.
    """
    svals = np.asarray(svals, dtype=float)
    mask = svals > svals[0] * floor_ratio
    idx = np.arange(len(svals))[mask][skip:]
    vals = np.log(svals[mask][skip:])
    if len(idx) < 5:
        raise ValueError("not enough singular values above the floor to fit")
    slope, intercept = np.polyfit(idx, vals, 1)
    fitted = slope * idx + intercept
    ss_res = float(np.sum((vals - fitted) ** 2))
    ss_tot = float(np.sum((vals - vals.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(np.exp(slope)), r2, int(len(idx))
