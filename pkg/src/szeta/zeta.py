"""Truncated zeta function from precomputed orbit tables.

The order-M truncation is the degree-M cut of exp(-sum_n a_n t^n) at
t = 1, graded by total orbit length, with

    a_n(s) = (1/n) sum over classes of mult * e^{s u} / (1 - m)^2.

It is evaluated through the double-index recursion

    B(N, 1) = -a_N,
    B(N, r) = -(1/r) sum_{k=1}^{N-r+1} B(N-k, r-1) a_k,
    Z_M = 1 + sum_{N<=M} sum_{r<=N} B(N, r),

with the derivative in s carried through by the product rule.  Two
independent evaluation routes (a truncated product of exponential factors,
and an Euler product over primitive classes) are provided as oracles.

Conformal mode uses every length; Selberg surface mode keeps only even
lengths and doubles their coefficients, which counts the conjugacy
classes of the orientation-preserving subgroup correctly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroDenominator
from .orbits import OrbitTable

MODES = ("conformal", "selberg")

# Cap on points * classes handled in one exp() block when batching.
_BATCH_BUDGET = 4_000_000


@dataclass(frozen=True)
class ZetaValue:
    z: complex
    dz: complex
    s: complex


@dataclass(frozen=True)
class ErrorMetric:
    value: float
    orders: tuple[int, int]


class ZetaSeries:
    """Evaluator of (Z_M(s), Z_M'(s)) bound to one orbit table and mode."""

    def __init__(self, table: OrbitTable, M: int | None = None,
                 mode: str = "conformal"):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if M is None:
            M = table.M
        if not 1 <= M <= table.M:
            raise ValueError(f"M={M} outside 1..{table.M} of the table")
        self.table = table
        self.M = int(M)
        self.mode = mode
        self._u = []
        self._w = []
        for n in range(1, self.M + 1):
            b = table.block(n)
            u = b.u.astype(float)
            w = b.multiplicity / (1.0 - b.m) ** 2 / n
            if mode == "selberg":
                w = np.zeros_like(w) if n % 2 else 2.0 * w
            self._u.append(u)
            self._w.append(w)

    # -- coefficients ----------------------------------------------------

    def coefficient(self, n: int, s: complex,
                    derivative: bool = False) -> complex:
        """a_n(s), or its s-derivative (each term picks up a factor u)."""
        if not 1 <= n <= self.M:
            raise ValueError(f"n={n} outside 1..{self.M}")
        u, w = self._u[n - 1], self._w[n - 1]
        if len(u) == 0:
            return 0j
        e = np.exp(np.complex128(s) * u)
        if derivative:
            return complex(np.dot(w * u, e))
        return complex(np.dot(w, e))

    def _coeffs_batch(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Arrays a[n, j], a'[n, j] for all orders at the points s[j]."""
        S = len(s)
        a = np.zeros((self.M + 1, S), dtype=complex)
        ap = np.zeros((self.M + 1, S), dtype=complex)
        with np.errstate(under="ignore"):
            for n in range(1, self.M + 1):
                u, w = self._u[n - 1], self._w[n - 1]
                if len(u) == 0:
                    continue
                e = np.exp(np.multiply.outer(s, u))
                a[n] = e @ w
                ap[n] = e @ (w * u)
        return a, ap

    # -- evaluation ------------------------------------------------------

    def _recursion(self, a: np.ndarray,
                   ap: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Partial sums Z_N, Z_N' for N = 0..M from the coefficient
        arrays; axis 1 ranges over evaluation points."""
        M, S = self.M, a.shape[1]
        B = np.zeros((M + 1, M + 1, S), dtype=complex)
        Bp = np.zeros((M + 1, M + 1, S), dtype=complex)
        B[1, 1:] = -a[1:]
        Bp[1, 1:] = -ap[1:]
        for r in range(2, M + 1):
            for N in range(r, M + 1):
                acc = np.zeros(S, dtype=complex)
                accp = np.zeros(S, dtype=complex)
                for k in range(1, N - r + 2):
                    acc += B[r - 1, N - k] * a[k]
                    accp += Bp[r - 1, N - k] * a[k] + B[r - 1, N - k] * ap[k]
                B[r, N] = -acc / r
                Bp[r, N] = -accp / r
        c = B.sum(axis=0)     # c[N] = coefficient of total length N
        cp = Bp.sum(axis=0)
        z = 1.0 + np.cumsum(c[1:], axis=0)
        dz = np.cumsum(cp[1:], axis=0)
        z = np.concatenate([np.ones((1, S), dtype=complex), z])
        dz = np.concatenate([np.zeros((1, S), dtype=complex), dz])
        return z, dz

    def evaluate(self, s: complex) -> ZetaValue:
        """(Z_M(s), Z_M'(s)) at a single point."""
        a, ap = self._coeffs_batch(np.array([complex(s)]))
        z, dz = self._recursion(a, ap)
        return ZetaValue(z=complex(z[-1, 0]), dz=complex(dz[-1, 0]),
                         s=complex(s))

    def evaluate_orders(self, s: complex) -> tuple[np.ndarray, np.ndarray]:
        """Partial sums (Z_N(s), Z_N'(s)) for every N = 0..M."""
        a, ap = self._coeffs_batch(np.array([complex(s)]))
        z, dz = self._recursion(a, ap)
        return z[:, 0], dz[:, 0]

    def evaluate_batch(self, s) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized (Z_M, Z_M') over an array of points."""
        s = np.asarray(s, dtype=complex).ravel()
        total = max(1, self.table.class_count())
        block = max(1, _BATCH_BUDGET // total)
        zs = np.empty(len(s), dtype=complex)
        dzs = np.empty(len(s), dtype=complex)
        for lo in range(0, len(s), block):
            chunk = s[lo:lo + block]
            a, ap = self._coeffs_batch(chunk)
            z, dz = self._recursion(a, ap)
            zs[lo:lo + len(chunk)] = z[-1]
            dzs[lo:lo + len(chunk)] = dz[-1]
        return zs, dzs

    def __call__(self, s):
        return self.evaluate_batch(s)


# -- independent oracles ------------------------------------------------


def evaluate_exp_oracle(series: ZetaSeries, s: complex) -> complex:
    """Z_M(s) by multiplying the truncated power series of each factor
    exp(-a_n t^n) and reading the degree-<=M part at t = 1."""
    M = series.M
    poly = np.zeros(M + 1, dtype=complex)
    poly[0] = 1.0
    for n in range(1, M + 1):
        an = series.coefficient(n, s)
        factor = np.zeros(M + 1, dtype=complex)
        for k in range(0, M // n + 1):
            factor[k * n] = (-an) ** k / math.factorial(k)
        poly = np.convolve(poly, factor)[:M + 1]
    return complex(poly.sum())


def evaluate_pr_oracle(series: ZetaSeries, s: complex,
                       M: int | None = None) -> complex:
    """Z_M(s) as a truncated Euler product over primitive rotation classes.

    Each primitive class of length p and multiplier m0 contributes the
    factor prod_{q>=0} (1 - e^{s u0} m0^q t^p)^{q+1}; expanding the product
    over classes and q regroups the length-graded series exactly, power
    terms included.  Cost grows combinatorially, so the order is capped.
    """
    if M is None:
        M = min(series.M, 6)
    if not 1 <= M <= 8:
        raise ValueError(f"PR oracle order must be in 1..8, got {M}")
    if M > series.M:
        raise ValueError(f"M={M} exceeds series order {series.M}")
    selberg = series.mode == "selberg"
    poly = np.zeros(M + 1, dtype=complex)
    poly[0] = 1.0
    for p in range(1, M + 1):
        b = series.table.block(p)
        primitive = b.multiplicity == p
        for u0, m0 in zip(b.u[primitive], b.m[primitive]):
            if selberg and p % 2:
                # odd primitive orbits enter only through even powers
                base, ratio, step, power = (
                    np.exp(2.0 * s * u0), m0 * m0, 2 * p, 1)
            elif selberg:
                base, ratio, step, power = np.exp(s * u0), m0, p, 2
            else:
                base, ratio, step, power = np.exp(s * u0), m0, p, 1
            if step > M:
                continue
            q = 0
            factor = base
            while abs(factor) > 1e-40:
                for _ in range((q + 1) * power):
                    poly[step:] -= factor * poly[:-step].copy()
                q += 1
                factor = base * ratio**q
    return complex(poly.sum())


def error_metric(series: ZetaSeries, s: complex, M1: int,
                 M2: int) -> ErrorMetric:
    """Modified relative error between the log-derivatives at two orders:
    |R1 - R2| / (1 + |R1| + |R2|) with R_i = Z_{Mi}'/Z_{Mi}."""
    hi = max(M1, M2)
    if not 1 <= min(M1, M2) or hi > series.M:
        raise ValueError(f"orders ({M1}, {M2}) outside 1..{series.M}")
    z, dz = series.evaluate_orders(s)
    for Mi in (M1, M2):
        if z[Mi] == 0:
            raise ZeroDenominator(
                f"Z_{Mi}({s}) = 0; offset the evaluation point")
    r1 = dz[M1] / z[M1]
    r2 = dz[M2] / z[M2]
    value = abs(r1 - r2) / (1.0 + abs(r1) + abs(r2))
    return ErrorMetric(value=float(value), orders=(int(M1), int(M2)))
