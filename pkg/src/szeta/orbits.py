"""Per-orbit invariants: fixed points and multipliers of word compositions.

For a word (w_1, ..., w_n) the composed boundary map is represented by the
ordered matrix product A_{w_n} ... A_{w_1}.  With determinant-normalized
generators the derivative at the attracting fixed point is
sign(det) / lambda_+^2 where lambda_+ is the dominant eigenvalue, so the
only quantities the zeta series needs are u = -2 log|lambda_+| (per
class) and the rotation multiplicity.

Products are never formed at full scale: factors are applied to a vector
(power method) or accumulated with per-step renormalization (closed-form
cross-check), with the log of the norm tracked separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CacheError, NoConvergence, NotContracting
from .geometry import BoundaryMap, GroupConfig, generator_matrices
from .symbolic import Word, class_matrix

POWER_TOL = 1e-14
MAX_CYCLES = 200


@dataclass(frozen=True)
class OrbitScalars:
    """Scalars of one rotation class; all rotations share them."""

    n: int
    multiplicity: int
    u: float        # log |phi'| at the fixed point, strictly negative
    m: float        # signed multiplier, |m| < 1
    x_fix: float    # attracting fixed point on the boundary line


@dataclass(frozen=True)
class LengthBlock:
    """All classes of one length, as parallel arrays sorted by
    representative."""

    n: int
    reps: np.ndarray          # (C, n) representatives
    multiplicity: np.ndarray  # (C,)
    u: np.ndarray             # (C,)
    m: np.ndarray             # (C,)
    x_fix: np.ndarray         # (C,)

    def __len__(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class OrbitTable:
    """Orbit scalars for every length up to the truncation order M."""

    fingerprint: str
    M: int
    blocks: tuple[LengthBlock, ...]

    def block(self, n: int) -> LengthBlock:
        if not 1 <= n <= self.M:
            raise ValueError(f"no block for length {n} (M={self.M})")
        return self.blocks[n - 1]

    def scalars(self, n: int) -> list[OrbitScalars]:
        b = self.block(n)
        return [
            OrbitScalars(n=n, multiplicity=int(b.multiplicity[i]),
                         u=float(b.u[i]), m=float(b.m[i]),
                         x_fix=float(b.x_fix[i]))
            for i in range(len(b))
        ]

    def class_count(self) -> int:
        return sum(len(b) for b in self.blocks)


def _as_matrices(maps: Sequence[BoundaryMap] | np.ndarray) -> np.ndarray:
    if isinstance(maps, np.ndarray):
        return maps
    return np.array([m.matrix for m in maps])


def _det_sign(word: Word, maps) -> int:
    if isinstance(maps, np.ndarray):
        dets = maps[:, 0, 0] * maps[:, 1, 1] - maps[:, 0, 1] * maps[:, 1, 0]
        signs = np.sign(dets).astype(int)
    else:
        signs = [m.det_sign for m in maps]
    sign = 1
    for s in word:
        sign *= int(signs[s])
    return sign


def _rotation_count(word: Word) -> int:
    return len({word[i:] + word[:i] for i in range(len(word))})


def _finish(word: Word, u: float, sign: int, x_fix: float) -> OrbitScalars:
    if u >= 0.0:
        raise NotContracting(
            f"word {word}: log-multiplier {u:.3e} is not negative")
    return OrbitScalars(n=len(word), multiplicity=_rotation_count(word),
                        u=u, m=sign * math.exp(u), x_fix=x_fix)


def multiplier(word: Word, maps, *, tol: float = POWER_TOL,
               max_cycles: int = MAX_CYCLES, seed: int = 0) -> OrbitScalars:
    """Orbit scalars by the power method on the factored matrix product.

    One cycle applies the factors A_{w_1}, ..., A_{w_n} in order, dividing
    by the vector norm after each factor and accumulating its log.  The
    per-cycle log increment converges to log|lambda_+|; iteration stops
    once consecutive increments agree to tol (relative on the log scale).
    Admissibility of the word is the caller's responsibility, so arbitrary
    factor sequences can be fed in for testing.
    """
    mats = _as_matrices(maps)
    sign = _det_sign(word, maps)
    rng = np.random.default_rng(seed)
    inc = 0.0
    v = None
    for _attempt in range(2):
        v = rng.standard_normal(2)
        v /= np.linalg.norm(v)
        prev = None
        for _cycle in range(max_cycles):
            inc = 0.0
            for s in word:
                v = mats[s] @ v
                nm = np.linalg.norm(v)
                v /= nm
                inc += math.log(nm)
            if prev is not None and abs(inc - prev) <= tol * max(1.0, abs(inc)):
                if abs(v[1]) < 1e-250:
                    break  # fixed point escaping to infinity; retry
                return _finish(word, -2.0 * inc, sign, v[0] / v[1])
            prev = inc
    raise NoConvergence(
        f"power method did not stabilise for word {word} "
        f"within {max_cycles} cycles")


def multiplier_analytic(word: Word, maps) -> OrbitScalars:
    """Orbit scalars from the closed-form 2x2 eigenvalue (trace and
    determinant of the scaled product); cross-check for :func:`multiplier`.
    """
    mats = _as_matrices(maps)
    sign = _det_sign(word, maps)
    P = np.eye(2)
    scale = 0.0
    for s in word:
        P = mats[s] @ P
        nm = np.max(np.abs(P))
        P /= nm
        scale += math.log(nm)
    tr = P[0, 0] + P[1, 1]
    det = P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]
    disc = tr * tr - 4.0 * det
    if disc <= 0.0 or tr == 0.0:
        raise NoConvergence(
            f"word {word}: product has no dominant real eigenvalue")
    lam = 0.5 * (tr + math.copysign(math.sqrt(disc), tr))
    u = -2.0 * (scale + math.log(abs(lam)))
    if abs(P[1, 0]) >= abs(lam - P[0, 0]):
        x_fix = (lam - P[1, 1]) / P[1, 0]
    else:
        x_fix = P[0, 1] / (lam - P[0, 0])
    return _finish(word, u, sign, float(x_fix))


def _batch_multiplier(reps: np.ndarray, mats: np.ndarray, *,
                      tol: float = POWER_TOL, max_cycles: int = MAX_CYCLES,
                      seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Power method on all classes of one length at once.

    Returns (u, x_fix) arrays; sign handling is the caller's job.
    """
    C, n = reps.shape
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((C, 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    prev = np.full(C, np.nan)
    inc = np.zeros(C)
    done = np.zeros(C, dtype=bool)
    for attempt in range(2):
        for _cycle in range(max_cycles):
            inc[:] = 0.0
            for k in range(n):
                A = mats[reps[:, k]]
                v = np.einsum("cij,cj->ci", A, v)
                nm = np.linalg.norm(v, axis=1)
                v /= nm[:, None]
                inc += np.log(nm)
            done = np.abs(inc - prev) <= tol * np.maximum(1.0, np.abs(inc))
            if done.all():
                break
            prev[:] = inc
        if done.all():
            break
        # restart the stragglers from fresh vectors
        stale = ~done
        v[stale] = rng.standard_normal((int(stale.sum()), 2))
        v[stale] /= np.linalg.norm(v[stale], axis=1, keepdims=True)
        prev[stale] = np.nan
    if not done.all():
        bad = int(np.argmax(~done))
        raise NoConvergence(
            f"power method did not stabilise for word "
            f"{tuple(int(x) for x in reps[bad])}")
    if np.any(np.abs(v[:, 1]) < 1e-250):
        bad = int(np.argmax(np.abs(v[:, 1]) < 1e-250))
        raise NoConvergence(
            f"degenerate fixed point for word "
            f"{tuple(int(x) for x in reps[bad])}")
    return -2.0 * inc, v[:, 0] / v[:, 1]


def build_orbit_table(config: GroupConfig, M: int, *,
                      tol: float = POWER_TOL, max_cycles: int = MAX_CYCLES,
                      seed: int = 0) -> OrbitTable:
    """Orbit scalars for every class of length 1..M, deterministically
    ordered by representative."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    mats = generator_matrices(config)
    L = config.num_circles
    blocks = []
    for n in range(1, M + 1):
        reps, counts = class_matrix(L, n)
        if len(reps) == 0:
            blocks.append(LengthBlock(
                n=n, reps=reps, multiplicity=counts,
                u=np.empty(0), m=np.empty(0), x_fix=np.empty(0)))
            continue
        u, x_fix = _batch_multiplier(reps, mats, tol=tol,
                                     max_cycles=max_cycles, seed=seed)
        if np.any(u >= 0.0):
            bad = int(np.argmax(u >= 0.0))
            raise NotContracting(
                f"word {tuple(int(x) for x in reps[bad])}: "
                f"log-multiplier {u[bad]:.3e} is not negative")
        sign = -1.0 if n % 2 else 1.0
        blocks.append(LengthBlock(n=n, reps=reps, multiplicity=counts,
                                  u=u, m=sign * np.exp(u), x_fix=x_fix))
    return OrbitTable(fingerprint=config.fingerprint(), M=M,
                      blocks=tuple(blocks))


CACHE_FORMAT = "szeta-table-v1"


def save_table(table: OrbitTable, path) -> None:
    """Write the table as a versioned .npz keyed by group fingerprint."""
    payload = {
        "meta": np.array([CACHE_FORMAT, table.fingerprint, str(table.M)]),
    }
    for b in table.blocks:
        payload[f"reps_{b.n}"] = b.reps
        payload[f"mult_{b.n}"] = b.multiplicity
        payload[f"u_{b.n}"] = b.u
        payload[f"m_{b.n}"] = b.m
        payload[f"xfix_{b.n}"] = b.x_fix
    np.savez_compressed(path, **payload)


def load_table(path, *, fingerprint: str | None = None,
               M: int | None = None) -> OrbitTable:
    """Read a cached table, verifying format, fingerprint, and order."""
    try:
        data = np.load(path, allow_pickle=False)
    except Exception as exc:
        raise CacheError(f"cannot read orbit-table cache {path}: {exc}")
    meta = data.get("meta")
    if meta is None or len(meta) != 3 or str(meta[0]) != CACHE_FORMAT:
        raise CacheError(f"{path} is not a {CACHE_FORMAT} cache")
    fp, cached_M = str(meta[1]), int(meta[2])
    if fingerprint is not None and fp != fingerprint:
        raise CacheError(
            f"cache {path} is for group {fp}, expected {fingerprint}")
    if M is not None and cached_M != M:
        raise CacheError(f"cache {path} has M={cached_M}, expected M={M}")
    blocks = []
    for n in range(1, cached_M + 1):
        blocks.append(LengthBlock(
            n=n, reps=data[f"reps_{n}"], multiplicity=data[f"mult_{n}"],
            u=data[f"u_{n}"], m=data[f"m_{n}"], x_fix=data[f"xfix_{n}"]))
    return OrbitTable(fingerprint=fp, M=cached_M, blocks=tuple(blocks))
