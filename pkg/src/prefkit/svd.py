"""Dense singular value decomposition with a deterministic sign convention.

The factorization itself is delegated to LAPACK via numpy; on top of it this
module pins a sign convention that makes the factors unique whenever the
singular values are distinct: in each left-singular column the entry of
largest absolute value is made non-negative (ties resolved by the lowest row
index), and the matching right-singular row flips jointly.  Downstream
sign-pattern clustering depends on this determinism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankOutOfRangeError


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """Thin SVD a = u @ diag(sigma) @ vt with p = min(n, m) columns kept.

    u is n x p with orthonormal columns, sigma is non-increasing and
    non-negative, vt is p x m with orthonormal rows.
    """

    u: np.ndarray
    sigma: np.ndarray
    vt: np.ndarray

    @property
    def p(self) -> int:
        return self.sigma.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.vt


@dataclass(frozen=True, eq=False)
class TruncatedSvd:
    """The leading ``rank`` singular triplets of a parent factorization."""

    rank: int
    u: np.ndarray
    sigma: np.ndarray
    vt: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.vt


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> None:
    for j in range(u.shape[1]):
        anchor = int(np.argmax(np.abs(u[:, j])))
        if u[anchor, j] < 0:
            u[:, j] = -u[:, j]
            vt[j, :] = -vt[j, :]


def svd(a: np.ndarray) -> SvdFactors:
    """Factor a real n x m matrix; deterministic for a given input.

    Raises ValueError on non-finite entries; numpy raises LinAlgError if the
    underlying iteration fails to converge.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("input must be a non-empty 2-d matrix")
    if not np.isfinite(a).all():
        raise ValueError("input entries must be finite")
    u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    u = np.ascontiguousarray(u)
    vt = np.ascontiguousarray(vt)
    _fix_signs(u, vt)
    for arr in (u, sigma, vt):
        arr.flags.writeable = False
    return SvdFactors(u=u, sigma=sigma, vt=vt)


def truncate(factors: SvdFactors, rank: int) -> TruncatedSvd:
    """Keep the leading ``rank`` triplets (exact prefix slices)."""
    if not 1 <= rank <= factors.p:
        raise RankOutOfRangeError(f"rank must lie in 1..{factors.p}, got {rank}")
    return TruncatedSvd(
        rank=rank,
        u=factors.u[:, :rank],
        sigma=factors.sigma[:rank],
        vt=factors.vt[:rank, :],
    )


def scree(factors: SvdFactors) -> list[tuple[int, float]]:
    """(rank, sigma) pairs, 1-based, in decreasing-sigma order for plotting."""
    return [(j + 1, float(s)) for j, s in enumerate(factors.sigma)]
