"""Finite differences, small symmetric eigenproblems and eigenvalue clustering."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError, EvaluationError

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Tolerances:
    """Comparison tolerances.

    abs_eq is used for closed-form identities, fd_eq for anything that goes
    through a finite-difference stencil, cluster_rel for grouping eigenvalues.
    """

    abs_eq: float = 1e-9
    fd_eq: float = 1e-5
    cluster_rel: float = 1e-6

    def __post_init__(self):
        for name in ("abs_eq", "fd_eq", "cluster_rel"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ContractError(f"tolerance {name} must be positive, got {v!r}")
        if self.cluster_rel >= 1:
            raise ContractError("cluster_rel must be < 1")


DEFAULT_TOL = Tolerances()


# outer step for differentiating FD-computed quantities: inner round-off is
# ~eps**(2/3), so the outer step must be well above eps**(1/3)
NESTED_STEP = EPS ** (1 / 5)


def fd_step(s: float, order: int) -> float:
    scale = max(1.0, abs(s))
    if order == 1:
        return EPS ** (1 / 3) * scale
    if order == 2:
        return EPS ** (1 / 4) * scale
    raise ContractError(f"order must be 1 or 2, got {order}")


def _finite(value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise EvaluationError("curve produced a non-finite value")
    return arr


def fd_derivative(
    curve: Callable[[float], np.ndarray | float], s: float, order: int = 1, step: float | None = None
):
    """Central-difference derivative of ``curve`` at ``s``.

    Works for scalar- and vector-valued curves. Step sizes follow the usual
    eps**(1/3) (first order) and eps**(1/4) (second order) scaling unless
    ``step`` is given; differentiating a quantity that is itself a finite
    difference needs a wider step (see NESTED_STEP).
    """
    h = fd_step(s, order) if step is None else step
    fp = _finite(curve(s + h))
    fm = _finite(curve(s - h))
    if order == 1:
        out = (fp - fm) / (2 * h)
    else:
        f0 = _finite(curve(s))
        out = (fp - 2 * f0 + fm) / (h * h)
    return float(out) if out.ndim == 0 else out


def asymmetry(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.T)))


def check_symmetric(m: np.ndarray, tol: float = DEFAULT_TOL.abs_eq) -> np.ndarray:
    """Return ``m`` as a float array, raising ContractError unless it is symmetric."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {m.shape}")
    if asymmetry(m) > tol * (1 + np.max(np.abs(m), initial=0.0)):
        raise ContractError(f"matrix is not symmetric (asymmetry {asymmetry(m):.3e})")
    return m


def symmetrize(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return 0.5 * (m + m.T)


def sym_eigen(m: np.ndarray, tol: float = DEFAULT_TOL.abs_eq):
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""
    m = check_symmetric(m, tol)
    vals, vecs = np.linalg.eigh(symmetrize(m))
    return vals, vecs


def cluster_values(vals: Sequence[float], rel_tol: float) -> list[tuple[float, int]]:
    """Group nearly equal values; returns ``(mean, multiplicity)`` pairs in ascending order.

    Single linkage on the sorted values: a gap larger than
    ``rel_tol * (1 + spread)`` starts a new cluster.
    """
    v = np.sort(np.asarray(vals, dtype=float).ravel())
    if v.size == 0:
        raise ContractError("cluster_values needs at least one value")
    gap = rel_tol * (1.0 + (v[-1] - v[0]))
    groups = [[v[0]]]
    for x in v[1:]:
        if x - groups[-1][-1] > gap:
            groups.append([x])
        else:
            groups[-1].append(x)
    return [(float(np.mean(g)), len(g)) for g in groups]
