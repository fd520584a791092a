"""Dense complex linear algebra shared by every other module.

Vectors are 1-d complex numpy arrays, matrices are 2-d complex arrays.
Tensor products use the convention that the leftmost party is the most
significant index.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionMismatch(ValueError):
    pass


class NotHermitian(ValueError):
    pass


def check_tol(tol: float) -> float:
    tol = float(tol)
    if not 0.0 < tol < 1e-3:
        raise ValueError(f"tolerance must lie in (0, 1e-3), got {tol!r}")
    return tol


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a finite 1-d complex array, optionally checking its length."""
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[0]}")
    return arr


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def normalize(v) -> np.ndarray:
    v = as_vector(v)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def inner(a, b) -> complex:
    """Hermitian inner product, conjugate-linear in ``a``."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions differ: {a.shape[0]} != {b.shape[0]}")
    return complex(np.vdot(a, b))


def _gram_schmidt_step(basis, v: np.ndarray) -> np.ndarray:
    # two projection passes keep the residual orthogonal to working precision
    # even when v is nearly inside the span
    if len(basis) == 0:
        return v.copy()
    q = np.asarray(basis)
    r = v - q.T @ (q.conj() @ v)
    return r - q.T @ (q.conj() @ r)


def orthonormal_basis(vectors: Sequence, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis of span(vectors) by pivoted Gram-Schmidt.

    At each step the remaining vector with the largest residual is taken as
    the pivot. A pivot is accepted only when its residual norm exceeds
    ``tol`` times the largest input norm.
    """
    if len(vectors) == 0:
        return []
    try:
        res = np.array(vectors, dtype=complex)
    except ValueError:
        raise DimensionMismatch("vectors have different dimensions") from None
    if res.ndim != 2:
        raise DimensionMismatch("vectors have different dimensions")
    if not np.all(np.isfinite(res)):
        raise ValueError("vectors have non-finite entries")
    norms = np.sqrt(np.sum(np.abs(res) ** 2, axis=1))
    scale = norms.max()
    if scale == 0:
        return []
    threshold = tol * scale
    dim = res.shape[1]
    basis: list[np.ndarray] = []
    while len(basis) < dim:
        k = int(np.argmax(norms))
        if norms[k] <= threshold:
            break
        pivot = _gram_schmidt_step(basis, res[k])
        pn = np.linalg.norm(pivot)
        if pn <= threshold:
            norms[k] = 0.0
            continue
        q = pivot / pn
        basis.append(q)
        res = res - np.outer(res @ q.conj(), q)
        norms = np.sqrt(np.sum(np.abs(res) ** 2, axis=1))
        norms[k] = 0.0
    return basis


def rank(vectors: Sequence, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank of a set of vectors; the empty set has rank 0."""
    return len(orthonormal_basis(vectors, tol))


def complement(vectors: Sequence, d: int, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the orthogonal complement of span(vectors) in C^d.

    The basis is canonical: standard basis vectors e_0, e_1, ... are
    orthogonalized in index order against the span and the vectors already
    accepted, so the same input always yields the same output.
    """
    if len(vectors) and np.shape(vectors)[-1] != d:
        raise DimensionMismatch(f"expected dimension {d}")
    span = orthonormal_basis(vectors, tol)
    need = d - len(span)
    if need == 0:
        return []
    accepted: list[np.ndarray] = []
    eye = np.eye(d, dtype=complex)
    # canonical pass; the cut-off sits well above rounding noise but far below
    # the residual of any genuinely new direction
    cutoff = max(np.sqrt(tol), 1e-6)
    for k in range(d):
        r = _gram_schmidt_step(span + accepted, eye[k])
        n = np.linalg.norm(r)
        if n > cutoff:
            accepted.append(r / n)
            if len(accepted) == need:
                return accepted
    # ill-conditioned corner: fill the rest by largest residual
    while len(accepted) < need:
        rs = [_gram_schmidt_step(span + accepted, eye[k]) for k in range(d)]
        ns = [np.linalg.norm(r) for r in rs]
        k = int(np.argmax(ns))
        accepted.append(rs[k] / ns[k])
    return accepted


def kron_all(locals_: Sequence) -> np.ndarray:
    if len(locals_) == 0:
        raise ValueError("kron_all needs at least one factor")
    return reduce(np.kron, [as_vector(v) for v in locals_])


def projector(v) -> np.ndarray:
    v = as_vector(v)
    return np.outer(v, v.conj())


def partial_transpose(rho, dims: Sequence[int], party) -> np.ndarray:
    """Transpose the indices of one party (or of each party in a collection)."""
    rho = as_matrix(rho)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionMismatch(f"matrix of shape {rho.shape} does not act on dims {dims}")
    parties = [party] if np.isscalar(party) else list(party)
    m = len(dims)
    for p in parties:
        if not 0 <= p < m:
            raise IndexError(f"party index {p} out of range for {m} parties")
    t = rho.reshape(dims + dims)
    axes = list(range(2 * m))
    for p in parties:
        axes[p], axes[m + p] = axes[m + p], axes[p]
    return t.transpose(axes).reshape(total, total)


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def min_eig_hermitian(rho, tol: float = DEFAULT_TOL) -> float:
    rho = as_matrix(rho)
    if not is_hermitian(rho, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    herm = 0.5 * (rho + rho.conj().T)
    return float(np.linalg.eigvalsh(herm)[0])
