"""Product states, product bases and their orthogonality graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .numerics import DEFAULT_TOL, DimensionMismatch, as_vector, check_tol, kron_all


class PairNotOrthogonal(ValueError):
    def __init__(self, j: int, k: int, overlap: float):
        super().__init__(f"states {j} and {k} are not orthogonal: |<psi_j|psi_k>| = {overlap:.3e}")
        self.j = j
        self.k = k
        self.overlap = overlap


@dataclass(frozen=True, eq=False)
class ProductState:
    """One unit vector per party."""

    locals: tuple

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.shape[0] for v in self.locals)

    @property
    def vector(self) -> np.ndarray:
        return kron_all(self.locals)

    def conj(self, parties=None) -> "ProductState":
        if parties is None:
            parties = range(len(self.locals))
        parties = set(parties)
        return ProductState(tuple(v.conj() if i in parties else v for i, v in enumerate(self.locals)))


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """Ordered set of mutually orthogonal product states on ``dims``.

    Build instances with :func:`verify_pb`; the constructor itself does not
    check anything.
    """

    dims: tuple[int, ...]
    states: tuple[ProductState, ...]
    _local: tuple = field(default=(), repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def local(self, party: int) -> np.ndarray:
        """Array of shape (n_states, d_party) holding every state's local vector."""
        if self._local:
            return self._local[party]
        return np.array([s.locals[party] for s in self.states], dtype=complex).reshape(
            len(self.states), self.dims[party]
        )

    def vectors(self) -> np.ndarray:
        """Full tensor vectors as rows."""
        if not self.states:
            return np.zeros((0, self.total_dim), dtype=complex)
        return np.array([s.vector for s in self.states])

    def projector(self) -> np.ndarray:
        v = self.vectors()
        return v.T @ v.conj()

    def with_states(self, extra: Sequence[ProductState], tol: float = DEFAULT_TOL) -> "ProductBasis":
        raw = [s.locals for s in self.states] + [s.locals for s in extra]
        return verify_pb(self.dims, raw, tol)

    def subset(self, indices: Sequence[int]) -> "ProductBasis":
        return _make(self.dims, [self.states[i] for i in indices])

    def conj(self, parties=None) -> "ProductBasis":
        return _make(self.dims, [s.conj(parties) for s in self.states])


def _make(dims, states) -> ProductBasis:
    dims = tuple(int(d) for d in dims)
    states = tuple(states)
    local = tuple(
        np.array([s.locals[i] for s in states], dtype=complex).reshape(len(states), d)
        for i, d in enumerate(dims)
    )
    return ProductBasis(dims, states, local)


@dataclass(frozen=True)
class OrthGraph:
    """Orthogonality graph: vertices are states, ``edges[i]`` holds the
    pairs orthogonal on party ``i``."""

    n: int
    edges: tuple[frozenset, ...]

    @property
    def n_colors(self) -> int:
        return len(self.edges)

    def colors_of(self, j: int, k: int) -> list[int]:
        pair = (min(j, k), max(j, k))
        return [c for c, e in enumerate(self.edges) if pair in e]

    def degree(self, vertex: int, color: int) -> int:
        return sum(1 for pair in self.edges[color] if vertex in pair)

    def is_complete(self) -> bool:
        covered = set().union(*self.edges) if self.edges else set()
        return all(p in covered for p in combinations(range(self.n), 2))


def verify_pb(dims: Sequence[int], raw_states, tol: float = DEFAULT_TOL) -> ProductBasis:
    """Normalize local vectors and confirm global pairwise orthogonality.

    ``raw_states`` is a sequence of states, each a sequence of one local
    vector per party.
    """
    tol = check_tol(tol)
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionMismatch(f"invalid party dimensions {dims}")
    states = []
    for j, raw in enumerate(raw_states):
        locs = raw.locals if isinstance(raw, ProductState) else raw
        if len(locs) != len(dims):
            raise DimensionMismatch(f"state {j} has {len(locs)} parties, expected {len(dims)}")
        normed = []
        for i, v in enumerate(locs):
            v = as_vector(v, dims[i])
            n = np.linalg.norm(v)
            if n == 0:
                raise ValueError(f"state {j} has a zero local vector for party {i}")
            # leave unit vectors untouched so serialized bases reload bit for bit
            normed.append(v if abs(n - 1.0) <= 4 * np.finfo(float).eps else v / n)
        states.append(ProductState(tuple(normed)))
    if len(states) > int(np.prod(dims)):
        raise DimensionMismatch(f"{len(states)} states cannot be orthogonal in dimension {int(np.prod(dims))}")
    pb = _make(dims, states)
    n = len(states)
    if n > 1:
        # |<psi_j|psi_k>| is the product of the local overlaps
        overlap = np.ones((n, n))
        for i in range(len(dims)):
            a = pb.local(i)
            overlap = overlap * np.abs(a.conj() @ a.T)
        np.fill_diagonal(overlap, 0.0)
        j, k = np.unravel_index(int(np.argmax(overlap)), overlap.shape)
        if overlap[j, k] > tol:
            j, k = sorted((int(j), int(k)))
            raise PairNotOrthogonal(j, k, float(overlap[j, k]))
    return pb


def build_graph(pb: ProductBasis, tol: float = DEFAULT_TOL) -> OrthGraph:
    tol = check_tol(tol)
    n = len(pb)
    edges = []
    for i in range(pb.n_parties):
        a = pb.local(i)
        g = np.abs(a.conj() @ a.T)
        edges.append(frozenset((j, k) for j, k in combinations(range(n), 2) if g[j, k] <= tol))
    return OrthGraph(n, tuple(edges))


def lower_bound_size(dims: Sequence[int]) -> int:
    """Smallest possible size of an unextendible product basis on ``dims``."""
    dims = list(dims)
    if not dims or any(d < 2 for d in dims):
        raise ValueError("every party dimension must be at least 2")
    return sum(d - 1 for d in dims) + 1


def embed(pb: ProductBasis, new_dims: Sequence[int]) -> ProductBasis:
    """Zero-pad every local vector into a larger local space."""
    new_dims = tuple(int(d) for d in new_dims)
    if len(new_dims) != pb.n_parties:
        raise DimensionMismatch("embedding must keep the number of parties")
    if any(nd < d for nd, d in zip(new_dims, pb.dims)):
        raise DimensionMismatch(f"cannot shrink dims {pb.dims} to {new_dims}")
    states = []
    for s in pb.states:
        locs = []
        for v, nd in zip(s.locals, new_dims):
            w = np.zeros(nd, dtype=complex)
            w[: v.shape[0]] = v
            locs.append(w)
        states.append(ProductState(tuple(locs)))
    return _make(new_dims, states)


def group_parties(pb: ProductBasis, groups: Sequence[Sequence[int]]) -> ProductBasis:
    """View ``pb`` with parties merged into the given groups.

    Each group becomes one party whose local vector is the tensor product of
    the members' local vectors in the listed order; used for bipartite cuts.
    """
    flat = sorted(p for g in groups for p in g)
    if flat != list(range(pb.n_parties)):
        raise ValueError(f"groups {groups} do not partition {pb.n_parties} parties")
    dims = tuple(int(np.prod([pb.dims[p] for p in g])) for g in groups)
    states = [ProductState(tuple(kron_all([s.locals[p] for p in g]) for g in groups)) for s in pb.states]
    return _make(dims, states)


def from_states(dims, states: Sequence[ProductState]) -> ProductBasis:
    """Assemble a basis from already-normalized states without checking."""
    return _make(dims, states)
