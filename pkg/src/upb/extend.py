"""Extendibility decisions for product bases.

A product basis is extendible iff its states can be split among the
parties so that, for every party, the local vectors of the states handed to
it span a proper subspace.  The search below walks those splits depth
first, keeping one orthonormal accumulator per party, and cuts a branch the
moment some party's subset reaches full local rank (ranks only grow as
states are added, so nothing below that node can succeed).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .basis import ProductBasis, ProductState, build_graph, from_states, verify_pb
from .numerics import DEFAULT_TOL, check_tol, complement, kron_all, orthonormal_basis, rank


class BudgetExhausted(RuntimeError):
    """The search hit its node budget before reaching a verdict."""

    def __init__(self, nodes: int):
        super().__init__(f"search budget exhausted after {nodes} nodes")
        self.nodes = nodes


class Incomplete(RuntimeError):
    """No full product basis was found extending the input."""

    def __init__(self, reason: str, nodes: int = 0):
        super().__init__(reason)
        self.reason = reason
        self.nodes = nodes


class NoCycle(ValueError):
    pass


class NeitherParallel(AssertionError):
    pass


@dataclass(frozen=True)
class ExtensionWitness:
    """A split of the basis certifying extendibility.

    ``partition[j]`` is the (0-based) party that state ``j`` is assigned to.
    """

    partition: tuple[int, ...]
    local_ranks: tuple[int, ...]
    new_state: ProductState
    nodes: int = 0

    extendible = True


@dataclass(frozen=True)
class NoWitness:
    """Exhaustive search finished without a witness: the basis is unextendible."""

    nodes: int
    assignments: int

    extendible = False


@dataclass(frozen=True, eq=False)
class ProductFamily:
    """Product states orthogonal to the basis obtained from one split.

    Every tensor product of vectors taken from ``complement_bases`` (one per
    party) is orthogonal to every member of the basis.
    """

    partition: tuple[int, ...]
    complement_bases: tuple[tuple[np.ndarray, ...], ...]

    @property
    def local_dims(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.complement_bases)

    @property
    def family_dim(self) -> int:
        return math.prod(self.local_dims)

    @property
    def is_isolated(self) -> bool:
        return self.family_dim == 1

    def product_vectors(self) -> list[np.ndarray]:
        return [kron_all(combo) for combo in product(*self.complement_bases)]


class _PartitionSearch:
    # plain arrays and a recursive closure; the hot loop avoids attribute lookups

    def __init__(self, pb: ProductBasis, tol: float):
        self.dims = pb.dims
        self.m = pb.n_parties
        self.n = len(pb)
        self.local = [pb.local(i) for i in range(self.m)]
        self.tol = tol

    def run(self, prefix: Sequence[int] = (), budget: int = 0, collect: bool = False):
        """Search below ``prefix``; returns (nodes, leaves, exhausted).

        Without ``collect`` the search stops at the first leaf.
        """
        m, n, dims, local = self.m, self.n, self.dims, self.local
        thr = self.tol
        acc = [np.zeros((d, d), dtype=complex) for d in dims]
        ranks = [0] * m
        assign = [0] * n
        leaves: list[tuple[int, ...]] = []
        nodes = 0

        def place(i: int, j: int) -> int:
            # returns -1 if the party becomes full rank, else the rank increment
            x = local[i][j]
            r = ranks[i]
            if r:
                q = acc[i][:r]
                res = x - q.T @ (q.conj() @ x)
                nr = np.linalg.norm(res)
                if 0.0 < nr < 0.5:
                    res = res - q.T @ (q.conj() @ res)
                    nr = np.linalg.norm(res)
            else:
                res, nr = x, np.linalg.norm(x)
            if nr <= thr:
                return 0
            if r + 1 >= dims[i]:
                return -1
            acc[i][r] = res / nr
            ranks[i] = r + 1
            return 1

        for j, i in enumerate(prefix):
            inc = place(i, j)
            if inc < 0:
                return 0, [], False
            assign[j] = i

        class _Stop(Exception):
            pass

        def dfs(j: int) -> None:
            nonlocal nodes
            nodes += 1
            if budget and nodes > budget:
                raise _Stop
            if j == n:
                leaves.append(tuple(assign))
                if not collect:
                    raise _Stop
                return
            for i in range(m):
                inc = place(i, j)
                if inc < 0:
                    continue
                assign[j] = i
                dfs(j + 1)
                ranks[i] -= inc

        exhausted = False
        try:
            dfs(len(prefix))
        except _Stop:
            exhausted = not leaves or (collect and budget and nodes > budget)
        return nodes, leaves, bool(exhausted)


def _run_branch(args):
    pb, tol, prefix, budget = args
    nodes, leaves, exhausted = _PartitionSearch(pb, tol).run(prefix, budget)
    return nodes, (leaves[0] if leaves else None), exhausted


def _prefixes(search: _PartitionSearch, depth: int):
    """Surviving prefixes of length ``depth`` in DFS order, with the number of
    prefix-tree nodes a serial search visits before entering each one."""
    out = []
    visited = 0

    def rec(prefix):
        nonlocal visited
        if len(prefix) == depth:
            out.append((tuple(prefix), visited))
            return
        visited += 1
        for i in range(search.m):
            p = prefix + [i]
            # replay to test pruning
            nodes, _, _ = _PartitionSearch.run(search, p, budget=1)
            if nodes == 0:
                continue
            rec(p)

    rec([])
    return out


def _witness_from_partition(pb: ProductBasis, assign: Sequence[int], tol: float, nodes: int) -> ExtensionWitness:
    ranks, locs = [], []
    for i, d in enumerate(pb.dims):
        members = [pb.local(i)[j] for j in range(len(pb)) if assign[j] == i]
        ranks.append(rank(members, tol))
        locs.append(complement(members, d, tol)[0])
    return ExtensionWitness(tuple(assign), tuple(ranks), ProductState(tuple(locs)), nodes)


def search_space_size(pb: ProductBasis) -> int:
    return pb.n_parties ** len(pb)


def is_extendible(
    pb: ProductBasis, tol: float = DEFAULT_TOL, budget: int = 0, threads: int = 1
) -> ExtensionWitness | NoWitness:
    """Decide extendibility by pruned depth-first search over splits.

    States are assigned in input order and parties are tried in ascending
    index, so the returned witness is deterministic.  ``budget`` caps the
    number of visited nodes (0 = unbounded); hitting it raises
    :class:`BudgetExhausted`, which is never a verdict.  With ``threads > 1``
    the top-level branches run in worker processes and are merged in branch
    order, giving the same verdict, witness and node count as a serial run.
    """
    tol = check_tol(tol)
    search = _PartitionSearch(pb, tol)
    if threads > 1 and len(pb) > 4:
        depth = min(len(pb) - 1, max(1, math.ceil(math.log(4 * threads, max(pb.n_parties, 2)))))
        branches = _prefixes(search, depth)
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_run_branch, [(pb, tol, p, budget) for p, _ in branches]))
        done = 0
        for (prefix, before), (nodes, leaf, exhausted) in zip(branches, results):
            total = before + done + nodes
            if exhausted or (budget and total > budget):
                raise BudgetExhausted(budget)
            if leaf is not None:
                return _witness_from_partition(pb, leaf, tol, total)
            done += nodes
        return NoWitness(nodes=_count_prefix_nodes(search, depth) + done, assignments=search_space_size(pb))
    nodes, leaves, exhausted = search.run(budget=budget)
    if exhausted:
        raise BudgetExhausted(nodes - 1)
    if leaves:
        return _witness_from_partition(pb, leaves[0], tol, nodes)
    return NoWitness(nodes=nodes, assignments=search_space_size(pb))


def _count_prefix_nodes(search: _PartitionSearch, depth: int) -> int:
    count = 0

    def rec(prefix):
        nonlocal count
        if len(prefix) == depth:
            return
        count += 1
        for i in range(search.m):
            p = prefix + [i]
            if _PartitionSearch.run(search, p, budget=1)[0] == 0:
                continue
            rec(p)

    rec([])
    return count


def is_extendible_exhaustive(pb: ProductBasis, tol: float = DEFAULT_TOL) -> bool:
    """Unpruned enumeration of all m**n splits, ranks by SVD.

    Shares no code with the pruned search; used as its oracle.
    """
    n, m = len(pb), pb.n_parties
    local = [pb.local(i) for i in range(m)]
    for assign in product(range(m), repeat=n):
        ok = True
        for i, d in enumerate(pb.dims):
            rows = local[i][[j for j in range(n) if assign[j] == i]]
            if rows.shape[0] == 0:
                continue
            s = np.linalg.svd(rows, compute_uv=False)
            if int(np.sum(s > tol * s[0])) >= d:
                ok = False
                break
        if ok:
            return True
    return False


def _family(pb: ProductBasis, assign: Sequence[int], tol: float, cache: dict | None = None) -> ProductFamily | None:
    comps = []
    for i, d in enumerate(pb.dims):
        rows = pb.local(i)[[j for j in range(len(pb)) if assign[j] == i]]
        if cache is None:
            c = complement(rows, d, tol)
        else:
            key = (d, rows.tobytes())
            c = cache.get(key)
            if c is None:
                c = cache[key] = complement(rows, d, tol)
        if not c:
            return None
        comps.append(tuple(c))
    return ProductFamily(tuple(assign), tuple(comps))


def _projector_key(vectors) -> bytes:
    p = sum(np.outer(v, v.conj()) for v in vectors)
    return np.round(p, 7).tobytes()


def product_families(
    pb: ProductBasis, tol: float = DEFAULT_TOL, budget: int = 0, cache: dict | None = None
) -> list[ProductFamily]:
    """All splits whose every local complement is nonempty, one family each.

    Splits that produce identical complement subspaces are reported once.
    ``cache`` may carry local complements between calls on related bases.
    """
    tol = check_tol(tol)
    nodes, leaves, exhausted = _PartitionSearch(pb, tol).run(budget=budget, collect=True)
    if exhausted:
        raise BudgetExhausted(nodes)
    seen = set()
    out = []
    for assign in leaves:
        fam = _family(pb, assign, tol, cache)
        if fam is None:
            continue
        key = b"".join(_projector_key(c) for c in fam.complement_bases)
        if key in seen:
            continue
        seen.add(key)
        out.append(fam)
    return out


def span_of_families(families: Sequence[ProductFamily], tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    vecs = [v for f in families for v in f.product_vectors()]
    return orthonormal_basis(vecs, tol)


def product_span_dim(pb: ProductBasis, tol: float = DEFAULT_TOL, budget: int = 0) -> int:
    """Dimension of the span of all product states orthogonal to ``pb``."""
    return len(span_of_families(product_families(pb, tol, budget), tol))


def augment_until_stuck(pb: ProductBasis, tol: float = DEFAULT_TOL, budget: int = 0) -> ProductBasis:
    """Keep appending extension witnesses until none exists."""
    while True:
        res = is_extendible(pb, tol, budget)
        if not res.extendible:
            return pb
        pb = pb.with_states([res.new_state], tol)


# ---------------------------------------------------------------------------
# completion search


def _phase_key(v: np.ndarray) -> tuple:
    k = int(np.argmax(np.abs(v) > 1e-6))
    w = v * (abs(v[k]) / v[k])
    return tuple(np.round(w, 6).tolist())


def _state_key(s: ProductState) -> tuple:
    return tuple(_phase_key(v) for v in s.locals)


def _in_span_perp(basis: Sequence[np.ndarray], y: np.ndarray, tol: float) -> np.ndarray | None:
    """Unit vector of the 2-d space ``basis`` orthogonal to ``y``, if unique."""
    a, b = basis
    ca, cb = np.vdot(y, a), np.vdot(y, b)
    if abs(ca) <= 1e-7 and abs(cb) <= 1e-7:
        return None
    w = cb * a - ca * b
    n = np.linalg.norm(w)
    return w / n if n > tol else None


def _completion_candidates(
    families: list[ProductFamily], tol: float, only: Sequence[ProductFamily] | None = None
) -> list[ProductState]:
    """Candidate product states drawn from ``only`` (default: every family)."""
    fams = sorted(families, key=lambda f: (f.family_dim, f.partition))
    targets = fams if only is None else sorted(only, key=lambda f: (f.family_dim, f.partition))
    cands: list[ProductState] = []
    keys = set()

    def add(locs):
        st = ProductState(tuple(locs))
        k = _state_key(st)
        if k not in keys:
            keys.add(k)
            cands.append(st)

    canonical = [(f, combo) for f in fams for combo in product(*f.complement_bases)]
    # canonical products first, most constrained families first
    for f in targets:
        for combo in product(*f.complement_bases):
            add(combo)

    # inside 2-d local complements: vectors orthogonal to other families'
    # canonical locals, and balanced vectors paired with another 2-d
    # complement that shares one direction with it
    for f in targets:
        for i, comp in enumerate(f.complement_bases):
            if len(comp) != 2:
                continue
            rest = [c for k, c in enumerate(f.complement_bases) if k != i]
            extra = []
            for g, combo in canonical:
                if g is f:
                    continue
                w = _in_span_perp(comp, combo[i], tol)
                if w is not None:
                    extra.append(w)
            for g in fams:
                other = g.complement_bases[i]
                if g is f or len(other) != 2:
                    continue
                extra.extend(_balanced(comp, other, tol))
            for w in extra:
                for combo in product(*rest):
                    locs = list(combo)
                    locs.insert(i, w)
                    add(locs)
    return cands


def _balanced(c1: Sequence[np.ndarray], c2: Sequence[np.ndarray], tol: float) -> list[np.ndarray]:
    # c1 and c2 are 2-d; if they meet in a line e, write c1 = span(u, e) and
    # c2 = span(u', e) and return u + s e with |s|^2 = |<u|u'>|, which is
    # orthogonal to a partner u' + s' e of the same weight
    p1 = np.outer(c1[0], c1[0].conj()) + np.outer(c1[1], c1[1].conj())
    p2 = np.outer(c2[0], c2[0].conj()) + np.outer(c2[1], c2[1].conj())
    evals, evecs = np.linalg.eigh(p1 @ p2 @ p1)
    if evals[-1] < 1 - 1e-8 or evals[-2] > 1 - 1e-6:
        return []
    e = evecs[:, -1]
    u = p1 @ (c1[0] - np.vdot(e, c1[0]) * e)
    if np.linalg.norm(u) < 1e-7:
        u = p1 @ (c1[1] - np.vdot(e, c1[1]) * e)
    u = u / np.linalg.norm(u)
    u2 = p2 @ u
    u2 = u2 - np.vdot(e, u2) * e
    if np.linalg.norm(u2) < 1e-7:
        return []
    u2 = u2 / np.linalg.norm(u2)
    g = np.vdot(u, u2)
    if abs(g) <= tol:
        return []
    s = math.sqrt(abs(g))
    out = []
    for t in (s, -s, 1j * s, -1j * s):
        w = u + t * e
        out.append(w / np.linalg.norm(w))
    return out


def _by_compatibility(cands: list[ProductState], tol: float) -> list[ProductState]:
    # states of a completion are orthogonal to one another, so candidates
    # orthogonal to many other candidates are tried first (stable on ties)
    if len(cands) < 2:
        return cands
    v = np.array([s.vector for s in cands])
    ortho = (np.abs(v.conj() @ v.T) <= 1e-7).sum(axis=1)
    order = sorted(range(len(cands)), key=lambda k: -ortho[k])
    return [cands[k] for k in order]


def complete_search(pb: ProductBasis, tol: float = DEFAULT_TOL, depth_budget: int = 20000) -> ProductBasis:
    """Backtracking search for a full orthogonal product basis containing ``pb``.

    At every node the product families of the current set are recomputed,
    which forces later choices to stay orthogonal to earlier ones.  A branch
    is cut when the orthogonal product states no longer span the remaining
    space.  When some family is indispensable (the others alone cannot span
    the remaining space) only that family is branched on.  Candidate
    generation inside a family is heuristic, so :class:`Incomplete` may be
    raised for completable inputs, but a returned basis is always verified
    from scratch.
    """
    tol = check_tol(tol)
    target = pb.total_dim
    failed: set = set()
    cache: dict = {}
    nodes = 0

    def rec(cur: ProductBasis) -> ProductBasis | None:
        nonlocal nodes
        if len(cur) == target:
            return cur
        key = frozenset(_state_key(s) for s in cur.states[len(pb):])
        if key in failed:
            return None
        nodes += 1
        if depth_budget and nodes > depth_budget:
            raise Incomplete(f"budget of {depth_budget} nodes exhausted", nodes)
        need = target - len(cur)
        fams = product_families(cur, tol, cache=cache)
        vecs = [f.product_vectors() for f in fams]
        if rank([v for vs in vecs for v in vs], tol) < need:
            failed.add(key)
            return None
        forced = [
            f for k, f in enumerate(fams) if rank([v for j, vs in enumerate(vecs) if j != k for v in vs], tol) < need
        ]
        only = [min(forced, key=lambda f: (f.family_dim, f.partition))] if forced else None
        for cand in _by_compatibility(_completion_candidates(fams, tol, only), tol):
            res = rec(from_states(cur.dims, cur.states + (cand,)))
            if res is not None:
                return res
        failed.add(key)
        return None

    found = rec(pb)
    if found is None:
        raise Incomplete("search space exhausted without a completion", nodes)
    full = verify_pb(found.dims, [s.locals for s in found.states], tol)
    if len(full) != target:
        raise Incomplete("completion failed verification", nodes)
    return full


# ---------------------------------------------------------------------------
# square rule for orthogonality graphs on a qutrit


def check_square_rule(states: Sequence[ProductState], tol: float = DEFAULT_TOL, party: int | None = None):
    """Check the repeated-state rule for a one-colour 4-cycle on a qutrit.

    Returns ``(party, cycle, pair)`` where ``cycle`` lists the four state
    indices in cycle order and ``pair`` is the pair of opposite vertices whose
    local vectors on ``party`` are parallel.
    """
    tol = check_tol(tol)
    if len(states) != 4:
        raise ValueError("the square rule concerns exactly four states")
    dims = states[0].dims
    pb = verify_pb(dims, [s.locals for s in states], tol)
    g = build_graph(pb, tol)
    parties = [party] if party is not None else [i for i, d in enumerate(dims) if d == 3]
    for i in parties:
        if dims[i] != 3:
            continue
        e = g.edges[i]
        for a, b, c, d in ((0, 1, 2, 3), (0, 1, 3, 2), (0, 2, 1, 3)):
            cyc = (a, b, c, d)
            ring = [(cyc[k], cyc[(k + 1) % 4]) for k in range(4)]
            if all((min(x, y), max(x, y)) in e for x, y in ring):
                loc = pb.local(i)
                for p, q in ((cyc[0], cyc[2]), (cyc[1], cyc[3])):
                    if abs(np.vdot(loc[p], loc[q])) >= 1 - tol:
                        return i, cyc, (p, q)
                raise NeitherParallel(f"cycle {cyc} on party {i} has no parallel opposite pair")
    raise NoCycle("no monochromatic 4-cycle on a 3-dimensional party")
