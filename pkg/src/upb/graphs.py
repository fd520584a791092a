"""Combinatorics of orthogonality graphs, detached from the vectors."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product

from .basis import OrthGraph, ProductBasis, build_graph
from .numerics import DEFAULT_TOL

# the vector-free view uses the same container as the basis module
ColoredGraph = OrthGraph


def make_graph(n: int, edges) -> ColoredGraph:
    """Build a graph from per-colour lists of vertex pairs."""
    if not edges:
        raise ValueError("a coloured graph needs at least one colour")
    norm = []
    for cls in edges:
        s = set()
        for a, b in cls:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise ValueError(f"edge ({a}, {b}) is not a pair of distinct vertices below {n}")
            s.add((min(a, b), max(a, b)))
        norm.append(frozenset(s))
    return ColoredGraph(n, tuple(norm))


def _canonical(g: ColoredGraph, color_swap: bool) -> tuple:
    best = None
    color_orders = list(permutations(range(g.n_colors))) if color_swap else [tuple(range(g.n_colors))]
    for perm in permutations(range(g.n)):
        for co in color_orders:
            key = tuple(
                tuple(sorted((min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in g.edges[c])) for c in co
            )
            if best is None or key < best:
                best = key
    return best


def enumerate_five_state_graphs() -> list[ColoredGraph]:
    """Two-colourings of K5 in which every vertex meets two edges of each colour,
    one representative per class under relabelling and colour swap."""
    pairs = list(combinations(range(5), 2))
    classes: dict = {}
    for bits in product((0, 1), repeat=len(pairs)):
        g = make_graph(5, [[p for p, b in zip(pairs, bits) if b == c] for c in (0, 1)])
        if any(g.degree(v, c) != 2 for v in range(5) for c in (0, 1)):
            continue
        classes.setdefault(_canonical(g, True), g)
    return [classes[k] for k in sorted(classes)]


def _isomorphic_fixed_colors(g1: ColoredGraph, g2: ColoredGraph, colors: tuple[int, ...]) -> bool:
    # colour c of g1 maps to colour colors[c] of g2
    n = g1.n
    sig1 = [tuple(g1.degree(v, c) for c in range(g1.n_colors)) for v in range(n)]
    sig2 = [tuple(g2.degree(v, colors[c]) for c in range(g1.n_colors)) for v in range(n)]
    if sorted(sig1) != sorted(sig2):
        return False
    adj1 = [[frozenset(c for c in range(g1.n_colors) if (min(a, b), max(a, b)) in g1.edges[c]) for b in range(n)] for a in range(n)]
    inv = {colors[c]: c for c in range(g1.n_colors)}
    adj2 = [
        [frozenset(inv[c] for c in range(g2.n_colors) if (min(a, b), max(a, b)) in g2.edges[c]) for b in range(n)]
        for a in range(n)
    ]
    image = [-1] * n
    used = [False] * n

    def rec(v: int) -> bool:
        if v == n:
            return True
        for w in range(n):
            if used[w] or sig1[v] != sig2[w]:
                continue
            if any(adj1[v][u] != adj2[w][image[u]] for u in range(v)):
                continue
            image[v], used[w] = w, True
            if rec(v + 1):
                return True
            used[w] = False
        image[v] = -1
        return False

    return rec(0)


def colored_isomorphic(g1: ColoredGraph, g2: ColoredGraph, allow_color_perm: bool = False) -> bool:
    """Exact test by backtracking over vertex maps, pruned by per-colour degrees."""
    if g1.n != g2.n or g1.n_colors != g2.n_colors:
        return False
    if g1.n > 12:
        raise ValueError("brute-force isomorphism is limited to 12 vertices")
    if [len(e) for e in g1.edges] != [len(e) for e in g2.edges] and not allow_color_perm:
        return False
    orders = permutations(range(g1.n_colors)) if allow_color_perm else [tuple(range(g1.n_colors))]
    return any(_isomorphic_fixed_colors(g1, g2, co) for co in orders)


@dataclass(frozen=True)
class Infeasible:
    n_parties: int
    edges_needed: int
    max_cover: int

    def __str__(self) -> str:
        return (
            f"{self.n_parties} matchings of at most {self.n_parties // 2} edges cover at most "
            f"{self.max_cover} < {self.edges_needed} pairs"
        )


def minimal_qubit_feasibility(n_parties: int) -> ColoredGraph | Infeasible:
    """Graph of a would-be minimal UPB on ``n_parties`` qubits.

    Such a basis has n+1 states and its graph must cover every pair with
    colour classes that are matchings (a qubit state has a single orthogonal
    direction, so a vertex meets at most one edge per colour).  For odd n a
    round-robin 1-factorization of K_{n+1} is returned; for even n counting
    rules it out.
    """
    n = int(n_parties)
    if n < 2:
        raise ValueError("need at least two parties")
    v = n + 1
    needed = v * (v - 1) // 2
    if v % 2:
        return Infeasible(n, needed, n * (v // 2))
    # fix vertex v-1, rotate the rest
    classes = []
    for r in range(v - 1):
        cls = [(r, v - 1)]
        for k in range(1, v // 2):
            cls.append(((r + k) % (v - 1), (r - k) % (v - 1)))
        classes.append(cls)
    return make_graph(v, classes)


def genshifts_graph_check(pb: ProductBasis, tol: float = DEFAULT_TOL) -> bool:
    """Every colour class is a perfect matching and no pair is doubly coloured."""
    if any(d != 2 for d in pb.dims) or len(pb) != pb.n_parties + 1 or len(pb) % 2:
        raise ValueError(f"expected 2k states on 2k-1 qubits, got {len(pb)} states on dims {pb.dims}")
    g = build_graph(pb, tol)
    n = g.n
    for c in range(g.n_colors):
        if any(g.degree(v, c) != 1 for v in range(n)):
            return False
    seen = set()
    for e in g.edges:
        if seen & e:
            return False
        seen |= e
    return g.is_complete()
