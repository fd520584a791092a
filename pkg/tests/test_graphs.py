from itertools import combinations, product

import numpy as np
import pytest

from upb import constructions as C
from upb.basis import build_graph
from upb.extend import NoCycle, check_square_rule, complete_search
from upb.graphs import (
    Infeasible,
    colored_isomorphic,
    enumerate_five_state_graphs,
    genshifts_graph_check,
    make_graph,
    minimal_qubit_feasibility,
)


def pentagon():
    return make_graph(5, [[(i, (i + 1) % 5) for i in range(5)], [(i, (i + 2) % 5) for i in range(5)]])


def test_five_state_classes():
    classes = enumerate_five_state_graphs()
    assert len(classes) == 1
    g = classes[0]
    assert colored_isomorphic(g, pentagon())
    assert colored_isomorphic(g, build_graph(C.pyramid()), allow_color_perm=True)
    assert enumerate_five_state_graphs()[0] == g


def test_five_state_graph_matches_family_samples():
    rng = np.random.default_rng(11)
    target = enumerate_five_state_graphs()[0]
    for _ in range(10):
        ang = rng.uniform(0.1, 1.4, size=6)
        pb = C.family33(C.Family33Params(*ang))
        assert colored_isomorphic(build_graph(pb), target, allow_color_perm=True)


def test_three_same_color_excluded():
    pairs = list(combinations(range(5), 2))
    survivors = 0
    for bits in product((0, 1), repeat=10):
        g = make_graph(5, [[p for p, b in zip(pairs, bits) if b == c] for c in (0, 1)])
        if any(g.degree(v, c) >= 3 for v in range(5) for c in (0, 1)):
            continue
        survivors += 1
    # 2^10 colourings, only the balanced ones survive: 12 labelled pentagon/pentagram splits
    assert survivors == 12


def test_isomorphism_examples():
    assert colored_isomorphic(build_graph(C.sept()), build_graph(C.sept_counterexample()))
    pent = pentagon()
    swapped = make_graph(5, [sorted(pent.edges[1]), sorted(pent.edges[0])])
    assert colored_isomorphic(pent, swapped, allow_color_perm=True)
    k4 = list(combinations(range(4), 2))
    one = make_graph(4, [k4])
    two = make_graph(4, [k4[:3], k4[3:]])
    assert not colored_isomorphic(one, two)
    assert not colored_isomorphic(make_graph(4, [k4, []]), two)


def test_isomorphism_under_relabelling():
    rng = np.random.default_rng(5)
    g = build_graph(C.gentiles1(4))
    perm = rng.permutation(g.n)
    h = make_graph(g.n, [[(int(perm[a]), int(perm[b])) for a, b in e] for e in g.edges])
    assert colored_isomorphic(g, h)
    assert colored_isomorphic(g, make_graph(g.n, [sorted(h.edges[1]), sorted(h.edges[0])]), allow_color_perm=True)


def test_isomorphism_limit():
    big = make_graph(13, [[(0, 1)]])
    with pytest.raises(ValueError):
        colored_isomorphic(big, big)


def test_minimal_qubit_feasibility():
    g = minimal_qubit_feasibility(3)
    assert not isinstance(g, Infeasible)
    assert colored_isomorphic(g, build_graph(C.genshifts(2)), allow_color_perm=True)
    r = minimal_qubit_feasibility(4)
    assert isinstance(r, Infeasible) and (r.max_cover, r.edges_needed) == (8, 10)
    r = minimal_qubit_feasibility(2)
    assert isinstance(r, Infeasible) and r.edges_needed == 3
    for n in (5, 7, 9):
        g = minimal_qubit_feasibility(n)
        assert g.is_complete()
        assert all(g.degree(v, c) == 1 for v in range(n + 1) for c in range(n))


def test_genshifts_graph_check():
    assert genshifts_graph_check(C.genshifts(2))
    assert genshifts_graph_check(C.genshifts(3))
    with pytest.raises(ValueError):
        genshifts_graph_check(C.pyramid())


def test_square_rule_on_six_state_subsets():
    # six-state subsets of full bases built from known families never break the rule
    checked = 0
    for seed in ([0, 1, 2, 3], [0, 2, 4], [1, 3]):
        full = complete_search(C.tiles().subset(seed))
        for six in combinations(range(9), 6):
            sub = full.subset(list(six))
            for quad in combinations(range(6), 4):
                try:
                    check_square_rule([sub.states[q] for q in quad])
                    checked += 1
                except NoCycle:
                    pass
    assert checked > 0
