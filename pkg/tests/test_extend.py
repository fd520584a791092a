from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_pb
from upb import constructions as C
from upb.basis import ProductState, embed, from_states, verify_pb
from upb.numerics import complement
from upb.extend import (
    BudgetExhausted,
    Incomplete,
    NeitherParallel,
    NoCycle,
    augment_until_stuck,
    check_square_rule,
    complete_search,
    is_extendible,
    is_extendible_exhaustive,
    product_families,
    product_span_dim,
)


def brute_span_dim(pb, tol=1e-9):
    """Span of product states orthogonal to pb, from every split, via SVD null spaces."""
    n, m = len(pb), pb.n_parties
    vecs = []
    for assign in product(range(m), repeat=n):
        comps = []
        for i, d in enumerate(pb.dims):
            rows = pb.local(i)[[j for j in range(n) if assign[j] == i]]
            if rows.shape[0] == 0:
                comps.append(np.eye(d, dtype=complex))
                continue
            _, s, vh = np.linalg.svd(rows)
            r = int(np.sum(s > tol * s[0]))
            comps.append(vh[r:].conj())
        if any(c.shape[0] == 0 for c in comps):
            continue
        for combo in product(*comps):
            v = combo[0]
            for w in combo[1:]:
                v = np.kron(v, w)
            vecs.append(v)
    if not vecs:
        return 0
    s = np.linalg.svd(np.array(vecs), compute_uv=False)
    return int(np.sum(s > tol * s[0]))


def assert_witness_sound(pb, res, tol=1e-9):
    assert all(r < d for r, d in zip(res.local_ranks, pb.dims))
    for s in pb.states:
        ov = np.prod([abs(np.vdot(a, b)) for a, b in zip(s.locals, res.new_state.locals)])
        assert ov <= tol


def test_pyramid_and_tiles_unextendible():
    for pb in (C.pyramid(), C.tiles()):
        res = is_extendible(pb)
        assert not res.extendible
        assert res.assignments == 32 and res.nodes <= 2**6


def test_pyr34_witness():
    pb = C.pyr34()
    res = is_extendible(pb)
    assert res.extendible
    assert_witness_sound(pb, res)


def test_single_state_is_extendible():
    pb = verify_pb((2, 2), [([1, 0], [1, 0])])
    res = is_extendible(pb)
    assert res.extendible and res.partition == (0,)
    assert_witness_sound(pb, res)


def test_budget_is_never_a_verdict():
    with pytest.raises(BudgetExhausted):
        is_extendible(C.gentiles1(6), budget=10)


def test_witness_is_deterministic():
    pb = C.sept_counterexample()
    a, b = is_extendible(pb), is_extendible(pb)
    assert a.partition == b.partition
    assert np.array_equal(a.new_state.vector, b.new_state.vector)


def test_parallel_matches_serial():
    for pb in (C.sept(), C.sept_counterexample(), C.gentiles1(4), C.pyr34()):
        s, p = is_extendible(pb), is_extendible(pb, threads=2)
        assert s.extendible == p.extendible and s.nodes == p.nodes
        if s.extendible:
            assert s.partition == p.partition


def test_parallel_budget():
    with pytest.raises(BudgetExhausted):
        is_extendible(C.gentiles1(6), budget=50, threads=2)


def test_product_families_examples():
    assert product_families(C.pyramid()) == []
    empty = from_states((2, 2), [])
    fams = product_families(empty)
    assert len(fams) == 1 and fams[0].family_dim == 4
    fams = product_families(C.pyr34_plus())
    assert len(fams) == 4 and all(f.is_isolated for f in fams)
    assert product_span_dim(C.pyr34_plus()) == 4


def test_pyr34_plus_families_match_listed_states():
    pb = C.pyr34_plus()
    v, w = C.pyramid_vectors(), C.pyr34_bob_vectors()
    listed = [
        np.kron(v[3], complement([w[2], w[3], w[4]], 4)[0]),
        np.kron(v[2], complement([w[1], w[2], w[3]], 4)[0]),
        np.kron(complement([v[0], v[3]], 3)[0], complement([w[1], w[2], w[4]], 4)[0]),
        np.kron(complement([v[0], v[2]], 3)[0], complement([w[1], w[3], w[4]], 4)[0]),
    ]
    found = [f.product_vectors()[0] for f in product_families(pb)]
    for x in listed:
        assert max(abs(np.vdot(x, y)) for y in found) > 1 - 1e-9


def test_family_vectors_are_orthogonal_to_basis():
    for pb in (C.pyr34(), C.pyr34_plus(), C.sept_counterexample()):
        vs = pb.vectors()
        for f in product_families(pb):
            for x in f.product_vectors():
                assert np.max(np.abs(vs.conj() @ x)) < 1e-9


def test_pyr34_span_against_brute_force():
    # seven independent product states are orthogonal to Pyr34
    assert product_span_dim(C.pyr34()) == brute_span_dim(C.pyr34()) == 7
    assert product_span_dim(C.pyr34_plus()) == brute_span_dim(C.pyr34_plus()) == 4


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_span_dim_matches_brute_force(seed):
    pb = random_pb(np.random.default_rng(seed), max_states=6)
    span = product_span_dim(pb)
    assert span == brute_span_dim(pb)
    assert span <= pb.total_dim - len(pb)
    assert (span == 0) == (not is_extendible(pb).extendible)


def test_augment():
    a = augment_until_stuck(C.pyr34())
    assert len(a) == 8 and a.dims == (3, 4)
    assert not is_extendible(a).extendible
    assert len(augment_until_stuck(C.pyramid())) == 5
    b = augment_until_stuck(C.pyr34_plus())
    assert len(b) <= 8
    for s, t in zip(a.states, C.pyr34().states):
        assert np.array_equal(s.vector, t.vector)


def test_complete_tiles_subset():
    pb = C.tiles().subset([0, 1, 2, 3])
    full = complete_search(pb)
    assert len(full) == 9


def test_complete_shifts_across_cuts():
    from upb.basis import group_parties

    s = C.shifts()
    for groups in ([[0], [1, 2]], [[1], [0, 2]], [[2], [0, 1]]):
        full = complete_search(group_parties(s, groups))
        assert len(full) == 8 and full.dims == (2, 4)


def test_complete_pyr34_in_3x5():
    pb = embed(C.pyr34(), (3, 5))
    assert product_span_dim(pb) == 15 - 5
    full = complete_search(pb)
    assert len(full) == 15
    # the listed completion is a fixture: it is a full basis containing pyr34
    fixture = C.pyr34_completion_35()
    assert len(fixture) == 15
    assert np.allclose(fixture.vectors()[:5], pb.vectors())


def test_pyr34_is_uncompletable_in_place():
    with pytest.raises(Incomplete):
        complete_search(C.pyr34())
    with pytest.raises(Incomplete):
        complete_search(C.pyr34_plus())


def test_complete_leaves_input_first():
    pb = C.pyramid().subset([0, 1, 2, 3])
    full = complete_search(pb)
    assert np.allclose(full.vectors()[:4], pb.vectors())


# -- square rule ---------------------------------------------------------------


def test_square_rule_constructed():
    k0, k1 = np.eye(3)[0], np.eye(3)[1]
    # Bob cycle |1>,|0>,|1>,|0>: opposite states equal
    bob = [k1, k0, k1, k0]
    alice = [np.eye(3)[0], np.array([1, 1, 0]) / np.sqrt(2), np.eye(3)[1], np.array([1, -1, 0]) / np.sqrt(2)]
    states = [ProductState((a.astype(complex), b.astype(complex))) for a, b in zip(alice, bob)]
    party, cyc, pair = check_square_rule(states)
    assert party == 1 and sorted(pair) in ([0, 2], [1, 3])


def _random_square(rng):
    def unit(v):
        return v / np.linalg.norm(v)

    def cplx(d):
        return rng.normal(size=d) + 1j * rng.normal(size=d)

    b1 = unit(cplx(3))
    b2 = unit(cplx(3))
    b2 = unit(b2 - np.vdot(b1, b2) * b1)
    # b3 random inside b2^perp, b4 spans the complement of {b1, b3}
    basis = np.linalg.svd(b2.conj()[None, :])[2][1:].conj()
    b3 = unit(basis.T @ cplx(2))
    _, _, vh = np.linalg.svd(np.array([b1, b3]).conj())
    b4 = vh[2].conj()
    a1, a2 = unit(cplx(3)), unit(cplx(3))
    a3 = unit(cplx(3))
    a3 = unit(a3 - np.vdot(a1, a3) * a1)
    a4 = unit(cplx(3))
    a4 = unit(a4 - np.vdot(a2, a4) * a2)
    bob, alice = [b1, b2, b3, b4], [a1, a2, a3, a4]
    if rng.random() < 0.5:
        bob, alice = bob[1:] + bob[:1], alice[1:] + alice[:1]
    return [ProductState((a, b)) for a, b in zip(alice, bob)]


def test_square_rule_random():
    rng = np.random.default_rng(7)
    for _ in range(100):
        states = _random_square(rng)
        party, cyc, pair = check_square_rule(states, party=1)
        assert party == 1


def test_square_rule_no_cycle():
    with pytest.raises(NoCycle):
        check_square_rule(C.pyramid().subset([0, 1, 2, 3]).states)


def test_neither_parallel_is_exported():
    assert issubclass(NeitherParallel, AssertionError)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 10**7))
def test_pruned_agrees_with_exhaustive(seed):
    pb = random_pb(np.random.default_rng(seed))
    res = is_extendible(pb)
    assert res.extendible == is_extendible_exhaustive(pb)
    if res.extendible:
        assert_witness_sound(pb, res)


def test_augment_output_is_valid_and_stuck():
    rng = np.random.default_rng(3)
    done = 0
    while done < 30:
        pb = random_pb(rng, max_states=5)
        if pb.total_dim > 12:
            continue
        done += 1
        a = augment_until_stuck(pb)
        verify_pb(a.dims, [s.locals for s in a.states])
        assert not is_extendible(a).extendible
