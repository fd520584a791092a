import numpy as np
import pytest

from upb import constructions as C
from upb.basis import ProductState
from upb.measure import (
    CompletenessViolated,
    CompletionMissing,
    OutcomeDistribution,
    build_sep_measurement,
    completions_for,
    identify,
    pyr34_protocol_check,
    simulate,
)


@pytest.fixture(scope="module", params=["pyramid", "tiles"])
def setup(request):
    pb = getattr(C, request.param)()
    comps = completions_for(pb)
    return pb, build_sep_measurement(pb, comps)


def test_complete_and_product(setup):
    pb, meas = setup
    assert meas.completeness_residual() <= 1e-9
    for e in meas.elements:
        assert len(e.factors) == pb.n_parties


def test_member_statistics(setup):
    pb, meas = setup
    k = len(pb)
    for i, s in enumerate(pb.states):
        d = simulate(meas, s)
        assert abs(d.probs[f"Pi_{i}"] - (k - 1) / k) < 1e-9
        for j in range(k):
            if j != i:
                assert d.probs[f"Pi_{j}"] <= 1e-12
        # complement pieces of the i-th family vanish on members of that family
        for e in meas.elements:
            if e.label.startswith("S") and e.member != i:
                assert d.probs[e.label] <= 1e-12
        assert d.most_likely()[0] == f"Pi_{i}" and d.margin() >= 0.1
        assert identify(meas, s) == i


def test_uniform_input(setup):
    pb, meas = setup
    ones = tuple(np.ones(d, dtype=complex) / np.sqrt(d) for d in pb.dims)
    d = simulate(meas, ProductState(ones))
    assert abs(sum(d.probs.values()) - 1) < 1e-9


def test_rejections():
    pb = C.pyramid()
    with pytest.raises(ValueError):
        build_sep_measurement(pb.subset([0]), {0: []})
    with pytest.raises(CompletionMissing):
        build_sep_measurement(pb, {})
    comps = completions_for(pb)
    broken = dict(comps)
    broken[0] = comps[0][:-1]
    with pytest.raises(CompletenessViolated):
        build_sep_measurement(pb, broken)


def test_extension_completions_are_accepted():
    # each four-state subset of Pyr34 completed in 3x5 and projected back
    pb = C.pyr34()
    comps = completions_for(pb, extension=(3, 5))
    assert set(comps) == set(range(5))
    meas = build_sep_measurement(pb, comps)
    assert meas.completeness_residual() <= 1e-9
    for i, s in enumerate(pb.states):
        assert identify(meas, s) == i


def test_outcome_distribution_checks():
    with pytest.raises(ValueError):
        OutcomeDistribution({"a": 0.5, "b": 0.4})
    with pytest.raises(ValueError):
        OutcomeDistribution({"a": 1.1, "b": -0.1})


def test_protocol():
    r = pyr34_protocol_check()
    assert r.ok
    assert len(r.zero_pattern) == 15 and all(v <= 1e-10 for _, _, v in r.zero_pattern)
    assert all(v <= 1e-12 for _, _, v in r.alice_pairs)
    assert abs(r.frame_constant - 1.25) < 1e-12
