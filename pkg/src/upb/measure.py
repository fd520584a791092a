"""Separable measurements that tell the members of a product basis apart,
and the five-outcome protocol for Pyr34."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .basis import ProductBasis, ProductState, embed
from .constructions import pyr34, pyr34_bob_povm
from .extend import Incomplete, complete_search
from .numerics import DEFAULT_TOL, DimensionMismatch, check_tol


class CompletionMissing(ValueError):
    pass


class CompletenessViolated(ValueError):
    def __init__(self, residual: float):
        super().__init__(f"operation elements do not sum to the identity: residual {residual:.3e}")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class Element:
    """One operation element, kept as its per-party factors."""

    label: str
    member: int
    factors: tuple[np.ndarray, ...]

    def operator(self) -> np.ndarray:
        return kron_all_matrices(self.factors)

    def effect_factors(self) -> list[np.ndarray]:
        return [f.conj().T @ f for f in self.factors]


def kron_all_matrices(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


@dataclass(frozen=True, eq=False)
class SepMeasurement:
    dims: tuple[int, ...]
    elements: tuple[Element, ...]

    def completeness_residual(self) -> float:
        total = sum(kron_all_matrices(e.effect_factors()) for e in self.elements)
        return float(np.linalg.norm(total - np.eye(int(np.prod(self.dims)))))

    def labels(self) -> list[str]:
        return [e.label for e in self.elements]


def _rank_one(v: np.ndarray) -> np.ndarray:
    # square root of |v><v| for unnormalized v
    return np.outer(v, v.conj()) / np.linalg.norm(v)


def completions_for(
    upb: ProductBasis, tol: float = DEFAULT_TOL, extension: Sequence[int] | None = None, budget: int = 20000
) -> dict[int, list[ProductState]]:
    """For each member i, product states completing the basis without i.

    The search runs in the original space first and in ``extension`` if that
    fails; members with no completion found are left out of the result.
    """
    out = {}
    for i in range(len(upb)):
        rest = upb.subset([j for j in range(len(upb)) if j != i])
        spaces = [upb.dims] + ([tuple(extension)] if extension is not None else [])
        for dims in spaces:
            base = rest if dims == upb.dims else embed(rest, dims)
            try:
                full = complete_search(base, tol, budget)
            except Incomplete:
                continue
            out[i] = list(full.states[len(rest):])
            break
    return out


def build_sep_measurement(
    upb: ProductBasis, completions: Mapping[int, Sequence[ProductState]], tol: float = 1e-9
) -> SepMeasurement:
    """Operation elements sqrt((k-1)/k) |psi_i><psi_i| and
    (1/sqrt k) times the pieces of the projector onto the complement of the
    basis with member i removed.

    Completion states may live in a locally extended space; they are
    projected back party by party, which keeps every element a product.
    """
    k = len(upb)
    if k < 2:
        raise ValueError("a separable measurement needs at least two states to distinguish")
    elements = []
    for i in range(k):
        if i not in completions or len(completions[i]) == 0:
            raise CompletionMissing(f"no completion supplied for the basis without state {i}")
        for m, c in enumerate(completions[i]):
            if len(c.locals) != upb.n_parties or any(len(v) < d for v, d in zip(c.locals, upb.dims)):
                raise DimensionMismatch(f"completion state {m} for member {i} does not fit dims {upb.dims}")
            facs = [_rank_one(np.asarray(v[:d])) for v, d in zip(c.locals, upb.dims)]
            facs[0] = facs[0] / math.sqrt(k)
            elements.append(Element(f"S{i}perp_{m}", i, tuple(facs)))
    scale = math.sqrt((k - 1) / k)
    for i, s in enumerate(upb.states):
        facs = [np.outer(v, v.conj()) for v in s.locals]
        facs[0] = facs[0] * scale
        elements.append(Element(f"Pi_{i}", i, tuple(facs)))
    meas = SepMeasurement(upb.dims, tuple(elements))
    residual = meas.completeness_residual()
    if residual > tol:
        raise CompletenessViolated(residual)
    return meas


@dataclass(frozen=True)
class OutcomeDistribution:
    probs: dict

    def __post_init__(self):
        vals = list(self.probs.values())
        if min(vals) < -1e-12:
            raise ValueError("negative outcome probability")
        if abs(sum(vals) - 1) > 1e-9:
            raise ValueError(f"probabilities sum to {sum(vals)!r}")

    def most_likely(self) -> tuple[str, float]:
        label = max(self.probs, key=self.probs.get)
        return label, self.probs[label]

    def margin(self) -> float:
        top = sorted(self.probs.values(), reverse=True)
        return top[0] - (top[1] if len(top) > 1 else 0.0)


def simulate(meas: SepMeasurement, state: ProductState) -> OutcomeDistribution:
    """Born-rule outcome probabilities, evaluated party by party."""
    if state.dims != meas.dims:
        raise DimensionMismatch(f"state dims {state.dims} differ from measurement dims {meas.dims}")
    probs = {}
    for e in meas.elements:
        p = 1.0
        for f, v in zip(e.effect_factors(), state.locals):
            p *= float(np.real(np.vdot(v, f @ v)))
        probs[e.label] = p
    return OutcomeDistribution(probs)


def identify(meas: SepMeasurement, state: ProductState) -> int:
    """Member index read off from the most likely outcome."""
    label, _ = simulate(meas, state).most_likely()
    return next(e.member for e in meas.elements if e.label == label)


@dataclass
class ProtocolReport:
    zero_pattern: list
    alice_pairs: list
    frame_constant: float
    frame_residual: float
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def pyr34_protocol_check(tol: float = 1e-10) -> ProtocolReport:
    """Check the relations behind Bob's five-outcome measurement on Pyr34.

    Outcome j rules out Bob's states w_j, w_{j+2}, w_{j+3}; the two members
    left have orthogonal Alice states, so Alice finishes the job.
    """
    check_tol(tol)
    pb = pyr34()
    v, w = pb.local(0), pb.local(1)
    u = np.array(pyr34_bob_povm())
    zeros, pairs, bad = [], [], []
    for j in range(5):
        for i in (j, (j + 2) % 5, (j + 3) % 5):
            val = abs(np.vdot(u[j], w[i]))
            zeros.append((j, i, val))
            if val > tol:
                bad.append(f"<u_{j}|w_{i}> = {val:.3e}")
        a, b = (j + 1) % 5, (j + 4) % 5
        val = abs(np.vdot(v[a], v[b]))
        pairs.append((a, b, val))
        if val > tol:
            bad.append(f"<v_{a}|v_{b}> = {val:.3e}")
    frame = u.T @ u.conj()
    const = float(np.real(np.trace(frame))) / 4
    resid = float(np.linalg.norm(frame - const * np.eye(4)))
    if resid > tol:
        bad.append(f"POVM directions are not a tight frame: residual {resid:.3e}")
    return ProtocolReport(zeros, pairs, const, resid, bad)
