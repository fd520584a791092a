"""The normalized complement projector of a product basis and certificates
about its entanglement."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .basis import ProductBasis, ProductState, embed, group_parties, verify_pb
from .extend import (
    BudgetExhausted,
    Incomplete,
    complete_search,
    is_extendible,
    product_families,
    span_of_families,
)
from .numerics import DEFAULT_TOL, DimensionMismatch, check_tol, min_eig_hermitian, partial_transpose

KINDS = ("UPB", "PPT-all-cuts", "RangeDeficit", "SeparableByCompletion", "Inconclusive")


class FullBasis(ValueError):
    """The basis spans the whole space, so its complement is empty."""


@dataclass(frozen=True, eq=False)
class DensityOp:
    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        total = int(np.prod(self.dims))
        if self.mat.shape != (total, total):
            raise DimensionMismatch(f"matrix of shape {self.mat.shape} does not act on dims {self.dims}")
        if np.max(np.abs(self.mat - self.mat.conj().T)) > 1e-12:
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(self.mat) - 1) > 1e-12:
            raise ValueError("density operator does not have unit trace")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)

    def rank(self, tol: float = DEFAULT_TOL) -> int:
        return int(np.sum(self.eigenvalues() > tol))


def rho_bar(pb: ProductBasis) -> DensityOp:
    """Uniform mixture over the orthogonal complement of span(pb)."""
    D, n = pb.total_dim, len(pb)
    if n >= D:
        raise FullBasis(f"{n} states already span the {D}-dimensional space")
    mat = (np.eye(D, dtype=complex) - pb.projector()) / (D - n)
    # symmetrize so the Hermiticity invariant holds to the last bit
    return DensityOp(0.5 * (mat + mat.conj().T), pb.dims)


def pt_conjugation_gap(pb: ProductBasis, parties: Sequence[int]) -> float:
    """Largest entry of PT(rho_bar(pb)) - rho_bar(pb conjugated on ``parties``).

    Transposing a product projector on a party only conjugates that party's
    local vector, so the gap should vanish up to rounding.
    """
    lhs = partial_transpose(rho_bar(pb).mat, pb.dims, list(parties))
    rhs = rho_bar(pb.conj(parties)).mat
    return float(np.max(np.abs(lhs - rhs)))


def bipartitions(n_parties: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Every split of the parties into two nonempty groups, as (kept, transposed).

    Party 0 always stays in the kept group; transposing the other side
    instead gives the full transpose of the same matrix, which has the same
    spectrum.
    """
    rest = range(1, n_parties)
    out = []
    for size in range(1, n_parties):
        for group in combinations(rest, size):
            kept = tuple(p for p in range(n_parties) if p not in group)
            out.append((kept, group))
    return out


@dataclass(frozen=True)
class CutResult:
    kept: tuple[int, ...]
    transposed: tuple[int, ...]
    min_eig: float


@dataclass(frozen=True)
class PPTReport:
    cuts: tuple[CutResult, ...]
    tol: float

    @property
    def ppt(self) -> bool:
        return all(c.min_eig >= -self.tol for c in self.cuts)

    @property
    def min_eig(self) -> float:
        return min(c.min_eig for c in self.cuts)


def ppt_all_cuts(rho: DensityOp, tol: float = DEFAULT_TOL) -> PPTReport:
    tol = check_tol(tol)
    cuts = []
    for kept, group in bipartitions(len(rho.dims)):
        pt = partial_transpose(rho.mat, rho.dims, group)
        cuts.append(CutResult(kept, group, min_eig_hermitian(pt, tol)))
    return PPTReport(tuple(cuts), tol)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Outcome of :func:`certify`.

    ``evidence`` holds everything needed to redo the claim from scratch;
    :func:`recheck` does exactly that.
    """

    kind: str
    evidence: dict = field(default_factory=dict)
    ppt: PPTReport | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")

    @property
    def conclusive(self) -> bool:
        return self.kind != "Inconclusive"


def _low_rank_applies(pb: ProductBasis, report: PPTReport) -> bool:
    # bipartite PPT states of rank at most two are separable (a known result,
    # taken as given here rather than re-derived)
    return pb.n_parties == 2 and pb.total_dim - len(pb) <= 2 and report.ppt


def certify(
    pb: ProductBasis,
    tol: float = DEFAULT_TOL,
    budget: int = 0,
    extension: Sequence[int] | None = None,
    completion_budget: int = 20000,
    threads: int = 1,
) -> Certificate:
    """Classify rho_bar(pb) as bound entangled, separable, or undecided.

    The checks run in order: unextendibility, a deficit of product states in
    the complement, then a search for a full product basis containing pb
    (in the given space first, then in ``extension`` if supplied).
    """
    tol = check_tol(tol)
    rho = rho_bar(pb)
    report = ppt_all_cuts(rho, tol)
    rank = pb.total_dim - len(pb)
    try:
        res = is_extendible(pb, tol, budget, threads)
    except BudgetExhausted as exc:
        return Certificate("Inconclusive", {"reason": f"extendibility search: {exc}"}, report)
    if not res.extendible:
        return Certificate("UPB", {"nodes": res.nodes, "assignments": res.assignments, "rank": rank}, report)

    try:
        fams = product_families(pb, tol, budget)
    except BudgetExhausted as exc:
        return Certificate("Inconclusive", {"reason": f"product family search: {exc}"}, report)
    span = len(span_of_families(fams, tol))
    if span < rank:
        ev = {"span_dim": span, "rank": rank, "families": [f.partition for f in fams]}
        return Certificate("RangeDeficit", ev, report)

    reasons = []
    spaces = [pb.dims]
    if extension is not None and tuple(extension) != pb.dims:
        spaces.append(tuple(int(d) for d in extension))
    for dims in spaces:
        target = pb if dims == pb.dims else embed(pb, dims)
        try:
            full = complete_search(target, tol, completion_budget)
        except Incomplete as exc:
            reasons.append(f"completion in {list(dims)}: {exc.reason}")
            continue
        ev = {"dims": tuple(dims), "completion": full.states[len(pb):], "in_extension": dims != pb.dims}
        return Certificate("SeparableByCompletion", ev, report)

    ev = {"reason": "; ".join(reasons), "assumed_separable": _low_rank_applies(pb, report)}
    return Certificate("Inconclusive", ev, report)


def recheck(cert: Certificate, pb: ProductBasis, tol: float = DEFAULT_TOL) -> bool:
    """Recompute a certificate's claim from the basis alone."""
    ev = cert.evidence
    if cert.kind == "UPB":
        res = is_extendible(pb, tol)
        return not res.extendible and res.assignments == ev["assignments"]
    if cert.kind == "RangeDeficit":
        span = len(span_of_families(product_families(pb, tol), tol))
        return span == ev["span_dim"] and span < pb.total_dim - len(pb) == ev["rank"]
    if cert.kind == "SeparableByCompletion":
        dims = tuple(ev["dims"])
        base = pb if dims == pb.dims else embed(pb, dims)
        states: list[ProductState] = list(base.states) + list(ev["completion"])
        try:
            full = verify_pb(dims, [s.locals for s in states], tol)
        except ValueError:
            return False
        return len(full) == full.total_dim
    if cert.kind == "PPT-all-cuts":
        return ppt_all_cuts(rho_bar(pb), tol).ppt
    return True


@dataclass(frozen=True)
class CutAnalysis:
    kept: tuple[int, ...]
    transposed: tuple[int, ...]
    min_eig: float
    span_dim: int
    rank: int


def cut_analysis(pb: ProductBasis, tol: float = DEFAULT_TOL, budget: int = 0) -> list[CutAnalysis]:
    """Per bipartite cut: PPT margin and the span of product states (across
    that cut) orthogonal to the basis.

    A span below the rank certifies entanglement across the cut; equality
    decides nothing, and no verdict is drawn from it.
    """
    tol = check_tol(tol)
    rho = rho_bar(pb)
    out = []
    for kept, group in bipartitions(pb.n_parties):
        pt = partial_transpose(rho.mat, rho.dims, group)
        cut = group_parties(pb, [kept, group])
        span = len(span_of_families(product_families(cut, tol, budget), tol))
        out.append(CutAnalysis(kept, group, min_eig_hermitian(pt, tol), span, pb.total_dim - len(pb)))
    return out


def certify_ppt(pb: ProductBasis, tol: float = DEFAULT_TOL) -> Certificate:
    """Positivity of every partial transpose of rho_bar(pb), on its own."""
    report = ppt_all_cuts(rho_bar(pb), tol)
    kind = "PPT-all-cuts" if report.ppt else "Inconclusive"
    return Certificate(kind, {"min_eig": report.min_eig}, report)
