"""Unextendible and uncompletable product bases and the bound entangled states built from them."""

from .basis import OrthGraph, PairNotOrthogonal, ProductBasis, ProductState, build_graph, embed, lower_bound_size, verify_pb
from .entangle import Certificate, certify, ppt_all_cuts, rho_bar
from .extend import (
    BudgetExhausted,
    ExtensionWitness,
    Incomplete,
    NoWitness,
    augment_until_stuck,
    complete_search,
    is_extendible,
    product_families,
    product_span_dim,
)
from .measure import build_sep_measurement, simulate

__all__ = [
    "BudgetExhausted",
    "Certificate",
    "ExtensionWitness",
    "Incomplete",
    "NoWitness",
    "OrthGraph",
    "PairNotOrthogonal",
    "ProductBasis",
    "ProductState",
    "augment_until_stuck",
    "build_graph",
    "build_sep_measurement",
    "certify",
    "complete_search",
    "embed",
    "is_extendible",
    "lower_bound_size",
    "ppt_all_cuts",
    "product_families",
    "product_span_dim",
    "rho_bar",
    "simulate",
    "verify_pb",
]
__version__ = "0.1.0"
