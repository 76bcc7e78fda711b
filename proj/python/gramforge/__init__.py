"""Certified Gram-dimension bounds, low-rank psd completions, and stretching duals.

Typed operations (graphs, partial matrices, fits, completions) come straight
from the extension module; structured reports cross the boundary as JSON and
are decoded here into plain dicts.
"""

import json as _json

from . import _gramforge as _core
from ._gramforge import (
    EdgeValues,
    Graph,
    PartialMatrix,
    chromatic_number,
    clique_number,
    edm_fit,
    gram_to_edm_points,
    ktree_complete,
    lowrank_fit,
    named_graph,
    orthogonality_dimension_search,
    phi,
    phi_inv,
    project_to_graph,
    psd_completion_feasible,
    suggest_stretch_pair,
    suspension,
    treewidth,
    zero_extend,
)

__version__ = "0.1.0"


def certify(g):
    """Certified interval on the Gram dimension of ``g``, as a dict."""
    return _json.loads(_core.certify_json(g))


def verify_certificate(g, certificate):
    """Re-derive every claim a certificate dict makes about ``g``."""
    return _core.verify_certificate_json(g, _json.dumps(certificate))


def k222_witness():
    """The octahedron separation bundle (graph, data, unique completion)."""
    return _json.loads(_core.k222_witness_json())


def stretch(g, a, pair):
    """Maximize the unspecified entry ``pair`` over psd completions of ``a``."""
    return _json.loads(_core.stretch_json(g, a, pair[0], pair[1]))


def maxcut_relaxation(g):
    """The unit-diagonal max-cut SDP for ``g``, as a problem dict."""
    return _json.loads(_core.maxcut_relaxation_json(g))


def sdp_solve(problem):
    """Solve a problem dict with the interior-point method."""
    return _json.loads(_core.sdp_solve_json(_json.dumps(problem)))


def rank_reduce(problem, x, preserve_objective=False):
    """Move a feasible solution of a problem dict to low rank."""
    return _core.rank_reduce(_json.dumps(problem), x, preserve_objective)


__all__ = [
    "EdgeValues",
    "Graph",
    "PartialMatrix",
    "certify",
    "chromatic_number",
    "clique_number",
    "edm_fit",
    "gram_to_edm_points",
    "k222_witness",
    "ktree_complete",
    "lowrank_fit",
    "maxcut_relaxation",
    "named_graph",
    "orthogonality_dimension_search",
    "phi",
    "phi_inv",
    "project_to_graph",
    "psd_completion_feasible",
    "rank_reduce",
    "sdp_solve",
    "stretch",
    "suggest_stretch_pair",
    "suspension",
    "treewidth",
    "verify_certificate",
    "zero_extend",
]
