"""Graphs with loose ends and the categorical machinery built on them."""

from .errors import LooseEndsError
from .graphs import (
    DGraph,
    GraphShape,
    Subgraph,
    UGraph,
    canonical_form,
    canonical_signature,
    is_connected,
    iso,
    isomorphic,
    make_edge,
    make_edge_dir,
    make_linear,
    make_star,
    make_star_dir,
    shape,
    subgraph,
    subgraph_view,
    underlying,
    validate_dgraph,
    validate_ugraph,
)

from .emb import (
    boundary,
    enumerate_emb,
    enumerate_ssb,
    id_element,
    in_out,
    is_structured,
    leq,
    realize,
    unions,
    vertex_disjoint,
)
from .etale import enumerate_etale, is_embedding, lift_embedding_directed, validate_etale
from .gmaps import (
    GraphMap,
    compose,
    enumerate_graph_maps,
    extend_tree_map,
    factorize,
    is_active,
    is_inert,
    vertex_functor,
)
from .operads import evaluate, free_cyclic, nerve_action, operad_homs, validate_presentation
from .presheaves import (
    is_segal,
    left_kan_formula,
    left_kan_oracle,
    nerve_presheaf,
    orientation_presheaf,
    segal_map,
)
from .sites import build_elements_site, build_site, orient, root

__all__ = [
    "DGraph",
    "GraphMap",
    "GraphShape",
    "LooseEndsError",
    "Subgraph",
    "UGraph",
    "boundary",
    "build_elements_site",
    "build_site",
    "canonical_form",
    "canonical_signature",
    "compose",
    "enumerate_emb",
    "enumerate_etale",
    "enumerate_graph_maps",
    "enumerate_ssb",
    "evaluate",
    "extend_tree_map",
    "factorize",
    "free_cyclic",
    "id_element",
    "in_out",
    "is_active",
    "is_connected",
    "is_embedding",
    "is_inert",
    "is_segal",
    "is_structured",
    "iso",
    "isomorphic",
    "left_kan_formula",
    "left_kan_oracle",
    "leq",
    "lift_embedding_directed",
    "make_edge",
    "make_edge_dir",
    "make_linear",
    "make_star",
    "make_star_dir",
    "nerve_action",
    "nerve_presheaf",
    "operad_homs",
    "orient",
    "orientation_presheaf",
    "realize",
    "root",
    "segal_map",
    "shape",
    "subgraph",
    "subgraph_view",
    "underlying",
    "unions",
    "validate_dgraph",
    "validate_etale",
    "validate_presentation",
    "validate_ugraph",
    "vertex_disjoint",
    "vertex_functor",
]
