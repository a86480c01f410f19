"""Exact computations for list and correspondence packing of graphs."""
from __future__ import annotations

from .cover_model import Cover, cover_from_json, cover_to_json, full_cover, full_identity_cover, list_cover
from .graph_core import Graph, catalog, girth, is_planar, mad, parse_graph_name
from .packing_search import count_transversals, corr_packing_upper, find_packing, list_packing_upper

__version__ = "0.1.0"

__all__ = [
    "Cover", "Graph", "catalog", "count_transversals", "corr_packing_upper", "cover_from_json",
    "cover_to_json", "find_packing", "full_cover", "full_identity_cover", "girth", "is_planar",
    "list_cover", "list_packing_upper", "mad", "parse_graph_name",
]
