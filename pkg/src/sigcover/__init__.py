"""Short signed circuit covers."""

from .circuits import Cover, Kind, SignedCircuitElement, classify, is_flow_admissible, validate_element
from .graph import GraphParseError, SignedGraph, StructuralError, format_graph, parse_graph
from .pipeline import CoverCertificate, NotFlowAdmissible, bounds, cover_full
from .signature import minimum_signature
from .verify import oracle_min_cover, verify_cover

__all__ = [
    "Cover",
    "CoverCertificate",
    "GraphParseError",
    "Kind",
    "NotFlowAdmissible",
    "SignedCircuitElement",
    "SignedGraph",
    "StructuralError",
    "bounds",
    "classify",
    "cover_full",
    "format_graph",
    "is_flow_admissible",
    "minimum_signature",
    "oracle_min_cover",
    "parse_graph",
    "validate_element",
    "verify_cover",
]
