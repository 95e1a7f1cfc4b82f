"""RDF data model, parsers and serializers."""

from .errors import RDFSyntaxError
from .graph import Dataset, Graph, Triple
from .ntriples import parse_nquads, parse_ntriples
from .serializer import FORMATS, serialize
from .syntax import SyntaxReport, guess_format, parse, parse_file, validate_syntax
from .terms import (
    IRI,
    OWL,
    RDF,
    RDF_TYPE,
    RDFS,
    SH,
    XSD,
    BlankNode,
    Literal,
    Term,
    Variable,
    is_absolute_iri,
    term_sort_key,
)
from .turtle import parse_turtle

__all__ = [
    "BlankNode",
    "Dataset",
    "FORMATS",
    "Graph",
    "IRI",
    "Literal",
    "OWL",
    "RDF",
    "RDFS",
    "RDFSyntaxError",
    "RDF_TYPE",
    "SH",
    "SyntaxReport",
    "Term",
    "Triple",
    "Variable",
    "XSD",
    "guess_format",
    "is_absolute_iri",
    "parse",
    "parse_file",
    "parse_nquads",
    "parse_ntriples",
    "parse_turtle",
    "serialize",
    "term_sort_key",
    "validate_syntax",
]
