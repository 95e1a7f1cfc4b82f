"""Build RDF knowledge graphs from tabular data, driven by competency questions."""

__version__ = "0.1.0"
