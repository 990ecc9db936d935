"""Query-dependent topic taxonomies from a co-occurrence graph."""

from .builder import build_taxonomy
from .config import PipelineConfig, load_config
from .corpus import CorpusReader, Document, load_corpus
from .extraction import CooccurrenceCounts, TopicSet, extract_topics
from .graph import GraphConfig, TopicGraph, build_graph, read_graph, write_graph
from .kernels import BACKEND
from .partition import PartitionConfig, WorkGraph, num_partitions, partition_kway
from .query import QueryConfig, query_subgraph, select_subgraph
from .taxonomy import Taxonomy, read_taxonomy, to_dot, write_taxonomy

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CooccurrenceCounts", "CorpusReader", "Document", "GraphConfig", "PartitionConfig",
    "PipelineConfig", "QueryConfig", "Taxonomy", "TopicGraph", "TopicSet", "WorkGraph", "build_graph",
    "build_taxonomy", "extract_topics", "load_config", "load_corpus", "num_partitions", "partition_kway",
    "query_subgraph", "read_graph", "read_taxonomy", "select_subgraph", "to_dot", "write_graph",
    "write_taxonomy",
]
