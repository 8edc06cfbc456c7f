from ._clusterml import (
    ConfigError,
    DomainError,
    ExchangeGraph,
    ResourceLimitError,
    Seed,
    accuracy,
    builtin_names,
    builtin_seed,
    cluster_count,
    cycle_basis_lengths,
    eigenvector_centrality,
    embedding_profile,
    generate,
    graph_from_json,
    graph_stats,
    mcc,
    reproduce,
    seed_from_json,
    square_clustering,
    triangle_clustering,
    wiener_index,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "ExchangeGraph",
    "ResourceLimitError",
    "Seed",
    "accuracy",
    "builtin_names",
    "builtin_seed",
    "cluster_count",
    "cycle_basis_lengths",
    "eigenvector_centrality",
    "embedding_profile",
    "generate",
    "graph_from_json",
    "graph_stats",
    "mcc",
    "reproduce",
    "seed_from_json",
    "square_clustering",
    "triangle_clustering",
    "wiener_index",
]
