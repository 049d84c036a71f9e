"""Smell-aware bug localization toolkit.

Re-ranks the output of IR-based bug localization techniques by blending a
normalized technique score with a normalized per-module code-smell value.
Ships a TF-IDF/cosine baseline (plain and length-regularized), ingestion for
external technique scores, smell aggregation under configurable
granularity/aggregator/selector triples, relative-risk analysis of smell
types, and a ranking evaluation suite (Top N, MRR, MAP, Wilcoxon signed-rank,
Cliff's delta).
"""

__version__ = "0.1.0"
