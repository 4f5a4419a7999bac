"""Toolkit for measuring translation literalness.

Quantifies how literally an MT or LLM system translates by looking at its
word alignments: the share of source words left unaligned (USW) and how far
the alignment deviates from the monotone diagonal (non-monotonicity, both a
diagonal-deviation and a crossing-pair variant). Around that core it carries
corpus I/O, a built-in statistical word aligner for offline use, a character
n-gram language identifier that demotes quality scores of copy errors, a
multi-system comparison harness with bootstrap intervals, prompt builders
for translation/synthesis generation runs, and a blind pairwise annotation
server.
"""

__version__ = "0.1.0"
