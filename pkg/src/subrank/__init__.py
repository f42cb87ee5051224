"""Certified computations around induced matchings of type hypergraphs.

Modules: ``gf2`` (binary subspaces and weight distributions), ``hypergraph``
(k-graphs and exact subrank), ``bounds`` (the rank-inequality certificates),
``cw`` (Coppersmith-Winograd ingredients), ``spectral`` (Fourier tools and
auxiliary inequalities), ``suites`` and ``cli``.
"""

__version__ = "0.1.0"
