"""
Numerical toolkit for quasiconformal flows on the Heisenberg group.

Subpackages:
- group: group law, gauge metric, frames, finite differences, quadrature.
- potential: signed measures and logarithmic potentials.
- contact: contact fields generated by potentials, strain, truncation.
- flow: flow integration, composed maps, Jacobians, dilatation.
- construct: the potential built from a map and a density.
- iterate: the iterative composition scheme.
- metric: lengths, weighted and David-Semmes distances.
"""

__version__ = "0.3.0"
