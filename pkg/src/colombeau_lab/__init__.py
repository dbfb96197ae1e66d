"""Numerical laboratory for Colombeau-type algebras of generalized functions.

Modules:

- :mod:`testobjects`: mollifiers with vanishing moments, scaling, families
- :mod:`numerics`: quadrature, high-precision context, order fitting
- :mod:`testing`: moderateness / negligibility tests on representatives
- :mod:`embedding`: iota and sigma embeddings and their compatibility checks
- :mod:`counterexamples`: the series functionals P and Q
- :mod:`classification`: test-object types, quotients and the algebra diagram
- :mod:`cli`: command-line entry point
"""

__version__ = "0.1.0"
