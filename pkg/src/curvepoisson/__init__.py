"""Point-count statistics of random curves over finite fields.

Exact Poisson predictions from the tautological ring, trace-formula bounds,
a constrained random symplectic matrix experiment, and exhaustive censuses of
genus 1 and 2 curves over small fields.
"""

__version__ = "0.1.0"
