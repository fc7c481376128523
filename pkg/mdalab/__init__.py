"""
mdalab - finite-truncation experiments on metric Diophantine
approximation: slice measures, truncated unions, divergence sums,
Borel-Cantelli bounds and cross fibering checks.
"""
__version__ = '0.1.0'
