"""
Computational kernel: number theory, approximating functions, region
measures, Monte Carlo sampling, Borel-Cantelli bounds and exact
fibering checks.
"""
