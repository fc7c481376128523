"""
PiecewiseCdf - non-decreasing piecewise-linear CDF on [0, top].

Built from a gap table it is the exact law of ||qx||' for x uniform
on [0,1]: a cyclic gap g between consecutive coprime residues adds
min(2t, g)/q to P(||qx||' < t).  The density is a decreasing step
function with breakpoints at g/2.
"""
from fractions import Fraction
import numpy as np

class PiecewiseCdf:
  def __init__(self, breakpoints, values, q=None, gaps=None):
    self.breakpoints = np.asarray(breakpoints, dtype=np.float64)
    self.values = np.asarray(values, dtype=np.float64)
    if self.breakpoints.shape != self.values.shape or self.breakpoints.size < 2:
      raise ValueError('PiecewiseCdf needs matching breakpoint/value arrays')
    if np.any(np.diff(self.breakpoints) <= 0) or np.any(np.diff(self.values) < 0):
      raise ValueError('PiecewiseCdf breakpoints must increase and values not decrease')
    self.q = q
    self.gaps = dict(gaps) if gaps else None
    self.breakpoints.flags.writeable = False
    self.values.flags.writeable = False

  @classmethod
  def from_gaps(cls, q, gaps):
    """
    gaps: { gap: multiplicity } with sum(gap * multiplicity) = q.
    """
    gs = sorted(gaps)
    bps = [ 0.0 ] + [ g / 2.0 for g in gs ]
    vals = [ 0.0 ]
    for g in gs:
      vals.append(sum(c * min(float(g), float(h)) for h, c in gaps.items()) / q)
    return cls(bps, vals, q=q, gaps=gaps)

  @property
  def top(self):
    return float(self.breakpoints[-1])

  def __call__(self, t):
    """
    F(t) = P(D < t), vectorized over t.  0 for t <= 0, 1 beyond top.
    """
    return np.interp(t, self.breakpoints, self.values, left=0.0, right=1.0)

  def exact(self, t):
    """
    Rational F(t) from the gap table.
    """
    if self.gaps is None:
      raise ValueError('exact evaluation needs a gap table')
    t = Fraction(t)
    if t <= 0:
      return Fraction(0)
    return sum((c * min(2 * t, Fraction(g)) for g, c in self.gaps.items()),
               Fraction(0)) / self.q

  def densities(self):
    """
    Constant density on each panel [breakpoints[j], breakpoints[j+1]].
    """
    return np.diff(self.values) / np.diff(self.breakpoints)

  def panels(self):
    d = self.densities()
    return [ (float(self.breakpoints[j]), float(self.breakpoints[j + 1]), float(d[j]))
             for j in range(d.size) if d[j] > 0 ]

  def __repr__(self):
    return 'PiecewiseCdf(q={}, top={}, {} panels)'.format(self.q, self.top,
                                                          self.breakpoints.size - 1)
