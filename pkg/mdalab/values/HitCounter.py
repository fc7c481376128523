"""
HitCounter - first-hit counts binned by checkpoint.

Each sample contributes the smallest q at which it entered the union.
Bin i counts first hits in (checkpoints[i-1], checkpoints[i]] (bin 0
starts at the range start); overflow holds samples never hit.
Counters from separate chunks add up in any order.
"""
import numpy as np

class HitCounter:
  def __init__(self, checkpoints):
    self.checkpoints = np.asarray(sorted(int(c) for c in checkpoints), dtype=np.int64)
    self.nbins = self.checkpoints.size
    self.clear()

  # deep copy
  def copy(self):
    o = HitCounter(self.checkpoints)
    o.bins = self.bins.copy()
    o.overflow = self.overflow
    o.count = self.count
    return o

  def clear(self):
    self.bins = np.zeros(self.nbins, dtype=np.int64)
    self.overflow = 0
    self.count = 0

  def is_compatible(self, other):
    return isinstance(other, HitCounter) and \
           np.array_equal(self.checkpoints, other.checkpoints)

  def fill(self, first_hits):
    """
    first_hits: int array, 0 for samples never hit.
    """
    first_hits = np.asarray(first_hits, dtype=np.int64)
    hit = first_hits > 0
    ix = np.searchsorted(self.checkpoints, first_hits[hit], side='left')
    inside = ix < self.nbins
    self.bins += np.bincount(ix[inside], minlength=self.nbins)
    self.overflow += int(np.count_nonzero(~hit)) + int(np.count_nonzero(~inside))
    self.count += first_hits.size

  def add(self, other):
    if not self.is_compatible(other):
      raise ValueError('HitCounter checkpoints differ')
    self.bins += other.bins
    self.overflow += other.overflow
    self.count += other.count

  def cumulative(self):
    return np.cumsum(self.bins)
