"""
MeasureEstimate - a measure value in [0,1] with provenance.

provenance is one of
  exact          rationally exact or exact up to float rounding
  closed-form    analytic formula
  numeric-exact  numeric integration with an error bound (error)
  monte-carlo    hit fraction with a 95% confidence interval

Monte Carlo intervals use the normal approximation, switching to
Clopper-Pearson bounds when hits < 30 or misses < 30.
"""
import math
from fractions import Fraction
from scipy.stats import beta, norm

PROVENANCES = ('exact', 'closed-form', 'numeric-exact', 'monte-carlo')
SMALL_COUNT = 30

class MeasureEstimate:
  def __init__(self, value, provenance, **kwargs):
    if provenance not in PROVENANCES:
      raise ValueError('unknown provenance {!r}'.format(provenance))
    # exact rational values keep their Fraction alongside the float
    self.rational = value if isinstance(value, Fraction) else None
    self.value = float(value)
    self.provenance = provenance
    self.error = kwargs.pop('error', None)
    self.samples = kwargs.pop('samples', None)
    self.hits = kwargs.pop('hits', None)
    self.ci_low = kwargs.pop('ci_low', None)
    self.ci_high = kwargs.pop('ci_high', None)
    self.seed = kwargs.pop('seed', None)
    self.generator = kwargs.pop('generator', None)
    if kwargs:
      raise TypeError('unexpected fields {}'.format(sorted(kwargs)))

  @classmethod
  def exact(cls, value):
    return cls(value, 'exact')

  @classmethod
  def closed_form(cls, value):
    return cls(value, 'closed-form')

  @classmethod
  def numeric(cls, value, error):
    return cls(value, 'numeric-exact', error=float(error))

  @classmethod
  def from_hits(cls, hits, samples, seed=None, generator=None, confidence=0.95):
    hits = int(hits)
    samples = int(samples)
    if samples < 1 or hits < 0 or hits > samples:
      raise ValueError('bad counts: {} hits of {} samples'.format(hits, samples))
    lo, hi = binomial_interval(hits, samples, confidence)
    return cls(hits / samples, 'monte-carlo', samples=samples, hits=hits,
               ci_low=lo, ci_high=hi, seed=seed, generator=generator)

  def is_monte_carlo(self):
    return self.provenance == 'monte-carlo'

  def ci_width(self):
    if self.ci_low is None:
      return 0.0
    return self.ci_high - self.ci_low

  def bracket(self):
    """
    (low, high) interval guaranteed to hold the value as far as the
    provenance tells: the CI, the numeric error band, or the point.
    """
    if self.ci_low is not None:
      return (self.ci_low, self.ci_high)
    if self.error is not None:
      return (max(0.0, self.value - self.error), min(1.0, self.value + self.error))
    return (self.value, self.value)

  def as_dict(self):
    d = { 'value': self.value, 'provenance': self.provenance }
    if self.rational is not None:
      d['rational'] = str(self.rational)
    for k in ('error', 'samples', 'hits', 'ci_low', 'ci_high', 'seed', 'generator'):
      v = getattr(self, k)
      if v is not None:
        d[k] = v
    return d

  def __repr__(self):
    if self.ci_low is not None:
      return 'MeasureEstimate({:.12g} [{:.12g}, {:.12g}], {})'.format(
             self.value, self.ci_low, self.ci_high, self.provenance)
    return 'MeasureEstimate({:.12g}, {})'.format(self.value, self.provenance)

def binomial_interval(hits, samples, confidence=0.95):
  """
  Two-sided interval for a hit fraction.
  """
  alpha = 1.0 - confidence
  p = hits / samples
  if hits < SMALL_COUNT or samples - hits < SMALL_COUNT:
    lo = 0.0 if hits == 0 else float(beta.ppf(alpha / 2, hits, samples - hits + 1))
    hi = 1.0 if hits == samples else float(beta.ppf(1 - alpha / 2, hits + 1, samples - hits))
  else:
    z = float(norm.ppf(1 - alpha / 2))
    half = z * math.sqrt(p * (1 - p) / samples)
    lo = max(0.0, p - half)
    hi = min(1.0, p + half)
  return (min(lo, p), max(hi, p))
