"""
psi - approximating functions and the divergence-sum criteria.

Families are immutable value objects.  Each one evaluates a single q
through __call__ and a whole range 1..Q through values(Q) (float array,
index 0 is q = 1).  spec() gives back the configuration dictionary that
from_spec() accepts, so a family survives a trip through a config file.

Logarithms are natural throughout.  power_log puts ln(q+1) in the
denominator so that q = 1 is finite; criterion weights (ln q)^(n-1) stay
literal, so their q = 1 term is 0 when n >= 2.

Divergence is never inferred from a finite sum: families carry
metadata, and classify() only reads it back.
"""
import math
import numbers
import logging
from fractions import Fraction
import numpy as np

from mdalab.core import arith
from mdalab.errors import DomainError, ConfigError, OverflowSumError, \
                          UndefinedRatioError

logger = logging.getLogger(__name__)

DIVERGENT = 'known-divergent'
CONVERGENT = 'known-convergent'
UNKNOWN = 'unknown'
TRISTATE = (DIVERGENT, CONVERGENT, UNKNOWN)

CRITERIA = ('plain', 'log_weighted', 'phi_log_weighted', 'phi_plain')

class SumCriterion:
  """
  One of the four divergence sums, in dimension n:
    plain             sum psi(q)
    log_weighted      sum psi(q) (ln q)^(n-1)
    phi_log_weighted  sum (phi(q)/q)^n psi(q) (ln q)^(n-1)
    phi_plain         sum (phi(q)/q)^n psi(q)
  """
  def __init__(self, kind, n=1):
    if kind not in CRITERIA:
      raise DomainError('unknown criterion {!r}'.format(kind))
    if int(n) != n or n < 1:
      raise DomainError('criterion dimension must be a positive integer, got {}'.format(n))
    self.kind = kind
    self.n = int(n)

  def log_exponent(self):
    return self.n - 1 if self.kind in ('log_weighted', 'phi_log_weighted') else 0

  def uses_phi(self):
    return self.kind in ('phi_log_weighted', 'phi_plain')

  def weights(self, Q):
    """
    Weight multiplying psi(q), for q = 1..Q.
    """
    qs = np.arange(1, Q + 1, dtype=np.float64)
    w = np.ones(Q, dtype=np.float64)
    e = self.log_exponent()
    if e > 0:
      w *= np.log(qs) ** e # ln 1 = 0 keeps the q = 1 term at 0
    if self.uses_phi():
      w *= arith.phi_table(max(Q, 1)).ratios(Q) ** self.n
    return w

  def __eq__(self, other):
    return isinstance(other, SumCriterion) and \
           (self.kind, self.n) == (other.kind, other.n)

  def __hash__(self):
    return hash((self.kind, self.n))

  def __repr__(self):
    return 'SumCriterion({!r}, n={})'.format(self.kind, self.n)

def default_criterion(n, mode, coprime):
  """
  The sum whose divergence drives full measure for a set:
    product, plain    -> log_weighted        (S_n^x)
    product, coprime  -> phi_log_weighted    (D_n^x)
    max, plain        -> plain               (S_n)
    max, coprime      -> phi_plain           (D_n)
  """
  if mode == 'product':
    return SumCriterion('phi_log_weighted' if coprime else 'log_weighted', n)
  return SumCriterion('phi_plain' if coprime else 'plain', n)

#
# families
#

class ApproxFunction:
  """
  Base class.  Subclasses set self.family and implement evaluate(q)
  and values(Q); divergence maps criterion kind to a tri-state.
  """
  family = None
  may_be_infinite = False

  def __init__(self, divergence=None):
    self.divergence = {}
    for kind, state in (divergence or {}).items():
      if kind not in CRITERIA:
        raise DomainError('divergence metadata for unknown criterion {!r}'.format(kind))
      if state not in TRISTATE:
        raise DomainError('divergence state must be one of {}, got {!r}'.format(
                          TRISTATE, state))
      self.divergence[kind] = state

  def __call__(self, q):
    if q < 1:
      raise DomainError('psi: q must be >= 1, got {}'.format(q))
    return self.evaluate(int(q))

  def evaluate(self, q):
    raise NotImplementedError

  def values(self, Q):
    raise NotImplementedError

  def values_at(self, qs):
    """
    Values at an arbitrary increasing integer array qs.
    """
    qs = np.asarray(qs, dtype=np.int64)
    if qs.size == 0:
      return np.zeros(0)
    return self.values(int(qs.max()))[qs - 1]

  def metadata(self, criterion):
    return self.divergence.get(criterion.kind, UNKNOWN)

  def is_rational(self):
    return False

  def spec(self):
    raise NotImplementedError

  def __repr__(self):
    return '{}({})'.format(type(self).__name__, self.spec())

class PowerLog(ApproxFunction):
  """
  psi(q) = c q^(-a) (ln(q+1))^(-b)
  """
  family = 'power_log'

  def __init__(self, c=1.0, a=1.0, b=0.0, divergence=None):
    for k, v in (('c', c), ('a', a), ('b', b)):
      if not isinstance(v, numbers.Real) or not math.isfinite(v):
        raise DomainError('power_log: {} must be a finite real, got {!r}'.format(k, v))
    if c < 0:
      raise DomainError('power_log: c must be >= 0, got {}'.format(c))
    self.c = float(c)
    self.a = float(a)
    self.b = float(b)
    super().__init__(divergence)

  def evaluate(self, q):
    if self.c == 0.0:
      return 0.0
    return self.c * q ** (-self.a) * math.log(q + 1.0) ** (-self.b)

  def values(self, Q):
    if self.c == 0.0:
      return np.zeros(Q)
    qs = np.arange(1, Q + 1, dtype=np.float64)
    return self.c * qs ** (-self.a) * np.log1p(qs) ** (-self.b)

  def metadata(self, criterion):
    if criterion.kind in self.divergence:
      return self.divergence[criterion.kind]
    if self.c == 0.0:
      return CONVERGENT
    if self.a < 1.0:
      return DIVERGENT
    if self.a > 1.0:
      return CONVERGENT
    # a = 1: sum (ln q)^(e-b) / q diverges iff e - b >= -1;
    # (phi(q)/q)^n has a positive mean so it does not change the verdict
    return DIVERGENT if criterion.log_exponent() - self.b >= -1.0 else CONVERGENT

  def spec(self):
    d = { 'name': self.family, 'c': self.c, 'a': self.a, 'b': self.b }
    if self.divergence:
      d['divergence'] = dict(self.divergence)
    return d

def _as_number(v, where):
  if isinstance(v, str):
    try:
      return Fraction(v)
    except ValueError:
      raise DomainError('{}: cannot parse {!r} as a number'.format(where, v))
  if isinstance(v, bool) or not isinstance(v, numbers.Real):
    raise DomainError('{}: expected a number, got {!r}'.format(where, v))
  return v

class Table(ApproxFunction):
  """
  Explicit values psi(1), psi(2), ...; zero beyond the table.
  Entries may be floats, ints, Fractions or 'p/q' strings.
  """
  family = 'table'

  def __init__(self, values, divergence=None):
    vals = [ _as_number(v, 'table[{}]'.format(i)) for i, v in enumerate(values) ]
    for i, v in enumerate(vals):
      if v < 0 or (isinstance(v, float) and not math.isfinite(v)):
        raise DomainError('table[{}] must be finite and >= 0, got {}'.format(i, v))
    self.table = tuple(vals)
    super().__init__(divergence)

  def evaluate(self, q):
    return self.table[q - 1] if q <= len(self.table) else 0.0

  def values(self, Q):
    out = np.zeros(Q)
    k = min(Q, len(self.table))
    out[:k] = [ float(v) for v in self.table[:k] ]
    return out

  def metadata(self, criterion):
    return UNKNOWN

  def is_rational(self):
    return all(isinstance(v, (int, Fraction)) for v in self.table)

  def spec(self):
    return { 'name': self.family,
             'values': [ str(v) if isinstance(v, Fraction) else v for v in self.table ] }

class Support:
  """
  Support predicates for IndicatorSupport, referenced by id:
    primorial_multiples(k)   q divisible by the product of the first k primes
    multiples_of(m)          q divisible by m
    phi_ratio_below(t)       phi(q)/q < t
  """
  IDS = ('primorial_multiples', 'multiples_of', 'phi_ratio_below')

  def __init__(self, id, **params):
    if id not in self.IDS:
      raise DomainError('unknown support predicate {!r}'.format(id))
    self.id = id
    self.params = dict(params)
    if id == 'primorial_multiples':
      k = params.get('k', None)
      if not isinstance(k, int) or k < 0:
        raise DomainError('primorial_multiples needs an integer k >= 0')
      self.modulus = arith.primorial(k)
    elif id == 'multiples_of':
      m = params.get('m', None)
      if not isinstance(m, int) or m < 1:
        raise DomainError('multiples_of needs an integer m >= 1')
      self.modulus = m
    else:
      t = params.get('threshold', None)
      if not isinstance(t, numbers.Real) or t <= 0:
        raise DomainError('phi_ratio_below needs a positive threshold')
      self.threshold = float(t)

  def mask(self, Q):
    """
    Boolean array for q = 1..Q.
    """
    qs = np.arange(1, Q + 1, dtype=np.int64)
    if self.id == 'phi_ratio_below':
      return arith.phi_table(max(Q, 1)).ratios(Q) < self.threshold
    return qs % self.modulus == 0

  def contains(self, q):
    if self.id == 'phi_ratio_below':
      return arith.euler_phi(q) / q < self.threshold
    return q % self.modulus == 0

  def spec(self):
    d = { 'id': self.id }
    d.update(self.params)
    return d

class IndicatorSupport(ApproxFunction):
  """
  base(q) on the support, 0 elsewhere.
  """
  family = 'indicator_support'

  def __init__(self, base, support, heuristic=False, divergence=None):
    self.base = base
    self.support = support
    self.heuristic = bool(heuristic)
    super().__init__(divergence)

  def evaluate(self, q):
    return self.base(q) if self.support.contains(q) else 0.0

  def values(self, Q):
    return np.where(self.support.mask(Q), self.base.values(Q), 0.0)

  def spec(self):
    d = { 'name': self.family, 'base': self.base.spec(),
          'support': self.support.spec() }
    if self.heuristic:
      d['heuristic'] = True
    if self.divergence:
      d['divergence'] = dict(self.divergence)
    return d

def adversarial_family(k=6, c=1.0):
  """
  Heuristic family in the spirit of the Duffin-Schaeffer counterexample:
  constant c on multiples of the k-th primorial, where phi(q)/q is small.
  Not a reproduction of the 1941 construction.
  """
  return IndicatorSupport(PowerLog(c, 0.0, 0.0),
                          Support('primorial_multiples', k=k), heuristic=True)

class Conditional(ApproxFunction):
  """
  psi_(x1..xk)(q) = psi(q) / (||q x1|| ... ||q xk||)
  with a/0 = +inf for a > 0 and 0/0 = 0.
  """
  family = 'conditional'
  may_be_infinite = True

  def __init__(self, base, anchors):
    if len(anchors) == 0:
      raise DomainError('conditional: anchors must be non-empty')
    for x in anchors:
      if not isinstance(x, numbers.Real) or not 0.0 <= x <= 1.0:
        raise DomainError('conditional: anchor {!r} outside [0,1]'.format(x))
    self.base = base
    self.anchors = tuple(float(x) for x in anchors)
    super().__init__()

  def evaluate(self, q):
    num = self.base(q)
    den = 1.0
    for x in self.anchors:
      den *= arith.dist_nearest(q, x)
    if den == 0.0:
      return math.inf if num > 0 else 0.0
    return num / den

  def values(self, Q):
    num = self.base.values(Q)
    qs = np.arange(1, Q + 1, dtype=np.float64)
    den = np.ones(Q)
    for x in self.anchors:
      t = qs * x
      den *= np.abs(t - np.rint(t))
    out = np.zeros(Q)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    out[~nz & (num > 0)] = np.inf
    return out

  def spec(self):
    return { 'name': self.family, 'base': self.base.spec(),
             'anchors': list(self.anchors) }

def conditional_psi(f, anchors):
  return Conditional(f, anchors)

class Weight:
  """
  Positive weight function of the p-adic absolute value t = |q|_p:
    power     f(t) = t^exponent
    constant  f(t) = value  (value > 0)
  """
  KINDS = ('power', 'constant')

  def __init__(self, kind, **params):
    if kind not in self.KINDS:
      raise DomainError('unknown weight kind {!r}'.format(kind))
    self.kind = kind
    if kind == 'power':
      self.exponent = float(params.get('exponent', 1.0))
    else:
      v = params.get('value', 1.0)
      if not isinstance(v, numbers.Real) or v <= 0:
        raise DomainError('constant weight must be positive, got {!r}'.format(v))
      self.value = float(v)

  def __call__(self, t):
    if self.kind == 'power':
      return np.asarray(t, dtype=np.float64) ** self.exponent
    return np.full(np.shape(t), self.value) if np.ndim(t) else self.value

  def is_identity(self):
    return (self.kind == 'power' and self.exponent == 0.0) or \
           (self.kind == 'constant' and self.value == 1.0)

  def spec(self):
    if self.kind == 'power':
      return { 'kind': 'power', 'exponent': self.exponent }
    return { 'kind': 'constant', 'value': self.value }

class PadicWeighted(ApproxFunction):
  """
  q -> psi(q) / (f_1(|q|_p1) ... f_k(|q|_pk)).
  """
  family = 'padic_weighted'

  def __init__(self, base, primes, weights):
    primes = [ int(p) for p in primes ]
    if len(set(primes)) != len(primes):
      raise DomainError('padic_weighted: primes must be distinct, got {}'.format(primes))
    if len(weights) != len(primes):
      raise DomainError('padic_weighted: {} primes but {} weights'.format(
                        len(primes), len(weights)))
    for p in primes:
      if not arith.is_prime(p):
        raise DomainError('padic_weighted: {} is not prime'.format(p))
    self.base = base
    self.primes = tuple(primes)
    self.weights = tuple(weights)
    super().__init__()

  def evaluate(self, q):
    den = 1.0
    for p, w in zip(self.primes, self.weights):
      den *= float(w(float(arith.padic_abs(q, p))))
    return self.base(q) / den

  def values(self, Q):
    qs = np.arange(1, Q + 1, dtype=np.int64)
    den = np.ones(Q)
    for p, w in zip(self.primes, self.weights):
      den *= w(arith.padic_abs_array(qs, p))
    return self.base.values(Q) / den

  def metadata(self, criterion):
    if all(w.is_identity() for w in self.weights):
      return self.base.metadata(criterion)
    return UNKNOWN

  def spec(self):
    return { 'name': self.family, 'base': self.base.spec(),
             'primes': list(self.primes),
             'weights': [ w.spec() for w in self.weights ] }

def padic_weighted_psi(f, primes, weights):
  return PadicWeighted(f, primes, weights)

#
# config round trip
#

FAMILIES = ('power_log', 'zero', 'constant', 'table', 'indicator_support',
            'adversarial', 'conditional', 'padic_weighted')

SPEC_KEYS = {
  'power_log': ('name', 'c', 'a', 'b', 'divergence'),
  'zero': ('name',),
  'constant': ('name', 'c', 'divergence'),
  'table': ('name', 'values'),
  'indicator_support': ('name', 'base', 'support', 'heuristic', 'divergence'),
  'adversarial': ('name', 'k', 'c'),
  'conditional': ('name', 'base', 'anchors'),
  'padic_weighted': ('name', 'base', 'primes', 'weights'),
}

def from_spec(spec, field='family'):
  """
  Build a family from its configuration dictionary.
  Raises ConfigError naming the offending field.
  """
  if not isinstance(spec, dict):
    raise ConfigError('family must be an object', field=field)
  if 'name' not in spec:
    raise ConfigError('missing family name', field=field + '.name')
  name = spec['name']
  if not isinstance(name, str):
    raise ConfigError('family name must be a string', field=field + '.name')
  for k in spec:
    if k not in SPEC_KEYS.get(name, (k,)):
      raise ConfigError('unknown parameter for {}'.format(name), field='{}.{}'.format(field, k))
  div = spec.get('divergence', None)
  try:
    if name == 'power_log':
      return PowerLog(spec.get('c', 1.0), spec.get('a', 1.0), spec.get('b', 0.0),
                      divergence=div)
    if name == 'zero':
      return PowerLog(0.0, 0.0, 0.0)
    if name == 'constant':
      return PowerLog(spec.get('c', 1.0), 0.0, 0.0, divergence=div)
    if name == 'table':
      if 'values' not in spec:
        raise ConfigError('table family needs values', field=field + '.values')
      return Table(spec['values'])
    if name == 'indicator_support':
      base = from_spec(spec.get('base'), field + '.base')
      s = spec.get('support')
      if not isinstance(s, dict) or 'id' not in s:
        raise ConfigError('support must be an object with an id', field=field + '.support')
      params = { k: v for k, v in s.items() if k != 'id' }
      return IndicatorSupport(base, Support(s['id'], **params),
                              heuristic=spec.get('heuristic', False), divergence=div)
    if name == 'adversarial':
      return adversarial_family(spec.get('k', 6), spec.get('c', 1.0))
    if name == 'conditional':
      base = from_spec(spec.get('base'), field + '.base')
      return Conditional(base, spec.get('anchors', []))
    if name == 'padic_weighted':
      base = from_spec(spec.get('base'), field + '.base')
      ws = []
      for i, w in enumerate(spec.get('weights', [])):
        if not isinstance(w, dict) or 'kind' not in w:
          raise ConfigError('weight needs a kind', field='{}.weights[{}]'.format(field, i))
        ws.append(Weight(w['kind'], **{ k: v for k, v in w.items() if k != 'kind' }))
      return PadicWeighted(base, spec.get('primes', []), ws)
  except DomainError as e:
    raise ConfigError(str(e), field=field)
  except TypeError as e:
    raise ConfigError('bad parameters: {}'.format(e), field=field)
  raise ConfigError('unknown family {!r}'.format(name), field=field + '.name')

#
# operations
#

def psi_eval(f, q):
  return f(q)

def summands(f, c, Q):
  """
  Criterion summands for q = 1..Q.  Raises OverflowSumError on +inf.
  """
  if Q < 1:
    raise DomainError('Q must be >= 1, got {}'.format(Q))
  v = f.values(Q)
  bad = np.flatnonzero(~np.isfinite(v))
  if bad.size > 0:
    raise OverflowSumError(int(bad[0]) + 1)
  return v * c.weights(Q)

def partial_sum(f, c, Q):
  """
  sum_{q=1}^{Q} of the criterion's summand.
  """
  return float(math.fsum(summands(f, c, Q)))

def partial_sums(f, c, Q):
  """
  Running partial sums for Q' = 1..Q (non-decreasing).
  """
  return np.cumsum(summands(f, c, Q))

def cond1_ratio(f, n, Q):
  """
  (sum (phi/q)^n psi ln^(n-1) q) / (sum psi ln^(n-1) q) at truncation Q.
  """
  num = partial_sum(f, SumCriterion('phi_log_weighted', n), Q)
  den = partial_sum(f, SumCriterion('log_weighted', n), Q)
  if den <= 0.0:
    raise UndefinedRatioError('cond1 ratio undefined at Q={}: zero denominator'.format(Q))
  return num / den

def cond1_scan(f, n, grid):
  """
  Ratio at each Q of a sorted grid, with the running maximum as the
  limsup proxy.  Rows are (Q, ratio or None, running max or None).
  """
  grid = sorted(int(Q) for Q in grid)
  if not grid:
    return []
  top = grid[-1]
  num = partial_sums(f, SumCriterion('phi_log_weighted', n), top)
  den = partial_sums(f, SumCriterion('log_weighted', n), top)
  rows = []
  best = None
  for Q in grid:
    d = den[Q - 1]
    r = float(num[Q - 1] / d) if d > 0 else None
    if r is not None:
      best = r if best is None else max(best, r)
    rows.append((Q, r, best))
  return rows

def classify(f, c):
  return f.metadata(c)

def geometric_grid(Q0, Q, ratio=2):
  """
  Q0, Q0*ratio, ... capped at Q (Q always included).
  """
  if Q0 < 1 or Q < Q0:
    raise DomainError('bad grid range [{}, {}]'.format(Q0, Q))
  grid = []
  x = Q0
  while x < Q:
    grid.append(int(x))
    x = max(int(x) + 1, int(round(x * ratio)))
  grid.append(int(Q))
  return sorted(set(grid))
