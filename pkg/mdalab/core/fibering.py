"""
fibering - cross fibering on finite probability spaces.

For S in X x Y the product set is trivial (null or full) exactly when
mu-almost every fiber S_x and nu-almost every fiber S^y is trivial.
Everything here is exact: weights are Fractions and triviality is a
comparison with 0 and 1.  "Almost every" means "except on zero-weight
atoms".
"""
import logging
from fractions import Fraction
import numpy as np

from mdalab.errors import ValidationError
from mdalab.values import DiscreteSpace, ProductSet, Triviality

logger = logging.getLogger(__name__)

def fiber_x(S, x):
  """
  S_x as a list of Y atom indices.
  """
  return S.row(S.X.index(x))

def fiber_y(S, y):
  """
  S^y as a list of X atom indices.
  """
  return S.column(S.Y.index(y))

def fubini_orders(S):
  """
  (mu x nu)(S) summed over x first and over y first, as Fractions.
  """
  by_x = sum((S.X.weights[i] * S.Y.measure(S.row(i)) for i in range(len(S.X))),
             Fraction(0))
  by_y = sum((S.Y.weights[j] * S.X.measure(S.column(j)) for j in range(len(S.Y))),
             Fraction(0))
  return by_x, by_y

def product_measure(S):
  """
  (mu x nu)(S), by both iteration orders.
  """
  by_x, by_y = fubini_orders(S)
  if by_x != by_y:
    raise RuntimeError('iterated integrals disagree: {} != {}'.format(by_x, by_y))
  return by_x

class FiberReport:
  def __init__(self, left, right_x, right_y):
    self.left = left
    self.right_x = right_x
    self.right_y = right_y
    self.equivalence_holds = left.is_trivial() == (right_x == 1 and right_y == 1)

  def verdict(self):
    return '{} / equivalence {}'.format(self.left.kind,
           'holds' if self.equivalence_holds else 'FAILS')

  def as_dict(self):
    return { 'left': self.left.kind, 'measure': str(self.left.measure),
             'right_x': str(self.right_x), 'right_y': str(self.right_y),
             'equivalence_holds': self.equivalence_holds }

def cross_fibering_check(S):
  left = Triviality(product_measure(S))
  right_x = S.X.measure(i for i in range(len(S.X))
                        if Triviality(S.Y.measure(S.row(i))).is_trivial())
  right_y = S.Y.measure(j for j in range(len(S.Y))
                        if Triviality(S.X.measure(S.column(j))).is_trivial())
  report = FiberReport(left, right_x, right_y)
  if not report.equivalence_holds:
    logger.error('cross fibering equivalence failed: {}'.format(report.as_dict()))
  return report

class Decomposition:
  """
  Atoms split by fiber class, with the two evaluations of the product
  measure of S n (X0 x Y1).
  """
  def __init__(self, S):
    classes = { 'Null': 0, 'Full': 1, 'Nontrivial': 2 }
    xs = ([], [], [])
    ys = ([], [], [])
    for i in range(len(S.X)):
      xs[classes[Triviality(S.Y.measure(S.row(i))).kind]].append(i)
    for j in range(len(S.Y)):
      ys[classes[Triviality(S.X.measure(S.column(j))).kind]].append(j)
    self.X0, self.X1, self.Xnt = xs
    self.Y0, self.Y1, self.Ynt = ys
    X0 = set(self.X0)
    Y1 = set(self.Y1)
    self.by_y = sum((S.Y.weights[j] * S.X.measure(i for i in S.column(j) if i in X0)
                     for j in self.Y1), Fraction(0))
    self.by_x = sum((S.X.weights[i] * S.Y.measure(j for j in S.row(i) if j in Y1)
                     for i in self.X0), Fraction(0))
    self.restricted = sum((S.X.weights[i] * S.Y.weights[j]
                           for i in self.X0 for j in self.Y1 if S.member[i][j]),
                          Fraction(0))
    self.consistent = self.by_x == self.by_y == self.restricted
    mx = [ S.X.measure(c) for c in xs ]
    my = [ S.Y.measure(c) for c in ys ]
    self.rectangle = mx[0] * my[1]
    # four positive classes with a.e. trivial fibers cannot happen
    self.impossible_case = all(m > 0 for m in (mx[0], mx[1], my[0], my[1])) and \
                           mx[2] == 0 and my[2] == 0

  def as_tuple(self):
    return (self.X0, self.X1, self.Xnt, self.Y0, self.Y1, self.Ynt)

def decompose(S):
  return Decomposition(S)

def non_reversibility_witness():
  """
  Uniform 2x2 and S = {a} x Y: every S_x is trivial, no S^y is,
  and S has measure 1/2.
  """
  X = DiscreteSpace.uniform(2)
  Y = DiscreteSpace.uniform(2)
  return ProductSet(X, Y, [ [ True, True ], [ False, False ] ])

def _fraction(v, where):
  try:
    return Fraction(v)
  except (TypeError, ValueError, ZeroDivisionError):
    raise ValidationError('{}: cannot read {!r} as a rational'.format(where, v))

def product_set_from_spec(spec):
  """
  { "x_weights": [...], "y_weights": [...], "member": [[0,1,...], ...] }
  with optional "x_atoms" / "y_atoms".  Weights may be "p/q" strings.
  """
  for k in ('x_weights', 'y_weights', 'member'):
    if k not in spec:
      raise ValidationError('fiber input needs {!r}'.format(k))
  X = DiscreteSpace([ _fraction(w, 'x_weights[{}]'.format(i))
                      for i, w in enumerate(spec['x_weights']) ], spec.get('x_atoms'))
  Y = DiscreteSpace([ _fraction(w, 'y_weights[{}]'.format(i))
                      for i, w in enumerate(spec['y_weights']) ], spec.get('y_atoms'))
  return ProductSet(X, Y, spec['member'])

#
# exhaustive search
#

class ExhaustiveReport:
  def __init__(self, k, subsets):
    self.k = k
    self.subsets = subsets
    self.weight_samples = 0
    self.zero_atom_samples = 0
    self.checked = 0
    self.equivalence_failures = 0
    self.fubini_failures = 0
    self.impossible_hits = 0
    self.exact_checks = 0
    self.exact_failures = 0

  def ok(self):
    return self.equivalence_failures == 0 and self.fubini_failures == 0 and \
           self.impossible_hits == 0 and self.exact_failures == 0

  def summary(self):
    return '{} subsets x {} weight samples: {}'.format(self.subsets, self.weight_samples,
           'all equivalences hold' if self.ok() else
           '{} equivalence failures, {} Fubini failures, {} impossible cases, '
           '{} exact mismatches'.format(self.equivalence_failures, self.fubini_failures,
                                        self.impossible_hits, self.exact_failures))

  def as_dict(self):
    return { 'k': self.k, 'subsets': self.subsets, 'weight_samples': self.weight_samples,
             'zero_atom_samples': self.zero_atom_samples, 'checked': self.checked,
             'equivalence_failures': self.equivalence_failures,
             'fubini_failures': self.fubini_failures,
             'impossible_hits': self.impossible_hits,
             'exact_checks': self.exact_checks,
             'exact_failures': self.exact_failures }

def random_weights(rng, k, zero=False):
  """
  Exact weights a_i / A from small random integers, at least one positive.
  zero forces a zero-weight atom.
  """
  while True:
    a = rng.integers(0, 5, size=k)
    if zero:
      a[rng.integers(0, k)] = 0
    if a.sum() > 0:
      return a

def all_subsets(k):
  """
  Every k x k boolean matrix, shape (2^(k*k), k, k).
  """
  cells = k * k
  codes = np.arange(2 ** cells, dtype=np.int64)
  bits = (codes[:, None] >> np.arange(cells)) & 1
  return bits.reshape(-1, k, k).astype(np.int64)

def exhaustive_check(k, weight_samples=25, seed=0, exact=None):
  """
  All 2^(k^2) subsets of a k x k space under random exact weights.
  Works in integers: with mu = a/A and nu = b/B every measure is a
  ratio with a known denominator.  With exact set (default for k <= 3)
  every subset is also rebuilt as a ProductSet and both Fraction
  iteration orders, and both decomposition evaluations, must match the
  integer measure.
  """
  if exact is None:
    exact = k <= 3
  if k < 1 or k > 4:
    raise ValidationError('exhaustive size must be 1..4, got {}'.format(k))
  rng = np.random.default_rng(seed)
  masks = all_subsets(k)
  rep = ExhaustiveReport(k, masks.shape[0])
  for s in range(weight_samples):
    a = random_weights(rng, k, zero=(s % 2 == 0))
    b = random_weights(rng, k, zero=(s % 4 == 1))
    A, B = int(a.sum()), int(b.sum())
    rows = masks @ b                                  # B * nu(S_x)
    cols = np.einsum('i,mij->mj', a, masks)           # A * mu(S^y)
    by_x = rows @ a
    by_y = cols @ b
    rep.fubini_failures += int(np.count_nonzero(by_x != by_y))
    left_trivial = (by_x == 0) | (by_x == A * B)
    tx = (rows == 0) | (rows == B)
    ty = (cols == 0) | (cols == A)
    right = ((tx @ a) == A) & ((ty @ b) == B)
    rep.equivalence_failures += int(np.count_nonzero(left_trivial != right))
    x0 = ((rows == 0) * a).sum(axis=1)
    x1 = ((rows == B) * a).sum(axis=1)
    xn = (~tx * a).sum(axis=1)
    y0 = ((cols == 0) * b).sum(axis=1)
    y1 = ((cols == A) * b).sum(axis=1)
    yn = (~ty * b).sum(axis=1)
    rep.impossible_hits += int(np.count_nonzero((x0 > 0) & (x1 > 0) & (y0 > 0) &
                                                (y1 > 0) & (xn == 0) & (yn == 0)))
    if exact:
      _exact_pass(rep, masks, a, b, by_x)
    rep.weight_samples += 1
    rep.zero_atom_samples += int((a == 0).any() or (b == 0).any())
    rep.checked += masks.shape[0]
  logger.info('exhaustive {}x{}: {}'.format(k, k, rep.summary()))
  return rep

def space_pair(a, b):
  """
  DiscreteSpace pair from integer weight vectors (as exhaustive_check draws them).
  """
  return (DiscreteSpace([ Fraction(int(v), int(a.sum())) for v in a ]),
          DiscreteSpace([ Fraction(int(v), int(b.sum())) for v in b ]))

def _exact_pass(rep, masks, a, b, by_x):
  X, Y = space_pair(a, b)
  AB = int(a.sum()) * int(b.sum())
  for m in range(masks.shape[0]):
    S = ProductSet(X, Y, masks[m].tolist())
    fx, fy = fubini_orders(S)
    if not (fx == fy == Fraction(int(by_x[m]), AB) and decompose(S).consistent):
      rep.exact_failures += 1
    rep.exact_checks += 1
