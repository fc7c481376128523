"""
Finite probability spaces and subsets of their products, with exact
rational weights.  "Almost every" here means "up to zero-weight atoms".
"""
from fractions import Fraction

from mdalab.errors import ValidationError

NULL = 'Null'
FULL = 'Full'
NONTRIVIAL = 'Nontrivial'

def _fraction(w, i):
  try:
    return Fraction(w)
  except (TypeError, ValueError):
    raise ValidationError('weight {} is not a rational number: {!r}'.format(i, w))

class DiscreteSpace:
  def __init__(self, weights, atoms=None):
    self.weights = tuple(_fraction(w, i) for i, w in enumerate(weights))
    if not self.weights:
      raise ValidationError('a space needs at least one atom')
    if any(w < 0 for w in self.weights):
      raise ValidationError('weights must be non-negative')
    total = sum(self.weights, Fraction(0))
    if total != 1:
      raise ValidationError('weights sum to {}, not 1'.format(total))
    self.atoms = tuple(atoms) if atoms is not None else tuple(range(len(self.weights)))
    if len(self.atoms) != len(self.weights):
      raise ValidationError('{} atoms but {} weights'.format(len(self.atoms),
                                                             len(self.weights)))
    self._index = { a: i for i, a in enumerate(self.atoms) }

  @classmethod
  def uniform(cls, k):
    return cls([ Fraction(1, k) ] * k)

  def __len__(self):
    return len(self.weights)

  def index(self, atom):
    if atom not in self._index:
      raise ValidationError('unknown atom {!r}'.format(atom))
    return self._index[atom]

  def measure(self, indices):
    return sum((self.weights[i] for i in indices), Fraction(0))

class Triviality:
  def __init__(self, measure):
    self.measure = Fraction(measure)
    if self.measure == 0:
      self.kind = NULL
    elif self.measure == 1:
      self.kind = FULL
    else:
      self.kind = NONTRIVIAL

  def is_trivial(self):
    return self.kind != NONTRIVIAL

  def __eq__(self, other):
    return isinstance(other, Triviality) and self.measure == other.measure

  def __repr__(self):
    return 'Triviality({}, {})'.format(self.kind, self.measure)

class ProductSet:
  """
  S in X x Y as a boolean matrix: member[i][j] is True when
  (atom i of X, atom j of Y) lies in S.
  """
  def __init__(self, X, Y, member):
    rows = tuple(tuple(bool(v) for v in row) for row in member)
    if len(rows) != len(X) or any(len(r) != len(Y) for r in rows):
      raise ValidationError('membership matrix shape does not match {}x{}'.format(
                            len(X), len(Y)))
    self.X = X
    self.Y = Y
    self.member = rows

  def row(self, i):
    return [ j for j, v in enumerate(self.member[i]) if v ]

  def column(self, j):
    return [ i for i, row in enumerate(self.member) if row[j] ]
